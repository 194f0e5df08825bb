#pragma once

// The verification battery: every check is a named, parameterized function
// returning a CheckResult, shared between the CLI suites and the
// acceptance runner. Statistical thresholds live in one place.

#include <cstdint>
#include <string>
#include <vector>

#include "dunkl/config.hpp"
#include "dunkl/rational.hpp"

namespace dunkl {

// Central false-alarm budget: Monte Carlo means at 4 standard errors,
// distributional tests at p > 0.01, exact checks at literal equality
// (1e-10 where a float route is unavoidable).
struct Thresholds {
  static constexpr double mc_sigma = 4.0;
  static constexpr double ks_p = 0.01;
  static constexpr double float_exact = 1e-10;
};

struct CheckResult {
  std::string name;
  std::string kind;  // exact | mc_mean | ks | quadrature | structure
  double statistic = 0;
  double threshold = 0;
  double se = 0;
  bool exact = false;
  bool passed = false;
  std::string detail;
  std::vector<std::string> covers;
};

struct RunReport {
  std::string version;
  std::string suite;
  uint64_t seed = 0;
  std::string config_digest;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> timings_ms;  // kept out of the canonical report

  bool all_passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

inline const char* kVersion = "0.1.0";

namespace battery {

// exact symbolic suites (fixed system battery matching the calculus checks)
std::vector<CheckResult> operator_suite();
std::vector<CheckResult> intertwine_suite();
std::vector<CheckResult> harmonicity_suite();
std::vector<CheckResult> radial_identity_suite();

// density: rank-1 across the given multiplicities
std::vector<CheckResult> density_suite(const std::vector<Rat>& ks, uint64_t seed);

// path-level statistics
CheckResult radial_law_ks(const SystemSpec& spec, const std::vector<double>& x0, std::size_t n_paths,
                          double dt, uint64_t seed, int threads);
std::vector<CheckResult> martingale_suite(const Rat& k, double x0, std::size_t n_paths, double dt,
                                          uint64_t seed, int threads);
CheckResult skew_cross_validation(const Rat& k, double x0, std::size_t n_paths, double dt, uint64_t seed,
                                  int threads);
CheckResult skew_radial_ks(const Rat& k, double x0, std::size_t n_paths, double dt, uint64_t seed,
                           int threads);
std::vector<CheckResult> jump_functional_suite(std::size_t n_paths, double dt, uint64_t seed, int threads);
CheckResult scaling_property_ks(const Rat& k, double x0, double c, std::size_t n_paths, double dt,
                                uint64_t seed, int threads);
CheckResult zero_multiplicity_paths(std::size_t n_paths, double dt, uint64_t seed, int threads);
std::vector<CheckResult> ito_residual_suite(std::size_t n_paths, double dt, uint64_t seed, int threads);

// Dunkl-Hermite martingale checks (Eq-level conditional expectations)
std::vector<CheckResult> hermite_suite(const SystemSpec& spec, const std::vector<Rat>& x0, int max_total_degree,
                                       std::size_t n_paths, double dt, uint64_t seed, int threads);

// chaos suite on rank-1
std::vector<CheckResult> chaos_suite(const Rat& k, const Rat& x0, std::size_t n_paths, double dt,
                                     uint64_t seed, int threads);

}  // namespace battery

// CLI-facing orchestration: suite in {symbolic, density, paths, hermite,
// chaos, all}.
RunReport run_suite(const ExperimentConfig& config, const std::string& suite);

// Canonical JSON (no timings; byte-stable for fixed config and seed).
std::string report_to_json(const RunReport& report);
// Writes report.json, timings.json and returns the report path.
std::string write_report_files(const RunReport& report, const std::string& out_dir);

// Fixture dump: generalized monomials, space-time Hermite polynomials and
// their integrands in canonical text form. Returns the file path.
std::string write_fixtures(const ExperimentConfig& config, const std::string& out_dir);

// Path CSV dumps (grid series and jump log). Returns the two file paths.
std::vector<std::string> write_simulation_csv(const ExperimentConfig& config, const std::string& out_dir,
                                              std::size_t n_paths_cap = 4);

}  // namespace dunkl
