// Acceptance gate: eleven criteria, each printed as a single PASS/FAIL
// line with its runtime. Tolerances are pinned here: exact identities at
// literal equality, quadrature-backed density checks at their stated
// absolute bounds, Monte Carlo means at 4 standard errors, distributional
// checks at KS p > 0.01 with 1e4 paths.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "dunkl/chaos.hpp"
#include "dunkl/checks.hpp"
#include "dunkl/config.hpp"
#include "dunkl/intertwine.hpp"
#include "dunkl/rng.hpp"

using namespace dunkl;

namespace {

struct Criterion {
  int id;
  std::string label;
  bool passed = true;
  std::vector<std::string> failures;
  double seconds = 0;
};

int g_failed = 0;

void consume(Criterion& crit, const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    if (!r.passed) {
      crit.passed = false;
      crit.failures.push_back(r.name + " (stat " + std::to_string(r.statistic) + ", threshold " +
                              std::to_string(r.threshold) + ")");
    }
  }
}

void consume(Criterion& crit, const CheckResult& r) { consume(crit, std::vector<CheckResult>{r}); }

template <class Fn>
void run_criterion(int id, const std::string& label, Fn&& fn) {
  Criterion crit{id, label};
  auto start = std::chrono::steady_clock::now();
  fn(crit);
  crit.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s criterion %2d: %s  [%.1fs]\n", crit.passed ? "PASS" : "FAIL", id, label.c_str(),
              crit.seconds);
  if (!crit.passed) {
    ++g_failed;
    for (const auto& f : crit.failures) std::printf("    failed: %s\n", f.c_str());
  }
  std::fflush(stdout);
}

constexpr std::size_t kPaths = 10000;
constexpr uint64_t kSeed = 20260810;
constexpr int kThreads = 0;  // hardware

}  // namespace

int main() {
  run_criterion(1, "exact operator suite (commutation, degree, k->0, two Laplacian routes)",
                [](Criterion& c) { consume(c, battery::operator_suite()); });

  run_criterion(2, "intertwining suite (defining relation to degree 8 / B2 degree 5, invertibility)",
                [](Criterion& c) { consume(c, battery::intertwine_suite()); });

  run_criterion(3, "space-time harmonicity of the Dunkl-Hermite family, exact",
                [](Criterion& c) { consume(c, battery::harmonicity_suite()); });

  run_criterion(4, "density suite rank-1 k in {3/5, 1, 2}: mass, mean, semigroup, normalization constant",
                [](Criterion& c) {
                  consume(c, battery::density_suite({Rat(3, 5), Rat(1), Rat(2)}, kSeed));
                  consume(c, battery::radial_identity_suite());
                });

  run_criterion(5, "Bessel radial law by one-sample KS at 1e4 paths (rank-1 x3, product, B2)",
                [](Criterion& c) {
                  const double dt = 5e-4;
                  int i = 0;
                  for (const Rat& k : {Rat(3, 5), Rat(1), Rat(2)}) {
                    consume(c, battery::radial_law_ks(SystemSpec{SystemKind::Rank1, 1, 1, {{k}}}, {1.0},
                                                      kPaths, dt, derive_seed(kSeed, "c5" + std::to_string(i++)),
                                                      kThreads));
                  }
                  consume(c, battery::radial_law_ks(SystemSpec{SystemKind::ProductRank1, 2, 2, {{Rat(1), Rat(1)}}},
                                                    {1.0, 0.7}, kPaths, dt, derive_seed(kSeed, "c5p"), kThreads));
                  consume(c, battery::radial_law_ks(SystemSpec{SystemKind::TypeB, 2, 2, {{Rat(1), Rat(1)}}},
                                                    {1.1, 0.4}, kPaths, dt, derive_seed(kSeed, "c5b"), kThreads));
                });

  run_criterion(6, "martingale + decomposition suite (mean, residual halving, normal bracket, cross-bracket)",
                [](Criterion& c) {
                  consume(c, battery::martingale_suite(Rat(1), 1.0, kPaths, 1e-3,
                                                       derive_seed(kSeed, "c6"), kThreads));
                });

  run_criterion(7, "skew-product cross-validation by two-sample KS, k in {3/5, 1, 2}",
                [](Criterion& c) {
                  int i = 0;
                  for (const Rat& k : {Rat(3, 5), Rat(1), Rat(2)}) {
                    consume(c, battery::skew_cross_validation(k, 1.0, kPaths, 5e-4,
                                                              derive_seed(kSeed, "c7" + std::to_string(i++)),
                                                              kThreads));
                  }
                  consume(c, battery::skew_radial_ks(Rat(1), 1.0, kPaths, 5e-4, derive_seed(kSeed, "c7r"),
                                                     kThreads));
                });

  run_criterion(8, "jump functionals: compensated count, stabilization at k=1, divergence at k=1/4",
                [](Criterion& c) {
                  consume(c, battery::jump_functional_suite(kPaths, 1e-3, derive_seed(kSeed, "c8"), kThreads));
                });

  run_criterion(9, "Dunkl-Hermite martingale means, |nu| <= 3, rank-1 and product d=2 (target 4/3)",
                [](Criterion& c) {
                  consume(c, battery::hermite_suite(SystemSpec{SystemKind::Rank1, 1, 1, {{Rat(1)}}}, {Rat(1)},
                                                    3, kPaths, 1e-3, derive_seed(kSeed, "c9a"), kThreads));
                  consume(c, battery::hermite_suite(SystemSpec{SystemKind::ProductRank1, 2, 2, {{Rat(1), Rat(1)}}},
                                                    {Rat(1), Rat(1, 2)}, 3, kPaths, 1e-3,
                                                    derive_seed(kSeed, "c9b"), kThreads));
                  // pinned value: Q_(2)(1, -1) = 4/3 at k = 1
                  auto table = IntertwineTableQ::build(build_rank1({{Rat(1)}}), 2);
                  auto fam = hermite_family(table, {2});
                  Q2 target = fam.Q.eval(std::vector<Q2>{Q2(Rat(1))}, Q2(Rat(-1)));
                  if (!(target == Q2(Rat(4, 3)))) {
                    c.passed = false;
                    c.failures.push_back("Q_(2)(1,-1) != 4/3");
                  }
                });

  run_criterion(10, "chaos suite: reconstruction, isometry, orthogonality, first-peel integrands exact",
                [](Criterion& c) {
                  consume(c, battery::chaos_suite(Rat(1), Rat(1), kPaths, 1e-3, derive_seed(kSeed, "c10"),
                                                  kThreads));
                });

  run_criterion(11, "determinism: suite=all twice with one seed gives byte-identical reports",
                [](Criterion& c) {
                  ExperimentConfig config;
                  config.system = SystemSpec{SystemKind::Rank1, 1, 1, {{Rat(1)}}};
                  config.x0 = {Rat(1)};
                  config.T = Rat(1);
                  config.dt = Rat(1, 500);
                  config.n_paths = 500;
                  config.seed = kSeed;
                  config.threads = kThreads;
                  namespace fs = std::filesystem;
                  config.output_dir = (fs::temp_directory_path() / "dunkl_acceptance_all").string();
                  fs::remove_all(config.output_dir);
                  RunReport first = run_suite(config, "all");
                  RunReport second = run_suite(config, "all");
                  if (report_to_json(first) != report_to_json(second)) {
                    c.passed = false;
                    c.failures.push_back("reports differ between identical runs");
                  }
                  for (const auto& r : first.checks) {
                    if (r.name == "registry.coverage" && !r.passed) {
                      c.passed = false;
                      c.failures.push_back("coverage registry: " + r.detail);
                    }
                  }
                });

  std::printf("%s: %d of 11 criteria failed\n", g_failed == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failed);
  return g_failed == 0 ? 0 : 1;
}
