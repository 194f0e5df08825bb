// Command-line front end: verification suites, fixture dumps, path dumps,
// density grids and chaos expansions driven by a config file.
//
// Exit codes: 0 success / all checks passed, 1 check failure, 2 usage or
// configuration error.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dunkl/chaos.hpp"
#include "dunkl/checks.hpp"
#include "dunkl/config.hpp"
#include "dunkl/density.hpp"
#include "dunkl/intertwine.hpp"

namespace {

std::string resolve_output_dir(const dunkl::ExperimentConfig& config) {
  if (const char* env = std::getenv("DUNKL_OUTPUT_DIR"); env && *env) return env;
  return config.output_dir;
}

int run_command(const std::string& config_path, const std::string& suite) {
  dunkl::ExperimentConfig config = dunkl::load_config(config_path);
  dunkl::RunReport report = dunkl::run_suite(config, suite);
  std::string out_dir = resolve_output_dir(config);
  std::string path = dunkl::write_report_files(report, out_dir);
  std::size_t passed = 0;
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (c.kind == "mc_mean") {
      std::cout << "  (stat " << c.statistic << " target " << c.threshold << " se " << c.se << ")";
    } else {
      std::cout << "  (stat " << c.statistic << " threshold " << c.threshold << ")";
    }
    std::cout << "\n";
    passed += c.passed ? 1 : 0;
  }
  std::cout << passed << "/" << report.checks.size() << " checks passed; report: " << path << "\n";
  return report.all_passed() ? 0 : 1;
}

int fixtures_command(const std::string& config_path) {
  dunkl::ExperimentConfig config = dunkl::load_config(config_path);
  std::string path = dunkl::write_fixtures(config, resolve_output_dir(config));
  std::cout << "fixtures: " << path << "\n";
  return 0;
}

int simulate_command(const std::string& config_path, std::size_t n_paths) {
  dunkl::ExperimentConfig config = dunkl::load_config(config_path);
  auto files = dunkl::write_simulation_csv(config, resolve_output_dir(config), n_paths);
  for (const auto& f : files) std::cout << f << "\n";
  return 0;
}

int density_command(const std::string& config_path, std::vector<double> x, double t, double half_width,
                    int n_points) {
  dunkl::ExperimentConfig config = dunkl::load_config(config_path);
  auto rs = dunkl::build_configured_system(config);
  int table_degree = rs.dim == 1 ? 64 : std::max(config.n_max, 16);
  auto table = dunkl::IntertwineTableQ::build(rs, table_degree);
  dunkl::DensityContext ctx = dunkl::make_density_context(table, dunkl::CkMethod::Auto, config.seed);
  if (x.empty()) x = config.x0_double();
  if (static_cast<int>(x.size()) != rs.dim) throw std::invalid_argument("--x needs " + std::to_string(rs.dim) + " coordinates");
  namespace fs = std::filesystem;
  fs::path dir = resolve_output_dir(config);
  fs::create_directories(dir);
  fs::path out_path = dir / "density.csv";
  std::ofstream out(out_path, std::ios::binary);
  out.precision(17);
  out << "y,p\n";
  if (rs.dim != 1) throw std::invalid_argument("density grids are emitted for d = 1 systems");
  for (int i = 0; i <= n_points; ++i) {
    double y = -half_width + 2.0 * half_width * i / n_points;
    std::vector<double> yv{y};
    out << y << "," << dunkl::transition_density(ctx, x, yv, t) << "\n";
  }
  std::cout << out_path.string() << "\n";
  return 0;
}

int expand_command(const std::string& config_path, const std::vector<std::string>& nu_args,
                   const std::vector<std::string>& time_args) {
  dunkl::ExperimentConfig config = dunkl::load_config(config_path);
  auto rs = dunkl::build_configured_system(config);
  auto table = dunkl::IntertwineTableQ::build(rs, config.n_max);
  dunkl::FunctionalSpec spec;
  if (nu_args.size() % rs.dim != 0 || nu_args.empty()) {
    throw std::invalid_argument("--nu needs a multiple of dim entries");
  }
  std::size_t l = nu_args.size() / rs.dim;
  if (time_args.size() != l) throw std::invalid_argument("--times must list one time per multi-index");
  for (std::size_t j = 0; j < l; ++j) {
    std::vector<uint32_t> nu;
    for (int i = 0; i < rs.dim; ++i) nu.push_back(static_cast<uint32_t>(std::stoul(nu_args[j * rs.dim + i])));
    spec.nus.push_back(std::move(nu));
    spec.times.push_back(dunkl::parse_rational(time_args[j]));
  }
  dunkl::ChaosExpansion expansion = dunkl::chaos_expand(table, config.x0, spec);
  std::cout << "constant = " << expansion.constant.to_string() << "\n";
  for (std::size_t a = 0; a < expansion.terms.size(); ++a) {
    const auto& term = expansion.terms[a];
    std::cout << "term " << a << ": legs [";
    for (std::size_t j = 0; j < term.legs.size(); ++j) {
      const auto& leg = term.legs[j];
      if (j) std::cout << ", ";
      if (leg.eps < rs.dim) {
        std::cout << "B" << leg.eps + 1;
      } else {
        std::cout << "M" << leg.eps - rs.dim;
      }
      std::cout << "(" << dunkl::to_string(leg.lower) << ",";
      if (leg.upper_is_prev) {
        std::cout << "u" << j;
      } else {
        std::cout << dunkl::to_string(leg.upper);
      }
      std::cout << ")";
    }
    std::cout << "] sqrt_k2 = " << dunkl::to_string(term.k_product)
              << " f = " << term.coeff.to_string() << "\n";
    std::cout << "  L2^2 = " << dunkl::term_l2_squared(term) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dunkl process toolkit: symbolic calculus, densities, path simulation, chaos expansions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string suite = "all";
  auto* run = app.add_subcommand("run", "run a verification suite and write report.json");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--suite", suite, "symbolic|density|paths|hermite|chaos|all");

  std::string fx_config;
  auto* fixtures = app.add_subcommand("fixtures", "dump generalized monomials and Hermite families");
  fixtures->add_option("--config", fx_config, "config file")->required();

  std::string sim_config;
  std::size_t sim_paths = 4;
  auto* simulate = app.add_subcommand("simulate", "write path and jump-log CSV dumps");
  simulate->add_option("--config", sim_config, "config file")->required();
  simulate->add_option("--paths", sim_paths, "number of paths to dump");

  std::string den_config;
  std::vector<double> den_x;
  double den_t = 1.0, den_width = 6.0;
  int den_points = 200;
  auto* density = app.add_subcommand("density", "emit a (y, p_t(x, y)) grid as CSV");
  density->add_option("--config", den_config, "config file")->required();
  density->add_option("--x", den_x, "start point (defaults to x0)");
  density->add_option("--t", den_t, "time");
  density->add_option("--width", den_width, "half width of the y grid");
  density->add_option("--points", den_points, "grid points");

  std::string ex_config;
  std::vector<std::string> ex_nu, ex_times;
  auto* expand = app.add_subcommand("expand", "print the chaos representation of prod m_nu(X_t)");
  expand->add_option("--config", ex_config, "config file")->required();
  expand->add_option("--nu", ex_nu, "multi-indices, dim entries each")->required();
  expand->add_option("--times", ex_times, "observation times (rationals)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return run_command(config_path, suite);
    if (fixtures->parsed()) return fixtures_command(fx_config);
    if (simulate->parsed()) return simulate_command(sim_config, sim_paths);
    if (density->parsed()) return density_command(den_config, den_x, den_t, den_width, den_points);
    if (expand->parsed()) return expand_command(ex_config, ex_nu, ex_times);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
