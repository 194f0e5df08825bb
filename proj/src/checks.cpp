// Monte Carlo check batteries, suite orchestration, artifacts and report
// serialization.

#include "dunkl/checks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "dunkl/bessel.hpp"
#include "dunkl/chaos.hpp"
#include "dunkl/compiled.hpp"
#include "dunkl/density.hpp"
#include "dunkl/dunkl_ops.hpp"
#include "dunkl/intertwine.hpp"
#include "dunkl/pathsim.hpp"
#include "dunkl/quadrature.hpp"
#include "dunkl/rng.hpp"
#include "dunkl/stats.hpp"

namespace dunkl {

namespace battery {

namespace {

CheckResult mc_mean_result(std::string name, const MeanSE& stat, double target, std::string detail,
                           std::vector<std::string> covers) {
  CheckResult r;
  r.name = std::move(name);
  r.kind = "mc_mean";
  r.statistic = stat.mean;
  r.se = stat.se;
  r.threshold = target;
  r.passed = std::abs(stat.mean - target) <= Thresholds::mc_sigma * stat.se;
  r.detail = std::move(detail);
  r.covers = std::move(covers);
  return r;
}

CheckResult ks_result(std::string name, double p, std::string detail, std::vector<std::string> covers) {
  CheckResult r;
  r.name = std::move(name);
  r.kind = "ks";
  r.statistic = p;
  r.threshold = Thresholds::ks_p;
  r.passed = p > Thresholds::ks_p;
  r.detail = std::move(detail);
  r.covers = std::move(covers);
  return r;
}

CheckResult bound_result(std::string name, std::string kind, double value, double bound, bool below,
                         std::string detail, std::vector<std::string> covers) {
  CheckResult r;
  r.name = std::move(name);
  r.kind = std::move(kind);
  r.statistic = value;
  r.threshold = bound;
  r.passed = below ? value <= bound : value >= bound;
  r.detail = std::move(detail);
  r.covers = std::move(covers);
  return r;
}

std::vector<double> compact(std::vector<double> v) {
  std::size_t w = 0;
  for (double x : v) {
    if (!std::isnan(x)) v[w++] = x;
  }
  v.resize(w);
  return v;
}

// CDF of the Bessel radial law evaluated at the sorted sample points by
// cumulative segment quadrature.
std::vector<double> bessel_cdf_at(std::vector<double> sorted, double dim_n, double r0, double t) {
  std::vector<double> cdf(sorted.size());
  double acc = 0, prev = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double r = sorted[i];
    if (r > prev) {
      acc += integrate_or_throw([&](double s) { return bessel_transition_density(dim_n, r0, s, t); }, prev, r,
                                1e-9, 600);
      prev = r;
    }
    cdf[i] = std::min(1.0, acc);
  }
  return cdf;
}

double norm2(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace

std::vector<CheckResult> density_suite(const std::vector<Rat>& ks, uint64_t seed) {
  std::vector<CheckResult> out;
  for (const Rat& k : ks) {
    const std::string tag = "[k=" + to_string(k) + "]";
    auto table = IntertwineTableQ::build(build_rank1({{k}}), 64);
    DensityContext ctx = make_density_context(table, CkMethod::ClosedForm, seed);
    const double x0 = 1.0, t = 1.0;
    std::vector<double> x{x0};

    {
      CkEstimate closed = compute_ck(ctx.sys, CkMethod::ClosedForm, seed);
      CkEstimate quad = compute_ck(ctx.sys, CkMethod::Quadrature, seed);
      double rel = std::abs(closed.value - quad.value) / closed.value;
      out.push_back(bound_result("density.ck_closed_vs_quadrature" + tag, "quadrature", rel, 1e-8, true,
                                 "closed " + fmt(closed.value) + " vs quadrature " + fmt(quad.value),
                                 {"density.compute_ck"}));
    }
    {
      double upper = std::abs(x0) + 9.0 * std::sqrt(t);
      double mass = integrate_or_throw(
          [&](double y) {
            std::vector<double> yv{y};
            return transition_density(ctx, x, yv, t);
          },
          -upper, upper, 1e-7, 20000);
      out.push_back(bound_result("density.normalization" + tag, "quadrature", std::abs(mass - 1.0), 1e-4, true,
                                 "integral of p_t(1, .) over y", {"density.transition_density", "density.weight"}));
      double mean = integrate_or_throw(
          [&](double y) {
            std::vector<double> yv{y};
            return y * transition_density(ctx, x, yv, t);
          },
          -upper, upper, 1e-7, 20000);
      out.push_back(bound_result("density.martingale_mean" + tag, "quadrature", std::abs(mean - x0), 1e-4, true,
                                 "integral of y p_t(1, y)", {"density.transition_density"}));
    }
    {
      const double s1 = 0.5, s2 = 0.5;
      std::vector<double> y{0.7};
      double upper = 9.0;
      double composed = integrate_or_throw(
          [&](double z) {
            std::vector<double> zv{z};
            return transition_density(ctx, x, zv, s1) * transition_density(ctx, zv, y, s2);
          },
          -upper, upper, 1e-7, 20000);
      double direct = transition_density(ctx, x, y, s1 + s2);
      out.push_back(bound_result("density.chapman_kolmogorov" + tag, "quadrature", std::abs(composed - direct),
                                 1e-3, true, "semigroup composition at s = t = 1/2",
                                 {"density.transition_density"}));
    }
    {
      double worst = 0;
      for (int i = 1; i <= 50; ++i) {
        double r = 0.08 * i * (1.0 + std::sqrt(t));
        std::vector<double> yp{r}, ym{-r};
        double folded = transition_density(ctx, x, yp, t) + transition_density(ctx, x, ym, t);
        double reference = radial_density(ctx, std::abs(x0), r, t);
        worst = std::max(worst, std::abs(folded - reference));
      }
      out.push_back(bound_result("density.radial_consistency" + tag, "quadrature", worst, 1e-4, true,
                                 "folded density vs the Bessel law of dimension " + fmt(ctx.bessel_dimension),
                                 {"density.radial_density", "density.transition_density"}));
    }
    {
      double upper = std::abs(x0) + 9.0 * std::sqrt(t);
      double mass = integrate_or_throw([&](double y) {
        std::vector<double> yv{y};
        return chamber_density(ctx, x, yv, t);
      }, 0.0, upper, 1e-7, 20000);
      out.push_back(bound_result("density.chamber_normalization" + tag, "quadrature", std::abs(mass - 1.0),
                                 1e-4, true, "chamber density integrates to one over the half-line",
                                 {"density.w_radial_density", "rootsys.chamber_project"}));
      double rmass = integrate_or_throw([&](double r) { return radial_density(ctx, std::abs(x0), r, t); }, 0.0,
                                        upper, 1e-9, 20000);
      out.push_back(bound_result("density.radial_normalization" + tag, "quadrature", std::abs(rmass - 1.0),
                                 1e-6, true, "Bessel transition density integrates to one",
                                 {"density.radial_density"}));
    }
    {
      PathRng rng(derive_seed(seed, "positivity" + tag), 0);
      bool ok = true;
      int n_pts = 170;
      for (int i = 0; i < n_pts; ++i) {
        double xi = 4.0 * rng.uniform() - 2.0;
        double yi = 4.0 * rng.uniform() - 2.0;
        double ti = 0.2 + 2.0 * rng.uniform();
        std::vector<double> xv{xi}, yv{yi};
        if (!(transition_density(ctx, xv, yv, ti) > 0.0)) ok = false;
      }
      CheckResult r = bound_result("density.positivity" + tag, "structure", ok ? 1.0 : 0.0, 1.0, false,
                                   "strict positivity at random admissible points",
                                   {"density.transition_density", "intertwine.dunkl_kernel"});
      out.push_back(r);
    }
    {
      // x = 0 reduction: kernel factor is exactly one
      std::vector<double> zero{0.0}, y{0.9};
      double got = transition_density(ctx, zero, y, t);
      double expect = std::exp(-0.9 * 0.9 / (2 * t)) * dunkl_weight(ctx.sys, y) /
                      (ctx.ck * std::pow(t, ctx.gamma + 0.5));
      out.push_back(bound_result("density.from_origin" + tag, "exact", std::abs(got - expect) / expect,
                                 Thresholds::float_exact, true, "p_t(0, y) reduction",
                                 {"density.transition_density"}));
    }
  }
  {
    // zero multiplicity: Gaussian heat kernel
    auto table = IntertwineTableQ::build(build_rank1({{Rat(0)}}), 48);
    DensityContext ctx = make_density_context(table, CkMethod::ClosedForm, seed);
    std::vector<double> x{0.4}, y{1.1};
    double got = transition_density(ctx, x, y, 0.7);
    double expect = gaussian_heat_kernel(1, x, y, 0.7);
    out.push_back(bound_result("density.gaussian_reduction", "exact", std::abs(got - expect) / expect,
                               Thresholds::float_exact, true, "k = 0 transition density is the heat kernel",
                               {"density.transition_density"}));
    // kernel basics: D(0, .) = 1 and symmetry
    auto t1 = IntertwineTableQ::build(build_rank1({{Rat(1)}}), 48);
    auto kt = compile_kernel_table(t1);
    std::vector<double> z0{0.0}, z{1.3}, a{0.8}, b{-1.1};
    double dev = std::abs(dunkl_kernel_value(kt, z0, z, 1e-12) - 1.0);
    dev = std::max(dev, std::abs(dunkl_kernel_value(kt, a, b, 1e-11) - dunkl_kernel_value(kt, b, a, 1e-11)));
    out.push_back(bound_result("density.kernel_basics", "exact", dev, 2e-10, true,
                               "kernel at the origin and argument symmetry", {"intertwine.dunkl_kernel"}));
  }
  return out;
}

CheckResult radial_law_ks(const SystemSpec& spec, const std::vector<double>& x0, std::size_t n_paths,
                          double dt, uint64_t seed, int threads) {
  auto rs = build_root_system(spec);
  RootSystemView view = rs.view();
  SimParams params;
  params.x0 = x0;
  params.T = 1.0;
  params.dt = dt;
  params.seed = seed;
  const double nan = std::nan("");
  std::vector<double> radii(n_paths, nan);
  BatchStats stats = simulate_batch(view, params, n_paths, threads, [&](std::size_t i, const Path& path) {
    radii[i] = norm2(path.state(path.steps()));
  });
  std::vector<double> samples = compact(std::move(radii));
  std::sort(samples.begin(), samples.end());
  double bessel_dim = 2.0 * view.gamma + view.dim;
  std::vector<double> cdf = bessel_cdf_at(samples, bessel_dim, norm2(params.x0), params.T);
  double d = 0;
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    d = std::max(d, std::max((i + 1) / n - cdf[i], cdf[i] - i / n));
  }
  double p = ks_p_value(d, n);
  return ks_result("paths.radial_law[" + view.name + "]", p,
                   "one-sample KS of |X_1| against Bessel dim " + fmt(bessel_dim) + ", n = " +
                       std::to_string(samples.size()) + ", excluded " + fmt(stats.exclusion_rate()),
                   {"pathsim.simulate", "density.radial_density", "rootsys.build"});
}

std::vector<CheckResult> martingale_suite(const Rat& k, double x0, std::size_t n_paths, double dt,
                                          uint64_t seed, int threads) {
  std::vector<CheckResult> out;
  auto rs = build_rank1({{k}});
  RootSystemView view = rs.view();
  SimParams params;
  params.x0 = {x0};
  params.T = 1.0;
  params.dt = dt;
  params.seed = seed;

  const double nan = std::nan("");
  std::vector<double> endpoints(n_paths, nan), quad_var(n_paths, nan), residual(n_paths, nan);
  simulate_batch(view, params, n_paths, threads, [&](std::size_t i, const Path& path) {
    endpoints[i] = path.state(path.steps())[0];
    MartingaleIncrements inc = martingale_increments(view, path);
    double qv = 0;
    for (std::size_t j = 0; j < inc.steps; ++j) {
      double dj = inc.jump_at(j, 0);
      qv += dj * dj;
    }
    quad_var[i] = qv;
    residual[i] = reconstruction_residual(view, path);
  });
  out.push_back(mc_mean_result("paths.martingale_mean[k=" + to_string(k) + "]", mean_se(compact(endpoints)),
                               x0, "E[X_1] against the start point", {"pathsim.simulate"}));
  out.push_back(mc_mean_result("paths.normal_martingale_bracket[k=" + to_string(k) + "]",
                               mean_se(compact(quad_var)), params.T,
                               "mean of the squared jump increments of M over [0, 1]",
                               {"pathsim.extract_martingales"}));

  SimParams half = params;
  half.dt = dt / 2;
  half.seed = derive_seed(seed, "residual-half");
  std::vector<double> residual_half(n_paths, nan);
  simulate_batch(view, half, n_paths, threads, [&](std::size_t i, const Path& path) {
    residual_half[i] = reconstruction_residual(view, path);
  });
  double r_coarse = mean_se(compact(residual)).mean;
  double r_fine = mean_se(compact(residual_half)).mean;
  out.push_back(bound_result("paths.reconstruction_residual_halving[k=" + to_string(k) + "]", "structure",
                             r_coarse / r_fine, std::sqrt(2.0), false,
                             "residual " + fmt(r_coarse) + " at dt vs " + fmt(r_fine) + " at dt/2",
                             {"pathsim.extract_martingales", "pathsim.simulate"}));

  // orthogonality of the root martingales needs at least two roots
  auto rsb = build_type_B(2, {{Rat(1), Rat(1, 2)}});
  RootSystemView vb = rsb.view();
  SimParams pb;
  pb.x0 = {1.1, 0.4};
  pb.T = 1.0;
  pb.dt = dt;
  pb.seed = derive_seed(seed, "brackets");
  const std::size_t nb = std::max<std::size_t>(200, n_paths / 20);
  std::vector<double> cross(nb, nan), jump_exact(nb, nan);
  simulate_batch(vb, pb, nb, threads, [&](std::size_t i, const Path& path) {
    MartingaleIncrements inc = martingale_increments(vb, path);
    double worst_cross = 0;
    for (std::size_t j = 0; j < inc.steps; ++j) {
      for (int a = 0; a < inc.nroots; ++a) {
        for (int b = a + 1; b < inc.nroots; ++b) {
          worst_cross = std::max(worst_cross, std::abs(inc.jump_at(j, a) * inc.jump_at(j, b)));
        }
      }
    }
    cross[i] = worst_cross;
    double worst_jump = 0;
    for (const auto& jump : path.jumps) {
      auto post = path.state(jump.step + 1);
      auto reflected = vb.reflect(jump.root, jump.pre);
      for (int c = 0; c < vb.dim; ++c) worst_jump = std::max(worst_jump, std::abs(post[c] - reflected[c]));
    }
    jump_exact[i] = worst_jump;
  });
  double worst_cross = 0, worst_jump = 0;
  for (double v : compact(cross)) worst_cross = std::max(worst_cross, v);
  for (double v : compact(jump_exact)) worst_jump = std::max(worst_jump, v);
  out.push_back(bound_result("paths.cross_bracket_zero[B2]", "exact", worst_cross, 0.0, true,
                             "no two root martingales ever jump in the same substep",
                             {"pathsim.extract_martingales"}));
  out.push_back(bound_result("paths.jump_reflection_exact[B2]", "exact", worst_jump, 0.0, true,
                             "every logged jump lands exactly on the reflected pre-state",
                             {"pathsim.simulate", "rootsys.reflect"}));
  return out;
}

CheckResult skew_cross_validation(const Rat& k, double x0, std::size_t n_paths, double dt, uint64_t seed,
                                  int threads) {
  auto rs = build_rank1({{k}});
  RootSystemView view = rs.view();
  SimParams params;
  params.x0 = {x0};
  params.T = 1.0;
  params.dt = dt;
  params.seed = seed;
  const double nan = std::nan("");
  std::vector<double> generic(n_paths, nan), skew(n_paths, nan);
  BatchStats stats = simulate_batch(view, params, n_paths, threads, [&](std::size_t i, const Path& path) {
    generic[i] = path.state(path.steps())[0];
  });
  SimParams sp = params;
  sp.seed = derive_seed(seed, "skew");
  simulate_skew_batch(k, sp, n_paths, threads,
                      [&](std::size_t i, const Path& path) { skew[i] = path.state(path.steps())[0]; });
  auto a = compact(std::move(generic));
  auto b = compact(std::move(skew));
  double d = ks_two_sample_statistic(a, b);
  double n_eff = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  double p = ks_p_value(d, n_eff);
  return ks_result("paths.skew_cross_validation[k=" + to_string(k) + "]", p,
                   "two-sample KS generic vs skew-product at T = 1, excluded " + fmt(stats.exclusion_rate()),
                   {"pathsim.simulate", "pathsim.simulate_skew_rank1"});
}

CheckResult skew_radial_ks(const Rat& k, double x0, std::size_t n_paths, double dt, uint64_t seed,
                           int threads) {
  SimParams params;
  params.x0 = {x0};
  params.T = 1.0;
  params.dt = dt;
  params.seed = seed;
  std::vector<double> radii(n_paths, 0.0);
  simulate_skew_batch(k, params, n_paths, threads,
                      [&](std::size_t i, const Path& path) { radii[i] = std::abs(path.state(path.steps())[0]); });
  std::sort(radii.begin(), radii.end());
  double bessel_dim = 1.0 + 2.0 * to_double(k);
  std::vector<double> cdf = bessel_cdf_at(radii, bessel_dim, std::abs(x0), params.T);
  double d = 0;
  const double n = static_cast<double>(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    d = std::max(d, std::max((i + 1) / n - cdf[i], cdf[i] - i / n));
  }
  return ks_result("paths.skew_radial_law[k=" + to_string(k) + "]", ks_p_value(d, n),
                   "|X_1| from the skew sampler against Bessel dim " + fmt(bessel_dim),
                   {"pathsim.simulate_skew_rank1", "density.radial_density"});
}

std::vector<CheckResult> jump_functional_suite(std::size_t n_paths, double dt, uint64_t seed, int threads) {
  std::vector<CheckResult> out;
  auto run = [&](const Rat& k, double dt_run, uint64_t s) {
    auto rs = build_rank1({{k}});
    SimParams params;
    params.x0 = {1.0};
    params.T = 1.0;
    params.dt = dt_run;
    params.seed = s;
    params.grid_noise = true;
    params.ref_dt = dt / 2;  // common reference grid couples the two levels
    return estimate_jump_functionals(rs.view(), params, n_paths, threads);
  };
  {
    auto rep = run(Rat(1), dt, seed);
    out.push_back(mc_mean_result("jumps.count_vs_compensator[k=1]", rep.count_minus_compensator, 0.0,
                                 "N_1 minus its compensator along the same paths; mean count " +
                                     fmt(rep.total_jump_count.mean),
                                 {"pathsim.estimate_jump_functionals", "pathsim.simulate"}));
    auto fine = run(Rat(1), dt / 2, seed);
    double rel_sq = std::abs(fine.inv_sq_integral[0].mean - rep.inv_sq_integral[0].mean) /
                    std::abs(fine.inv_sq_integral[0].mean);
    out.push_back(bound_result("jumps.inverse_square_stabilizes[k=1]", "structure", rel_sq, 0.05, true,
                               "coupled dt vs dt/2 estimates " + fmt(rep.inv_sq_integral[0].mean) + " / " +
                                   fmt(fine.inv_sq_integral[0].mean),
                               {"pathsim.estimate_jump_functionals"}));
    double rel_abs = std::abs(fine.inv_abs_integral[0].mean - rep.inv_abs_integral[0].mean) /
                     std::abs(fine.inv_abs_integral[0].mean);
    out.push_back(bound_result("jumps.inverse_abs_stabilizes[k=1]", "structure", rel_abs, 0.05, true,
                               "first-moment integral under dt halving", {"pathsim.estimate_jump_functionals"}));
    double rel_amp = std::abs(fine.total_jump_amplitude.mean - rep.total_jump_amplitude.mean) /
                     std::abs(fine.total_jump_amplitude.mean);
    out.push_back(bound_result("jumps.amplitude_stabilizes[k=1]", "structure", rel_amp, 0.05, true,
                               "total jump amplitude " + fmt(rep.total_jump_amplitude.mean) +
                                   " stable under refinement",
                               {"pathsim.estimate_jump_functionals"}));
  }
  {
    auto coarse = run(Rat(1, 4), dt, derive_seed(seed, "quarter"));
    auto fine = run(Rat(1, 4), dt / 2, derive_seed(seed, "quarter"));
    double rel = std::abs(fine.inv_sq_integral[0].mean - coarse.inv_sq_integral[0].mean) /
                 std::abs(fine.inv_sq_integral[0].mean);
    out.push_back(bound_result("jumps.inverse_square_diverges[k=1/4]", "structure", rel, 0.05, false,
                               "below the 1/2 threshold the estimate keeps growing: " +
                                   fmt(coarse.inv_sq_integral[0].mean) + " -> " + fmt(fine.inv_sq_integral[0].mean) +
                                   ", excluded " + fmt(fine.exclusion_rate),
                               {"pathsim.estimate_jump_functionals"}));
  }
  return out;
}

CheckResult scaling_property_ks(const Rat& k, double x0, double c, std::size_t n_paths, double dt,
                                uint64_t seed, int threads) {
  auto rs = build_rank1({{k}});
  RootSystemView view = rs.view();
  const double nan = std::nan("");
  SimParams long_run;
  long_run.x0 = {x0};
  long_run.T = c;
  long_run.dt = dt;
  long_run.seed = seed;
  std::vector<double> a(n_paths, nan);
  simulate_batch(view, long_run, n_paths, threads,
                 [&](std::size_t i, const Path& path) { a[i] = path.state(path.steps())[0]; });
  SimParams unit;
  unit.x0 = {x0 / std::sqrt(c)};
  unit.T = 1.0;
  unit.dt = dt / c;  // same number of substeps
  unit.seed = derive_seed(seed, "scaling");
  std::vector<double> b(n_paths, nan);
  simulate_batch(view, unit, n_paths, threads,
                 [&](std::size_t i, const Path& path) { b[i] = std::sqrt(c) * path.state(path.steps())[0]; });
  auto av = compact(std::move(a));
  auto bv = compact(std::move(b));
  double d = ks_two_sample_statistic(av, bv);
  double n_eff = static_cast<double>(av.size()) * bv.size() / (av.size() + bv.size());
  return ks_result("paths.brownian_scaling[k=" + to_string(k) + "]", ks_p_value(d, n_eff),
                   "X_{c} from x vs sqrt(c) X_1 from x/sqrt(c), c = " + fmt(c), {"pathsim.simulate"});
}

CheckResult zero_multiplicity_paths(std::size_t n_paths, double dt, uint64_t seed, int threads) {
  auto rs = build_rank1({{Rat(0)}});
  RootSystemView view = rs.view();
  SimParams params;
  params.x0 = {1.0};
  params.T = 1.0;
  params.dt = dt;
  params.seed = seed;
  const double nan = std::nan("");
  std::vector<double> increments(n_paths, nan);
  std::atomic<std::size_t> jumps{0};
  simulate_batch(view, params, n_paths, threads, [&](std::size_t i, const Path& path) {
    increments[i] = path.state(path.steps())[0] - params.x0[0];
    jumps.fetch_add(path.jumps.size(), std::memory_order_relaxed);
  });
  MeanSE inc = mean_se(compact(std::move(increments)));
  CheckResult r = mc_mean_result("paths.zero_multiplicity_is_brownian", inc, 0.0,
                                 "k = 0: driftless, jump count " + std::to_string(jumps.load()),
                                 {"pathsim.simulate"});
  r.passed = r.passed && jumps.load() == 0;
  return r;
}

std::vector<CheckResult> ito_residual_suite(std::size_t n_paths, double dt, uint64_t seed, int threads) {
  std::vector<CheckResult> out;
  const std::size_t n = std::max<std::size_t>(400, n_paths / 25);
  const double nan = std::nan("");
  {
    // nu = (1): the formula collapses to the reconstruction identity
    auto table = IntertwineTableQ::build(build_rank1({{Rat(1)}}), 4);
    RootSystemView view = table.system().view();
    auto fam = compile_hermite(hermite_family(table, {1}), table.system());
    SimParams params;
    params.x0 = {1.0};
    params.T = 1.0;
    params.dt = dt;
    params.seed = seed;
    std::vector<double> dev(n, nan);
    simulate_batch(view, params, n, threads, [&](std::size_t i, const Path& path) {
      double scaled = 3.0 * ito_residual(view, fam, path, params.T);
      dev[i] = std::abs(scaled - reconstruction_residual(view, path));
    });
    double worst = 0;
    for (double v : compact(std::move(dev))) worst = std::max(worst, v);
    out.push_back(bound_result("ito.linear_reduces_to_reconstruction", "exact", worst, 1e-10, true,
                               "for linear Q the residual is the decomposition residual",
                               {"pathsim.ito_residual_check"}));
  }
  auto halving = [&](const Rat& k, const std::vector<uint32_t>& nu, const std::string& name) {
    auto table = IntertwineTableQ::build(build_rank1({{k}}), 6);
    RootSystemView view = table.system().view();
    auto fam = compile_hermite(hermite_family(table, nu), table.system());
    auto run = [&](double dt_run, uint64_t s) {
      SimParams params;
      params.x0 = {1.0};
      params.T = 1.0;
      params.dt = dt_run;
      params.seed = s;
      std::vector<double> res(n, nan);
      simulate_batch(view, params, n, threads,
                     [&](std::size_t i, const Path& path) { res[i] = ito_residual(view, fam, path, 1.0); });
      return mean_se(compact(std::move(res))).mean;
    };
    double coarse = run(dt, seed);
    double fine = run(dt / 2, derive_seed(seed, "ito-fine"));
    out.push_back(bound_result(name, "structure", coarse / fine, 1.15, false,
                               "mean residual " + fmt(coarse) + " at dt vs " + fmt(fine) + " at dt/2",
                               {"pathsim.ito_residual_check"}));
  };
  halving(Rat(0), {3}, "ito.classical_hermite_refines[k=0]");
  halving(Rat(1), {2}, "ito.quadratic_refines[k=1]");
  return out;
}

std::vector<CheckResult> hermite_suite(const SystemSpec& spec, const std::vector<Rat>& x0, int max_total_degree,
                                       std::size_t n_paths, double dt, uint64_t seed, int threads) {
  std::vector<CheckResult> out;
  auto rs = build_root_system(spec);
  auto table = IntertwineTableQ::build(rs, std::max(3, max_total_degree));
  SimParams params;
  for (const auto& c : x0) params.x0.push_back(to_double(c));
  params.T = 1.0;
  params.dt = dt;
  params.seed = seed;
  const double s_mid = 0.5, t_end = 1.0;
  bool tower_ok = true;
  double tower_worst_z = 0;
  std::size_t tower_cases = 0;
  for (int deg = 1; deg <= max_total_degree; ++deg) {
    for (const auto& nu : homogeneous_exponents(rs.dim, deg)) {
      std::ostringstream nu_txt;
      nu_txt << "(";
      for (std::size_t i = 0; i < nu.size(); ++i) nu_txt << (i ? "," : "") << nu[i];
      nu_txt << ")";
      auto rep = hermite_martingale_check(table, nu, s_mid, t_end, params, n_paths, threads);
      out.push_back(mc_mean_result("hermite.mean[" + rs.name + ",nu=" + nu_txt.str() + "]", rep.sample_mean,
                                   rep.target, "E[m_nu(X_1)] against Q_nu(x0, -1)",
                                   {"chaos.hermite_martingale_check", "intertwine.hermite_Q", "polyalg.eval"}));
      for (const auto& tw : rep.tower) {
        ++tower_cases;
        double z = tw.se > 0 ? std::abs(tw.mean) / tw.se : 0.0;
        tower_worst_z = std::max(tower_worst_z, z);
        if (z > Thresholds::mc_sigma) tower_ok = false;
      }
    }
  }
  out.push_back(bound_result("hermite.tower_property[" + rs.name + "]", "mc_mean", tower_worst_z,
                             Thresholds::mc_sigma, true,
                             "worst |z| over " + std::to_string(tower_cases) +
                                 " conditional-centering products at s = 1/2",
                             {"chaos.hermite_martingale_check"}));
  out.back().passed = tower_ok;
  return out;
}

std::vector<CheckResult> chaos_suite(const Rat& k, const Rat& x0, std::size_t n_paths, double dt,
                                     uint64_t seed, int threads) {
  std::vector<CheckResult> out;
  auto table = IntertwineTableQ::build(build_rank1({{k}}), 8);
  const auto& rs = table.system();
  std::vector<Rat> x0v{x0};
  SimParams params;
  params.x0 = {to_double(x0)};
  params.T = 1.0;
  params.dt = dt;
  params.seed = seed;

  // ---- exact structure of the first-order expansion
  FunctionalSpec spec1{{Rat(1)}, {{1}}};
  ChaosExpansion e1 = chaos_expand(table, x0v, spec1);
  {
    auto fam = hermite_family(table, {1});
    bool ok = e1.terms.size() == 2;
    Q2 expect_const = fam.Q.eval(std::vector<Q2>{Q2(x0)}, Q2(Rat(-1)));
    ok = ok && (e1.constant == expect_const);
    for (const auto& term : e1.terms) {
      if (term.legs.size() != 1) ok = false;
      PolyQ coeff1(1);
      for (const auto& [m, c] : term.coeff.terms()) coeff1.add_term(m, c);
      if (term.legs[0].eps == 0) {
        ok = ok && (term.coeff == PolyQ::constant(1, fam.grad[0].coefficient(Monomial{{0}, 0})));
      } else {
        ok = ok && (term.coeff == PolyQ::constant(1, fam.jump_raw[0].coefficient(Monomial{{0}, 0})));
        ok = ok && (term.k_product == k);
      }
    }
    CheckResult r;
    r.name = "chaos.first_peel_matches_integrands";
    r.kind = "exact";
    r.exact = true;
    r.statistic = static_cast<double>(e1.terms.size());
    r.passed = ok;
    r.detail = "degree-1 expansion integrands equal the Hermite companions exactly";
    r.covers = {"chaos.chaos_expand", "intertwine.hermite_Q"};
    out.push_back(r);
  }
  // ---- exact variance identity for the degree-2 expansion
  FunctionalSpec spec2{{Rat(1)}, {{2}}};
  ChaosExpansion e2 = chaos_expand(table, x0v, spec2);
  {
    Rat t(1);
    Rat denom = Rat(1) + 2 * k;
    Rat expect = 4 * x0 * x0 * t / (denom * denom) + 2 * t * t / denom;
    Q2 total(0);
    for (const auto& term : e2.terms) total += Q2(term.k_product) * term_l2_squared_raw(term);
    bool ok = (total == Q2(expect));
    // constant term must be Q_2(x0, -1)
    auto fam2 = hermite_family(table, {2});
    ok = ok && (e2.constant == fam2.Q.eval(std::vector<Q2>{Q2(x0)}, Q2(Rat(-1))));
    // no outer M legs: the even part cancels them
    for (const auto& term : e2.terms) {
      if (term.legs[0].eps == 1) ok = false;
    }
    CheckResult r;
    r.name = "chaos.exact_variance_identity";
    r.kind = "exact";
    r.exact = true;
    r.statistic = total.to_double();
    r.threshold = to_double(expect);
    r.passed = ok;
    r.detail = "sum of integral f^2 equals Var(m_2(X_1)) = 4 x0^2/(1+2k)^2 + 2/(1+2k), exactly";
    r.covers = {"chaos.chaos_expand"};
    out.push_back(r);
  }
  // ---- Monte Carlo: reconstruction, isometry, orthogonality, zero mean
  FunctionalSpec spec3{{Rat(1, 2), Rat(1)}, {{1}, {1}}};
  struct Named {
    std::string label;
    const FunctionalSpec* spec;
    const ChaosExpansion* exp;
  };
  ChaosExpansion e3 = chaos_expand(table, x0v, spec3);
  std::vector<Named> specs{{"nu=(1)", &spec1, &e1}, {"nu=(2)", &spec2, &e2}, {"l=2", &spec3, &e3}};
  for (const auto& item : specs) {
    IsometryReport rep =
        chaos_isometry_check(table, x0v, *item.spec, *item.exp, params, n_paths, threads);
    out.push_back(mc_mean_result("chaos.reconstruction[" + item.label + "]", rep.reconstruction, 0.0,
                                 "Lambda minus its finite chaos representation; E[Lambda] = " +
                                     fmt(rep.functional_mean.mean) + " vs constant " +
                                     fmt(item.exp->constant.to_double()),
                                 {"chaos.isometry_check", "chaos.iterated_integral"}));
    bool iso_ok = true;
    double worst_iso = 0;
    for (std::size_t a = 0; a < rep.term_sq.size(); ++a) {
      double z = rep.term_sq[a].se > 0 ? std::abs(rep.term_sq[a].mean - rep.term_l2[a]) / rep.term_sq[a].se
                                       : std::abs(rep.term_sq[a].mean - rep.term_l2[a]);
      worst_iso = std::max(worst_iso, z);
      if (z > Thresholds::mc_sigma) iso_ok = false;
    }
    CheckResult iso = bound_result("chaos.isometry[" + item.label + "]", "mc_mean", worst_iso,
                                   Thresholds::mc_sigma, true,
                                   "worst |z| of E[I^2] against the exact integral of f^2 over " +
                                       std::to_string(rep.term_sq.size()) + " terms",
                                   {"chaos.isometry_check", "chaos.iterated_integral"});
    iso.passed = iso_ok;
    out.push_back(iso);
    bool ortho_ok = true;
    double worst_ortho = 0;
    for (const auto& m : rep.ortho_means) {
      double z = m.se > 0 ? std::abs(m.mean) / m.se : 0.0;
      worst_ortho = std::max(worst_ortho, z);
      if (z > Thresholds::mc_sigma) ortho_ok = false;
    }
    for (const auto& m : rep.term_means) {
      double z = m.se > 0 ? std::abs(m.mean) / m.se : 0.0;
      worst_ortho = std::max(worst_ortho, z);
      if (z > Thresholds::mc_sigma) ortho_ok = false;
    }
    CheckResult orth = bound_result("chaos.orthogonality_zero_mean[" + item.label + "]", "mc_mean",
                                    worst_ortho, Thresholds::mc_sigma, true,
                                    "pairwise products and term means against zero",
                                    {"chaos.isometry_check"});
    orth.passed = ortho_ok;
    out.push_back(orth);
  }
  {
    // second moment of the reconstruction residual vanishes under refinement
    IsometryReport coarse = chaos_isometry_check(table, x0v, spec2, e2, params, n_paths, threads);
    SimParams fine = params;
    fine.dt = dt / 2;
    fine.seed = derive_seed(seed, "chaos-fine");
    IsometryReport fine_rep = chaos_isometry_check(table, x0v, spec2, e2, fine, n_paths, threads);
    out.push_back(bound_result("chaos.residual_second_moment_refines", "structure",
                               coarse.reconstruction_sq.mean / std::max(fine_rep.reconstruction_sq.mean, 1e-300),
                               1.15, false,
                               "E[residual^2] " + fmt(coarse.reconstruction_sq.mean) + " at dt vs " +
                                   fmt(fine_rep.reconstruction_sq.mean) + " at dt/2",
                               {"chaos.isometry_check"}));
  }
  {
    // first-order iterated integrals reproduce the driving martingales
    RootSystemView view = rs.view();
    ChaosTerm bterm(1);
    bterm.legs = {{0, Rat(0), false, Rat(1)}};
    bterm.coeff = PolyQ::constant(1, Q2(1));
    ChaosTerm mterm(1);
    mterm.legs = {{1, Rat(0), false, Rat(1)}};
    mterm.coeff = PolyQ::constant(1, Q2(1));
    auto cb = compile_term(bterm);
    auto cm = compile_term(mterm);
    const std::size_t n = 64;
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto path = simulate_path(view, params, i);
      if (!path) continue;
      MartingaleIncrements inc = martingale_increments(view, *path);
      double w_sum = 0, m_sum = 0;
      for (std::size_t j = 0; j < path->steps(); ++j) {
        w_sum += path->noise[j];
        m_sum += inc.at(j, 0);
      }
      worst = std::max(worst, std::abs(evaluate_chaos_term(cb, *path, inc) - w_sum));
      worst = std::max(worst, std::abs(evaluate_chaos_term(cm, *path, inc) - m_sum));
    }
    out.push_back(bound_result("chaos.unit_integrands_reproduce_drivers", "exact", worst, 1e-10, true,
                               "order-1 integrals of 1 equal B_1 and M_1 at grid resolution",
                               {"chaos.iterated_integral"}));
  }
  return out;
}

}  // namespace battery

// ---------------------------------------------------------------------------
// orchestration

namespace {

struct SuiteTimer {
  RunReport& report;
  std::string label;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  SuiteTimer(RunReport& r, std::string l) : report(r), label(std::move(l)) {}
  ~SuiteTimer() {
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.timings_ms.emplace_back(label, ms);
  }
};

void append(RunReport& report, std::vector<CheckResult> results) {
  for (auto& r : results) report.checks.push_back(std::move(r));
}

const std::vector<std::string>& all_operation_ids() {
  static const std::vector<std::string> ids = {
      "rootsys.build",
      "rootsys.reflect",
      "rootsys.pairing",
      "rootsys.chamber_project",
      "polyalg.dunkl_T",
      "polyalg.dunkl_L",
      "polyalg.divided_difference",
      "polyalg.eval",
      "intertwine.build_intertwine",
      "intertwine.dunkl_kernel",
      "intertwine.hermite_Q",
      "intertwine.classical_hermite",
      "density.weight",
      "density.compute_ck",
      "density.transition_density",
      "density.radial_density",
      "density.radial_generator_check",
      "density.w_radial_density",
      "pathsim.simulate",
      "pathsim.simulate_skew_rank1",
      "pathsim.extract_martingales",
      "pathsim.estimate_jump_functionals",
      "pathsim.ito_residual_check",
      "chaos.iterated_integral",
      "chaos.chaos_expand",
      "chaos.isometry_check",
      "chaos.hermite_martingale_check",
      "cli.run_suite",
      "cli.dump_fixtures",
      "cli.simulate_cmd",
  };
  return ids;
}

void run_symbolic(RunReport& report) {
  SuiteTimer timer(report, "symbolic");
  append(report, battery::operator_suite());
  append(report, battery::intertwine_suite());
  append(report, battery::harmonicity_suite());
  append(report, battery::radial_identity_suite());
}

void run_density(RunReport& report, const ExperimentConfig& config) {
  SuiteTimer timer(report, "density");
  append(report, battery::density_suite({Rat(3, 5), Rat(1), Rat(2)}, config.seed));
}

void run_paths(RunReport& report, const ExperimentConfig& config) {
  SuiteTimer timer(report, "paths");
  const std::size_t n = config.n_paths;
  const double dt = to_double(config.dt);
  const int threads = config.threads;
  uint64_t seed = config.seed;
  for (const Rat& k : {Rat(3, 5), Rat(1), Rat(2)}) {
    SystemSpec spec{SystemKind::Rank1, 1, 1, {{k}}};
    report.checks.push_back(
        battery::radial_law_ks(spec, {1.0}, n, dt, derive_seed(seed, "radial" + to_string(k)), threads));
  }
  {
    SystemSpec spec{SystemKind::ProductRank1, 2, 2, {{Rat(1), Rat(1)}}};
    report.checks.push_back(
        battery::radial_law_ks(spec, {1.0, 0.7}, n, dt, derive_seed(seed, "radial-prod"), threads));
  }
  {
    SystemSpec spec{SystemKind::TypeB, 2, 2, {{Rat(1), Rat(1)}}};
    report.checks.push_back(
        battery::radial_law_ks(spec, {1.1, 0.4}, n, dt, derive_seed(seed, "radial-B2"), threads));
  }
  append(report, battery::martingale_suite(Rat(1), 1.0, n, dt, derive_seed(seed, "mart"), threads));
  for (const Rat& k : {Rat(3, 5), Rat(1), Rat(2)}) {
    report.checks.push_back(
        battery::skew_cross_validation(k, 1.0, n, dt, derive_seed(seed, "skew" + to_string(k)), threads));
  }
  report.checks.push_back(battery::skew_radial_ks(Rat(1), 1.0, n, dt, derive_seed(seed, "skewrad"), threads));
  append(report, battery::jump_functional_suite(n, dt, derive_seed(seed, "jumps"), threads));
  report.checks.push_back(battery::scaling_property_ks(Rat(1), 1.0, 4.0, std::max<std::size_t>(n / 2, 1000),
                                                       dt, derive_seed(seed, "scaling"), threads));
  report.checks.push_back(
      battery::zero_multiplicity_paths(std::max<std::size_t>(n / 2, 1000), dt, derive_seed(seed, "zero"), threads));
  append(report, battery::ito_residual_suite(n, dt, derive_seed(seed, "ito"), threads));
}

void run_hermite(RunReport& report, const ExperimentConfig& config) {
  SuiteTimer timer(report, "hermite");
  const double dt = to_double(config.dt);
  append(report, battery::hermite_suite(SystemSpec{SystemKind::Rank1, 1, 1, {{Rat(1)}}}, {Rat(1)}, 3,
                                        config.n_paths, dt, derive_seed(config.seed, "hermite-r1"),
                                        config.threads));
  append(report, battery::hermite_suite(SystemSpec{SystemKind::ProductRank1, 2, 2, {{Rat(1), Rat(1)}}},
                                        {Rat(1), Rat(1, 2)}, 3, config.n_paths, dt,
                                        derive_seed(config.seed, "hermite-p2"), config.threads));
}

void run_chaos(RunReport& report, const ExperimentConfig& config) {
  SuiteTimer timer(report, "chaos");
  append(report, battery::chaos_suite(Rat(1), Rat(1), config.n_paths, to_double(config.dt),
                                      derive_seed(config.seed, "chaos"), config.threads));
}

void run_artifacts(RunReport& report, const ExperimentConfig& config) {
  SuiteTimer timer(report, "artifacts");
  namespace fs = std::filesystem;
  fs::path dir = fs::path(config.output_dir) / "artifacts";
  std::string first = write_fixtures(config, dir.string());
  std::ifstream in1(first, std::ios::binary);
  std::stringstream buf1;
  buf1 << in1.rdbuf();
  std::string second = write_fixtures(config, dir.string());
  std::ifstream in2(second, std::ios::binary);
  std::stringstream buf2;
  buf2 << in2.rdbuf();
  bool idempotent = buf1.str() == buf2.str() && !buf1.str().empty();
  auto csvs = write_simulation_csv(config, dir.string());
  bool csv_ok = csvs.size() == 2;
  for (const auto& p : csvs) csv_ok = csv_ok && fs::exists(p);
  CheckResult r;
  r.name = "cli.artifacts";
  r.kind = "structure";
  r.exact = true;
  r.statistic = idempotent && csv_ok ? 1.0 : 0.0;
  r.threshold = 1.0;
  r.passed = idempotent && csv_ok;
  r.detail = "fixture regeneration is byte-identical; path CSV dumps written";
  r.covers = {"cli.dump_fixtures", "cli.simulate_cmd"};
  report.checks.push_back(r);
}

void run_coverage(RunReport& report) {
  std::vector<std::string> missing;
  for (const auto& op : all_operation_ids()) {
    if (op == "cli.run_suite") continue;  // running the suite is the coverage
    bool seen = false;
    for (const auto& c : report.checks) {
      for (const auto& cov : c.covers) {
        if (cov == op) {
          seen = true;
          break;
        }
      }
      if (seen) break;
    }
    if (!seen) missing.push_back(op);
  }
  CheckResult r;
  r.name = "registry.coverage";
  r.kind = "structure";
  r.exact = true;
  r.statistic = static_cast<double>(missing.size());
  r.threshold = 0;
  r.passed = missing.empty();
  std::ostringstream detail;
  if (missing.empty()) {
    detail << "every operation is exercised by at least one check";
  } else {
    detail << "uncovered:";
    for (const auto& m : missing) detail << " " << m;
  }
  r.detail = detail.str();
  r.covers = {"cli.run_suite"};
  report.checks.push_back(r);
}

}  // namespace

RunReport run_suite(const ExperimentConfig& config, const std::string& suite) {
  RunReport report;
  report.version = kVersion;
  report.suite = suite;
  report.seed = config.seed;
  report.config_digest = config_digest(config);
  if (suite == "symbolic") {
    run_symbolic(report);
  } else if (suite == "density") {
    run_density(report, config);
  } else if (suite == "paths") {
    run_paths(report, config);
  } else if (suite == "hermite") {
    run_hermite(report, config);
  } else if (suite == "chaos") {
    run_chaos(report, config);
  } else if (suite == "all") {
    run_symbolic(report);
    run_density(report, config);
    run_paths(report, config);
    run_hermite(report, config);
    run_chaos(report, config);
    run_artifacts(report, config);
    run_coverage(report);
  } else {
    throw std::invalid_argument("unknown suite: " + suite);
  }
  return report;
}

std::string report_to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["version"] = report.version;
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["config_digest"] = report.config_digest;
  std::size_t passed = 0;
  for (const auto& c : report.checks) passed += c.passed ? 1 : 0;
  j["summary"] = {{"total", report.checks.size()}, {"passed", passed},
                  {"failed", report.checks.size() - passed}};
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["kind"] = c.kind;
    jc["statistic"] = c.statistic;
    if (c.kind == "mc_mean") jc["se"] = c.se;
    jc["threshold"] = c.threshold;
    jc["exact"] = c.exact;
    jc["passed"] = c.passed;
    jc["detail"] = c.detail;
    jc["covers"] = c.covers;
    checks.push_back(std::move(jc));
  }
  j["checks"] = std::move(checks);
  return j.dump(2) + "\n";
}

std::string write_report_files(const RunReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::path report_path = fs::path(out_dir) / "report.json";
  {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + report_path.string());
    out << report_to_json(report);
  }
  {
    nlohmann::ordered_json jt;
    for (const auto& [label, ms] : report.timings_ms) jt[label] = ms;
    std::ofstream out(fs::path(out_dir) / "timings.json", std::ios::binary);
    out << jt.dump(2) << "\n";
  }
  return report_path.string();
}

std::string write_fixtures(const ExperimentConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto rs = build_configured_system(config);
  int deg = std::min(config.n_max, 4);
  auto table = IntertwineTableQ::build(rs, std::max(deg, 1));
  std::ostringstream name;
  name << "fixtures_" << rs.name;
  for (const auto& k : config.system.mult.per_orbit) {
    std::string ks = to_string(k);
    for (auto& ch : ks) {
      if (ch == '/') ch = '_';
    }
    name << "_k" << ks;
  }
  name << ".txt";
  fs::path path = fs::path(out_dir) / name.str();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (int n = 0; n <= deg; ++n) {
    for (const auto& nu : homogeneous_exponents(rs.dim, n)) {
      std::ostringstream nu_txt;
      for (std::size_t i = 0; i < nu.size(); ++i) nu_txt << (i ? "," : "") << nu[i];
      auto fam = hermite_family(table, nu);
      out << "m[" << nu_txt.str() << "] = " << table.generalized_monomial(nu).to_string() << "\n";
      out << "Q[" << nu_txt.str() << "] = " << fam.Q.to_string() << "\n";
      for (int i = 0; i < rs.dim; ++i) {
        out << "Qc[" << nu_txt.str() << ";" << i + 1 << "] = " << fam.grad[i].to_string() << "\n";
      }
      for (std::size_t r = 0; r < rs.roots.size(); ++r) {
        out << "Qdelta_raw[" << nu_txt.str() << ";" << r << "] = " << fam.jump_raw[r].to_string() << "\n";
      }
    }
  }
  return path.string();
}

std::vector<std::string> write_simulation_csv(const ExperimentConfig& config, const std::string& out_dir,
                                              std::size_t n_paths_cap) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto rs = build_configured_system(config);
  RootSystemView view = rs.view();
  SimParams params;
  params.x0 = config.x0_double();
  params.T = to_double(config.T);
  params.dt = to_double(config.dt);
  params.seed = config.seed;
  fs::path series_path = fs::path(out_dir) / "paths.csv";
  fs::path jumps_path = fs::path(out_dir) / "jumps.csv";
  std::ofstream series(series_path, std::ios::binary);
  std::ofstream jumps(jumps_path, std::ios::binary);
  if (!series || !jumps) throw std::runtime_error("cannot write path dumps under " + out_dir);
  series << "path,t";
  for (int i = 0; i < view.dim; ++i) series << ",x" << i + 1;
  series << ",jump_flag,jump_root\n";
  jumps << "path,s,root_index";
  for (int i = 0; i < view.dim; ++i) jumps << ",pre_x" << i + 1;
  jumps << "\n";
  series.precision(17);
  jumps.precision(17);
  for (std::size_t p = 0; p < n_paths_cap; ++p) {
    auto path = simulate_path(view, params, p);
    if (!path) continue;
    std::vector<int> jump_at(path->steps() + 1, -1);
    for (std::size_t jj = 0; jj < path->jumps.size(); ++jj) {
      jump_at[path->jumps[jj].step + 1] = static_cast<int>(path->jumps[jj].root);
    }
    for (std::size_t j = 0; j < path->times.size(); ++j) {
      series << p << "," << path->times[j];
      for (int i = 0; i < view.dim; ++i) series << "," << path->states[j * view.dim + i];
      if (jump_at[j] >= 0) {
        series << ",1," << jump_at[j] << "\n";
      } else {
        series << ",0,\n";
      }
    }
    for (const auto& jump : path->jumps) {
      jumps << p << "," << jump.time << "," << jump.root;
      for (int i = 0; i < view.dim; ++i) jumps << "," << jump.pre[i];
      jumps << "\n";
    }
  }
  return {series_path.string(), jumps_path.string()};
}

}  // namespace dunkl
