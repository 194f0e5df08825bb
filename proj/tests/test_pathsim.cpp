#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dunkl/compiled.hpp"
#include "dunkl/intertwine.hpp"
#include "dunkl/pathsim.hpp"
#include "dunkl/rootsys.hpp"
#include "dunkl/stats.hpp"

using namespace dunkl;

namespace {
SimParams base_params(std::vector<double> x0, double dt = 1e-3, uint64_t seed = 42) {
  SimParams p;
  p.x0 = std::move(x0);
  p.T = 1.0;
  p.dt = dt;
  p.seed = seed;
  return p;
}
}  // namespace

TEST_CASE("zero multiplicity reduces to Brownian motion") {
  auto rs = build_rank1({{Rat(0)}});
  RootSystemView view = rs.view();
  SimParams params = base_params({1.0});
  const std::size_t n = 4000;
  std::vector<double> increments(n);
  std::size_t jumps = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto path = simulate_path(view, params, i);
    REQUIRE(path.has_value());
    increments[i] = path->state(path->steps())[0] - 1.0;
    jumps += path->jumps.size();
  }
  CHECK(jumps == 0);
  MeanSE m = mean_se(increments);
  CHECK(std::abs(m.mean) < 4.0 * std::sqrt(params.T / n));
  double var = 0;
  for (double v : increments) var += v * v;
  var /= n;
  CHECK(var == doctest::Approx(params.T).epsilon(0.1));
}

TEST_CASE("path structure and determinism") {
  auto rs = build_rank1({{Rat(1)}});
  RootSystemView view = rs.view();
  SimParams params = base_params({1.0}, 1e-3, 7);

  SUBCASE("same seed, same path; different path index differs") {
    auto a = simulate_path(view, params, 3);
    auto b = simulate_path(view, params, 3);
    auto c = simulate_path(view, params, 4);
    REQUIRE(a);
    REQUIRE(b);
    REQUIRE(c);
    CHECK(a->states == b->states);
    CHECK(a->times == b->times);
    CHECK(a->states != c->states);
  }
  SUBCASE("jumps are exact reflections and never share a substep") {
    std::size_t total_jumps = 0;
    for (uint64_t i = 0; i < 50; ++i) {
      auto path = simulate_path(view, params, i);
      if (!path) continue;
      std::vector<std::size_t> seen;
      for (const auto& jump : path->jumps) {
        ++total_jumps;
        for (auto s : seen) CHECK(s != jump.step);
        seen.push_back(jump.step);
        auto post = path->state(jump.step + 1);
        auto reflected = view.reflect(jump.root, jump.pre);
        for (int cdim = 0; cdim < view.dim; ++cdim) {
          CHECK(post[cdim] == reflected[cdim]);
        }
      }
    }
    CHECK(total_jumps > 0);
  }
  SUBCASE("start point validation") {
    SimParams bad = params;
    bad.x0 = {0.0};
    CHECK_THROWS_AS((void)simulate_path(view, bad, 0), std::invalid_argument);
  }
}

TEST_CASE("martingale extraction") {
  auto rs = build_rank1({{Rat(1)}});
  RootSystemView view = rs.view();
  SimParams params = base_params({1.0}, 1e-3, 11);

  SUBCASE("no-jump paths still reconstruct: drift absorbed by compensator") {
    // k = 0 path: M = 0 identically, B = X - x0
    auto rs0 = build_rank1({{Rat(0)}});
    RootSystemView v0 = rs0.view();
    auto path = simulate_path(v0, params, 1);
    REQUIRE(path);
    MartingaleDecomposition dec = extract_martingales(v0, *path);
    CHECK(dec.M[0].back() == 0.0);
    CHECK(std::abs(dec.B.back() - (path->state(path->steps())[0] - 1.0)) < 1e-14);
    CHECK(reconstruction_residual(v0, *path) < 1e-12);
  }
  SUBCASE("reconstruction residual shrinks under halving") {
    const std::size_t n = 600;
    auto mean_residual = [&](double dt, uint64_t seed) {
      SimParams p = base_params({1.0}, dt, seed);
      std::vector<double> res;
      for (std::size_t i = 0; i < n; ++i) {
        auto path = simulate_path(view, p, i);
        if (path) res.push_back(reconstruction_residual(view, *path));
      }
      return mean_se(res).mean;
    };
    double coarse = mean_residual(2e-3, 21);
    double fine = mean_residual(1e-3, 22);
    CHECK(coarse / fine > 1.2);
  }
  SUBCASE("decomposition identity holds exactly by construction") {
    auto path = simulate_path(view, params, 5);
    REQUIRE(path);
    MartingaleDecomposition dec = extract_martingales(view, *path);
    std::size_t last = path->steps();
    double rebuilt = 1.0 + dec.B[last] + std::sqrt(view.mult[0]) * dec.M[0][last] * view.roots[0][0];
    CHECK(rebuilt == doctest::Approx(path->state(last)[0]).epsilon(1e-13));
  }
}

TEST_CASE("skew-product sampler") {
  SUBCASE("k = 0 is rejected") {
    SimParams params = base_params({1.0});
    CHECK_THROWS_AS((void)simulate_skew_rank1(Rat(0), params, 0), std::invalid_argument);
  }
  SUBCASE("radial part matches the squared-Bessel mean") {
    // E[|X_t|^2] = x0^2 + (1 + 2k) t for BESQ(1 + 2k)
    const Rat k(1);
    SimParams params = base_params({1.0}, 1e-2, 13);
    const std::size_t n = 20000;
    std::vector<double> r2(n);
    for (std::size_t i = 0; i < n; ++i) {
      Path path = simulate_skew_rank1(k, params, i);
      double x = path.state(path.steps())[0];
      r2[i] = x * x;
    }
    MeanSE m = mean_se(r2);
    CHECK(std::abs(m.mean - (1.0 + 3.0 * params.T)) <= 4.0 * m.se);
  }
  SUBCASE("flips recorded as exact reflections") {
    SimParams params = base_params({1.0}, 1e-3, 17);
    std::size_t flips = 0;
    for (uint64_t i = 0; i < 40; ++i) {
      Path path = simulate_skew_rank1(Rat(1), params, i);
      for (const auto& jump : path.jumps) {
        ++flips;
        CHECK(path.state(jump.step + 1)[0] == -jump.pre[0]);
      }
    }
    CHECK(flips > 0);
  }
  SUBCASE("martingale property of the signed process") {
    const Rat k(1);
    SimParams params = base_params({1.0}, 1e-3, 19);
    const std::size_t n = 20000;
    std::vector<double> ends(n);
    for (std::size_t i = 0; i < n; ++i) {
      Path path = simulate_skew_rank1(k, params, i);
      ends[i] = path.state(path.steps())[0];
    }
    MeanSE m = mean_se(ends);
    CHECK(std::abs(m.mean - 1.0) <= 4.0 * m.se);
  }
}

TEST_CASE("grid-indexed noise couples refinement levels") {
  auto rs = build_rank1({{Rat(1)}});
  RootSystemView view = rs.view();
  SimParams coarse = base_params({1.0}, 2e-3, 23);
  coarse.grid_noise = true;
  coarse.ref_dt = 1e-3;
  SimParams fine = coarse;
  fine.dt = 1e-3;
  // Jump decisions may diverge between levels (a near-threshold flip), but
  // the radial part shares the Brownian path, and the jump-rate integrands
  // depend on |X| only. Coupling is measured there.
  double sum_gap = 0;
  std::size_t used = 0;
  for (uint64_t i = 0; i < 40; ++i) {
    auto pc = simulate_path(view, coarse, i);
    auto pf = simulate_path(view, fine, i);
    if (!pc || !pf) continue;
    sum_gap += std::abs(std::abs(pc->state(pc->steps())[0]) - std::abs(pf->state(pf->steps())[0]));
    ++used;
  }
  REQUIRE(used > 30);
  CHECK(sum_gap / used < 0.1);  // independent paths would sit near 0.5
  // and the same run twice is identical
  auto p1 = simulate_path(view, coarse, 7);
  auto p2 = simulate_path(view, coarse, 7);
  REQUIRE(p1);
  REQUIRE(p2);
  CHECK(p1->states == p2->states);
}

TEST_CASE("jump functional estimates") {
  SimParams params = base_params({1.0}, 1e-3, 29);
  auto rs = build_rank1({{Rat(1)}});
  JumpFunctionalReport rep = estimate_jump_functionals(rs.view(), params, 3000, 0);
  CHECK(rep.n_paths_used > 2500);
  // count minus compensator is centered
  CHECK(std::abs(rep.count_minus_compensator.mean) <= 4.0 * rep.count_minus_compensator.se);
  // compensator equals k * inverse-square integral here (k = 1)
  CHECK(rep.compensator_count.mean == doctest::Approx(rep.inv_sq_integral[0].mean).epsilon(1e-12));
  CHECK(rep.total_jump_amplitude.mean > 0);
}

TEST_CASE("pathwise change-of-variable residual") {
  auto table = IntertwineTableQ::build(build_rank1({{Rat(1)}}), 4);
  RootSystemView view = table.system().view();
  auto fam1 = compile_hermite(hermite_family(table, {1}), table.system());
  auto fam2 = compile_hermite(hermite_family(table, {2}), table.system());
  SimParams params = base_params({1.0}, 1e-3, 31);

  SUBCASE("linear case equals the reconstruction identity") {
    for (uint64_t i = 0; i < 20; ++i) {
      auto path = simulate_path(view, params, i);
      if (!path) continue;
      double scaled = 3.0 * ito_residual(view, fam1, *path, 1.0);
      CHECK(scaled == doctest::Approx(reconstruction_residual(view, *path)).epsilon(1e-9));
    }
  }
  SUBCASE("quadratic residual shrinks under refinement") {
    const std::size_t n = 400;
    auto mean_res = [&](double dt, uint64_t seed) {
      SimParams p = base_params({1.0}, dt, seed);
      std::vector<double> res;
      for (std::size_t i = 0; i < n; ++i) {
        auto path = simulate_path(view, p, i);
        if (path) res.push_back(ito_residual(view, fam2, *path, 1.0));
      }
      return mean_se(res).mean;
    };
    double coarse = mean_res(2e-3, 37);
    double fine = mean_res(1e-3, 38);
    CHECK(coarse / fine > 1.15);
  }
}

TEST_CASE("batch driver is deterministic under threading") {
  auto rs = build_type_B(2, {{Rat(1), Rat(1)}});
  RootSystemView view = rs.view();
  SimParams params = base_params({1.1, 0.4}, 2e-3, 41);
  const std::size_t n = 200;
  auto run = [&](int threads) {
    std::vector<double> ends(n, 0.0);
    simulate_batch(view, params, n, threads,
                   [&](std::size_t i, const Path& path) { ends[i] = path.state(path.steps())[0]; });
    return ends;
  };
  CHECK(run(1) == run(4));
}
