#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dunkl/chaos.hpp"
#include "dunkl/intertwine.hpp"
#include "dunkl/pathsim.hpp"
#include "dunkl/rootsys.hpp"
#include "dunkl/stats.hpp"

using namespace dunkl;

namespace {
SimParams base_params(double x0 = 1.0, double dt = 1e-3, uint64_t seed = 5) {
  SimParams p;
  p.x0 = {x0};
  p.T = 1.0;
  p.dt = dt;
  p.seed = seed;
  return p;
}
}  // namespace

TEST_CASE("degree-1 expansion matches the hand computation") {
  const Rat k(1);
  auto table = IntertwineTableQ::build(build_rank1({{k}}), 8);
  FunctionalSpec spec{{Rat(1)}, {{1}}};
  ChaosExpansion e = chaos_expand(table, {Rat(1)}, spec);

  // constant x0/(1+2k) = 1/3
  CHECK(e.constant == Q2(Rat(1, 3)));
  REQUIRE(e.terms.size() == 2);
  for (const auto& term : e.terms) {
    REQUIRE(term.legs.size() == 1);
    CHECK(term.legs[0].lower == Rat(0));
    CHECK_FALSE(term.legs[0].upper_is_prev);
    CHECK(term.legs[0].upper == Rat(1));
    if (term.legs[0].eps == 0) {
      CHECK(term.coeff == Polynomial<Q2>::constant(1, Q2(Rat(1, 3))));
      CHECK(term.k_product == Rat(1));
      // integral of (1/3)^2 over (0,1)
      CHECK(term_l2_squared_raw(term) == Q2(Rat(1, 9)));
    } else {
      CHECK(term.legs[0].eps == 1);
      CHECK(term.coeff == Polynomial<Q2>::constant(1, Q2(Rat(0), Rat(1, 3))));  // sqrt2/3
      CHECK(term.k_product == Rat(1));
      CHECK(term_l2_squared_raw(term) == Q2(Rat(2, 9)));
    }
  }
}

TEST_CASE("degree-2 expansion: structure, constants, exact variance") {
  const Rat k(1);
  auto table = IntertwineTableQ::build(build_rank1({{k}}), 8);
  FunctionalSpec spec{{Rat(1)}, {{2}}};
  ChaosExpansion e = chaos_expand(table, {Rat(1)}, spec);

  // constant Q_2(x0, -t) = x0^2/3 + t = 4/3
  CHECK(e.constant == Q2(Rat(4, 3)));
  REQUIRE(e.terms.size() == 3);
  int seen_b = 0, seen_bb = 0, seen_bm = 0;
  for (const auto& term : e.terms) {
    CHECK(term.legs[0].eps == 0);  // the even part kills every outer M leg
    if (term.legs.size() == 1) {
      ++seen_b;
      CHECK(term.coeff == Polynomial<Q2>::constant(1, Q2(Rat(2, 3))));  // 2 x0 / 3
    } else {
      REQUIRE(term.legs.size() == 2);
      CHECK(term.legs[1].upper_is_prev);
      if (term.legs[1].eps == 0) {
        ++seen_bb;
        CHECK(term.coeff == Polynomial<Q2>::constant(2, Q2(Rat(2, 3))));
      } else {
        ++seen_bm;
        CHECK(term.coeff == Polynomial<Q2>::constant(2, Q2(Rat(0), Rat(2, 3))));  // 2 sqrt2 / 3
        CHECK(term.k_product == Rat(1));
      }
    }
  }
  CHECK(seen_b == 1);
  CHECK(seen_bb == 1);
  CHECK(seen_bm == 1);
  // Var(m_2(X_1)) = 4 x0^2 t/(1+2k)^2 + 2 t^2/(1+2k) = 4/9 + 2/3
  Q2 total(0);
  for (const auto& term : e.terms) total += Q2(term.k_product) * term_l2_squared_raw(term);
  CHECK(total == Q2(Rat(4, 9) + Rat(2, 3)));
}

TEST_CASE("zero index and degree overflow") {
  auto table = IntertwineTableQ::build(build_rank1({{Rat(1)}}), 3);
  FunctionalSpec trivial{{Rat(1)}, {{0}}};
  ChaosExpansion e = chaos_expand(table, {Rat(1)}, trivial);
  CHECK(e.constant == Q2(1));
  CHECK(e.terms.empty());
  FunctionalSpec too_big{{Rat(1)}, {{4}}};
  CHECK_THROWS_AS((void)chaos_expand(table, {Rat(1)}, too_big), std::invalid_argument);
  FunctionalSpec bad_times{{Rat(1), Rat(1)}, {{1}, {1}}};
  CHECK_THROWS_AS((void)chaos_expand(table, {Rat(1)}, bad_times), std::invalid_argument);
}

TEST_CASE("two-observation expansion reconstructs in mean square") {
  const Rat k(1);
  auto table = IntertwineTableQ::build(build_rank1({{k}}), 8);
  FunctionalSpec spec{{Rat(1, 2), Rat(1)}, {{1}, {1}}};
  ChaosExpansion e = chaos_expand(table, {Rat(1)}, spec);
  CHECK(!e.terms.empty());
  // E[m_1(X_{1/2}) m_1(X_1)] = E[m_1(X_{1/2}) Q_1(X_{1/2}, -1/2)] = E[m_1(X_{1/2})^2]
  // by the tower property; the constant must match it.
  SimParams params = base_params(1.0, 1e-3, 77);
  IsometryReport rep = chaos_isometry_check(table, {Rat(1)}, spec, e, params, 4000, 0);
  CHECK(std::abs(rep.reconstruction.mean) <= 4.0 * rep.reconstruction.se);
  CHECK(std::abs(rep.functional_mean.mean - e.constant.to_double()) <= 4.0 * rep.functional_mean.se);
  for (std::size_t a = 0; a < rep.term_sq.size(); ++a) {
    CHECK(std::abs(rep.term_sq[a].mean - rep.term_l2[a]) <= 4.0 * rep.term_sq[a].se);
  }
}

TEST_CASE("iterated integrals: unit integrands and the classical identity") {
  const Rat k(1);
  auto table = IntertwineTableQ::build(build_rank1({{k}}), 4);
  RootSystemView view = table.system().view();
  SimParams params = base_params(1.0, 1e-3, 9);

  ChaosTerm bterm(1);
  bterm.legs = {{0, Rat(0), false, Rat(1)}};
  bterm.coeff = Polynomial<Q2>::constant(1, Q2(1));
  ChaosTerm bbterm(2);
  bbterm.legs = {{0, Rat(0), false, Rat(1)}, {0, Rat(0), true, Rat(0)}};
  bbterm.coeff = Polynomial<Q2>::constant(2, Q2(1));
  auto cb = compile_term(bterm);
  auto cbb = compile_term(bbterm);

  const std::size_t n = 3000;
  std::vector<double> residual_bb;
  residual_bb.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto path = simulate_path(view, params, i);
    if (!path) continue;
    MartingaleIncrements inc = martingale_increments(view, *path);
    double w_sum = 0;
    for (std::size_t j = 0; j < path->steps(); ++j) w_sum += path->noise[j];
    CHECK(std::abs(evaluate_chaos_term(cb, *path, inc) - w_sum) < 1e-10);
    residual_bb.push_back(evaluate_chaos_term(cbb, *path, inc) - 0.5 * (w_sum * w_sum - 1.0));
  }
  MeanSE m = mean_se(residual_bb);
  CHECK(std::abs(m.mean) <= 4.0 * m.se);

  SUBCASE("misaligned bounds are rejected") {
    ChaosTerm off(1);
    off.legs = {{0, Rat(0), false, Rat(1, 3) + Rat(1, 1000000)}};
    off.coeff = Polynomial<Q2>::constant(1, Q2(1));
    auto path = simulate_path(view, params, 0);
    REQUIRE(path);
    MartingaleIncrements inc = martingale_increments(view, *path);
    CHECK_THROWS_AS((void)evaluate_chaos_term(compile_term(off), *path, inc), std::invalid_argument);
  }
}

TEST_CASE("linearity of the iterated integral in the integrand") {
  auto table = IntertwineTableQ::build(build_rank1({{Rat(1)}}), 4);
  RootSystemView view = table.system().view();
  SimParams params = base_params(1.0, 2e-3, 15);
  // f(u) = 1, f(u) = u, and their combination 3 + 2u on a B leg
  auto make = [&](std::vector<std::pair<std::vector<uint32_t>, Rat>> monos) {
    ChaosTerm t(1);
    t.legs = {{0, Rat(0), false, Rat(1)}};
    for (auto& [e, c] : monos) t.coeff.add_term(Monomial{e, 0}, Q2(c));
    return compile_term(t);
  };
  auto c1 = make({{{0}, Rat(1)}});
  auto cu = make({{{1}, Rat(1)}});
  auto cmix = make({{{0}, Rat(3)}, {{1}, Rat(2)}});
  for (uint64_t i = 0; i < 20; ++i) {
    auto path = simulate_path(view, params, i);
    if (!path) continue;
    MartingaleIncrements inc = martingale_increments(view, *path);
    double v1 = evaluate_chaos_term(c1, *path, inc);
    double vu = evaluate_chaos_term(cu, *path, inc);
    double vm = evaluate_chaos_term(cmix, *path, inc);
    CHECK(vm == doctest::Approx(3 * v1 + 2 * vu).epsilon(1e-12));
  }
}

TEST_CASE("hermite martingale checks") {
  const Rat k(1);
  auto table = IntertwineTableQ::build(build_rank1({{k}}), 6);
  SimParams params = base_params(1.0, 1e-3, 99);

  SUBCASE("nu = (2): target 4/3") {
    auto rep = hermite_martingale_check(table, {2}, 0.5, 1.0, params, 6000, 0);
    CHECK(rep.target == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(rep.sample_mean.mean - rep.target) <= 4.0 * rep.sample_mean.se);
    for (const auto& tw : rep.tower) {
      CHECK(std::abs(tw.mean) <= 4.0 * tw.se);
    }
  }
  SUBCASE("zero multiplicity: classical second moment") {
    auto t0 = IntertwineTableQ::build(build_rank1({{Rat(0)}}), 6);
    auto rep = hermite_martingale_check(t0, {2}, 0.5, 1.0, params, 6000, 0);
    // E[X_1^2] = x0^2 + 1 = 2 for Brownian motion
    CHECK(rep.target == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(rep.sample_mean.mean - 2.0) <= 4.0 * rep.sample_mean.se);
  }
}

TEST_CASE("product system expansion stays exact") {
  // d = 2 sanity: the recursion handles several Brownian coordinates and roots
  auto table = IntertwineTableQ::build(build_product_rank1(2, {{Rat(1), Rat(1)}}), 4);
  FunctionalSpec spec{{Rat(1)}, {{1, 1}}};
  ChaosExpansion e = chaos_expand(table, {Rat(1), Rat(2)}, spec);
  // m_(1,1)(x) = x1 x2 / 9; constant is Q_(1,1)(x0, -1) = x0_1 x0_2 / 9
  CHECK(e.constant == Q2(Rat(2, 9)));
  CHECK(!e.terms.empty());
  // every term's outermost leg ends at t = 1 and k products are powers of 1
  for (const auto& term : e.terms) {
    CHECK_FALSE(term.legs[0].upper_is_prev);
    CHECK(term.legs[0].upper == Rat(1));
  }
}
