#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "dunkl/dunkl_ops.hpp"
#include "dunkl/intertwine.hpp"
#include "dunkl/poly.hpp"
#include "dunkl/rational.hpp"
#include "dunkl/rng.hpp"
#include "dunkl/rootsys.hpp"

using namespace dunkl;

namespace {

PolyQ var(int dim, int i) { return PolyQ::variable(dim, i); }

PolyQ random_poly(PathRng& rng, int dim, int max_deg) {
  PolyQ p(dim);
  auto monos_all = [&] {
    std::vector<Monomial> out;
    for (int deg = 0; deg <= max_deg; ++deg) {
      for (auto& e : homogeneous_exponents(dim, deg)) out.push_back(Monomial{e, 0});
    }
    return out;
  }();
  for (const auto& m : monos_all) {
    if (rng.uniform() < 0.4) continue;
    int num = static_cast<int>(rng.uniform() * 9) - 4;
    int den = 1 + static_cast<int>(rng.uniform() * 3);
    if (num == 0) continue;
    p.add_term(m, Q2(Rat(num, den)));
  }
  return p;
}

std::vector<Q2> random_point(PathRng& rng, int dim) {
  std::vector<Q2> x;
  for (int i = 0; i < dim; ++i) {
    int num = static_cast<int>(rng.uniform() * 11) - 5;
    int den = 1 + static_cast<int>(rng.uniform() * 4);
    x.emplace_back(Rat(num, den));
  }
  return x;
}

}  // namespace

TEST_CASE("Q(sqrt2) field arithmetic") {
  Q2 a(Rat(1, 3), Rat(-2, 5));
  Q2 b(Rat(7, 2), Rat(1, 4));
  CHECK(a + b - b == a);
  CHECK((a * b) / b == a);
  CHECK(Q2::sqrt2() * Q2::sqrt2() == Q2(2));
  CHECK(Q2(Rat(0), Rat(1)).sign() == 1);
  CHECK(Q2(Rat(-3), Rat(2)).sign() < 0);   // 2 sqrt2 = 2.83 < 3
  CHECK(Q2(Rat(-1), Rat(1)).sign() > 0);   // sqrt2 > 1
  CHECK(Q2(Rat(2), Rat(-1)).sign() > 0);   // 2 > sqrt2
  CHECK(Q2(Rat(1), Rat(-1)).sign() < 0);
  CHECK(Q2(Rat(1, 3), Rat(0)).to_string() == "1/3+0*sqrt2");
  CHECK(Q2(Rat(0), Rat(-1, 2)).to_string() == "0-1/2*sqrt2");
  CHECK(parse_rational("0.125") == Rat(1, 8));
  CHECK(parse_rational("-3/4") == Rat(-3, 4));
  CHECK(parse_rational("10") == Rat(10));
}

TEST_CASE("polynomial arithmetic and canonical printing") {
  PolyQ x = var(2, 0), y = var(2, 1), t = PolyQ::time_variable(2);
  PolyQ p = x * x * y * Q2(3) + t;
  CHECK(p.to_string() == "(3+0*sqrt2)*x1^2*x2 + (1+0*sqrt2)*t");
  PolyQ q = (x + y) * (x - y);
  CHECK(q == x * x - y * y);
  CHECK((p - p).is_zero());
  std::vector<Q2> pt{Q2(2), Q2(1)};
  CHECK(p.eval(pt, Q2(5)) == Q2(17));

  SUBCASE("eval examples") {
    PolyQ e = x * x + PolyQ::time_variable(2);
    std::vector<Q2> p2{Q2(2), Q2(0)};
    CHECK(e.eval(p2, Q2(3)) == Q2(7));
    CHECK(PolyQ::zero(2).eval(p2, Q2(3)) == Q2(0));
    CHECK_THROWS_AS((void)p.eval(std::vector<Q2>{Q2(1)}, Q2(0)), std::invalid_argument);
  }

  SUBCASE("division by linear form with remainder assertion") {
    // (x^2 - y^2) / (x + y) = x - y
    std::vector<Q2> ell{Q2(1), Q2(1)};
    CHECK(q.divide_by_linear_form(ell) == x - y);
    PolyQ bad = x * x + y * y;
    CHECK_THROWS_AS((void)bad.divide_by_linear_form(ell), std::logic_error);
  }

  SUBCASE("float mode prunes relatively tiny coefficients") {
    Polynomial<double> f(1);
    f.add_term(Monomial{{1}, 0}, 1.0);
    f.add_term(Monomial{{0}, 0}, 1e-15);
    CHECK(f.term_count() == 1);
  }
}

TEST_CASE("root system constructions and invariants") {
  PathRng rng(2024, 0);

  SUBCASE("rank1") {
    auto rs = build_rank1({{Rat(1)}});
    CHECK(rs.roots.size() == 1);
    CHECK(rs.roots[0][0] == Q2::sqrt2());
    CHECK(rs.gamma() == Rat(1));
    std::vector<Q2> x{Q2(3)};
    CHECK(rs.reflect(0, x)[0] == Q2(-3));
    CHECK(rs.pairing(0, std::vector<Q2>{Q2(1)}) == Q2::sqrt2());
    CHECK(rs.pairing(0, std::vector<Q2>{Q2(0)}) == Q2(0));
    CHECK(rs.chamber_project({Q2(-3)})[0] == Q2(3));
    CHECK(rs.chamber_project({Q2(0)})[0] == Q2(0));
  }

  SUBCASE("product of rank ones") {
    auto rs = build_product_rank1(2, {{Rat(1, 2), Rat(1, 2)}});
    CHECK(rs.roots.size() == 2);
    CHECK(rs.n_orbits == 2);
    CHECK(rs.gamma() == Rat(1));
    std::vector<Q2> x{Q2(3), Q2(5)};
    auto y = rs.reflect(0, x);
    CHECK(y[0] == Q2(-3));
    CHECK(y[1] == Q2(5));
    auto proj = rs.chamber_project({Q2(-3), Q2(5)});
    CHECK(proj[0] == Q2(3));
    CHECK(proj[1] == Q2(5));
  }

  SUBCASE("B2: four positive roots, two orbits, textbook gamma") {
    auto rs = build_type_B(2, {{Rat(1, 3), Rat(2)}});
    CHECK(rs.roots.size() == 4);
    CHECK(rs.n_orbits == 2);
    CHECK(rs.gamma() == Rat(2, 3) + Rat(4));
    // e1 - e2 already has squared norm 2; pairing with (1,1) vanishes
    std::vector<Q2> ones{Q2(1), Q2(1)};
    bool found = false;
    for (size_t r = 0; r < rs.roots.size(); ++r) {
      if (rs.roots[r][0] == Q2(1) && rs.roots[r][1] == Q2(-1)) {
        CHECK(rs.pairing(static_cast<int>(r), ones) == Q2(0));
        found = true;
      }
    }
    CHECK(found);
  }

  SUBCASE("A2 lives in dimension 3 with one orbit") {
    auto rs = build_type_A(2, {{Rat(1)}});
    CHECK(rs.dim == 3);
    CHECK(rs.roots.size() == 3);
    CHECK(rs.n_orbits == 1);
    CHECK(rs.gamma() == Rat(3));
  }

  SUBCASE("errors: orbit count and negative multiplicity") {
    CHECK_THROWS_AS(build_type_B(2, {{Rat(1)}}), std::invalid_argument);
    CHECK_THROWS_AS(build_rank1({{Rat(-1)}}), std::invalid_argument);
    CHECK_THROWS_AS(build_dihedral_exact(5, {{Rat(1)}}), std::invalid_argument);
  }

  SUBCASE("reflection involution and isometry on random rational points") {
    auto rs = build_type_B(2, {{Rat(1), Rat(1, 2)}});
    for (int trial = 0; trial < 200; ++trial) {
      auto x = random_point(rng, 2);
      int r = static_cast<int>(rng.uniform() * rs.roots.size());
      auto y = rs.reflect(r, x);
      auto z = rs.reflect(r, y);
      CHECK(z == x);
      Q2 nx(0), ny(0);
      for (int i = 0; i < 2; ++i) {
        nx += x[i] * x[i];
        ny += y[i] * y[i];
      }
      CHECK(nx == ny);
    }
  }

  SUBCASE("closure under reflections, exact membership") {
    for (const auto& rs : {build_type_B(3, {{Rat(1), Rat(2)}}), build_type_D(3, {{Rat(1)}}),
                           build_dihedral_exact(4, {{Rat(1), Rat(1, 2)}})}) {
      for (size_t g = 0; g < rs.roots.size(); ++g) {
        for (size_t r = 0; r < rs.roots.size(); ++r) {
          auto img = rs.reflect(static_cast<int>(g), std::span<const Q2>(rs.roots[r]));
          CHECK(detail::find_root(rs.roots, img) >= 0);
        }
      }
    }
  }

  SUBCASE("chamber projection is W-invariant") {
    auto rs = build_type_B(2, {{Rat(1), Rat(1)}});
    for (int trial = 0; trial < 50; ++trial) {
      auto x = random_point(rng, 2);
      auto ref = rs.chamber_project(x);
      auto y = x;
      int depth = 1 + static_cast<int>(rng.uniform() * 6);
      for (int step = 0; step < depth; ++step) {
        y = rs.reflect(static_cast<int>(rng.uniform() * rs.roots.size()), y);
      }
      CHECK(rs.chamber_project(y) == ref);
    }
  }

  SUBCASE("float dihedral fallback") {
    auto rs = build_dihedral_float(5, {{Rat(1)}});
    CHECK(rs.roots.size() == 5);
    CHECK(rs.n_orbits == 1);
    CHECK(rs.gamma() == Rat(5));
    auto rs6 = build_dihedral_float(6, {{Rat(1), Rat(2)}});
    CHECK(rs6.n_orbits == 2);
  }
}

TEST_CASE("Dunkl operators, rank-1 oracle values") {
  auto rs = build_rank1({{Rat(1)}});  // k = 1
  const Rat k(1);
  PolyQ x = var(1, 0);
  PolyQ one = PolyQ::constant(1, Q2(1));

  CHECK(dunkl_T(rs, 0, one).is_zero());
  CHECK(dunkl_T(rs, 0, x * x) == Q2(2) * x);
  // T(x^3) = (3 + 2k) x^2
  CHECK(dunkl_T(rs, 0, x * x * x) == Q2(Rat(3) + 2 * k) * (x * x));
  // L(x^2) = 2 + 4k
  CHECK(dunkl_laplacian_via_T(rs, x * x) == PolyQ::constant(1, Q2(Rat(2) + 4 * k)));
  CHECK(dunkl_laplacian_closed_form(rs, x * x) == dunkl_laplacian_via_T(rs, x * x));
}

TEST_CASE("divided differences") {
  auto rs1 = build_rank1({{Rat(2, 3)}});
  PolyQ x = var(1, 0);
  // (x^3 - (-x)^3) / (sqrt2 x) = sqrt2 x^2
  CHECK(divided_difference(rs1, 0, x * x * x) == Q2::sqrt2() * (x * x));
  CHECK(divided_difference(rs1, 0, x * x).is_zero());

  auto rs2 = build_product_rank1(2, {{Rat(1), Rat(1)}});
  PolyQ x1 = var(2, 0), x2 = var(2, 1);
  CHECK(divided_difference(rs2, 0, x1 * x2) == Q2::sqrt2() * x2);
}

TEST_CASE("generator kills linear functions, any system") {
  PathRng rng(7, 0);
  for (const auto& rs : {build_type_A(2, {{Rat(3, 2)}}), build_type_B(2, {{Rat(1), Rat(1, 2)}}),
                         build_product_rank1(3, {{Rat(1), Rat(2), Rat(1, 3)}})}) {
    PolyQ lin(rs.dim);
    for (int i = 0; i < rs.dim; ++i) {
      lin += var(rs.dim, i) * Q2(Rat(static_cast<int>(rng.uniform() * 7) - 3));
    }
    CHECK(dunkl_laplacian_via_T(rs, lin).is_zero());
  }
}

TEST_CASE("both Dunkl Laplacian routes agree on random polynomials") {
  PathRng rng(99, 0);
  for (const auto& rs : {build_type_B(2, {{Rat(1), Rat(1, 2)}}), build_type_A(2, {{Rat(2)}})}) {
    for (int trial = 0; trial < 10; ++trial) {
      PolyQ p = random_poly(rng, rs.dim, 5);
      CHECK(dunkl_laplacian_via_T(rs, p) == dunkl_laplacian_closed_form(rs, p));
    }
  }
}

TEST_CASE("Dunkl operators commute and lower degree") {
  PathRng rng(123, 0);
  auto rs = build_type_B(2, {{Rat(1), Rat(2)}});
  for (int trial = 0; trial < 10; ++trial) {
    PolyQ p = random_poly(rng, 2, 5);
    CHECK(dunkl_T(rs, 0, dunkl_T(rs, 1, p)) == dunkl_T(rs, 1, dunkl_T(rs, 0, p)));
  }
  PolyQ h = var(2, 0) * var(2, 0) * var(2, 1);  // homogeneous degree 3
  PolyQ th = dunkl_T(rs, 0, h);
  CHECK(th.is_space_homogeneous());
  CHECK(th.max_space_degree() == 2);
}

TEST_CASE("multiplicity zero reduces to classical operators") {
  PathRng rng(5, 0);
  auto rs = build_type_B(2, {{Rat(0), Rat(0)}});
  for (int trial = 0; trial < 20; ++trial) {
    PolyQ p = random_poly(rng, 2, 4);
    CHECK(dunkl_T(rs, 0, p) == p.derivative_space(0));
    CHECK(dunkl_laplacian_via_T(rs, p) == laplacian(p));
  }
}

TEST_CASE("radial generator identity, exact both sides") {
  for (const auto& rs : {build_rank1({{Rat(3, 4)}}), build_type_B(2, {{Rat(1), Rat(1, 2)}}),
                         build_type_A(2, {{Rat(1)}})}) {
    // G(s) = s i.e. u = |x|^2: both sides equal d + 2 gamma
    auto [lhs1, rhs1] = radial_generator_pair(rs, {Rat(0), Rat(1)});
    CHECK(lhs1 == rhs1);
    CHECK(lhs1 == PolyQ::constant(rs.dim, Q2(Rat(rs.dim) + 2 * rs.gamma())));
    // G(s) = s^2 i.e. u = |x|^4
    auto [lhs2, rhs2] = radial_generator_pair(rs, {Rat(0), Rat(0), Rat(1)});
    CHECK(lhs2 == rhs2);
    // constant G
    auto [lhs0, rhs0] = radial_generator_pair(rs, {Rat(5)});
    CHECK(lhs0.is_zero());
    CHECK(rhs0.is_zero());
  }
}
