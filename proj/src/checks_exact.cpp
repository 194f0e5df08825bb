// Exact-arithmetic check batteries: operator identities over Q(sqrt2),
// the intertwining table, space-time harmonicity, and the radial form of
// the generator.

#include <sstream>

#include "dunkl/checks.hpp"
#include "dunkl/dunkl_ops.hpp"
#include "dunkl/intertwine.hpp"
#include "dunkl/rng.hpp"

namespace dunkl::battery {

namespace {

CheckResult exact_result(std::string name, bool ok, std::size_t n_cases, std::string detail,
                         std::vector<std::string> covers) {
  CheckResult r;
  r.name = std::move(name);
  r.kind = "exact";
  r.statistic = static_cast<double>(n_cases);
  r.threshold = 0;
  r.exact = true;
  r.passed = ok;
  r.detail = std::move(detail);
  r.covers = std::move(covers);
  return r;
}

PolyQ random_poly(PathRng& rng, int dim, int max_deg) {
  PolyQ p(dim);
  for (int deg = 0; deg <= max_deg; ++deg) {
    for (const auto& e : homogeneous_exponents(dim, deg)) {
      if (rng.uniform() < 0.45) continue;
      int num = static_cast<int>(rng.uniform() * 9) - 4;
      if (num == 0) continue;
      int den = 1 + static_cast<int>(rng.uniform() * 3);
      p.add_term(Monomial{e, 0}, Q2(Rat(num, den)));
    }
  }
  return p;
}

struct BatterySystem {
  std::string label;
  RootSystem<Q2> rs;
  RootSystem<Q2> rs_zero;  // same roots, zero multiplicities
};

std::vector<BatterySystem> operator_battery() {
  std::vector<BatterySystem> out;
  auto add = [&](const std::string& label, RootSystem<Q2> rs, RootSystem<Q2> zero) {
    out.push_back({label, std::move(rs), std::move(zero)});
  };
  add("rank1[k=1]", build_rank1({{Rat(1)}}), build_rank1({{Rat(0)}}));
  add("product2[k=(1,1/2)]", build_product_rank1(2, {{Rat(1), Rat(1, 2)}}),
      build_product_rank1(2, {{Rat(0), Rat(0)}}));
  add("product3[k=(1,2,1/2)]", build_product_rank1(3, {{Rat(1), Rat(2), Rat(1, 2)}}),
      build_product_rank1(3, {{Rat(0), Rat(0), Rat(0)}}));
  add("A2[k=1]", build_type_A(2, {{Rat(1)}}), build_type_A(2, {{Rat(0)}}));
  add("B2[k=(1,1/2)]", build_type_B(2, {{Rat(1), Rat(1, 2)}}), build_type_B(2, {{Rat(0), Rat(0)}}));
  return out;
}

}  // namespace

std::vector<CheckResult> operator_suite() {
  std::vector<CheckResult> out;
  auto systems = operator_battery();
  std::ostringstream labels;
  for (const auto& s : systems) labels << s.label << " ";

  {
    bool ok = true;
    std::size_t cases = 0;
    for (const auto& sys : systems) {
      PathRng rng(derive_seed(1, "commutativity:" + sys.label), 0);
      for (int trial = 0; trial < 20; ++trial) {
        PolyQ p = random_poly(rng, sys.rs.dim, 5);
        for (int i = 0; i < sys.rs.dim && ok; ++i) {
          for (int j = i + 1; j < sys.rs.dim; ++j) {
            ++cases;
            if (!(dunkl_T(sys.rs, i, dunkl_T(sys.rs, j, p)) == dunkl_T(sys.rs, j, dunkl_T(sys.rs, i, p)))) {
              ok = false;
              break;
            }
          }
        }
        if (sys.rs.dim == 1) ++cases;  // commutativity vacuous, still exercises T
      }
    }
    out.push_back(exact_result("symbolic.commutativity", ok, cases, "T_i T_j = T_j T_i on " + labels.str(),
                               {"polyalg.dunkl_T", "rootsys.build"}));
  }
  {
    bool ok = true;
    std::size_t cases = 0;
    for (const auto& sys : systems) {
      for (int deg = 1; deg <= 5 && ok; ++deg) {
        for (const auto& e : homogeneous_exponents(sys.rs.dim, deg)) {
          PolyQ mono = PolyQ::monomial(sys.rs.dim, Monomial{e, 0}, Q2(1));
          for (int i = 0; i < sys.rs.dim; ++i) {
            ++cases;
            PolyQ img = dunkl_T(sys.rs, i, mono);
            if (!img.is_zero() && !(img.is_space_homogeneous() && img.max_space_degree() == deg - 1)) {
              ok = false;
              break;
            }
          }
          if (!ok) break;
        }
      }
    }
    out.push_back(exact_result("symbolic.degree_lowering", ok, cases,
                               "homogeneous inputs map to degree n-1 or zero on " + labels.str(),
                               {"polyalg.dunkl_T"}));
  }
  {
    bool ok = true;
    std::size_t cases = 0;
    for (const auto& sys : systems) {
      PathRng rng(derive_seed(2, "classical:" + sys.label), 0);
      for (int trial = 0; trial < 20 && ok; ++trial) {
        PolyQ p = random_poly(rng, sys.rs.dim, 5);
        ++cases;
        for (int i = 0; i < sys.rs.dim; ++i) {
          if (!(dunkl_T(sys.rs_zero, i, p) == p.derivative_space(i))) ok = false;
        }
        if (!(dunkl_laplacian_via_T(sys.rs_zero, p) == laplacian(p))) ok = false;
      }
    }
    out.push_back(exact_result("symbolic.zero_multiplicity_reduction", ok, cases,
                               "k = 0 collapses T to the gradient and L to the Laplacian",
                               {"polyalg.dunkl_T", "polyalg.dunkl_L"}));
  }
  {
    bool ok = true;
    std::size_t cases = 0;
    for (const auto& sys : systems) {
      PathRng rng(derive_seed(3, "routes:" + sys.label), 0);
      for (int trial = 0; trial < 20 && ok; ++trial) {
        PolyQ p = random_poly(rng, sys.rs.dim, 5);
        ++cases;
        if (!(dunkl_laplacian_via_T(sys.rs, p) == dunkl_laplacian_closed_form(sys.rs, p))) ok = false;
      }
    }
    out.push_back(exact_result("symbolic.laplacian_two_routes", ok, cases,
                               "sum of squared operators vs the closed form, exact equality on " + labels.str(),
                               {"polyalg.dunkl_L", "polyalg.divided_difference"}));
  }
  {
    // chamber projection: W-invariance and idempotence on random points
    auto rs = build_type_B(2, {{Rat(1), Rat(1, 2)}});
    PathRng rng(derive_seed(4, "chamber"), 0);
    bool ok = true;
    std::size_t cases = 0;
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<Q2> x{Q2(Rat(static_cast<int>(rng.uniform() * 11) - 5, 2)),
                        Q2(Rat(static_cast<int>(rng.uniform() * 11) - 5, 3))};
      auto proj = rs.chamber_project(x);
      auto y = x;
      for (int step = 0; step < 5; ++step) y = rs.reflect(static_cast<int>(rng.uniform() * 4), y);
      ++cases;
      if (!(rs.chamber_project(y) == proj && rs.chamber_project(proj) == proj)) ok = false;
      for (std::size_t r = 0; r < rs.roots.size(); ++r) {
        if (rs.pairing(static_cast<int>(r), proj).sign() < 0) ok = false;
      }
    }
    out.push_back(exact_result("symbolic.chamber_projection", ok, cases,
                               "projection is W-invariant, idempotent, lands in the closed chamber",
                               {"rootsys.chamber_project", "rootsys.reflect", "rootsys.pairing"}));
  }
  return out;
}

std::vector<CheckResult> intertwine_suite() {
  std::vector<CheckResult> out;
  {
    bool ok = true;
    std::size_t cases = 0;
    for (const Rat& k : {Rat(1), Rat(2, 3)}) {
      auto table = IntertwineTableQ::build(build_rank1({{k}}), 8);
      for (uint32_t n = 1; n <= 8; ++n) {
        ++cases;
        PolyQ got = dunkl_T(table.system(), 0, table.generalized_monomial({n}));
        if (!(got == Q2(static_cast<int>(n)) * table.generalized_monomial({n - 1}))) ok = false;
      }
      // explicit low-degree values x/(1+2k), x^2/(1+2k)
      Q2 c1 = Q2(Rat(1)) / Q2(Rat(1) + 2 * k);
      if (!(table.generalized_monomial({1}) == c1 * PolyQ::variable(1, 0))) ok = false;
      if (!(table.generalized_monomial({2}) ==
            c1 * (PolyQ::variable(1, 0) * PolyQ::variable(1, 0)))) {
        ok = false;
      }
      cases += 2;
    }
    out.push_back(exact_result("intertwine.defining_relation_rank1", ok, cases,
                               "T m_n = n m_{n-1} to degree 8 at k = 1 and 2/3, plus the closed low-degree values",
                               {"intertwine.build_intertwine", "polyalg.eval"}));
  }
  {
    auto table = IntertwineTableQ::build(build_type_B(2, {{Rat(1), Rat(1, 2)}}), 5);
    bool ok = true;
    std::size_t cases = 0;
    for (int n = 1; n <= 5; ++n) {
      for (const auto& nu : homogeneous_exponents(2, n)) {
        PolyQ m = table.generalized_monomial(nu);
        for (int i = 0; i < 2; ++i) {
          ++cases;
          PolyQ expect(2);
          if (nu[i] > 0) {
            auto down = nu;
            down[i] -= 1;
            expect = Q2(static_cast<int>(nu[i])) * table.generalized_monomial(down);
          }
          if (!(dunkl_T(table.system(), i, m) == expect)) ok = false;
        }
      }
    }
    out.push_back(exact_result("intertwine.defining_relation_B2", ok, cases,
                               "T_i m_nu = nu_i m_{nu - e_i} to degree 5 on B2", {"intertwine.build_intertwine"}));
  }
  {
    auto table = IntertwineTableQ::build(build_type_B(2, {{Rat(1), Rat(2)}}), 5);
    PathRng rng(derive_seed(5, "invertibility"), 0);
    bool ok = true;
    std::size_t cases = 0;
    for (int trial = 0; trial < 8; ++trial) {
      PolyQ p = random_poly(rng, 2, 5);
      ++cases;
      if (!(table.apply(table.apply_inverse(p)) == p)) ok = false;
      if (!(table.apply_inverse(table.apply(p)) == p)) ok = false;
    }
    // W-equivariance on the reflection generators
    PolyQ p = PolyQ::variable(2, 0) * PolyQ::variable(2, 0) * PolyQ::variable(2, 1) +
              Q2(3) * PolyQ::variable(2, 1);
    for (std::size_t r = 0; r < table.system().roots.size(); ++r) {
      ++cases;
      PolyQ lhs = table.apply(compose_reflection(table.system(), static_cast<int>(r), p));
      PolyQ rhs = compose_reflection(table.system(), static_cast<int>(r), table.apply(p));
      if (!(lhs == rhs)) ok = false;
    }
    out.push_back(exact_result("intertwine.isomorphism_and_equivariance", ok, cases,
                               "per-degree maps invert exactly; V commutes with the reflection action",
                               {"intertwine.build_intertwine"}));
  }
  return out;
}

std::vector<CheckResult> harmonicity_suite() {
  std::vector<CheckResult> out;
  struct Case {
    std::string label;
    RootSystem<Q2> rs;
    int max_deg;
  };
  std::vector<Case> cases_list;
  cases_list.push_back({"rank1[k=1]", build_rank1({{Rat(1)}}), 6});
  cases_list.push_back({"rank1[k=3/5]", build_rank1({{Rat(3, 5)}}), 6});
  cases_list.push_back({"rank1[k=2]", build_rank1({{Rat(2)}}), 6});
  cases_list.push_back({"product2[k=(1,1)]", build_product_rank1(2, {{Rat(1), Rat(1)}}), 4});
  cases_list.push_back({"B2[k=(1,1/2)]", build_type_B(2, {{Rat(1), Rat(1, 2)}}), 4});

  bool harmonic_ok = true, companion_ok = true;
  std::size_t n_harm = 0, n_comp = 0;
  for (const auto& c : cases_list) {
    auto table = IntertwineTableQ::build(c.rs, c.max_deg);
    for (int deg = 0; deg <= c.max_deg; ++deg) {
      for (const auto& nu : homogeneous_exponents(c.rs.dim, deg)) {
        auto fam = hermite_family(table, nu);
        ++n_harm;
        PolyQ residual =
            fam.Q.derivative_time() + Q2(Rat(1, 2)) * dunkl_laplacian_via_T(c.rs, fam.Q);
        if (!residual.is_zero()) harmonic_ok = false;
        if (!(fam.Q.time_coefficient(0) == table.generalized_monomial(nu))) harmonic_ok = false;
        if (deg == 0) continue;
        for (const auto& g : fam.grad) {
          ++n_comp;
          if (g.max_space_degree() > deg - 1) companion_ok = false;
        }
        for (std::size_t r = 0; r < c.rs.roots.size(); ++r) {
          ++n_comp;
          if (fam.jump_raw[r].max_space_degree() > deg - 1) companion_ok = false;
          PolyQ pairing_poly(c.rs.dim);
          for (int i = 0; i < c.rs.dim; ++i) {
            pairing_poly += PolyQ::variable(c.rs.dim, i) * c.rs.roots[r][i];
          }
          PolyQ rebuilt = fam.jump_raw[r] * pairing_poly +
                          compose_reflection(c.rs, static_cast<int>(r), fam.Q);
          if (!(rebuilt == fam.Q)) companion_ok = false;
        }
      }
    }
  }
  out.push_back(exact_result("hermite.space_time_harmonicity", harmonic_ok, n_harm,
                             "(d/dt + L/2) Q_nu = 0 exactly; Q_nu(., 0) = m_nu",
                             {"intertwine.hermite_Q", "intertwine.classical_hermite", "polyalg.dunkl_L"}));
  out.push_back(exact_result("hermite.integrand_companions", companion_ok, n_comp,
                             "integrands have degree <= |nu| - 1 and rebuild Q across reflections",
                             {"intertwine.hermite_Q", "polyalg.divided_difference"}));
  return out;
}

std::vector<CheckResult> radial_identity_suite() {
  bool ok = true;
  std::size_t cases = 0;
  for (const auto& rs : {build_rank1({{Rat(3, 4)}}), build_type_B(2, {{Rat(1), Rat(1, 2)}}),
                         build_type_A(2, {{Rat(1)}})}) {
    const std::vector<std::vector<Rat>> gs = {
        {Rat(7)}, {Rat(0), Rat(1)}, {Rat(0), Rat(0), Rat(1)}, {Rat(1), Rat(-2), Rat(0), Rat(3)}};
    for (const auto& g : gs) {
      ++cases;
      auto [lhs, rhs] = radial_generator_pair(rs, g);
      if (!(lhs == rhs)) ok = false;
    }
    // |x|^2 value pinned: (1/2) L |x|^2 = d + 2 gamma
    auto [lhs, rhs] = radial_generator_pair(rs, {Rat(0), Rat(1)});
    if (!(lhs == PolyQ::constant(rs.dim, Q2(Rat(rs.dim) + 2 * rs.gamma())))) ok = false;
    ++cases;
  }
  std::vector<CheckResult> out;
  out.push_back(exact_result("density.radial_generator_identity", ok, cases,
                             "generator on radial polynomials matches the Bessel form exactly",
                             {"density.radial_generator_check", "polyalg.dunkl_L"}));
  return out;
}

}  // namespace dunkl::battery
