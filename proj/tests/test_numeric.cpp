#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dunkl/bessel.hpp"
#include "dunkl/density.hpp"
#include "dunkl/intertwine.hpp"
#include "dunkl/quadrature.hpp"
#include "dunkl/rng.hpp"
#include "dunkl/rootsys.hpp"
#include "dunkl/stats.hpp"

using namespace dunkl;

TEST_CASE("adaptive quadrature") {
  CHECK(integrate_or_throw([](double x) { return x * x; }, 0, 3, 1e-12) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(integrate_or_throw([](double x) { return std::exp(-x); }, 0, 40, 1e-12) ==
        doctest::Approx(1.0).epsilon(1e-11));
  // endpoint singularity in the derivative, like the weight |x|^{2k}
  double v = integrate_or_throw([](double x) { return std::pow(x, 0.2); }, 0, 1, 1e-11);
  CHECK(v == doctest::Approx(1.0 / 1.2).epsilon(1e-9));
  QuadratureResult bad = adaptive_integrate([](double x) { return std::abs(x) < 1e-12 ? 1e12 : 1.0 / std::sqrt(std::abs(x)); },
                                            -1, 1, 1e-14, 8);
  CHECK_FALSE(bad.converged);
}

TEST_CASE("modified Bessel function, both regimes") {
  // I_{1/2}(z) = sqrt(2/(pi z)) sinh(z)
  auto i_half = [](double z) { return std::sqrt(2.0 / (3.14159265358979323846 * z)) * std::sinh(z); };
  for (double z : {0.1, 1.0, 5.0, 19.9, 20.1, 30.0, 80.0}) {
    double expect = i_half(z) * std::exp(-z);
    CHECK(bessel_i_scaled(0.5, z) == doctest::Approx(expect).epsilon(1e-10));
  }
  // three-term recurrence I_{nu-1} - I_{nu+1} = (2 nu / z) I_nu inside each
  // regime, for a fractional order
  for (double z : {6.0, 19.5, 25.0, 60.0}) {
    double lhs = bessel_i_scaled(0.7, z) - bessel_i_scaled(2.7, z);
    double rhs = (2.0 * 1.7 / z) * bessel_i_scaled(1.7, z);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
  // regime boundary: allow for the function's own slope ~ -1/(2z)
  double below = bessel_i_scaled(1.7, 19.999999);
  double above = bessel_i_scaled(1.7, 20.000001);
  CHECK(below == doctest::Approx(above).epsilon(5e-8));
  // I_0(0) = 1
  CHECK(bessel_i_scaled(0.0, 0.0) == 1.0);
}

TEST_CASE("Bessel transition density") {
  SUBCASE("dimension 3 closed form") {
    double r0 = 1.0, t = 0.7;
    auto closed = [&](double r) {
      double c = 1.0 / std::sqrt(2.0 * 3.14159265358979323846 * t);
      return r / r0 * c * (std::exp(-(r - r0) * (r - r0) / (2 * t)) - std::exp(-(r + r0) * (r + r0) / (2 * t)));
    };
    for (double r : {0.2, 0.8, 1.5, 3.0}) {
      CHECK(bessel_transition_density(3.0, r0, r, t) == doctest::Approx(closed(r)).epsilon(1e-10));
    }
  }
  SUBCASE("normalization, fractional dimension and zero start") {
    for (double n_dim : {2.2, 3.0, 6.0}) {
      double mass = integrate_or_throw([&](double r) { return bessel_transition_density(n_dim, 1.0, r, 0.5); },
                                       0.0, 12.0, 1e-9);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
      double mass0 = integrate_or_throw([&](double r) { return bessel_transition_density(n_dim, 0.0, r, 0.5); },
                                        0.0, 12.0, 1e-9);
      CHECK(mass0 == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("statistics helpers") {
  std::vector<double> xs{1, 2, 3, 4, 5};
  MeanSE m = mean_se(xs);
  CHECK(m.mean == doctest::Approx(3.0));
  CHECK(m.se == doctest::Approx(std::sqrt(2.5 / 5)));
  // known asymptotic value: survival at 1.358 is about 0.05
  CHECK(kolmogorov_sf(1.358) == doctest::Approx(0.0504).epsilon(0.02));

  PathRng rng(99, 7);
  std::vector<double> u(4000);
  for (auto& v : u) v = rng.uniform();
  double p = ks_p_value(ks_statistic(u, [](double x) { return std::min(1.0, std::max(0.0, x)); }),
                        static_cast<double>(u.size()));
  CHECK(p > 0.01);
  for (auto& v : u) v = 0.8 * v;  // wrong law must be rejected decisively
  double p_bad = ks_p_value(ks_statistic(u, [](double x) { return std::min(1.0, std::max(0.0, x)); }),
                            static_cast<double>(u.size()));
  CHECK(p_bad < 1e-6);
}

TEST_CASE("counter-based rng") {
  SUBCASE("streams are reproducible and distinct") {
    PathRng a1(123, 5), a2(123, 5), b(123, 6);
    bool same = true, differ = false;
    for (int i = 0; i < 64; ++i) {
      double x = a1.uniform(), y = a2.uniform(), z = b.uniform();
      same = same && (x == y);
      differ = differ || (x != z);
    }
    CHECK(same);
    CHECK(differ);
  }
  SUBCASE("grid-indexed draws are stateless") {
    GridNoise g(2024, 3);
    CHECK(g.normal_at(17, 2) == g.normal_at(17, 2));
    CHECK(g.normal_at(17, 2) != g.normal_at(18, 2));
  }
  SUBCASE("normal moments") {
    PathRng rng(7, 0);
    double s = 0, s2 = 0, s4 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      double x = rng.normal();
      s += x;
      s2 += x * x;
      s4 += x * x * x * x;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
  }
  SUBCASE("gamma sampler mean and variance") {
    PathRng rng(11, 0);
    for (double alpha : {0.4, 1.0, 2.5}) {
      double s = 0, s2 = 0;
      const int n = 120000;
      for (int i = 0; i < n; ++i) {
        double x = rng.gamma(alpha);
        s += x;
        s2 += x * x;
      }
      double mean = s / n;
      double var = s2 / n - mean * mean;
      CHECK(mean == doctest::Approx(alpha).epsilon(0.03));
      CHECK(var == doctest::Approx(alpha).epsilon(0.06));
    }
  }
}

TEST_CASE("weight function and normalization constant") {
  auto rs = build_rank1({{Rat(1)}});
  RootSystemView v = rs.view();
  std::vector<double> y{1.5};
  CHECK(dunkl_weight(v, y) == doctest::Approx(std::pow(std::sqrt(2.0) * 1.5, 2.0)).epsilon(1e-12));

  SUBCASE("zero multiplicity weight is one, Gaussian constant") {
    auto rs0 = build_type_B(2, {{Rat(0), Rat(0)}});
    RootSystemView v0 = rs0.view();
    std::vector<double> z{0.3, -2.0};
    CHECK(dunkl_weight(v0, z) == 1.0);
    CkEstimate ck = compute_ck(v0, CkMethod::ClosedForm);
    CHECK(ck.value == doctest::Approx(2.0 * 3.14159265358979323846).epsilon(1e-12));
  }
  SUBCASE("homogeneity of degree 2 gamma") {
    auto rsb = build_type_B(2, {{Rat(1), Rat(1, 2)}});
    RootSystemView vb = rsb.view();
    PathRng rng(5, 0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> z{2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
      std::vector<double> z2{2 * z[0], 2 * z[1]};
      double ratio = dunkl_weight(vb, z2) / dunkl_weight(vb, z);
      CHECK(ratio == doctest::Approx(std::pow(2.0, 2.0 * vb.gamma)).epsilon(1e-9));
    }
  }
  SUBCASE("closed form vs quadrature vs Monte Carlo, rank-1") {
    for (const Rat& k : {Rat(3, 5), Rat(1), Rat(2)}) {
      auto rsk = build_rank1({{k}});
      RootSystemView vk = rsk.view();
      CkEstimate closed = compute_ck(vk, CkMethod::ClosedForm);
      double kd = to_double(k);
      CHECK(closed.value ==
            doctest::Approx(std::pow(2.0, 2 * kd + 0.5) * std::tgamma(kd + 0.5)).epsilon(1e-12));
      CkEstimate quad = compute_ck(vk, CkMethod::Quadrature);
      CHECK(std::abs(closed.value - quad.value) / closed.value < 1e-8);
      CkEstimate mc = compute_ck(vk, CkMethod::MonteCarlo, 99, 200000);
      CHECK(std::abs(mc.value - closed.value) / closed.value < 5 * std::max(mc.rel_error, 1e-4));
    }
  }
  SUBCASE("product closed form via independence") {
    auto rsp = build_product_rank1(2, {{Rat(1), Rat(1)}});
    RootSystemView vp = rsp.view();
    CkEstimate closed = compute_ck(vp, CkMethod::ClosedForm);
    double factor = std::pow(2.0, 2.5) * std::tgamma(1.5);
    CHECK(closed.value == doctest::Approx(factor * factor).epsilon(1e-12));
    CkEstimate quad = compute_ck(vp, CkMethod::Quadrature);
    CHECK(std::abs(closed.value - quad.value) / closed.value < 1e-7);
  }
}

TEST_CASE("transition density") {
  auto table = IntertwineTableQ::build(build_rank1({{Rat(1)}}), 64);
  DensityContext ctx = make_density_context(table, CkMethod::ClosedForm);
  CHECK(ctx.bessel_dimension == doctest::Approx(3.0));

  SUBCASE("from the origin the kernel factor drops out") {
    std::vector<double> zero{0.0}, y{1.2};
    double got = transition_density(ctx, zero, y, 0.8);
    double expect = std::exp(-1.2 * 1.2 / 1.6) * dunkl_weight(ctx.sys, y) /
                    (ctx.ck * std::pow(0.8, ctx.gamma + 0.5));
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("normalization and martingale mean by quadrature") {
    std::vector<double> x{1.0};
    double mass = integrate_or_throw(
        [&](double y) {
          std::vector<double> yv{y};
          return transition_density(ctx, x, yv, 1.0);
        },
        -10, 10, 1e-8, 20000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-5));
    double mean = integrate_or_throw(
        [&](double y) {
          std::vector<double> yv{y};
          return y * transition_density(ctx, x, yv, 1.0);
        },
        -10, 10, 1e-8, 20000);
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-5));
  }
  SUBCASE("chamber density folds the orbit") {
    std::vector<double> x{1.0}, y{0.6};
    std::vector<double> ym{-0.6};
    double folded = transition_density(ctx, x, y, 0.9) + transition_density(ctx, x, ym, 0.9);
    CHECK(chamber_density(ctx, x, y, 0.9) == doctest::Approx(folded).epsilon(1e-12));
    // and matches the Bessel radial law
    CHECK(folded == doctest::Approx(radial_density(ctx, 1.0, 0.6, 0.9)).epsilon(1e-8));
  }
  SUBCASE("zero multiplicity reduces to the Gaussian heat kernel") {
    auto t0 = IntertwineTableQ::build(build_rank1({{Rat(0)}}), 48);
    DensityContext c0 = make_density_context(t0, CkMethod::ClosedForm);
    std::vector<double> x{0.5}, y{-0.4};
    CHECK(transition_density(c0, x, y, 0.6) ==
          doctest::Approx(gaussian_heat_kernel(1, x, y, 0.6)).epsilon(1e-10));
  }
  SUBCASE("kernel truncation overflow propagates") {
    auto small = IntertwineTableQ::build(build_rank1({{Rat(1)}}), 6);
    DensityContext cs = make_density_context(small, CkMethod::ClosedForm);
    std::vector<double> x{3.0}, y{3.0};
    CHECK_THROWS_AS((void)transition_density(cs, x, y, 0.05), std::runtime_error);
  }
}
