#include "dunkl/density.hpp"

#include <cmath>
#include <stdexcept>

#include "dunkl/bessel.hpp"
#include "dunkl/quadrature.hpp"
#include "dunkl/rng.hpp"

namespace dunkl {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool is_coordinate_product(const RootSystemView& sys) {
  if (static_cast<int>(sys.roots.size()) != sys.dim) return false;
  for (int r = 0; r < sys.dim; ++r) {
    int hits = 0;
    for (int i = 0; i < sys.dim; ++i) {
      if (std::abs(sys.roots[r][i]) > 1e-12) {
        ++hits;
        if (std::abs(sys.roots[r][i] - std::sqrt(2.0)) > 1e-12) return false;
      }
    }
    if (hits != 1) return false;
  }
  return true;
}

bool all_multiplicities_zero(const RootSystemView& sys) {
  for (const auto& k : sys.mult_exact) {
    if (k != 0) return false;
  }
  return true;
}

double rank1_factor_closed_form(double k) {
  // int exp(-x^2/2) |sqrt2 x|^{2k} dx = 2^{2k + 1/2} Gamma(k + 1/2)
  return std::pow(2.0, 2.0 * k + 0.5) * std::tgamma(k + 0.5);
}

CkEstimate ck_closed_form(const RootSystemView& sys) {
  CkEstimate out;
  out.method = "closed_form";
  out.rel_error = 1e-14;
  if (all_multiplicities_zero(sys)) {
    out.value = std::pow(2.0 * kPi, 0.5 * sys.dim);
    return out;
  }
  if (!is_coordinate_product(sys)) {
    throw std::invalid_argument("closed-form normalization requires rank-1 or a coordinate product");
  }
  double value = 1;
  // multiplicity of the root along coordinate i
  for (int r = 0; r < static_cast<int>(sys.roots.size()); ++r) value *= rank1_factor_closed_form(sys.mult[r]);
  out.value = value;
  return out;
}

CkEstimate ck_quadrature(const RootSystemView& sys) {
  CkEstimate out;
  out.method = "quadrature";
  if (sys.dim == 1) {
    double k = sys.mult[0];
    auto f = [k](double x) { return std::exp(-0.5 * x * x) * std::pow(std::abs(std::sqrt(2.0) * x), 2.0 * k); };
    double upper = 12.0 + 4.0 * std::sqrt(k + 1.0);
    QuadratureResult q = adaptive_integrate(f, 0.0, upper, 1e-11, 20000);
    if (!q.converged) throw std::runtime_error("normalization quadrature did not converge");
    out.value = 2.0 * q.value;
    out.rel_error = (q.error_estimate + 1e-13) / out.value;
    return out;
  }
  if (sys.dim == 2) {
    double kmax = 0;
    for (double k : sys.mult) kmax = std::max(kmax, k);
    double upper = 12.0 + 4.0 * std::sqrt(kmax + 1.0);
    auto weight_at = [&](double x0, double x1) {
      std::vector<double> y{x0, x1};
      return std::exp(-0.5 * (x0 * x0 + x1 * x1)) * dunkl_weight(sys, y);
    };
    auto inner = [&](double x0) {
      auto f = [&](double x1) { return weight_at(x0, x1); };
      QuadratureResult q = adaptive_integrate(f, -upper, upper, 1e-11, 4000);
      if (!q.converged) throw std::runtime_error("normalization quadrature did not converge");
      return q.value;
    };
    QuadratureResult q = adaptive_integrate(inner, -upper, upper, 1e-9, 2000);
    if (!q.converged) throw std::runtime_error("normalization quadrature did not converge");
    out.value = q.value;
    out.rel_error = (q.error_estimate + 1e-10) / out.value;
    return out;
  }
  throw std::invalid_argument("quadrature normalization supports d <= 2 only");
}

CkEstimate ck_monte_carlo(const RootSystemView& sys, uint64_t seed, std::size_t n) {
  CkEstimate out;
  out.method = "monte_carlo";
  const std::size_t n_batches = 100;
  const std::size_t per_batch = n / n_batches;
  std::vector<double> batch_means(n_batches, 0.0);
  PathRng rng(seed, 0x636b6d63u);
  std::vector<double> x(sys.dim), xn(sys.dim);
  for (std::size_t b = 0; b < n_batches; ++b) {
    double acc = 0;
    for (std::size_t s = 0; s < per_batch; ++s) {
      for (int i = 0; i < sys.dim; ++i) {
        x[i] = rng.normal();
        xn[i] = -x[i];  // antithetic partner
      }
      acc += 0.5 * (dunkl_weight(sys, x) + dunkl_weight(sys, xn));
    }
    batch_means[b] = acc / per_batch;
  }
  double mean = 0;
  for (double m : batch_means) mean += m;
  mean /= n_batches;
  // jackknife over batches
  double jk = 0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double loo = (mean * n_batches - batch_means[b]) / (n_batches - 1);
    jk += (loo - mean) * (loo - mean);
  }
  double se = std::sqrt(jk * (n_batches - 1.0) / n_batches);
  out.value = mean * std::pow(2.0 * kPi, 0.5 * sys.dim);
  out.rel_error = se / mean;
  return out;
}

double min_norm_product(std::span<const double> x, std::span<const double> y) {
  double x2 = 0, x1 = 0, y2 = 0, y1 = 0;
  for (double v : x) {
    x2 += v * v;
    x1 += std::abs(v);
  }
  for (double v : y) {
    y2 += v * v;
    y1 += std::abs(v);
  }
  return std::min(std::sqrt(x2) * y1, std::sqrt(y2) * x1);
}
}  // namespace

double dunkl_weight(const RootSystemView& sys, std::span<const double> y) {
  double w = 1;
  for (size_t r = 0; r < sys.roots.size(); ++r) {
    if (sys.mult[r] == 0) continue;
    w *= std::pow(std::abs(sys.pairing(static_cast<int>(r), y)), 2.0 * sys.mult[r]);
  }
  return w;
}

CkEstimate compute_ck(const RootSystemView& sys, CkMethod method, uint64_t seed, std::size_t mc_samples) {
  switch (method) {
    case CkMethod::ClosedForm:
      return ck_closed_form(sys);
    case CkMethod::Quadrature:
      return ck_quadrature(sys);
    case CkMethod::MonteCarlo:
      return ck_monte_carlo(sys, seed, mc_samples);
    case CkMethod::Auto:
      break;
  }
  if (all_multiplicities_zero(sys) || is_coordinate_product(sys)) return ck_closed_form(sys);
  if (sys.dim <= 2) return ck_quadrature(sys);
  return ck_monte_carlo(sys, seed, mc_samples);
}

double transition_density(const DensityContext& ctx, std::span<const double> x, std::span<const double> y,
                          double t) {
  if (!(t > 0)) throw std::invalid_argument("time must be positive");
  const double sqrt_t = std::sqrt(t);
  std::vector<double> u(x.size()), v(y.size());
  double x2 = 0, y2 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    u[i] = x[i] / sqrt_t;
    v[i] = y[i] / sqrt_t;
    x2 += x[i] * x[i];
    y2 += y[i] * y[i];
  }
  double a = min_norm_product(u, v);
  double tol = ctx.kernel_tol * std::exp(std::min(a, 700.0));
  double kernel = dunkl_kernel_value(ctx.kernel, u, v, tol);
  double weight = dunkl_weight(ctx.sys, y);
  double gauss = std::exp(-(x2 + y2) / (2.0 * t));
  return kernel * gauss * weight / (ctx.ck * std::pow(t, ctx.gamma + 0.5 * ctx.sys.dim));
}

double radial_density(const DensityContext& ctx, double r0, double r, double t) {
  return bessel_transition_density(ctx.bessel_dimension, r0, r, t);
}

double chamber_density(const DensityContext& ctx, std::span<const double> x, std::span<const double> y,
                       double t) {
  std::vector<double> y0(y.begin(), y.end());
  double total = 0;
  for (const auto& z : weyl_orbit(ctx.sys, y0)) total += transition_density(ctx, x, z, t);
  return total;
}

double gaussian_heat_kernel(int dim, std::span<const double> x, std::span<const double> y, double t) {
  double d2 = 0;
  for (int i = 0; i < dim; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  return std::exp(-d2 / (2.0 * t)) / std::pow(2.0 * kPi * t, 0.5 * dim);
}

}  // namespace dunkl
