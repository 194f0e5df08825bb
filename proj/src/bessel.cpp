#include "dunkl/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace dunkl {

namespace {
constexpr double kSwitch = 20.0;

double series_scaled(double nu, double z) {
  // sum_m (z/2)^{nu+2m} / (m! Gamma(nu+m+1)), scaled by exp(-z)
  double log_half_z = std::log(0.5 * z);
  double sum = 0;
  for (int m = 0; m < 400; ++m) {
    double log_term = (nu + 2 * m) * log_half_z - std::lgamma(m + 1.0) - std::lgamma(nu + m + 1.0);
    double term = std::exp(log_term - z);
    sum += term;
    if (m > 2 && term < 1e-18 * sum) break;
  }
  return sum;
}

double asymptotic_scaled(double nu, double z) {
  // e^{-z} I_nu(z) ~ (2 pi z)^{-1/2} sum_m (-1)^m a_m(nu) / z^m
  double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  double prev = std::abs(term);
  for (int m = 1; m < 40; ++m) {
    double odd = 2.0 * m - 1.0;
    term *= -(mu - odd * odd) / (8.0 * m * z);
    if (std::abs(term) > prev) break;  // divergent tail
    prev = std::abs(term);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * 3.14159265358979323846 * z);
}
}  // namespace

double bessel_i_scaled(double nu, double z) {
  if (z < 0 || nu < 0) throw std::invalid_argument("bessel_i_scaled requires nu, z >= 0");
  if (z == 0) return nu == 0 ? 1.0 : 0.0;
  return z <= kSwitch ? series_scaled(nu, z) : asymptotic_scaled(nu, z);
}

double bessel_transition_density(double N, double r0, double r, double t) {
  if (!(t > 0)) throw std::invalid_argument("time must be positive");
  if (r < 0) return 0.0;
  double nu = 0.5 * N - 1.0;
  if (r == 0) return 0.0;
  if (r0 <= 0) {
    // r^{N-1} e^{-r^2/2t} / (2^{N/2 - 1} Gamma(N/2) t^{N/2})
    double log_p = (N - 1.0) * std::log(r) - r * r / (2.0 * t) - (0.5 * N - 1.0) * std::log(2.0) -
                   std::lgamma(0.5 * N) - 0.5 * N * std::log(t);
    return std::exp(log_p);
  }
  double z = r0 * r / t;
  double gauss = std::exp(-(r - r0) * (r - r0) / (2.0 * t));
  return (r / t) * std::pow(r / r0, nu) * gauss * bessel_i_scaled(nu, z);
}

}  // namespace dunkl
