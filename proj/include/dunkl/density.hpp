#pragma once

// Heat-semigroup densities of the Dunkl process: the weight function, the
// Gaussian-weight normalization constant, the transition density through
// the Dunkl kernel, the Bessel reference law for the radial part, and the
// chamber-projected density.

#include <span>
#include <string>
#include <vector>

#include "dunkl/intertwine.hpp"
#include "dunkl/rootsys.hpp"

namespace dunkl {

// prod_alpha |<alpha, y>|^{2 k(alpha)}
double dunkl_weight(const RootSystemView& sys, std::span<const double> y);

enum class CkMethod { Auto, ClosedForm, Quadrature, MonteCarlo };

struct CkEstimate {
  double value = 0;
  double rel_error = 0;
  std::string method;
};

// Normalization constant integral of exp(-|x|^2/2) against the weight.
// Closed form exists for rank-1 and coordinate products (and any system
// with zero multiplicity); quadrature covers d <= 2; Monte Carlo with
// Gaussian importance sampling and a jackknife error estimate covers the
// rest.
CkEstimate compute_ck(const RootSystemView& sys, CkMethod method = CkMethod::Auto, uint64_t seed = 7777,
                      std::size_t mc_samples = 1000000);

struct DensityContext {
  RootSystemView sys;
  KernelTable kernel;
  double ck = 0;
  double ck_rel_error = 0;
  Rat gamma_exact;
  double gamma = 0;
  double bessel_dimension = 0;  // 2 gamma + d
  double kernel_tol = 1e-12;    // relative to the kernel scale exp(|x||y|/t)
};

template <class K>
DensityContext make_density_context(const IntertwineTable<K>& table, CkMethod method = CkMethod::Auto,
                                    uint64_t seed = 7777) {
  DensityContext ctx;
  ctx.sys = table.system().view();
  ctx.kernel = compile_kernel_table(table);
  CkEstimate ck = compute_ck(ctx.sys, method, seed);
  ctx.ck = ck.value;
  ctx.ck_rel_error = ck.rel_error;
  ctx.gamma_exact = ctx.sys.gamma_exact;
  ctx.gamma = ctx.sys.gamma;
  ctx.bessel_dimension = 2.0 * ctx.gamma + ctx.sys.dim;
  return ctx;
}

// p_t(x, y); strictly positive for t > 0. Throws on kernel truncation
// overflow when |x||y|/t needs more series degrees than the table has.
double transition_density(const DensityContext& ctx, std::span<const double> x, std::span<const double> y,
                          double t);

// Transition density of |X|: Bessel of dimension 2 gamma + d.
double radial_density(const DensityContext& ctx, double r0, double r, double t);

// Density of the chamber-projected process at y in the closed chamber:
// the transition density summed over the Weyl orbit of y.
double chamber_density(const DensityContext& ctx, std::span<const double> x, std::span<const double> y,
                       double t);

// Gaussian heat kernel, the k = 0 reference.
double gaussian_heat_kernel(int dim, std::span<const double> x, std::span<const double> y, double t);

}  // namespace dunkl
