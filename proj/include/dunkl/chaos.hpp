#pragma once

// Constructive chaos expansion of polynomial functionals of the Dunkl
// process. A functional prod_j m_{nu_j}(X_{t_j}) is peeled backwards in
// time: the latest factor is replaced by its value at the previous
// observation plus stochastic integrals whose integrands are re-expanded
// in the generalized-monomial basis, until all randomness sits in nested
// integrals with deterministic piecewise-polynomial integrands on the
// ordered simplex. sqrt(k) factors from the jump legs are tracked exactly
// as a rational product under one square root, so integrand coefficients
// and L2 norms stay in Q(sqrt2).

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dunkl/compiled.hpp"
#include "dunkl/intertwine.hpp"
#include "dunkl/pathsim.hpp"
#include "dunkl/poly.hpp"
#include "dunkl/rootsys.hpp"
#include "dunkl/stats.hpp"

namespace dunkl {

// eps < d: Brownian coordinate eps; otherwise root martingale eps - d.
struct NoiseIndex {
  int eps = 0;
  bool is_brownian(int dim) const { return eps < dim; }
  int coordinate(int dim) const { return is_brownian(dim) ? eps : -1; }
  int root(int dim) const { return is_brownian(dim) ? -1 : eps - dim; }
};

struct ChaosLeg {
  int eps = 0;
  Rat lower;
  bool upper_is_prev = false;  // upper bound is the previous leg's variable
  Rat upper;                   // used when !upper_is_prev
};

struct ChaosTerm {
  std::vector<ChaosLeg> legs;  // outermost (latest time) first
  Polynomial<Q2> coeff;        // variables u_1..u_n matching the legs
  Rat k_product;               // multiplicities collected by the M-legs

  explicit ChaosTerm(int nlegs) : coeff(nlegs), k_product(1) {}
};

struct ChaosExpansion {
  int dim = 0;
  int nroots = 0;
  Q2 constant{0};
  std::vector<ChaosTerm> terms;
};

struct FunctionalSpec {
  std::vector<Rat> times;                  // 0 <= t_1 < ... < t_l
  std::vector<std::vector<uint32_t>> nus;  // one multi-index per time
};

ChaosExpansion chaos_expand(const IntertwineTable<Q2>& table, const std::vector<Rat>& x0,
                            const FunctionalSpec& spec);

// Exact integral of coeff^2 over the term's support cell (no k_product).
Q2 term_l2_squared_raw(const ChaosTerm& term);
// Full squared L2 norm: k_product * raw, as a double.
double term_l2_squared(const ChaosTerm& term);

struct CompiledChaosTerm {
  struct Leg {
    int eps;
    double lower;
    double upper;  // +inf when bounded by the previous variable
    bool upper_is_prev;
  };
  struct Mono {
    double c;
    std::vector<uint32_t> e;
  };
  std::vector<Leg> legs;
  std::vector<Mono> monos;
  double scale = 1;  // sqrt(k_product)
};

CompiledChaosTerm compile_term(const ChaosTerm& term);

// Left-point Riemann-Stieltjes evaluation of the nested integral along a
// recorded path: dB legs use the recorded Brownian increments, dM legs the
// compensated jump increments; inner integrals enter at the left limit.
// Throws if a fixed bound does not land on the recorded grid.
double evaluate_chaos_term(const CompiledChaosTerm& term, const Path& path, const MartingaleIncrements& inc);

// Functional value prod_j m_{nu_j}(X_{t_j}) along a path.
double evaluate_functional(const std::vector<CompiledPoly>& factors, const std::vector<double>& times,
                           const Path& path);

struct IsometryReport {
  MeanSE reconstruction;     // Lambda - constant - sum of terms
  MeanSE reconstruction_sq;  // squared residual
  MeanSE functional_mean;    // Lambda itself (target: the constant term)
  std::vector<MeanSE> term_means;
  std::vector<MeanSE> term_sq;   // E[I^2], to compare with term_l2
  std::vector<double> term_l2;   // exact integral of f^2
  std::vector<std::array<int, 2>> ortho_pairs;
  std::vector<MeanSE> ortho_means;
  double exclusion_rate = 0;
};

IsometryReport chaos_isometry_check(const IntertwineTable<Q2>& table, const std::vector<Rat>& x0,
                                    const FunctionalSpec& spec, const ChaosExpansion& expansion,
                                    const SimParams& params, std::size_t n_paths, int threads);

struct HermiteMartingaleReport {
  double target = 0;   // Q_nu(x0, -t)
  MeanSE sample_mean;  // m_nu(X_t)
  std::vector<MeanSE> tower;  // E[(m_nu(X_t) - Q_nu(X_s, s-t)) g(X_s)], g in {1, x_i, x_i^2}
  double exclusion_rate = 0;
};

HermiteMartingaleReport hermite_martingale_check(const IntertwineTable<Q2>& table,
                                                 const std::vector<uint32_t>& nu, double s, double t,
                                                 const SimParams& params, std::size_t n_paths, int threads);

}  // namespace dunkl
