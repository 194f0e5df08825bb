#pragma once

// The Dunkl differential-difference calculus on exact polynomials:
// the operators T_i, the Dunkl Laplacian by two independent routes,
// and divided differences along roots.

#include <span>
#include <stdexcept>
#include <vector>

#include "dunkl/poly.hpp"
#include "dunkl/rootsys.hpp"

namespace dunkl {

namespace detail {

// x -> x - <alpha, x> alpha as a linear substitution table.
template <class K>
std::vector<std::vector<K>> reflection_images(const RootSystem<K>& rs, int r) {
  const int d = rs.dim;
  std::vector<std::vector<K>> images(d, std::vector<K>(d, K(0)));
  for (int i = 0; i < d; ++i) {
    images[i][i] = K(1);
    for (int j = 0; j < d; ++j) images[i][j] -= rs.roots[r][i] * rs.roots[r][j];
  }
  return images;
}

}  // namespace detail

template <class K>
Polynomial<K> compose_reflection(const RootSystem<K>& rs, int r, const Polynomial<K>& p) {
  return p.substitute_linear(detail::reflection_images(rs, r));
}

// (p - p o sigma_alpha) / <alpha, .>, an exact polynomial quotient.
template <class K>
Polynomial<K> divided_difference(const RootSystem<K>& rs, int r, const Polynomial<K>& p) {
  Polynomial<K> diff = p - compose_reflection(rs, r, p);
  if (diff.is_zero()) return Polynomial<K>::zero(rs.dim);
  return diff.divide_by_linear_form(rs.roots[r]);
}

// T_i p = d p / d x_i + sum_alpha k(alpha) alpha_i (p - p o sigma_alpha) / <alpha, .>
template <class K>
Polynomial<K> dunkl_T(const RootSystem<K>& rs, int i, const Polynomial<K>& p) {
  if (p.dim() != rs.dim) throw std::invalid_argument("polynomial/system dimension mismatch");
  Polynomial<K> out = p.derivative_space(i);
  for (size_t r = 0; r < rs.roots.size(); ++r) {
    if (rs.mult[r] == 0) continue;
    Polynomial<K> quot = divided_difference(rs, static_cast<int>(r), p);
    if (quot.is_zero()) continue;
    out += quot.scale(FieldOps<K>::from_rat(rs.mult[r]) * rs.roots[r][i]);
  }
  return out;
}

template <class K>
Polynomial<K> laplacian(const Polynomial<K>& p) {
  Polynomial<K> out(p.dim());
  for (int i = 0; i < p.dim(); ++i) out += p.derivative_space(i).derivative_space(i);
  return out;
}

// L_k p = sum_i T_i^2 p.
template <class K>
Polynomial<K> dunkl_laplacian_via_T(const RootSystem<K>& rs, const Polynomial<K>& p) {
  Polynomial<K> out(rs.dim);
  for (int i = 0; i < rs.dim; ++i) out += dunkl_T(rs, i, dunkl_T(rs, i, p));
  return out;
}

// The closed form of L_k: Laplacian plus, per root, twice
// k(alpha) [ <grad p, alpha> / <alpha, .> - (p - p o sigma) / <alpha, .>^2 ].
// Both bracket terms are combined before dividing so the quotient stays
// polynomial: <grad p, alpha> - (p - p o sigma)/<alpha,.> vanishes on the
// reflecting hyperplane.
template <class K>
Polynomial<K> dunkl_laplacian_closed_form(const RootSystem<K>& rs, const Polynomial<K>& p) {
  if (p.dim() != rs.dim) throw std::invalid_argument("polynomial/system dimension mismatch");
  Polynomial<K> out = laplacian(p);
  for (size_t r = 0; r < rs.roots.size(); ++r) {
    if (rs.mult[r] == 0) continue;
    Polynomial<K> grad_pair(rs.dim);
    for (int i = 0; i < rs.dim; ++i) grad_pair += p.derivative_space(i) * rs.roots[r][i];
    Polynomial<K> inner = grad_pair - divided_difference(rs, static_cast<int>(r), p);
    if (inner.is_zero()) continue;
    Polynomial<K> quot = inner.divide_by_linear_form(rs.roots[r]);
    out += quot.scale(FieldOps<K>::from_rat(2 * rs.mult[r]));
  }
  return out;
}

// Generator of the Dunkl process: (1/2) L_k, acting on the space variables.
template <class K>
Polynomial<K> dunkl_generator(const RootSystem<K>& rs, const Polynomial<K>& p) {
  Polynomial<K> half_l = dunkl_laplacian_via_T(rs, p);
  return half_l.scale(FieldOps<K>::from_rat(Rat(1, 2)));
}

// Radial form of the generator on SO(d)-invariant polynomials: for
// u(x) = G(|x|^2), (1/2) L_k u must equal
// (d + 2 gamma) G'(|x|^2) + 2 |x|^2 G''(|x|^2).
// Returns both sides for exact comparison.
template <class K>
std::pair<Polynomial<K>, Polynomial<K>> radial_generator_pair(const RootSystem<K>& rs,
                                                              const std::vector<Rat>& g_coeffs) {
  const int d = rs.dim;
  Polynomial<K> r2(d);
  for (int i = 0; i < d; ++i) r2 += Polynomial<K>::variable(d, i) * Polynomial<K>::variable(d, i);
  auto poly_in_r2 = [&](const std::vector<Rat>& coeffs) {
    Polynomial<K> out(d);
    Polynomial<K> power = Polynomial<K>::constant(d, K(1));
    for (size_t j = 0; j < coeffs.size(); ++j) {
      out += power * Polynomial<K>::constant(d, FieldOps<K>::from_rat(coeffs[j]));
      power = power * r2;
    }
    return out;
  };
  std::vector<Rat> g1(g_coeffs.size() > 1 ? g_coeffs.size() - 1 : 0);
  for (size_t j = 1; j < g_coeffs.size(); ++j) g1[j - 1] = g_coeffs[j] * static_cast<int>(j);
  std::vector<Rat> g2(g1.size() > 1 ? g1.size() - 1 : 0);
  for (size_t j = 1; j < g1.size(); ++j) g2[j - 1] = g1[j] * static_cast<int>(j);

  Polynomial<K> lhs = dunkl_generator(rs, poly_in_r2(g_coeffs));
  Rat front = Rat(d) + 2 * rs.gamma();
  Polynomial<K> rhs = poly_in_r2(g1).scale(FieldOps<K>::from_rat(front));
  Polynomial<K> second = poly_in_r2(g2) * r2;
  rhs += second.scale(K(2));
  return {lhs, rhs};
}

}  // namespace dunkl
