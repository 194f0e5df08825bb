#pragma once

// Normalized root systems (<a,a> = 2), reflections, Weyl-orbit machinery
// and multiplicity functions. Coordinates live in Q(sqrt2) for the exact
// constructions; dihedral systems outside {I2(2), I2(4)} fall back to
// floating point since their coordinates need sqrt(3) or worse.

#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dunkl/rational.hpp"

namespace dunkl {

enum class SystemKind { Rank1, ProductRank1, TypeA, TypeB, TypeD, Dihedral };

struct MultiplicitySpec {
  std::vector<Rat> per_orbit;
};

struct SystemSpec {
  SystemKind kind = SystemKind::Rank1;
  int param = 1;  // n for A(n)/B(n)/D(n), m for I2(m); ignored for rank1/product
  int dim = 1;
  MultiplicitySpec mult;
};

// Numeric view used by the simulation and density layers. Multiplicities
// stay exact alongside their double copies so gamma is a single exact
// source of truth.
struct RootSystemView {
  int dim = 0;
  std::vector<std::vector<double>> roots;
  std::vector<double> mult;
  std::vector<Rat> mult_exact;
  std::vector<int> orbit_of;
  Rat gamma_exact;
  double gamma = 0;
  std::string name;

  double pairing(int r, std::span<const double> x) const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += roots[r][i] * x[i];
    return s;
  }
  std::vector<double> reflect(int r, std::span<const double> x) const {
    double s = pairing(r, x);
    std::vector<double> y(x.begin(), x.end());
    for (int i = 0; i < dim; ++i) y[i] -= s * roots[r][i];
    return y;
  }
};

template <class K>
struct RootSystem {
  int dim = 0;
  std::vector<std::vector<K>> roots;  // positive roots
  std::vector<Rat> mult;              // per root, constant on orbits
  std::vector<int> orbit_of;
  int n_orbits = 0;
  std::string name;

  Rat gamma() const {
    Rat g = 0;
    for (const auto& k : mult) g += k;
    return g;
  }

  K pairing(int r, std::span<const K> x) const {
    K s(0);
    for (int i = 0; i < dim; ++i) s += roots[r][i] * x[i];
    return s;
  }

  std::vector<K> reflect(int r, std::span<const K> x) const {
    K s = pairing(r, x);
    std::vector<K> y(x.begin(), x.end());
    for (int i = 0; i < dim; ++i) y[i] -= s * roots[r][i];
    return y;
  }

  // Representative of the W-orbit of x in the closed fundamental chamber.
  // Reflecting at any negatively paired root strictly increases <2 rho, x>,
  // so the loop terminates.
  std::vector<K> chamber_project(std::vector<K> x) const {
    size_t guard = 0;
    const size_t cap = 1u << 22;
    bool moved = true;
    while (moved) {
      moved = false;
      for (size_t r = 0; r < roots.size(); ++r) {
        if (field_sign(pairing(r, x), x) < 0) {
          x = reflect(r, x);
          moved = true;
          if (++guard > cap) throw std::logic_error("chamber projection failed to terminate");
        }
      }
    }
    return x;
  }

  RootSystemView view() const {
    RootSystemView v;
    v.dim = dim;
    v.name = name;
    v.orbit_of = orbit_of;
    v.gamma_exact = gamma();
    v.gamma = to_double(v.gamma_exact);
    for (const auto& root : roots) {
      std::vector<double> rd(dim);
      for (int i = 0; i < dim; ++i) rd[i] = FieldOps<K>::to_double(root[i]);
      v.roots.push_back(std::move(rd));
    }
    for (const auto& k : mult) {
      v.mult_exact.push_back(k);
      v.mult.push_back(to_double(k));
    }
    return v;
  }

 private:
  static int field_sign(const Q2& v, const std::vector<Q2>&) { return v.sign(); }
  static int field_sign(double v, const std::vector<double>& x) {
    double scale = 0;
    for (double c : x) scale = std::max(scale, std::abs(c));
    double tol = 1e-14 * (scale > 0 ? scale : 1.0);
    if (v > tol) return 1;
    if (v < -tol) return -1;
    return 0;
  }
};

namespace detail {

template <class K>
bool vectors_equal(const std::vector<K>& x, const std::vector<K>& y) {
  if constexpr (FieldOps<K>::exact) {
    return x == y;
  } else {
    double scale = 0, dev = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      scale = std::max({scale, FieldOps<K>::abs_estimate(x[i]), FieldOps<K>::abs_estimate(y[i])});
      dev = std::max(dev, FieldOps<K>::abs_estimate(x[i] - y[i]));
    }
    return dev <= 1e-9 * (scale > 0 ? scale : 1.0);
  }
}

// index of +-root matching v, or -1
template <class K>
int find_root(const std::vector<std::vector<K>>& roots, const std::vector<K>& v) {
  for (size_t r = 0; r < roots.size(); ++r) {
    if (vectors_equal(roots[r], v)) return static_cast<int>(r);
    std::vector<K> neg(v.size());
    for (size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
    if (vectors_equal(roots[r], neg)) return static_cast<int>(r);
  }
  return -1;
}

// Orbits under the reflection group, multiplicity assignment in order of
// each orbit's first root, plus the structural invariants: normalization,
// closure under reflections, nonnegative multiplicities.
template <class K>
void finalize(RootSystem<K>& rs, const MultiplicitySpec& spec) {
  const int nroots = static_cast<int>(rs.roots.size());
  for (const auto& root : rs.roots) {
    K norm2(0);
    for (const auto& c : root) norm2 += c * c;
    if constexpr (FieldOps<K>::exact) {
      if (norm2 != K(2)) throw std::logic_error("root not normalized to squared length 2");
    } else {
      if (FieldOps<K>::abs_estimate(norm2 - K(2)) > 1e-12) {
        throw std::logic_error("root not normalized to squared length 2");
      }
    }
  }
  // closure and adjacency for orbit BFS
  std::vector<std::vector<int>> image(nroots, std::vector<int>(nroots));
  for (int g = 0; g < nroots; ++g) {
    for (int r = 0; r < nroots; ++r) {
      int idx = find_root(rs.roots, rs.reflect(g, std::span<const K>(rs.roots[r])));
      if (idx < 0) throw std::logic_error("root system not closed under its reflections");
      image[g][r] = idx;
    }
  }
  rs.orbit_of.assign(nroots, -1);
  int orbit = 0;
  for (int r = 0; r < nroots; ++r) {
    if (rs.orbit_of[r] >= 0) continue;
    std::vector<int> stack{r};
    rs.orbit_of[r] = orbit;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      for (int g = 0; g < nroots; ++g) {
        int nxt = image[g][cur];
        if (rs.orbit_of[nxt] < 0) {
          rs.orbit_of[nxt] = orbit;
          stack.push_back(nxt);
        }
      }
    }
    ++orbit;
  }
  rs.n_orbits = orbit;
  if (static_cast<int>(spec.per_orbit.size()) != orbit) {
    throw std::invalid_argument(rs.name + ": expected " + std::to_string(orbit) +
                                " multiplicity value(s), got " + std::to_string(spec.per_orbit.size()));
  }
  for (const auto& k : spec.per_orbit) {
    if (k < 0) throw std::invalid_argument("negative multiplicity");
  }
  rs.mult.resize(nroots);
  for (int r = 0; r < nroots; ++r) rs.mult[r] = spec.per_orbit[rs.orbit_of[r]];
}

}  // namespace detail

inline RootSystem<Q2> build_rank1(const MultiplicitySpec& spec) {
  RootSystem<Q2> rs;
  rs.dim = 1;
  rs.name = "rank1";
  rs.roots = {{Q2::sqrt2()}};
  detail::finalize(rs, spec);
  return rs;
}

inline RootSystem<Q2> build_product_rank1(int d, const MultiplicitySpec& spec) {
  if (d < 1) throw std::invalid_argument("product_of_rank1 needs dim >= 1");
  RootSystem<Q2> rs;
  rs.dim = d;
  rs.name = "product" + std::to_string(d);
  for (int i = 0; i < d; ++i) {
    std::vector<Q2> root(d, Q2(0));
    root[i] = Q2::sqrt2();
    rs.roots.push_back(std::move(root));
  }
  detail::finalize(rs, spec);
  return rs;
}

// A(n) realized in R^{n+1} with roots e_i - e_j (i < j); these already have
// squared length 2 and purely rational coordinates.
inline RootSystem<Q2> build_type_A(int n, const MultiplicitySpec& spec) {
  if (n < 1) throw std::invalid_argument("A(n) needs n >= 1");
  RootSystem<Q2> rs;
  rs.dim = n + 1;
  rs.name = "A" + std::to_string(n);
  for (int i = 0; i < n + 1; ++i) {
    for (int j = i + 1; j < n + 1; ++j) {
      std::vector<Q2> root(n + 1, Q2(0));
      root[i] = Q2(1);
      root[j] = Q2(-1);
      rs.roots.push_back(std::move(root));
    }
  }
  detail::finalize(rs, spec);
  return rs;
}

// B(n): rescaled short roots sqrt2*e_i first (orbit 1), then e_i -+ e_j.
inline RootSystem<Q2> build_type_B(int n, const MultiplicitySpec& spec) {
  if (n < 2) throw std::invalid_argument("B(n) needs n >= 2");
  RootSystem<Q2> rs;
  rs.dim = n;
  rs.name = "B" + std::to_string(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Q2> root(n, Q2(0));
    root[i] = Q2::sqrt2();
    rs.roots.push_back(std::move(root));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::vector<Q2> minus(n, Q2(0)), plus(n, Q2(0));
      minus[i] = Q2(1);
      minus[j] = Q2(-1);
      plus[i] = Q2(1);
      plus[j] = Q2(1);
      rs.roots.push_back(std::move(minus));
      rs.roots.push_back(std::move(plus));
    }
  }
  detail::finalize(rs, spec);
  return rs;
}

inline RootSystem<Q2> build_type_D(int n, const MultiplicitySpec& spec) {
  if (n < 2) throw std::invalid_argument("D(n) needs n >= 2");
  RootSystem<Q2> rs;
  rs.dim = n;
  rs.name = "D" + std::to_string(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::vector<Q2> minus(n, Q2(0)), plus(n, Q2(0));
      minus[i] = Q2(1);
      minus[j] = Q2(-1);
      plus[i] = Q2(1);
      plus[j] = Q2(1);
      rs.roots.push_back(std::move(minus));
      rs.roots.push_back(std::move(plus));
    }
  }
  detail::finalize(rs, spec);
  return rs;
}

// I2(m) with roots sqrt2*(cos(j pi/m), sin(j pi/m)), j = 0..m-1. Exact in
// Q(sqrt2) only for m = 2 and m = 4.
inline RootSystem<double> build_dihedral_float(int m, const MultiplicitySpec& spec) {
  if (m < 2) throw std::invalid_argument("I2(m) needs m >= 2");
  RootSystem<double> rs;
  rs.dim = 2;
  rs.name = "I2(" + std::to_string(m) + ")";
  const double pi = 3.14159265358979323846;
  const double s2 = std::sqrt(2.0);
  for (int j = 0; j < m; ++j) {
    double th = j * pi / m;
    rs.roots.push_back({s2 * std::cos(th), s2 * std::sin(th)});
  }
  detail::finalize(rs, spec);
  return rs;
}

inline RootSystem<Q2> build_dihedral_exact(int m, const MultiplicitySpec& spec) {
  RootSystem<Q2> rs;
  rs.dim = 2;
  rs.name = "I2(" + std::to_string(m) + ")";
  if (m == 2) {
    rs.roots = {{Q2::sqrt2(), Q2(0)}, {Q2(0), Q2::sqrt2()}};
  } else if (m == 4) {
    rs.roots = {{Q2::sqrt2(), Q2(0)}, {Q2(1), Q2(1)}, {Q2(0), Q2::sqrt2()}, {Q2(-1), Q2(1)}};
  } else {
    throw std::invalid_argument("I2(" + std::to_string(m) + ") has no exact Q(sqrt2) realization; use the float builder");
  }
  detail::finalize(rs, spec);
  return rs;
}

inline RootSystem<Q2> build_root_system(const SystemSpec& spec) {
  auto check_dim = [&](int expected) {
    if (spec.dim != 0 && spec.dim != expected) {
      throw std::invalid_argument("dim " + std::to_string(spec.dim) + " inconsistent with kind (expected " +
                                  std::to_string(expected) + ")");
    }
  };
  switch (spec.kind) {
    case SystemKind::Rank1:
      check_dim(1);
      return build_rank1(spec.mult);
    case SystemKind::ProductRank1:
      return build_product_rank1(spec.dim, spec.mult);
    case SystemKind::TypeA:
      check_dim(spec.param + 1);
      return build_type_A(spec.param, spec.mult);
    case SystemKind::TypeB:
      check_dim(spec.param);
      return build_type_B(spec.param, spec.mult);
    case SystemKind::TypeD:
      check_dim(spec.param);
      return build_type_D(spec.param, spec.mult);
    case SystemKind::Dihedral:
      check_dim(2);
      return build_dihedral_exact(spec.param, spec.mult);
  }
  throw std::invalid_argument("unknown root system kind");
}

// Orbit of a point under the reflection group, by closure under the
// generating reflections. Capped: the Weyl group is never materialized.
inline std::vector<std::vector<double>> weyl_orbit(const RootSystemView& v, std::vector<double> y, size_t cap = 10000) {
  std::vector<std::vector<double>> orbit{std::move(y)};
  double scale = 0;
  for (double c : orbit[0]) scale = std::max(scale, std::abs(c));
  if (scale == 0) return orbit;
  auto known = [&](const std::vector<double>& z) {
    for (const auto& w : orbit) {
      double dev = 0;
      for (int i = 0; i < v.dim; ++i) dev = std::max(dev, std::abs(w[i] - z[i]));
      if (dev <= 1e-9 * scale) return true;
    }
    return false;
  };
  for (size_t head = 0; head < orbit.size(); ++head) {
    auto cur = orbit[head];
    for (size_t r = 0; r < v.roots.size(); ++r) {
      auto img = v.reflect(static_cast<int>(r), cur);
      if (!known(img)) {
        orbit.push_back(std::move(img));
        if (orbit.size() > cap) throw std::runtime_error("Weyl orbit exceeds cap");
      }
    }
  }
  return orbit;
}

}  // namespace dunkl
