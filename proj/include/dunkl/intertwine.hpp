#pragma once

// The intertwining operator V_k on polynomials, computed degree by degree
// from the defining relation T_i V_k = V_k d_i, plus the Dunkl kernel
// series and the Dunkl-Hermite space-time polynomials with their
// stochastic-integrand companions.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dunkl/dunkl_ops.hpp"
#include "dunkl/matrix.hpp"
#include "dunkl/poly.hpp"
#include "dunkl/rootsys.hpp"

namespace dunkl {

// Exponent tuples of homogeneous degree n in d variables, lexicographically
// descending (matches the polynomial term order within a degree).
inline std::vector<std::vector<uint32_t>> homogeneous_exponents(int d, int n) {
  std::vector<std::vector<uint32_t>> out;
  std::vector<uint32_t> cur(d, 0);
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == d - 1) {
      cur[var] = remaining;
      out.push_back(cur);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[var] = e;
      self(self, var + 1, remaining - e);
    }
  };
  if (d == 0) {
    if (n == 0) out.push_back({});
    return out;
  }
  rec(rec, 0, n);
  return out;
}

template <class K>
class IntertwineTable {
 public:
  static IntertwineTable build(RootSystem<K> rs, int n_max) {
    if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
    IntertwineTable table;
    table.rs_ = std::move(rs);
    table.n_max_ = n_max;
    const int d = table.rs_.dim;
    for (int n = 0; n <= n_max; ++n) {
      table.monos_.push_back(homogeneous_exponents(d, n));
      std::map<std::vector<uint32_t>, int> idx;
      for (size_t i = 0; i < table.monos_[n].size(); ++i) idx[table.monos_[n][i]] = static_cast<int>(i);
      table.index_.push_back(std::move(idx));
    }
    table.V_.resize(n_max + 1);
    table.Vinv_.resize(n_max + 1);
    table.V_[0] = DenseMatrix<K>::identity(1);
    for (int n = 1; n <= n_max; ++n) table.solve_degree(n);
    return table;
  }

  const RootSystem<K>& system() const { return rs_; }
  int max_degree() const { return n_max_; }
  int degree_dimension(int n) const { return static_cast<int>(monos_[n].size()); }
  const std::vector<std::vector<uint32_t>>& degree_exponents(int n) const { return monos_[n]; }
  const DenseMatrix<K>& degree_matrix(int n) const { return V_[n]; }

  Polynomial<K> generalized_monomial(const std::vector<uint32_t>& nu) const {
    int n = 0;
    for (uint32_t e : nu) n += static_cast<int>(e);
    if (n > n_max_) throw std::invalid_argument("degree overflow: |nu| exceeds table degree");
    auto it = index_[n].find(nu);
    if (it == index_[n].end()) throw std::invalid_argument("multi-index arity mismatch");
    Polynomial<K> out(rs_.dim);
    for (size_t row = 0; row < monos_[n].size(); ++row) {
      const K& c = V_[n].at(static_cast<int>(row), it->second);
      if (FieldOps<K>::is_zero(c, 0.0)) continue;
      out.add_term(Monomial{monos_[n][row], 0}, c);
    }
    return out;
  }

  // V_k applied to the space variables of a space-time polynomial.
  Polynomial<K> apply(const Polynomial<K>& p) const { return transform(p, false); }
  // V_k^{-1}; the monomial coefficients of the result are the coordinates
  // of p in the generalized-monomial basis.
  Polynomial<K> apply_inverse(const Polynomial<K>& p) const { return transform(p, true); }

 private:
  IntertwineTable() = default;

  void solve_degree(int n) {
    const int d = rs_.dim;
    const int cols = degree_dimension(n);
    const int rows_per_i = degree_dimension(n - 1);
    DenseMatrix<K> A(d * rows_per_i, cols);
    for (int col = 0; col < cols; ++col) {
      Polynomial<K> mono = Polynomial<K>::monomial(d, Monomial{monos_[n][col], 0}, K(1));
      for (int i = 0; i < d; ++i) {
        Polynomial<K> img = dunkl_T(rs_, i, mono);
        for (const auto& [m, c] : img.terms()) {
          int row = index_[n - 1].at(m.space);
          A.at(i * rows_per_i + row, col) = c;
        }
      }
    }
    DenseMatrix<K> B(d * rows_per_i, cols);
    for (int col = 0; col < cols; ++col) {
      const auto& nu = monos_[n][col];
      for (int i = 0; i < d; ++i) {
        if (nu[i] == 0) continue;
        std::vector<uint32_t> down = nu;
        down[i] -= 1;
        int src = index_[n - 1].at(down);
        for (int row = 0; row < rows_per_i; ++row) {
          B.at(i * rows_per_i + row, col) += K(static_cast<int>(nu[i])) * V_[n - 1].at(row, src);
        }
      }
    }
    V_[n] = solve_full_column_rank(std::move(A), std::move(B));
  }

  const DenseMatrix<K>& inverse_matrix(int n) const {
    if (!Vinv_[n]) Vinv_[n] = invert(V_[n]);
    return *Vinv_[n];
  }

  Polynomial<K> transform(const Polynomial<K>& p, bool inverse) const {
    if (p.dim() != rs_.dim) throw std::invalid_argument("polynomial/table dimension mismatch");
    Polynomial<K> out(rs_.dim);
    for (int tm = 0; tm <= p.max_time_degree(); ++tm) {
      Polynomial<K> space = p.time_coefficient(static_cast<uint32_t>(tm));
      if (space.is_zero()) continue;
      int maxdeg = space.max_space_degree();
      if (maxdeg > n_max_) throw std::invalid_argument("degree overflow: polynomial exceeds table degree");
      for (int deg = 0; deg <= maxdeg; ++deg) {
        const auto& monos = monos_[deg];
        std::vector<K> vec(monos.size(), K(0));
        bool any = false;
        for (size_t i = 0; i < monos.size(); ++i) {
          K c = space.coefficient(Monomial{monos[i], 0});
          if (!FieldOps<K>::is_zero(c, 0.0)) any = true;
          vec[i] = std::move(c);
        }
        if (!any) continue;
        const DenseMatrix<K>& M = inverse ? inverse_matrix(deg) : V_[deg];
        std::vector<K> img = M.apply(vec);
        for (size_t i = 0; i < monos.size(); ++i) {
          if (FieldOps<K>::is_zero(img[i], 0.0)) continue;
          out.add_term(Monomial{monos[i], static_cast<uint32_t>(tm)}, img[i]);
        }
      }
    }
    return out;
  }

  RootSystem<K> rs_;
  int n_max_ = 0;
  std::vector<std::vector<std::vector<uint32_t>>> monos_;
  std::vector<std::map<std::vector<uint32_t>, int>> index_;
  std::vector<DenseMatrix<K>> V_;
  mutable std::vector<std::optional<DenseMatrix<K>>> Vinv_;
};

using IntertwineTableQ = IntertwineTable<Q2>;

// ---------------------------------------------------------------------------
// Dunkl kernel: D_k(x, y) = sum_nu m_nu(x) y^nu / nu!, evaluated numerically
// with a certified truncation: since |m_nu(x)| <= |x|^{|nu|}, the degree-j
// block is bounded by (|x|_2 |y|_1)^j / j!, an exponential tail.

struct KernelTable {
  int dim = 0;
  int n_max = 0;
  std::vector<std::vector<std::vector<uint32_t>>> monos;  // per degree
  std::vector<std::vector<double>> mats;                  // per degree, row-major [mu][nu]
  std::vector<std::vector<double>> inv_factorial;         // per degree, 1/nu!
};

template <class K>
KernelTable compile_kernel_table(const IntertwineTable<K>& table) {
  KernelTable kt;
  kt.dim = table.system().dim;
  kt.n_max = table.max_degree();
  for (int n = 0; n <= kt.n_max; ++n) {
    const auto& monos = table.degree_exponents(n);
    kt.monos.push_back(monos);
    const auto& M = table.degree_matrix(n);
    std::vector<double> flat(monos.size() * monos.size());
    for (size_t i = 0; i < monos.size(); ++i)
      for (size_t j = 0; j < monos.size(); ++j)
        flat[i * monos.size() + j] = FieldOps<K>::to_double(M.at(static_cast<int>(i), static_cast<int>(j)));
    kt.mats.push_back(std::move(flat));
    std::vector<double> invf;
    for (const auto& nu : monos) {
      double f = 1;
      for (uint32_t e : nu)
        for (uint32_t v = 2; v <= e; ++v) f *= v;
      invf.push_back(1.0 / f);
    }
    kt.inv_factorial.push_back(std::move(invf));
  }
  return kt;
}

namespace detail {
inline double norm2(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}
inline double norm1(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += std::abs(v);
  return s;
}
}  // namespace detail

// Smallest truncation degree with tail bound sum_{j>n} a^j/j! < tol, or -1
// if it exceeds n_max.
inline int kernel_truncation_degree(double a, double tol, int n_max) {
  double term = a;  // a^{n+1}/(n+1)! at n = 0
  for (int n = 0; n <= n_max; ++n) {
    if (a < n + 2) {
      double bound = term * (n + 2) / (n + 2 - a);
      if (bound < tol) return n;
    }
    term *= a / (n + 2);
  }
  return -1;
}

inline double dunkl_kernel_value(const KernelTable& kt, std::span<const double> x, std::span<const double> y,
                                 double tol) {
  if (static_cast<int>(x.size()) != kt.dim || static_cast<int>(y.size()) != kt.dim) {
    throw std::invalid_argument("kernel argument dimension mismatch");
  }
  if (!(tol > 0)) throw std::invalid_argument("kernel tolerance must be positive");
  // the kernel is symmetric; evaluate in the cheaper argument order
  std::vector<double> xv(x.begin(), x.end()), yv(y.begin(), y.end());
  double a_xy = detail::norm2(xv) * detail::norm1(yv);
  double a_yx = detail::norm2(yv) * detail::norm1(xv);
  if (a_yx < a_xy) std::swap(xv, yv);
  double a = std::min(a_xy, a_yx);
  int n_trunc = kernel_truncation_degree(a, tol, kt.n_max);
  if (n_trunc < 0) throw std::runtime_error("kernel truncation overflow: arguments too large for table degree");

  // power tables
  std::vector<std::vector<double>> xpow(kt.dim), ypow(kt.dim);
  for (int i = 0; i < kt.dim; ++i) {
    xpow[i].push_back(1.0);
    ypow[i].push_back(1.0);
    for (int e = 1; e <= n_trunc; ++e) {
      xpow[i].push_back(xpow[i].back() * xv[i]);
      ypow[i].push_back(ypow[i].back() * yv[i]);
    }
  }
  double total = 0;
  for (int n = 0; n <= n_trunc; ++n) {
    const auto& monos = kt.monos[n];
    const auto& mat = kt.mats[n];
    const size_t dimn = monos.size();
    std::vector<double> xmono(dimn);
    for (size_t i = 0; i < dimn; ++i) {
      double v = 1;
      for (int c = 0; c < kt.dim; ++c) v *= xpow[c][monos[i][c]];
      xmono[i] = v;
    }
    for (size_t j = 0; j < dimn; ++j) {
      double m_val = 0;
      for (size_t i = 0; i < dimn; ++i) m_val += mat[i * dimn + j] * xmono[i];
      double yv_m = 1;
      for (int c = 0; c < kt.dim; ++c) yv_m *= ypow[c][monos[j][c]];
      total += m_val * yv_m * kt.inv_factorial[n][j];
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Space-time Hermite polynomials (heat polynomials): the unique
// polynomial with (d/dt + 1/2 Laplacian) H = 0 and H(x, 0) = x^nu.

template <class K>
Polynomial<K> classical_space_time_hermite_1d(int dim, int var, int n) {
  Polynomial<K> out(dim);
  Rat coeff = 1;  // n! / (j! (n-2j)!) (-1/2)^j at j = 0
  for (int j = 0; 2 * j <= n; ++j) {
    Monomial m{std::vector<uint32_t>(dim, 0), static_cast<uint32_t>(j)};
    m.space[var] = static_cast<uint32_t>(n - 2 * j);
    out.add_term(std::move(m), FieldOps<K>::from_rat(coeff));
    // step j -> j+1 multiplies by (n-2j)(n-2j-1) / (j+1) * (-1/2)
    coeff *= Rat(-(n - 2 * j) * (n - 2 * j - 1), 2 * (j + 1));
  }
  return out;
}

template <class K>
Polynomial<K> classical_space_time_hermite(int dim, const std::vector<uint32_t>& nu) {
  if (static_cast<int>(nu.size()) != dim) throw std::invalid_argument("multi-index arity mismatch");
  Polynomial<K> out = Polynomial<K>::constant(dim, K(1));
  for (int i = 0; i < dim; ++i) {
    if (nu[i] == 0) continue;
    out = out * classical_space_time_hermite_1d<K>(dim, i, static_cast<int>(nu[i]));
  }
  return out;
}

// Q_nu = V_k H_nu together with its Ito integrands: the gradient for the
// Brownian legs and, per root, the divided difference without the sqrt(k)
// factor (that factor is generally irrational and is applied numerically).
template <class K>
struct HermiteFamily {
  std::vector<uint32_t> nu;
  Polynomial<K> Q;
  std::vector<Polynomial<K>> grad;      // one per coordinate
  std::vector<Polynomial<K>> jump_raw;  // one per positive root

  explicit HermiteFamily(int dim) : Q(dim) {}
};

template <class K>
HermiteFamily<K> hermite_family(const IntertwineTable<K>& table, const std::vector<uint32_t>& nu) {
  int total = 0;
  for (uint32_t e : nu) total += static_cast<int>(e);
  if (total > table.max_degree()) throw std::invalid_argument("degree overflow: |nu| exceeds table degree");
  const auto& rs = table.system();
  HermiteFamily<K> fam(rs.dim);
  fam.nu = nu;
  fam.Q = table.apply(classical_space_time_hermite<K>(rs.dim, nu));
  for (int i = 0; i < rs.dim; ++i) fam.grad.push_back(fam.Q.derivative_space(i));
  for (size_t r = 0; r < rs.roots.size(); ++r) {
    fam.jump_raw.push_back(divided_difference(rs, static_cast<int>(r), fam.Q));
  }
  return fam;
}

}  // namespace dunkl
