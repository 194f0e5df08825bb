#pragma once

// Exact multivariate polynomials in d space variables and one optional time
// variable. Terms are kept in graded-lexicographic order (leading term
// first) so printed fixtures are byte-stable.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dunkl/rational.hpp"

namespace dunkl {

struct Monomial {
  std::vector<uint32_t> space;  // exponent per space variable
  uint32_t time = 0;

  uint32_t space_degree() const {
    return std::accumulate(space.begin(), space.end(), uint32_t{0});
  }
  uint32_t total_degree() const { return space_degree() + time; }
  friend bool operator==(const Monomial& x, const Monomial& y) {
    return x.time == y.time && x.space == y.space;
  }
};

// Higher total degree first; ties broken lexicographically on
// (space exponents, time), larger tuple first.
struct MonomialOrder {
  bool operator()(const Monomial& x, const Monomial& y) const {
    uint32_t dx = x.total_degree(), dy = y.total_degree();
    if (dx != dy) return dx > dy;
    if (x.space != y.space) return x.space > y.space;
    return x.time > y.time;
  }
};

template <class K>
class Polynomial {
 public:
  using TermMap = std::map<Monomial, K, MonomialOrder>;

  explicit Polynomial(int dim) : dim_(dim) {
    if (dim < 0) throw std::invalid_argument("negative dimension");
  }

  static Polynomial zero(int dim) { return Polynomial(dim); }
  static Polynomial constant(int dim, K value) {
    Polynomial p(dim);
    p.add_term(Monomial{std::vector<uint32_t>(dim, 0), 0}, std::move(value));
    return p;
  }
  static Polynomial variable(int dim, int i) {
    if (i < 0 || i >= dim) throw std::invalid_argument("variable index out of range");
    Monomial m{std::vector<uint32_t>(dim, 0), 0};
    m.space[i] = 1;
    Polynomial p(dim);
    p.add_term(std::move(m), K(1));
    return p;
  }
  static Polynomial time_variable(int dim) {
    Polynomial p(dim);
    p.add_term(Monomial{std::vector<uint32_t>(dim, 0), 1}, K(1));
    return p;
  }
  static Polynomial monomial(int dim, Monomial m, K c) {
    if (static_cast<int>(m.space.size()) != dim) throw std::invalid_argument("monomial arity mismatch");
    Polynomial p(dim);
    p.add_term(std::move(m), std::move(c));
    return p;
  }

  int dim() const { return dim_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  void add_term(Monomial m, K c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      it = terms_.emplace(std::move(m), std::move(c)).first;
    } else {
      it->second += c;
    }
    if (FieldOps<K>::is_zero(it->second, FieldOps<K>::exact ? 0.0 : coeff_scale())) {
      terms_.erase(it);
    }
  }

  int max_space_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max<int>(d, m.space_degree());
    return d;
  }
  int max_time_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max<int>(d, m.time);
    return d;
  }
  bool is_space_homogeneous() const {
    if (terms_.empty()) return true;
    uint32_t deg = terms_.begin()->first.space_degree();
    for (const auto& [m, c] : terms_)
      if (m.space_degree() != deg) return false;
    return true;
  }

  K coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? K(0) : it->second;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_dim(o);
    double joint = FieldOps<K>::exact ? 0.0 : std::max(coeff_scale(), o.coeff_scale());
    for (const auto& [m, c] : o.terms_) {
      auto [it, inserted] = terms_.emplace(m, c);
      if (!inserted) it->second += c;
    }
    prune(joint);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_dim(o);
    double joint = FieldOps<K>::exact ? 0.0 : std::max(coeff_scale(), o.coeff_scale());
    for (const auto& [m, c] : o.terms_) {
      auto [it, inserted] = terms_.emplace(m, -c);
      if (!inserted) it->second -= c;
    }
    prune(joint);
    return *this;
  }
  friend Polynomial operator+(Polynomial x, const Polynomial& y) { return x += y; }
  friend Polynomial operator-(Polynomial x, const Polynomial& y) { return x -= y; }
  Polynomial operator-() const {
    Polynomial out(dim_);
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
    return out;
  }

  Polynomial& scale(const K& s) {
    if (FieldOps<K>::is_zero(s, 0.0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    prune();
    return *this;
  }
  friend Polynomial operator*(Polynomial p, const K& s) { return p.scale(s); }
  friend Polynomial operator*(const K& s, Polynomial p) { return p.scale(s); }

  friend Polynomial operator*(const Polynomial& x, const Polynomial& y) {
    x.check_dim(y);
    double joint = FieldOps<K>::exact ? 0.0 : x.coeff_scale() * y.coeff_scale();
    Polynomial out(x.dim_);
    for (const auto& [mx, cx] : x.terms_) {
      for (const auto& [my, cy] : y.terms_) {
        Monomial m;
        m.space.resize(x.dim_);
        for (int i = 0; i < x.dim_; ++i) m.space[i] = mx.space[i] + my.space[i];
        m.time = mx.time + my.time;
        K c = cx * cy;
        auto it = out.terms_.find(m);
        if (it == out.terms_.end()) {
          out.terms_.emplace(std::move(m), std::move(c));
        } else {
          it->second += c;
        }
      }
    }
    out.prune(joint);
    return out;
  }

  Polynomial derivative_space(int i) const {
    Polynomial out(dim_);
    for (const auto& [m, c] : terms_) {
      if (m.space[i] == 0) continue;
      Monomial n = m;
      n.space[i] -= 1;
      out.terms_.emplace(std::move(n), c * K(static_cast<int>(m.space[i])));
    }
    out.prune();
    return out;
  }
  Polynomial derivative_time() const {
    Polynomial out(dim_);
    for (const auto& [m, c] : terms_) {
      if (m.time == 0) continue;
      Monomial n = m;
      n.time -= 1;
      out.terms_.emplace(std::move(n), c * K(static_cast<int>(m.time)));
    }
    out.prune();
    return out;
  }

  // Substitute each space variable by a linear form; time is untouched.
  // images[i][j] is the coefficient of x_j in the image of x_i.
  Polynomial substitute_linear(const std::vector<std::vector<K>>& images) const {
    if (static_cast<int>(images.size()) != dim_) throw std::invalid_argument("substitution arity mismatch");
    std::vector<Polynomial> forms;
    forms.reserve(dim_);
    for (int i = 0; i < dim_; ++i) {
      Polynomial f(dim_);
      for (int j = 0; j < dim_; ++j) {
        if (FieldOps<K>::is_zero(images[i][j], 0.0)) continue;
        Monomial m{std::vector<uint32_t>(dim_, 0), 0};
        m.space[j] = 1;
        f.terms_.emplace(std::move(m), images[i][j]);
      }
      forms.push_back(std::move(f));
    }
    // power cache per variable
    std::vector<std::vector<Polynomial>> pow(dim_);
    for (int i = 0; i < dim_; ++i) pow[i].push_back(constant(dim_, K(1)));
    Polynomial out(dim_);
    for (const auto& [m, c] : terms_) {
      Polynomial term = constant(dim_, c);
      for (int i = 0; i < dim_; ++i) {
        while (pow[i].size() <= m.space[i]) pow[i].push_back(pow[i].back() * forms[i]);
        if (m.space[i] > 0) term = term * pow[i][m.space[i]];
      }
      if (m.time > 0) {
        Polynomial shift(dim_);
        for (auto& [tm, tc] : term.terms_) {
          Monomial n = tm;
          n.time += m.time;
          shift.terms_.emplace(std::move(n), tc);
        }
        term = std::move(shift);
      }
      out += term;
    }
    return out;
  }

  // Exact division by a space-linear form sum_j ell[j]*x_j. Throws if a
  // nonzero remainder survives; for Dunkl difference quotients that is a
  // genuine bug, not a data error.
  Polynomial divide_by_linear_form(const std::vector<K>& ell) const {
    if (static_cast<int>(ell.size()) != dim_) throw std::invalid_argument("linear form arity mismatch");
    int pivot = -1;
    double best = 0;
    for (int j = 0; j < dim_; ++j) {
      double a = FieldOps<K>::abs_estimate(ell[j]);
      if (a > best) {
        best = a;
        pivot = j;
      }
    }
    if (pivot < 0) throw std::invalid_argument("zero linear form");
    double scale = coeff_scale();
    Polynomial rem = *this;
    Polynomial quot(dim_);
    K inv_c = K(1) / ell[pivot];
    while (true) {
      // leading remaining term containing the pivot variable
      auto it = rem.terms_.begin();
      while (it != rem.terms_.end() && it->first.space[pivot] == 0) ++it;
      if (it == rem.terms_.end()) break;
      Monomial qm = it->first;
      qm.space[pivot] -= 1;
      K qc = it->second * inv_c;
      quot.add_term(qm, qc);
      // rem -= (sum_j ell[j] x_j) * qc * x^qm
      for (int j = 0; j < dim_; ++j) {
        if (FieldOps<K>::is_zero(ell[j], 0.0)) continue;
        Monomial m = qm;
        m.space[j] += 1;
        auto [rit, inserted] = rem.terms_.emplace(m, -(ell[j] * qc));
        if (!inserted) rit->second -= ell[j] * qc;
      }
      rem.prune();
    }
    for (const auto& [m, c] : rem.terms_) {
      if (!FieldOps<K>::is_zero(c, scale > 0 ? scale / best : 0.0)) {
        throw std::logic_error("inexact division by linear form");
      }
    }
    return quot;
  }

  template <class S, class Conv>
  S eval_with(std::span<const S> x, const S& t, Conv conv) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("evaluation point arity mismatch");
    std::vector<std::vector<S>> pow(dim_ + 1);
    for (int i = 0; i < dim_; ++i) pow[i].push_back(S(1));
    pow[dim_].push_back(S(1));
    S out(0);
    for (const auto& [m, c] : terms_) {
      S v = conv(c);
      for (int i = 0; i < dim_; ++i) {
        while (pow[i].size() <= m.space[i]) pow[i].push_back(pow[i].back() * x[i]);
        if (m.space[i] > 0) v = v * pow[i][m.space[i]];
      }
      while (pow[dim_].size() <= m.time) pow[dim_].push_back(pow[dim_].back() * t);
      if (m.time > 0) v = v * pow[dim_][m.time];
      out += v;
    }
    return out;
  }

  K eval(std::span<const K> x, const K& t = K(0)) const {
    return eval_with<K>(x, t, [](const K& c) { return c; });
  }
  double eval_double(std::span<const double> x, double t = 0.0) const {
    return eval_with<double>(x, t, [](const K& c) { return FieldOps<K>::to_double(c); });
  }

  // Space-only coefficient polynomial of t^m.
  Polynomial time_coefficient(uint32_t tm) const {
    Polynomial out(dim_);
    for (const auto& [m, c] : terms_) {
      if (m.time != tm) continue;
      Monomial n = m;
      n.time = 0;
      out.terms_.emplace(std::move(n), c);
    }
    return out;
  }

  Polynomial space_homogeneous_component(uint32_t deg) const {
    Polynomial out(dim_);
    for (const auto& [m, c] : terms_)
      if (m.space_degree() == deg) out.terms_.emplace(m, c);
    return out;
  }

  // Canonical text form, e.g. "(1/3+0*sqrt2)*x1^2*x2 + (0-1*sqrt2)*t".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) out += " + ";
      first = false;
      out += "(" + coeff_string(c) + ")";
      for (int i = 0; i < dim_; ++i) {
        if (m.space[i] == 0) continue;
        out += "*x" + std::to_string(i + 1);
        if (m.space[i] > 1) out += "^" + std::to_string(m.space[i]);
      }
      if (m.time > 0) {
        out += "*t";
        if (m.time > 1) out += "^" + std::to_string(m.time);
      }
    }
    return out;
  }

  friend bool operator==(const Polynomial& x, const Polynomial& y) {
    if (x.dim_ != y.dim_) return false;
    if constexpr (FieldOps<K>::exact) {
      return x.terms_ == y.terms_;
    } else {
      Polynomial d = x - y;
      return d.is_zero();
    }
  }

 private:
  void check_dim(const Polynomial& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("dimension mismatch");
  }
  double coeff_scale() const {
    double s = 0;
    for (const auto& [m, c] : terms_) s = std::max(s, FieldOps<K>::abs_estimate(c));
    return s;
  }
  // floor_scale lets callers prune relative to the operands of a
  // cancellation-prone operation rather than the (possibly tiny) result.
  void prune(double floor_scale = 0.0) {
    if constexpr (FieldOps<K>::exact) {
      for (auto it = terms_.begin(); it != terms_.end();) {
        it = FieldOps<K>::is_zero(it->second, 0.0) ? terms_.erase(it) : std::next(it);
      }
    } else {
      double s = std::max(coeff_scale(), floor_scale);
      for (auto it = terms_.begin(); it != terms_.end();) {
        it = FieldOps<K>::is_zero(it->second, s) ? terms_.erase(it) : std::next(it);
      }
    }
  }

  static std::string coeff_string(const Q2& c) { return c.to_string(); }
  static std::string coeff_string(double c) { return std::to_string(c); }

  int dim_;
  TermMap terms_;
};

using PolyQ = Polynomial<Q2>;

}  // namespace dunkl
