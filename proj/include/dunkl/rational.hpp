#pragma once

// Exact scalar types: arbitrary-precision rationals and the quadratic
// extension Q(sqrt2) used for normalized root coordinates.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace dunkl {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rat& r) {
  BigInt num = numerator(r);
  BigInt den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// Accepts "p", "p/q" and plain decimal notation ("0.125", "-3.5").
inline Rat parse_rational(const std::string& text) {
  std::string s = text;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  bool neg = false;
  if (s.front() == '+' || s.front() == '-') {
    neg = s.front() == '-';
    s.erase(s.begin());
  }
  if (s.empty()) throw std::invalid_argument("malformed rational literal: " + text);
  Rat value;
  auto digits_only = [](const std::string& d) {
    if (d.empty()) return false;
    for (char c : d)
      if (c < '0' || c > '9') return false;
    return true;
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string p = s.substr(0, slash), q = s.substr(slash + 1);
    if (!digits_only(p) || !digits_only(q)) throw std::invalid_argument("malformed rational literal: " + text);
    BigInt den(q);
    if (den == 0) throw std::invalid_argument("zero denominator: " + text);
    value = Rat(BigInt(p), den);
  } else if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (ip.empty()) ip = "0";
    if (fp.empty()) fp = "0";
    if (!digits_only(ip) || !digits_only(fp)) throw std::invalid_argument("malformed rational literal: " + text);
    BigInt scale = 1;
    for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
    value = Rat(BigInt(ip) * scale + BigInt(fp), scale);
  } else {
    if (!digits_only(s)) throw std::invalid_argument("malformed rational literal: " + text);
    value = Rat(BigInt(s));
  }
  return neg ? Rat(-value) : value;
}

// a + b*sqrt(2) with a, b rational. Field operations are exact; division
// rationalizes through the conjugate a - b*sqrt(2).
class Q2 {
 public:
  Q2() = default;
  Q2(int v) : a_(v) {}                 // NOLINT: implicit by design
  Q2(Rat a) : a_(std::move(a)) {}      // NOLINT
  Q2(Rat a, Rat b) : a_(std::move(a)), b_(std::move(b)) {}

  static Q2 sqrt2() { return Q2(Rat(0), Rat(1)); }

  const Rat& rational_part() const { return a_; }
  const Rat& sqrt2_part() const { return b_; }

  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_rational() const { return b_ == 0; }

  Q2 operator-() const { return Q2(-a_, -b_); }
  Q2& operator+=(const Q2& o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
  }
  Q2& operator-=(const Q2& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
  }
  Q2& operator*=(const Q2& o) {
    Rat a = a_ * o.a_ + 2 * b_ * o.b_;
    Rat b = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(a);
    b_ = std::move(b);
    return *this;
  }
  friend Q2 operator+(Q2 x, const Q2& y) { return x += y; }
  friend Q2 operator-(Q2 x, const Q2& y) { return x -= y; }
  friend Q2 operator*(Q2 x, const Q2& y) { return x *= y; }

  Q2 inverse() const {
    Rat norm = a_ * a_ - 2 * b_ * b_;
    if (norm == 0) throw std::domain_error("division by zero in Q(sqrt2)");
    return Q2(a_ / norm, -b_ / norm);
  }
  Q2& operator/=(const Q2& o) { return *this *= o.inverse(); }
  friend Q2 operator/(Q2 x, const Q2& y) { return x /= y; }

  friend bool operator==(const Q2& x, const Q2& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
  friend bool operator!=(const Q2& x, const Q2& y) { return !(x == y); }

  // Sign of a + b*sqrt(2) decided exactly by comparing a^2 with 2 b^2.
  int sign() const {
    int sa = a_.sign(), sb = b_.sign();
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    Rat lhs = a_ * a_, rhs = 2 * b_ * b_;
    if (lhs == rhs) return 0;
    return (lhs > rhs) ? sa : sb;
  }

  double to_double() const {
    return dunkl::to_double(a_) + dunkl::to_double(b_) * 1.4142135623730950488;
  }

  // Canonical form "a+b*sqrt2" (sign of b folded into the separator).
  std::string to_string() const {
    std::string out = dunkl::to_string(a_);
    if (b_ >= 0) {
      out += "+" + dunkl::to_string(b_) + "*sqrt2";
    } else {
      out += "-" + dunkl::to_string(Rat(-b_)) + "*sqrt2";
    }
    return out;
  }

 private:
  Rat a_;
  Rat b_;
};

// Coefficient-field glue shared by the polynomial layer. The float
// instantiation treats coefficients below 1e-12 of the largest magnitude
// as zero.
template <class K>
struct FieldOps;

template <>
struct FieldOps<Q2> {
  static constexpr bool exact = true;
  static bool is_zero(const Q2& c, double /*scale*/) { return c.is_zero(); }
  static Q2 from_rat(const Rat& r) { return Q2(r); }
  static Q2 sqrt2() { return Q2::sqrt2(); }
  static double to_double(const Q2& c) { return c.to_double(); }
  static double abs_estimate(const Q2& c) {
    double v = c.to_double();
    return v < 0 ? -v : v;
  }
};

template <>
struct FieldOps<double> {
  static constexpr bool exact = false;
  static constexpr double rel_eps = 1e-12;
  static bool is_zero(double c, double scale) {
    double a = c < 0 ? -c : c;
    return scale > 0 ? a <= rel_eps * scale : a == 0.0;
  }
  static double from_rat(const Rat& r) { return dunkl::to_double(r); }
  static double sqrt2() { return 1.4142135623730950488; }
  static double to_double(double c) { return c; }
  static double abs_estimate(double c) { return c < 0 ? -c : c; }
};

}  // namespace dunkl
