#include "dunkl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace dunkl {

namespace {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Legendre nodes by Newton iteration on P_n, weights 2 / ((1-x^2) P_n'^2).
GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GaussRule& rule15() {
  static const GaussRule r = gauss_legendre(15);
  return r;
}
const GaussRule& rule7() {
  static const GaussRule r = gauss_legendre(7);
  return r;
}

struct Segment {
  double a, b, value, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

Segment evaluate(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double v15 = 0, v7 = 0;
  const GaussRule& g15 = rule15();
  const GaussRule& g7 = rule7();
  for (int i = 0; i < 15; ++i) v15 += g15.weights[i] * f(mid + half * g15.nodes[i]);
  for (int i = 0; i < 7; ++i) v7 += g7.weights[i] * f(mid + half * g7.nodes[i]);
  v15 *= half;
  v7 *= half;
  return Segment{a, b, v15, std::abs(v15 - v7)};
}

}  // namespace

QuadratureResult adaptive_integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                    int max_intervals) {
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> queue;
  queue.push(evaluate(f, a, b));
  double total_err = queue.top().err;
  double total_val = queue.top().value;
  int n_intervals = 1;
  while (total_err > abs_tol && n_intervals < max_intervals) {
    Segment worst = queue.top();
    queue.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval at double resolution
      worst.err = 0;
      queue.push(worst);
      continue;
    }
    Segment left = evaluate(f, worst.a, mid);
    Segment right = evaluate(f, mid, worst.b);
    total_val += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    queue.push(left);
    queue.push(right);
    ++n_intervals;
  }
  out.value = total_val;
  out.error_estimate = total_err;
  out.converged = total_err <= abs_tol;
  return out;
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b, double abs_tol,
                          int max_intervals) {
  QuadratureResult r = adaptive_integrate(f, a, b, abs_tol, max_intervals);
  if (!r.converged) throw std::runtime_error("quadrature failed to reach requested tolerance");
  return r.value;
}

}  // namespace dunkl
