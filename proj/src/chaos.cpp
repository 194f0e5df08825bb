#include "dunkl/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dunkl/parallel.hpp"

namespace dunkl {

namespace {

using Factor = std::pair<Rat, std::vector<uint32_t>>;

struct WorkItem {
  std::vector<ChaosLeg> legs;
  Polynomial<Q2> coeff;  // variables u_1..u_cap
  Q2 scalar{1};
  Rat k_product{1};
  std::vector<Factor> factors;  // ascending times, at most one per time
  bool has_symbol = false;
  std::vector<uint32_t> symbol_nu;

  explicit WorkItem(int cap) : coeff(Polynomial<Q2>::constant(cap, Q2(1))) {}
};

Rat rat_pow(const Rat& a, int e) {
  Rat out = 1;
  for (int i = 0; i < e; ++i) out *= a;
  return out;
}

Rat binomial(int m, int p) {
  Rat out = 1;
  for (int i = 0; i < p; ++i) out *= Rat(m - i, i + 1);
  return out;
}

class Expander {
 public:
  Expander(const IntertwineTable<Q2>& table, const std::vector<Rat>& x0, const FunctionalSpec& spec)
      : table_(table), rs_(table.system()), spec_(spec) {
    if (spec.times.size() != spec.nus.size()) throw std::invalid_argument("times/indices length mismatch");
    for (std::size_t j = 0; j < spec.times.size(); ++j) {
      if (spec.times[j] < 0) throw std::invalid_argument("observation times must be nonnegative");
      if (j > 0 && spec.times[j] <= spec.times[j - 1]) {
        throw std::invalid_argument("observation times must be strictly increasing");
      }
      if (static_cast<int>(spec.nus[j].size()) != rs_.dim) throw std::invalid_argument("multi-index arity mismatch");
    }
    if (static_cast<int>(x0.size()) != rs_.dim) throw std::invalid_argument("x0 dimension mismatch");
    for (const Rat& c : x0) x0_.emplace_back(c);
    int total = 0;
    for (const auto& nu : spec.nus)
      for (uint32_t e : nu) total += static_cast<int>(e);
    if (total > table.max_degree()) throw std::invalid_argument("degree overflow: spec exceeds table degree");
    cap_ = std::max(total, 1);
    result_.dim = rs_.dim;
    result_.nroots = static_cast<int>(rs_.roots.size());
  }

  ChaosExpansion run() {
    WorkItem init(cap_);
    for (std::size_t j = 0; j < spec_.times.size(); ++j) {
      int deg = 0;
      for (uint32_t e : spec_.nus[j]) deg += static_cast<int>(e);
      if (deg == 0) continue;
      if (spec_.times[j] == 0) {
        init.scalar *= table_.generalized_monomial(spec_.nus[j]).eval(x0_);
      } else {
        init.factors.emplace_back(spec_.times[j], spec_.nus[j]);
      }
    }
    if (!init.scalar.is_zero()) stack_.push_back(std::move(init));
    while (!stack_.empty()) {
      WorkItem item = std::move(stack_.back());
      stack_.pop_back();
      if (item.has_symbol) {
        peel_symbol(std::move(item));
      } else if (!item.factors.empty()) {
        peel_fixed(std::move(item));
      } else {
        emit(std::move(item));
      }
    }
    merge_terms();
    return std::move(result_);
  }

 private:
  const HermiteFamily<Q2>& family(const std::vector<uint32_t>& nu) {
    auto it = families_.find(nu);
    if (it == families_.end()) it = families_.emplace(nu, hermite_family(table_, nu)).first;
    return it->second;
  }

  // P(x) evaluated in the generalized-monomial basis; spawns one item per
  // m-coordinate, placed as a factor at time tau (tau = 0 folds into the
  // scalar through the start point).
  void push_with_factor(const WorkItem& base, const Rat& tau, const Polynomial<Q2>& p) {
    if (p.is_zero()) return;
    if (tau == 0) {
      WorkItem it = base;
      it.scalar *= p.eval(x0_);
      if (!it.scalar.is_zero()) stack_.push_back(std::move(it));
      return;
    }
    Polynomial<Q2> combined = p;
    bool replace_back = false;
    if (!base.factors.empty() && base.factors.back().first == tau) {
      combined = combined * table_.generalized_monomial(base.factors.back().second);
      replace_back = true;
    }
    Polynomial<Q2> coords = table_.apply_inverse(combined);
    for (const auto& [mono, c] : coords.terms()) {
      WorkItem it = base;
      if (replace_back) it.factors.pop_back();
      it.scalar *= c;
      if (mono.space_degree() > 0) it.factors.emplace_back(tau, mono.space);
      stack_.push_back(std::move(it));
    }
  }

  // Splits the space-time polynomial G evaluated at time (v - shift) where
  // v is a fresh leg variable: yields items with coeff multiplied by the
  // expanded time powers and the space part pushed to the handler.
  template <class Handler>
  void expand_integrand(const WorkItem& base, const Polynomial<Q2>& g, int new_var, const Rat& shift_value,
                        int shift_var, Handler&& handle) {
    // time argument: (v - shift), shift either the rational shift_value
    // (shift_var < 0) or the variable u_{shift_var}
    for (int m = 0; m <= g.max_time_degree(); ++m) {
      Polynomial<Q2> gm = g.time_coefficient(static_cast<uint32_t>(m));
      if (gm.is_zero()) continue;
      for (int p = 0; p <= m; ++p) {
        Rat c = binomial(m, p);
        Monomial u_mono{std::vector<uint32_t>(cap_, 0), 0};
        u_mono.space[new_var] = static_cast<uint32_t>(p);
        if (shift_var < 0) {
          c *= rat_pow(-shift_value, m - p);
        } else {
          c *= rat_pow(Rat(-1), m - p);
          u_mono.space[shift_var] = static_cast<uint32_t>(m - p);
        }
        if (c == 0) continue;
        WorkItem it = base;
        it.coeff = it.coeff * Polynomial<Q2>::monomial(cap_, u_mono, Q2(c));
        handle(std::move(it), gm);
      }
    }
  }

  void peel_fixed(WorkItem item) {
    Factor factor = item.factors.back();
    item.factors.pop_back();
    const Rat tau_max = factor.first;
    const Rat tau_prev = item.factors.empty() ? Rat(0) : item.factors.back().first;
    const auto& fam = family(factor.second);

    // value at the previous observation
    {
      Polynomial<Q2> p0(rs_.dim);
      Rat tval = tau_prev - tau_max;
      for (int m = 0; m <= fam.Q.max_time_degree(); ++m) {
        Polynomial<Q2> qm = fam.Q.time_coefficient(static_cast<uint32_t>(m));
        p0 += qm.scale(Q2(rat_pow(tval, m)));
      }
      push_with_factor(item, tau_prev, p0);
    }
    // stochastic legs over (tau_prev, tau_max]
    int new_var = static_cast<int>(item.legs.size());
    if (new_var >= cap_) throw std::logic_error("chaos leg count exceeded its degree bound");
    auto spawn = [&](int eps, const Polynomial<Q2>& g, const Rat& k_mult) {
      WorkItem base = item;
      ChaosLeg leg;
      leg.eps = eps;
      leg.lower = tau_prev;
      leg.upper_is_prev = false;
      leg.upper = tau_max;
      base.legs.push_back(leg);
      base.k_product *= k_mult;
      expand_integrand(base, g, new_var, tau_max, -1, [&](WorkItem&& it, const Polynomial<Q2>& gm) {
        dispatch_space_part(std::move(it), gm);
      });
    };
    for (int i = 0; i < rs_.dim; ++i) spawn(i, fam.grad[i], Rat(1));
    for (std::size_t r = 0; r < rs_.roots.size(); ++r) {
      if (rs_.mult[r] == 0) continue;
      spawn(rs_.dim + static_cast<int>(r), fam.jump_raw[r], rs_.mult[r]);
    }
  }

  void peel_symbol(WorkItem item) {
    item.has_symbol = false;
    std::vector<uint32_t> nu = std::move(item.symbol_nu);
    item.symbol_nu.clear();
    const int sym_var = static_cast<int>(item.legs.size()) - 1;
    const Rat tau_prev = item.factors.empty() ? Rat(0) : item.factors.back().first;
    const auto& fam = family(nu);

    // value at the previous observation: Q(X_{tau_prev}, tau_prev - u)
    for (int m = 0; m <= fam.Q.max_time_degree(); ++m) {
      Polynomial<Q2> qm = fam.Q.time_coefficient(static_cast<uint32_t>(m));
      if (qm.is_zero()) continue;
      for (int p = 0; p <= m; ++p) {
        Rat c = binomial(m, p) * rat_pow(tau_prev, m - p) * rat_pow(Rat(-1), p);
        if (c == 0) continue;
        Monomial u_mono{std::vector<uint32_t>(cap_, 0), 0};
        u_mono.space[sym_var] = static_cast<uint32_t>(p);
        WorkItem it = item;
        it.coeff = it.coeff * Polynomial<Q2>::monomial(cap_, u_mono, Q2(c));
        push_with_factor(it, tau_prev, qm);
      }
    }
    // stochastic legs over (tau_prev, u)
    int new_var = static_cast<int>(item.legs.size());
    if (new_var >= cap_) throw std::logic_error("chaos leg count exceeded its degree bound");
    auto spawn = [&](int eps, const Polynomial<Q2>& g, const Rat& k_mult) {
      WorkItem base = item;
      ChaosLeg leg;
      leg.eps = eps;
      leg.lower = tau_prev;
      leg.upper_is_prev = true;
      base.legs.push_back(leg);
      base.k_product *= k_mult;
      expand_integrand(base, g, new_var, Rat(0), sym_var, [&](WorkItem&& it, const Polynomial<Q2>& gm) {
        dispatch_space_part(std::move(it), gm);
      });
    };
    for (int i = 0; i < rs_.dim; ++i) spawn(i, fam.grad[i], Rat(1));
    for (std::size_t r = 0; r < rs_.roots.size(); ++r) {
      if (rs_.mult[r] == 0) continue;
      spawn(rs_.dim + static_cast<int>(r), fam.jump_raw[r], rs_.mult[r]);
    }
  }

  // Space part of a fresh leg integrand, re-expanded over m_mu(X_{u-}).
  void dispatch_space_part(WorkItem item, const Polynomial<Q2>& space) {
    Polynomial<Q2> coords = table_.apply_inverse(space);
    for (const auto& [mono, c] : coords.terms()) {
      WorkItem it = item;
      it.scalar *= c;
      if (mono.space_degree() > 0) {
        it.has_symbol = true;
        it.symbol_nu = mono.space;
      }
      stack_.push_back(std::move(it));
    }
  }

  void emit(WorkItem item) {
    Polynomial<Q2> full = item.coeff.scale(item.scalar);
    if (full.is_zero()) return;
    if (item.legs.empty()) {
      // no variables can remain
      result_.constant += full.coefficient(Monomial{std::vector<uint32_t>(cap_, 0), 0});
      return;
    }
    const int n = static_cast<int>(item.legs.size());
    ChaosTerm term(n);
    term.legs = item.legs;
    term.k_product = item.k_product;
    for (const auto& [mono, c] : full.terms()) {
      Monomial m{std::vector<uint32_t>(mono.space.begin(), mono.space.begin() + n), 0};
      for (int j = n; j < cap_; ++j) {
        if (mono.space[j] != 0) throw std::logic_error("integrand depends on a variable beyond its legs");
      }
      term.coeff.add_term(std::move(m), c);
    }
    raw_terms_.push_back(std::move(term));
  }

  void merge_terms() {
    std::map<std::string, std::size_t> index;
    for (auto& term : raw_terms_) {
      std::ostringstream key;
      key << to_string(term.k_product) << "|";
      for (const auto& leg : term.legs) {
        key << leg.eps << "," << to_string(leg.lower) << ",";
        if (leg.upper_is_prev) {
          key << "prev";
        } else {
          key << to_string(leg.upper);
        }
        key << ";";
      }
      auto [it, inserted] = index.emplace(key.str(), result_.terms.size());
      if (inserted) {
        result_.terms.push_back(std::move(term));
      } else {
        result_.terms[it->second].coeff += term.coeff;
      }
    }
    std::erase_if(result_.terms, [](const ChaosTerm& t) { return t.coeff.is_zero(); });
  }

  const IntertwineTable<Q2>& table_;
  const RootSystem<Q2>& rs_;
  const FunctionalSpec& spec_;
  std::vector<Q2> x0_;
  int cap_ = 1;
  std::vector<WorkItem> stack_;
  std::vector<ChaosTerm> raw_terms_;
  std::map<std::vector<uint32_t>, HermiteFamily<Q2>> families_;
  ChaosExpansion result_;
};

}  // namespace

ChaosExpansion chaos_expand(const IntertwineTable<Q2>& table, const std::vector<Rat>& x0,
                            const FunctionalSpec& spec) {
  return Expander(table, x0, spec).run();
}

Q2 term_l2_squared_raw(const ChaosTerm& term) {
  const int n = static_cast<int>(term.legs.size());
  if (n > 0 && term.legs[0].upper_is_prev) throw std::logic_error("outermost leg must have a fixed upper bound");
  Polynomial<Q2> p = term.coeff * term.coeff;
  for (int j = n - 1; j >= 0; --j) {
    // antiderivative in u_{j+1}
    Polynomial<Q2> anti(n);
    for (const auto& [mono, c] : p.terms()) {
      Monomial m = mono;
      m.space[j] += 1;
      anti.add_term(std::move(m), c / Q2(static_cast<int>(mono.space[j]) + 1));
    }
    Polynomial<Q2> upper(n), lower(n);
    for (const auto& [mono, c] : anti.terms()) {
      Monomial m = mono;
      if (term.legs[j].upper_is_prev) {
        // substitute u_{j+1} := u_j
        m.space[j - 1] += m.space[j];
        m.space[j] = 0;
        upper.add_term(std::move(m), c);
      } else {
        Q2 scaled = c * Q2(rat_pow(term.legs[j].upper, static_cast<int>(m.space[j])));
        m.space[j] = 0;
        upper.add_term(std::move(m), scaled);
      }
      Monomial ml = mono;
      Q2 scaled_l = c * Q2(rat_pow(term.legs[j].lower, static_cast<int>(ml.space[j])));
      ml.space[j] = 0;
      lower.add_term(std::move(ml), scaled_l);
    }
    p = upper - lower;
  }
  return p.coefficient(Monomial{std::vector<uint32_t>(n, 0), 0});
}

double term_l2_squared(const ChaosTerm& term) {
  return to_double(term.k_product) * term_l2_squared_raw(term).to_double();
}

CompiledChaosTerm compile_term(const ChaosTerm& term) {
  CompiledChaosTerm out;
  for (const auto& leg : term.legs) {
    CompiledChaosTerm::Leg cl;
    cl.eps = leg.eps;
    cl.lower = to_double(leg.lower);
    cl.upper_is_prev = leg.upper_is_prev;
    cl.upper = leg.upper_is_prev ? std::numeric_limits<double>::infinity() : to_double(leg.upper);
    out.legs.push_back(cl);
  }
  for (const auto& [mono, c] : term.coeff.terms()) {
    out.monos.push_back({c.to_double(), mono.space});
  }
  out.scale = std::sqrt(to_double(term.k_product));
  return out;
}

namespace {
bool on_grid(const Path& path, double t) {
  auto it = std::lower_bound(path.times.begin(), path.times.end(), t - 1e-9);
  return it != path.times.end() && std::abs(*it - t) <= 1e-9;
}

std::size_t grid_index(const Path& path, double t) {
  auto it = std::lower_bound(path.times.begin(), path.times.end(), t - 1e-9);
  if (it == path.times.end() || std::abs(*it - t) > 1e-9) {
    throw std::invalid_argument("observation time does not lie on the simulation grid");
  }
  return static_cast<std::size_t>(it - path.times.begin());
}
}  // namespace

double evaluate_chaos_term(const CompiledChaosTerm& term, const Path& path, const MartingaleIncrements& inc) {
  const int n = static_cast<int>(term.legs.size());
  const int d = path.dim;
  for (const auto& leg : term.legs) {
    if (!on_grid(path, leg.lower) || (!leg.upper_is_prev && !on_grid(path, leg.upper))) {
      throw std::invalid_argument("chaos term bounds do not lie on the simulation grid");
    }
    if (leg.eps < d && !path.has_noise) {
      throw std::invalid_argument("Brownian legs need a path with recorded noise");
    }
  }
  double total = 0;
  std::vector<double> g(n + 1, 0.0), delta(n, 0.0);
  const double tol = 1e-9;
  for (const auto& mono : term.monos) {
    std::fill(g.begin(), g.end(), 0.0);
    g[n] = 1.0;
    for (std::size_t j = 0; j < path.steps(); ++j) {
      double s = path.times[j], s1 = path.times[j + 1];
      for (int idx = 0; idx < n; ++idx) {
        delta[idx] = 0;
        const auto& leg = term.legs[idx];
        if (s < leg.lower - tol) continue;
        if (!leg.upper_is_prev && s1 > leg.upper + tol) continue;
        double dz;
        if (leg.eps < d) {
          dz = path.noise[j * d + leg.eps];
        } else {
          dz = inc.at(j, leg.eps - d);
        }
        if (dz == 0.0) continue;
        double u_pow = 1;
        for (uint32_t e = 0; e < mono.e[idx]; ++e) u_pow *= s;
        delta[idx] = u_pow * g[idx + 1] * dz;
      }
      for (int idx = 0; idx < n; ++idx) g[idx] += delta[idx];
    }
    total += mono.c * g[0];
  }
  return total * term.scale;
}

double evaluate_functional(const std::vector<CompiledPoly>& factors, const std::vector<double>& times,
                           const Path& path) {
  double out = 1;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    std::size_t idx = grid_index(path, times[j]);
    out *= factors[j].eval(path.state(idx), 0.0);
  }
  return out;
}

IsometryReport chaos_isometry_check(const IntertwineTable<Q2>& table, const std::vector<Rat>& /*x0*/,
                                    const FunctionalSpec& spec, const ChaosExpansion& expansion,
                                    const SimParams& params, std::size_t n_paths, int threads) {
  const auto& rs = table.system();
  RootSystemView view = rs.view();
  std::vector<CompiledChaosTerm> terms;
  for (const auto& t : expansion.terms) terms.push_back(compile_term(t));
  std::vector<CompiledPoly> factors;
  std::vector<double> obs_times;
  for (std::size_t j = 0; j < spec.times.size(); ++j) {
    factors.push_back(compile(table.generalized_monomial(spec.nus[j])));
    obs_times.push_back(to_double(spec.times[j]));
  }
  const double constant = expansion.constant.to_double();
  const std::size_t nt = terms.size();
  const double nan = std::nan("");
  std::vector<std::vector<double>> term_vals(nt, std::vector<double>(n_paths, nan));
  std::vector<double> lambda_vals(n_paths, nan), residuals(n_paths, nan);

  BatchStats stats = simulate_batch(view, params, n_paths, threads, [&](std::size_t i, const Path& path) {
    MartingaleIncrements inc = martingale_increments(view, path);
    double lambda = evaluate_functional(factors, obs_times, path);
    double sum = constant;
    for (std::size_t a = 0; a < nt; ++a) {
      double v = evaluate_chaos_term(terms[a], path, inc);
      term_vals[a][i] = v;
      sum += v;
    }
    lambda_vals[i] = lambda;
    residuals[i] = lambda - sum;
  });

  auto compact = [](std::vector<double>& v) {
    std::size_t w = 0;
    for (double x : v) {
      if (!std::isnan(x)) v[w++] = x;
    }
    v.resize(w);
  };
  IsometryReport report;
  compact(lambda_vals);
  compact(residuals);
  report.functional_mean = mean_se(lambda_vals);
  report.reconstruction = mean_se(residuals);
  std::vector<double> sq(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) sq[i] = residuals[i] * residuals[i];
  report.reconstruction_sq = mean_se(sq);
  for (std::size_t a = 0; a < nt; ++a) {
    compact(term_vals[a]);
    report.term_means.push_back(mean_se(term_vals[a]));
    std::vector<double> s2(term_vals[a].size());
    for (std::size_t i = 0; i < s2.size(); ++i) s2[i] = term_vals[a][i] * term_vals[a][i];
    report.term_sq.push_back(mean_se(s2));
    report.term_l2.push_back(term_l2_squared(expansion.terms[a]));
  }
  for (std::size_t a = 0; a < nt; ++a) {
    for (std::size_t b = a + 1; b < nt && report.ortho_pairs.size() < 16; ++b) {
      std::vector<double> prod(term_vals[a].size());
      for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = term_vals[a][i] * term_vals[b][i];
      report.ortho_pairs.push_back({static_cast<int>(a), static_cast<int>(b)});
      report.ortho_means.push_back(mean_se(prod));
    }
  }
  report.exclusion_rate = stats.exclusion_rate();
  return report;
}

HermiteMartingaleReport hermite_martingale_check(const IntertwineTable<Q2>& table,
                                                 const std::vector<uint32_t>& nu, double s, double t,
                                                 const SimParams& params, std::size_t n_paths, int threads) {
  if (!(s < t)) throw std::invalid_argument("needs s < t");
  const auto& rs = table.system();
  RootSystemView view = rs.view();
  HermiteFamily<Q2> fam = hermite_family(table, nu);
  CompiledPoly q = compile(fam.Q);
  CompiledPoly m = compile(table.generalized_monomial(nu));
  const int d = rs.dim;
  SimParams run = params;
  run.T = t;

  const std::size_t n_tower = 1 + 2 * static_cast<std::size_t>(d);
  const double nan = std::nan("");
  std::vector<double> m_vals(n_paths, nan);
  std::vector<std::vector<double>> tower(n_tower, std::vector<double>(n_paths, nan));

  BatchStats stats = simulate_batch(view, run, n_paths, threads, [&](std::size_t i, const Path& path) {
    std::size_t is = grid_index(path, s);
    std::size_t it = grid_index(path, t);
    double mt = m.eval(path.state(it), 0.0);
    double qe = q.eval(path.state(is), s - t);
    m_vals[i] = mt;
    auto xs = path.state(is);
    double centered = mt - qe;
    tower[0][i] = centered;
    for (int c = 0; c < d; ++c) {
      tower[1 + c][i] = centered * xs[c];
      tower[1 + d + c][i] = centered * xs[c] * xs[c];
    }
  });

  auto compact = [](std::vector<double>& v) {
    std::size_t w = 0;
    for (double x : v) {
      if (!std::isnan(x)) v[w++] = x;
    }
    v.resize(w);
  };
  HermiteMartingaleReport report;
  std::vector<double> x0d = params.x0;
  report.target = q.eval(x0d, -t);
  compact(m_vals);
  report.sample_mean = mean_se(m_vals);
  for (auto& tw : tower) {
    compact(tw);
    report.tower.push_back(mean_se(tw));
  }
  report.exclusion_rate = stats.exclusion_rate();
  return report;
}

}  // namespace dunkl
