#include "dunkl/pathsim.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "dunkl/parallel.hpp"
#include "dunkl/rng.hpp"

namespace dunkl {

namespace {

class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual void brownian(double t, double h, std::span<double> out) = 0;
  // Thinning decision for one root over the substep, at rate lambda held
  // at the left point. P(fire) = 1 - exp(-lambda h) in every mode.
  virtual bool jump_fired(double t, double h, int root, double lambda) = 0;
  virtual double selection_uniform(double t, double h) = 0;
};

class SequentialNoise final : public NoiseSource {
 public:
  SequentialNoise(uint64_t seed, uint64_t path) : rng_(seed, path) {}
  void brownian(double, double h, std::span<double> out) override {
    double s = std::sqrt(h);
    for (auto& v : out) v = s * rng_.normal();
  }
  bool jump_fired(double, double h, int, double lambda) override {
    return rng_.uniform() < -std::expm1(-lambda * h);
  }
  double selection_uniform(double, double) override { return rng_.uniform(); }

 private:
  PathRng rng_;
};

// Draws keyed to reference-grid cells; coarse steps aggregate the cell
// normals of their span, and substeps refined below the cell width address
// their draws by dyadic position within the cell. Runs at different dt
// therefore share one Brownian path and one thinning sequence, including
// across near-wall refinement.
class GridIndexedNoise final : public NoiseSource {
 public:
  GridIndexedNoise(uint64_t seed, uint64_t path, double ref_dt, int dim, int nroots)
      : noise_(seed, path), ref_dt_(ref_dt), dim_(dim), nroots_(nroots) {}

  void brownian(double t, double h, std::span<double> out) override {
    uint64_t cell = cell_of(t);
    long cells = std::lround(h / ref_dt_);
    if (cells >= 1 && std::abs(h - cells * ref_dt_) < 1e-9 * ref_dt_) {
      double s = std::sqrt(ref_dt_);
      for (int i = 0; i < dim_; ++i) {
        double acc = 0;
        for (long c = 0; c < cells; ++c) acc += noise_.normal_at(cell + c, static_cast<uint32_t>(i));
        out[i] = s * acc;
      }
      return;
    }
    double s = std::sqrt(h);
    for (int i = 0; i < dim_; ++i) {
      out[i] = s * noise_.normal_at(cell, refined_slot(t, h, cell, static_cast<uint32_t>(i)));
    }
  }

  // Per reference cell, so that runs at different dt face the same
  // sequence of thinning uniforms; the survival factors multiply back to
  // exp(-lambda h).
  bool jump_fired(double t, double h, int root, double lambda) override {
    uint64_t cell = cell_of(t);
    long cells = std::lround(h / ref_dt_);
    if (cells >= 1 && std::abs(h - cells * ref_dt_) < 1e-9 * ref_dt_) {
      double p_cell = -std::expm1(-lambda * ref_dt_);
      for (long c = 0; c < cells; ++c) {
        if (noise_.uniform_at(cell + c, static_cast<uint32_t>(dim_ + root)) < p_cell) return true;
      }
      return false;
    }
    double u = noise_.uniform_at(cell, refined_slot(t, h, cell, static_cast<uint32_t>(dim_ + root)));
    return u < -std::expm1(-lambda * h);
  }

  double selection_uniform(double t, double h) override {
    uint64_t cell = cell_of(t);
    return noise_.uniform_at(cell, refined_slot(t, h, cell, static_cast<uint32_t>(dim_ + nroots_)));
  }

 private:
  uint64_t cell_of(double t) const { return static_cast<uint64_t>(std::floor(t / ref_dt_ + 1e-9)); }

  // Dyadic address of a refined substep inside its cell: the draw depends
  // only on (level, offset, purpose), never on visit order, so coupled
  // runs agree wherever their refinements overlap.
  uint32_t refined_slot(double t, double h, uint64_t cell, uint32_t purpose) {
    const uint32_t purposes = static_cast<uint32_t>(dim_ + nroots_ + 1);
    double ratio = ref_dt_ / h;
    long lvl = std::lround(std::log2(ratio));
    double frac = (t - cell * ref_dt_) / h;
    long off = std::lround(frac);
    if (lvl >= 1 && lvl < 20 && std::abs(ratio - std::ldexp(1.0, static_cast<int>(lvl))) < 1e-6 * ratio &&
        std::abs(frac - off) < 1e-6) {
      uint32_t node = (1u << lvl) + static_cast<uint32_t>(off);
      return 64u + node * purposes + purpose;
    }
    uint32_t& counter = fallback_slots_[cell];
    return 64u + (1u << 21) + counter++;
  }

  GridNoise noise_;
  double ref_dt_;
  int dim_, nroots_;
  std::map<uint64_t, uint32_t> fallback_slots_;
};

std::unique_ptr<NoiseSource> make_noise(const RootSystemView& sys, const SimParams& params, uint64_t path) {
  if (params.grid_noise) {
    double ref = params.ref_dt > 0 ? params.ref_dt : params.dt;
    return std::make_unique<GridIndexedNoise>(params.seed, path, ref, sys.dim,
                                              static_cast<int>(sys.roots.size()));
  }
  return std::make_unique<SequentialNoise>(params.seed, path);
}

struct Stepper {
  const RootSystemView& sys;
  const SimParams& params;
  NoiseSource& noise;
  Path& path;
  std::vector<double> x;
  std::vector<double> scratch_dw;
  std::vector<double> probs;

  bool active_wall_too_close(double h) const {
    double eps = std::sqrt(h);
    for (std::size_t r = 0; r < sys.roots.size(); ++r) {
      if (sys.mult[r] == 0) continue;
      if (std::abs(sys.pairing(static_cast<int>(r), x)) < eps) return true;
    }
    return false;
  }

  bool advance(double t, double h, int depth) {
    if (active_wall_too_close(h)) {
      if (depth >= params.max_halvings) return false;
      return advance(t, h / 2, depth + 1) && advance(t + h / 2, h / 2, depth + 1);
    }
    noise.brownian(t, h, scratch_dw);
    // drift sum_alpha k(alpha) alpha / <alpha, x> evaluated at the left point
    std::vector<double> xc = x;
    for (std::size_t r = 0; r < sys.roots.size(); ++r) {
      if (sys.mult[r] == 0) continue;
      double c = h * sys.mult[r] / sys.pairing(static_cast<int>(r), x);
      for (int i = 0; i < sys.dim; ++i) xc[i] += c * sys.roots[r][i];
    }
    for (int i = 0; i < sys.dim; ++i) xc[i] += scratch_dw[i];

    // per-root thinning from the left point; at most one jump per substep
    int fired_root = -1;
    double total_p = 0;
    int n_fired = 0;
    for (std::size_t r = 0; r < sys.roots.size(); ++r) {
      probs[r] = 0;
      if (sys.mult[r] == 0) continue;
      double pairing = sys.pairing(static_cast<int>(r), x);
      double lambda = sys.mult[r] / (pairing * pairing);
      if (noise.jump_fired(t, h, static_cast<int>(r), lambda)) {
        probs[r] = -std::expm1(-lambda * h);
        total_p += probs[r];
        fired_root = static_cast<int>(r);
        ++n_fired;
      }
    }
    if (n_fired > 1) {
      double u = noise.selection_uniform(t, h) * total_p;
      double cum = 0;
      for (std::size_t r = 0; r < sys.roots.size(); ++r) {
        if (probs[r] == 0) continue;
        cum += probs[r];
        if (u <= cum) {
          fired_root = static_cast<int>(r);
          break;
        }
      }
    }

    if (fired_root >= 0) {
      JumpRecord rec;
      rec.step = path.steps();
      rec.time = t + h;
      rec.root = fired_root;
      rec.pre = xc;
      double s = sys.pairing(fired_root, xc);
      for (int i = 0; i < sys.dim; ++i) xc[i] -= s * sys.roots[fired_root][i];
      path.jumps.push_back(std::move(rec));
    }

    x = xc;
    path.times.push_back(t + h);
    path.states.insert(path.states.end(), x.begin(), x.end());
    path.noise.insert(path.noise.end(), scratch_dw.begin(), scratch_dw.end());
    return true;
  }
};

void validate_start(const RootSystemView& sys, const SimParams& params) {
  if (static_cast<int>(params.x0.size()) != sys.dim) throw std::invalid_argument("x0 dimension mismatch");
  if (!(params.dt > 0) || !(params.T > 0)) throw std::invalid_argument("T and dt must be positive");
  double norm = 0;
  for (double v : params.x0) norm += v * v;
  if (norm == 0) throw std::invalid_argument("start point must be nonzero");
  for (std::size_t r = 0; r < sys.roots.size(); ++r) {
    if (sys.mult[r] > 0 && sys.pairing(static_cast<int>(r), params.x0) == 0) {
      throw std::invalid_argument("start point lies on an active reflecting hyperplane");
    }
  }
}

}  // namespace

std::optional<Path> simulate_path(const RootSystemView& sys, const SimParams& params, uint64_t path_index) {
  validate_start(sys, params);
  auto noise = make_noise(sys, params, path_index);
  Path path;
  path.dim = sys.dim;
  path.has_noise = true;
  path.times.push_back(0.0);
  path.states.insert(path.states.end(), params.x0.begin(), params.x0.end());
  Stepper stepper{sys, params, *noise, path, params.x0, std::vector<double>(sys.dim),
                  std::vector<double>(sys.roots.size())};
  std::size_t n_steps = static_cast<std::size_t>(std::llround(params.T / params.dt));
  if (n_steps == 0) n_steps = 1;
  double h = params.T / static_cast<double>(n_steps);
  for (std::size_t j = 0; j < n_steps; ++j) {
    if (!stepper.advance(j * h, h, 0)) return std::nullopt;
  }
  return path;
}

Path simulate_skew_rank1(const Rat& k, const SimParams& params, uint64_t path_index) {
  if (k <= 0) {
    throw std::invalid_argument("skew-product sampler requires k > 0 (at k = 0 the sign at zeros of |X| is ill-defined)");
  }
  if (params.x0.size() != 1) throw std::invalid_argument("skew-product sampler is rank-1 only");
  if (params.x0[0] == 0.0) throw std::invalid_argument("start point must be nonzero");
  const double kd = to_double(k);
  PathRng rng(params.seed, path_index);
  Path path;
  path.dim = 1;
  path.has_noise = false;
  path.times.push_back(0.0);
  path.states.push_back(params.x0[0]);

  std::size_t n_steps = static_cast<std::size_t>(std::llround(params.T / params.dt));
  if (n_steps == 0) n_steps = 1;
  double h = params.T / static_cast<double>(n_steps);
  double y = params.x0[0] * params.x0[0];  // squared radial part
  double sign = params.x0[0] > 0 ? 1.0 : -1.0;
  for (std::size_t j = 0; j < n_steps; ++j) {
    double y_prev = y;
    // exact squared-Bessel transition of dimension 1 + 2k
    double z = rng.normal();
    double base = std::sqrt(h) * z + std::sqrt(y_prev);
    double extra = (kd > 0) ? 2.0 * h * rng.gamma(kd) : 0.0;
    y = base * base + extra;
    double r_new = std::sqrt(y);
    // additive clock increment, trapezoidal
    double dA = 0.5 * h * (1.0 / std::max(y_prev, 1e-300) + 1.0 / std::max(y, 1e-300));
    // exact flip parity on the clock increment: rate k/2, P(odd) = (1 - e^{-k dA})/2
    double p_odd = 0.5 * -std::expm1(-kd * dA);
    if (rng.uniform() < p_odd) {
      JumpRecord rec;
      rec.step = j;
      rec.time = (j + 1) * h;
      rec.root = 0;
      rec.pre = {sign * r_new};
      path.jumps.push_back(std::move(rec));
      sign = -sign;
    }
    path.times.push_back((j + 1) * h);
    path.states.push_back(sign * r_new);
  }
  return path;
}

BatchStats simulate_batch(const RootSystemView& sys, const SimParams& params, std::size_t n_paths, int threads,
                          const std::function<void(std::size_t, const Path&)>& consume) {
  validate_start(sys, params);
  std::atomic<std::size_t> rejected{0};
  parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto path = simulate_path(sys, params, i);
      if (path) {
        consume(i, *path);
      } else {
        rejected.fetch_add(1, std::memory_order_relaxed);
      }
    }
  });
  return BatchStats{n_paths, rejected.load()};
}

BatchStats simulate_skew_batch(const Rat& k, const SimParams& params, std::size_t n_paths, int threads,
                               const std::function<void(std::size_t, const Path&)>& consume) {
  parallel_for(n_paths, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Path path = simulate_skew_rank1(k, params, i);
      consume(i, path);
    }
  });
  return BatchStats{n_paths, 0};
}

MartingaleIncrements martingale_increments(const RootSystemView& sys, const Path& path) {
  const std::size_t steps = path.steps();
  const int nroots = static_cast<int>(sys.roots.size());
  MartingaleIncrements inc;
  inc.steps = steps;
  inc.nroots = nroots;
  inc.dM.assign(steps * nroots, 0.0);
  inc.dM_jump.assign(steps * nroots, 0.0);
  std::vector<int> jump_at(steps, -1);
  for (std::size_t jj = 0; jj < path.jumps.size(); ++jj) jump_at[path.jumps[jj].step] = static_cast<int>(jj);

  for (std::size_t j = 0; j < steps; ++j) {
    double h = path.times[j + 1] - path.times[j];
    auto left = path.state(j);
    const JumpRecord* jump = jump_at[j] >= 0 ? &path.jumps[jump_at[j]] : nullptr;
    std::span<const double> right = jump ? std::span<const double>(jump->pre) : path.state(j + 1);
    for (int r = 0; r < nroots; ++r) {
      double kr = sys.mult[r];
      if (kr == 0) continue;
      double sqrt_k = std::sqrt(kr);
      double comp = sqrt_k * 0.5 * h * (1.0 / sys.pairing(r, left) + 1.0 / sys.pairing(r, right));
      double jump_part = 0;
      if (jump && jump->root == r) jump_part = -sys.pairing(r, jump->pre) / sqrt_k;
      inc.dM[j * nroots + r] = comp + jump_part;
      inc.dM_jump[j * nroots + r] = jump_part;
    }
  }
  return inc;
}

MartingaleDecomposition extract_martingales(const RootSystemView& sys, const Path& path) {
  const std::size_t steps = path.steps();
  const int d = sys.dim;
  const int nroots = static_cast<int>(sys.roots.size());
  MartingaleIncrements inc = martingale_increments(sys, path);
  MartingaleDecomposition out;
  out.M.assign(nroots, std::vector<double>(steps + 1, 0.0));
  out.compensator.assign(nroots, std::vector<double>(steps + 1, 0.0));
  for (std::size_t j = 0; j < steps; ++j) {
    for (int r = 0; r < nroots; ++r) {
      out.M[r][j + 1] = out.M[r][j] + inc.at(j, r);
      out.compensator[r][j + 1] = out.compensator[r][j] + (inc.at(j, r) - inc.jump_at(j, r));
    }
  }
  out.B.assign((steps + 1) * d, 0.0);
  for (std::size_t j = 0; j <= steps; ++j) {
    for (int i = 0; i < d; ++i) {
      double v = path.states[j * d + i] - path.states[i];
      for (int r = 0; r < nroots; ++r) {
        if (sys.mult[r] == 0) continue;
        v -= std::sqrt(sys.mult[r]) * out.M[r][j] * sys.roots[r][i];
      }
      out.B[j * d + i] = v;
    }
  }
  return out;
}

double reconstruction_residual(const RootSystemView& sys, const Path& path) {
  if (!path.has_noise) throw std::invalid_argument("reconstruction residual needs the recorded driving noise");
  MartingaleIncrements inc = martingale_increments(sys, path);
  const std::size_t steps = path.steps();
  const int d = sys.dim;
  std::vector<double> acc(d, 0.0);  // W_T + sum sqrt(k) M_T alpha
  for (std::size_t j = 0; j < steps; ++j) {
    for (int i = 0; i < d; ++i) acc[i] += path.noise[j * d + i];
    for (int r = 0; r < inc.nroots; ++r) {
      if (sys.mult[r] == 0) continue;
      double m = std::sqrt(sys.mult[r]) * inc.at(j, r);
      for (int i = 0; i < d; ++i) acc[i] += m * sys.roots[r][i];
    }
  }
  double res = 0;
  for (int i = 0; i < d; ++i) {
    double v = path.states[steps * d + i] - path.states[i] - acc[i];
    res += v * v;
  }
  return std::sqrt(res);
}

JumpFunctionalReport estimate_jump_functionals(const RootSystemView& sys, const SimParams& params,
                                               std::size_t n_paths, int threads) {
  const int nroots = static_cast<int>(sys.roots.size());
  const double nan = std::nan("");
  std::vector<std::vector<double>> i1(nroots, std::vector<double>(n_paths, nan));
  std::vector<std::vector<double>> i2(nroots, std::vector<double>(n_paths, nan));
  std::vector<std::vector<double>> counts(nroots, std::vector<double>(n_paths, nan));
  std::vector<double> total_counts(n_paths, nan), comp_counts(n_paths, nan), diffs(n_paths, nan),
      amplitudes(n_paths, nan);

  BatchStats stats = simulate_batch(sys, params, n_paths, threads, [&](std::size_t idx, const Path& path) {
    std::vector<int> jump_at(path.steps(), -1);
    for (std::size_t jj = 0; jj < path.jumps.size(); ++jj) jump_at[path.jumps[jj].step] = static_cast<int>(jj);
    double comp_total = 0;
    for (int r = 0; r < nroots; ++r) {
      double a1 = 0, a2 = 0;
      for (std::size_t j = 0; j < path.steps(); ++j) {
        double h = path.times[j + 1] - path.times[j];
        const JumpRecord* jump = jump_at[j] >= 0 ? &path.jumps[jump_at[j]] : nullptr;
        std::span<const double> right = jump ? std::span<const double>(jump->pre) : path.state(j + 1);
        double pl = sys.pairing(r, path.state(j)), pr = sys.pairing(r, right);
        // integrate 1/|p| and 1/p^2 along the linear interpolant of the
        // pairing (exact there, and far better than the trapezoid on the
        // near-wall spikes); trapezoid fallback across sign changes
        if (pl * pr > 0) {
          a2 += h / (pl * pr);
          a1 += (pl == pr) ? h / std::abs(pl) : h * std::log(pr / pl) / (pr - pl);
        } else {
          a1 += 0.5 * h * (1.0 / std::abs(pl) + 1.0 / std::abs(pr));
          a2 += 0.5 * h * (1.0 / (pl * pl) + 1.0 / (pr * pr));
        }
      }
      i1[r][idx] = a1;
      i2[r][idx] = a2;
      comp_total += sys.mult[r] * a2;
      counts[r][idx] = 0;
    }
    double amp = 0;
    for (const auto& jump : path.jumps) {
      counts[jump.root][idx] += 1;
      amp += std::sqrt(2.0) * std::abs(sys.pairing(jump.root, jump.pre));
    }
    total_counts[idx] = static_cast<double>(path.jumps.size());
    comp_counts[idx] = comp_total;
    diffs[idx] = total_counts[idx] - comp_total;
    amplitudes[idx] = amp;
  });

  auto compact = [](std::vector<double>& v) {
    std::size_t w = 0;
    for (double x : v) {
      if (!std::isnan(x)) v[w++] = x;
    }
    v.resize(w);
  };
  JumpFunctionalReport report;
  for (int r = 0; r < nroots; ++r) {
    compact(i1[r]);
    compact(i2[r]);
    compact(counts[r]);
    report.inv_abs_integral.push_back(mean_se(i1[r]));
    report.inv_sq_integral.push_back(mean_se(i2[r]));
    report.jump_count.push_back(mean_se(counts[r]));
  }
  compact(total_counts);
  compact(comp_counts);
  compact(diffs);
  compact(amplitudes);
  report.total_jump_count = mean_se(total_counts);
  report.compensator_count = mean_se(comp_counts);
  report.count_minus_compensator = mean_se(diffs);
  report.total_jump_amplitude = mean_se(amplitudes);
  report.exclusion_rate = stats.exclusion_rate();
  report.n_paths_used = total_counts.size();
  return report;
}

double ito_residual(const RootSystemView& sys, const CompiledHermite& fam, const Path& path, double T) {
  const int d = sys.dim;
  const std::size_t steps = path.steps();
  std::vector<int> jump_at(steps, -1);
  for (std::size_t jj = 0; jj < path.jumps.size(); ++jj) jump_at[path.jumps[jj].step] = static_cast<int>(jj);

  double lhs = fam.Q.eval(path.state(steps), path.times[steps] - T) - fam.Q.eval(path.state(0), -T);
  double legs = 0;
  for (std::size_t j = 0; j < steps; ++j) {
    double tl = path.times[j] - T;
    auto left = path.state(j);
    if (path.has_noise) {
      for (int i = 0; i < d; ++i) legs += fam.grad[i].eval(left, tl) * path.noise[j * d + i];
    }
    double h = path.times[j + 1] - path.times[j];
    const JumpRecord* jump = jump_at[j] >= 0 ? &path.jumps[jump_at[j]] : nullptr;
    std::span<const double> right = jump ? std::span<const double>(jump->pre) : path.state(j + 1);
    double tr = path.times[j + 1] - T;
    for (std::size_t r = 0; r < sys.roots.size(); ++r) {
      double kr = sys.mult[r];
      if (kr == 0) continue;
      // absolutely continuous part: integrand sqrt(k) jump_raw against
      // dM^{ac} = sqrt(k) ds / <alpha, X>, trapezoidal
      legs += 0.5 * h * kr *
              (fam.jump_raw[r].eval(left, tl) / sys.pairing(static_cast<int>(r), left) +
               fam.jump_raw[r].eval(right, tr) / sys.pairing(static_cast<int>(r), right));
    }
    if (jump) {
      // jump of the M-leg: sqrt(k) jump_raw * (-<alpha, pre>/sqrt(k))
      legs -= fam.jump_raw[jump->root].eval(jump->pre, tr) * sys.pairing(jump->root, jump->pre);
    }
  }
  return std::abs(lhs - legs);
}

}  // namespace dunkl
