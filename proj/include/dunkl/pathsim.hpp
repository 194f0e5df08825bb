#pragma once

// Jump-diffusion simulation of the Dunkl process: Euler stepping between
// jumps, per-root exponential thinning with state-dependent intensity,
// adaptive substepping near the reflecting hyperplanes, the exact rank-1
// skew-product sampler, and extraction of the Brownian part and the
// normal martingales from recorded paths.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dunkl/compiled.hpp"
#include "dunkl/rootsys.hpp"
#include "dunkl/stats.hpp"

namespace dunkl {

struct SimParams {
  std::vector<double> x0;
  double T = 1.0;
  double dt = 1e-3;
  uint64_t seed = 1;
  int max_halvings = 12;
  // Grid-indexed noise keys draws to cells of a fixed reference grid so
  // runs at different dt share the same Brownian path; used by the
  // refinement checks.
  bool grid_noise = false;
  double ref_dt = 0;  // defaults to dt when grid_noise is set
};

struct JumpRecord {
  std::size_t step;  // substep index; the reflection lands on its right endpoint
  double time;       // right-endpoint time
  int root;
  std::vector<double> pre;  // state just before the reflection
};

struct Path {
  int dim = 0;
  std::vector<double> times;   // substep boundaries, times[0] = 0
  std::vector<double> states;  // (M+1) x dim, row-major
  std::vector<double> noise;   // M x dim Brownian increments; empty for skew paths
  std::vector<JumpRecord> jumps;
  bool has_noise = false;

  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
  std::span<const double> state(std::size_t j) const {
    return {states.data() + j * dim, static_cast<std::size_t>(dim)};
  }
};

// One path; nullopt if the near-wall substep budget collapsed and the path
// was rejected.
std::optional<Path> simulate_path(const RootSystemView& sys, const SimParams& params, uint64_t path_index);

// Exact-in-law rank-1 alternative: |X| sampled from the squared-Bessel
// transition (dimension 1 + 2k), sign flipped with exact parity of a
// Poisson process of rate k/2 run on the additive clock int ds / |X_s|^2.
// Requires k > 0.
Path simulate_skew_rank1(const Rat& k, const SimParams& params, uint64_t path_index);

struct BatchStats {
  std::size_t requested = 0;
  std::size_t rejected = 0;
  double exclusion_rate() const { return requested ? static_cast<double>(rejected) / requested : 0.0; }
};

// Paths are independent; consume(i, path) runs concurrently and must write
// only to per-index slots.
BatchStats simulate_batch(const RootSystemView& sys, const SimParams& params, std::size_t n_paths, int threads,
                          const std::function<void(std::size_t, const Path&)>& consume);

BatchStats simulate_skew_batch(const Rat& k, const SimParams& params, std::size_t n_paths, int threads,
                               const std::function<void(std::size_t, const Path&)>& consume);

// Per-substep increments of the root martingales: the compensated jump sum
// plus the trapezoidal compensator on the recorded grid (pre-jump states
// serve as right endpoints across jump substeps).
struct MartingaleIncrements {
  std::size_t steps = 0;
  int nroots = 0;
  std::vector<double> dM;       // steps x nroots
  std::vector<double> dM_jump;  // jump contribution only
  double at(std::size_t j, int r) const { return dM[j * nroots + r]; }
  double jump_at(std::size_t j, int r) const { return dM_jump[j * nroots + r]; }
};

MartingaleIncrements martingale_increments(const RootSystemView& sys, const Path& path);

struct MartingaleDecomposition {
  std::vector<double> B;                          // (M+1) x dim, X - x0 - sum sqrt(k) M alpha
  std::vector<std::vector<double>> M;             // per root, cumulative on the grid
  std::vector<std::vector<double>> compensator;   // per root, sqrt(k) int ds/<alpha, X>
};

MartingaleDecomposition extract_martingales(const RootSystemView& sys, const Path& path);

// | X_T - x0 - W_T - sum_alpha sqrt(k) M_T alpha | with W the recorded
// driving noise; a direct gauge of the scheme error.
double reconstruction_residual(const RootSystemView& sys, const Path& path);

struct JumpFunctionalReport {
  std::vector<MeanSE> inv_abs_integral;   // per root: int ds / |<alpha, X>|
  std::vector<MeanSE> inv_sq_integral;    // per root: int ds / <alpha, X>^2
  std::vector<MeanSE> jump_count;         // per root
  MeanSE total_jump_count;
  MeanSE compensator_count;               // sum_alpha k int ds / <alpha, X>^2
  MeanSE count_minus_compensator;         // paired difference, finite variance
  MeanSE total_jump_amplitude;            // sum |Delta X|
  double exclusion_rate = 0;
  std::size_t n_paths_used = 0;
};

JumpFunctionalReport estimate_jump_functionals(const RootSystemView& sys, const SimParams& params,
                                               std::size_t n_paths, int threads);

// Pathwise residual of the jump-diffusion change-of-variable formula
// applied to the space-time harmonic Q (whose ds-term vanishes):
// | Q(X_T, 0) - Q(x0, -T) - Brownian legs - martingale legs |.
double ito_residual(const RootSystemView& sys, const CompiledHermite& fam, const Path& path, double T);

}  // namespace dunkl
