#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cparls/fit.hpp"
#include "cparls/kruskal.hpp"
#include "cparls/krp_sampler.hpp"
#include "cparls/sparse_tensor.hpp"

namespace cparls {

enum class FitMode { exact, estimated };
enum class InitMethod { gaussian, rrf };

const char* to_string(FitMode mode);
const char* to_string(InitMethod method);

struct SolverConfig {
  int rank = 10;
  std::size_t samples = 1 << 17;
  double tau = 1.0;
  bool combine = true;
  int epoch_size = 5;
  int fail_epochs = 3;
  double tol = 1e-4;
  int max_epochs = 50;
  FitMode fit_mode = FitMode::exact;
  std::size_t fit_samples = 1 << 17;
  double fit_alpha = 0.5;
  InitMethod init = InitMethod::gaussian;
  std::size_t init_samples = 100000;
  std::uint64_t seed = 0;
  /// When false, trace times are recorded as 0 so traces are reproducible.
  bool record_time = true;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

struct TraceRecord {
  int epoch = 0;  // epoch (randomized) or iteration (ALS)
  double time_s = 0.0;
  double fit = 0.0;
  FitMode fit_kind = FitMode::exact;
  int mode = -1;  // -1 for rows that are not per-mode
  double s_bar = 0.0;
  double s_det = 0.0;
  double p_det = 0.0;
};

/// Accumulated wall-clock seconds per phase of the sampled solves.
struct PhaseTimes {
  double plan = 0.0;
  double krp = 0.0;
  double gather = 0.0;
  double solve = 0.0;
  double fit = 0.0;
};

struct CpResult {
  KruskalModel model;
  std::vector<TraceRecord> trace;
  PhaseTimes phases;
  int iterations = 0;  // outer iterations
  bool converged = false;
  double final_fit = 0.0;
  /// Inner solves that hit a rank-deficient system.
  int rank_deficient_solves = 0;
};

/// Called after every inner solve with the mode just updated and the
/// current model and distributions. Used by tests to observe the iteration.
struct SolverObserver {
  virtual ~SolverObserver() = default;
  virtual void after_solve(int mode, const KruskalModel& model, const std::vector<ModeDistribution>& dists) = 0;
};

/// Alternating randomized least squares with leverage-score sampling of the
/// Khatri-Rao products. Requires t.has_mode_linearization().
///
/// Each inner iteration samples rows for the mode-k subproblem from the
/// other modes' distributions, solves the sampled system, normalizes the
/// factor into lambda and refreshes that mode's distribution. The fit is
/// evaluated once per epoch of `epoch_size` outer iterations; the run stops
/// after `fail_epochs` consecutive epochs that fail to beat the best fit so
/// far by more than `tol`, or after `max_epochs`.
CpResult cp_arls_lev(const SparseTensor& t, const SolverConfig& cfg, const KruskalModel& init,
                     SolverObserver* observer = nullptr);

struct AlsConfig {
  int rank = 10;
  double tol = 1e-4;
  int max_iters = 250;
  bool record_time = true;
};

/// Deterministic CP-ALS: each factor solves B V = MTTKRP with V the Hadamard
/// product of the other Gram matrices (Cholesky, or pseudo-inverse when V is
/// singular). Stops when the exact fit improves by less than `tol`.
CpResult cp_als(const SparseTensor& t, const AlsConfig& cfg, const KruskalModel& init);

/// Factors with i.i.d. standard normal entries.
KruskalModel gaussian_init(const std::vector<index_t>& shape, int rank, Rng& rng);

/// n_k x r factor formed as random Gaussian combinations of s_init mode-k
/// fibers drawn uniformly (with replacement) from the nonempty fibers.
Matrix rrf_init(const SparseTensor& t, int mode, int rank, std::size_t s_init, Rng& rng);

/// Initial model per the configured method, drawn from `rng`.
KruskalModel make_initial_model(const SparseTensor& t, const SolverConfig& cfg, Rng& rng);

/// CSV with header epoch,time_s,fit,fit_kind,mode,s_bar,s_det,p_det. Modes
/// are one-based; per-mode columns are empty on non-mode rows.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace cparls
