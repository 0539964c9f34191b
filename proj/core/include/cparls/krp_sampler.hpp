#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "cparls/dense_kernels.hpp"
#include "cparls/multi_index.hpp"

namespace cparls {

/// Random engine used by every sampling routine. Passing the same seeded
/// engine state reproduces results bit-for-bit.
using Rng = std::mt19937_64;

/// Engine for an independent stream derived from a user seed; solvers use
/// distinct stream ids for initialization, sampling and fit estimation.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Uniform double in [0, 1) drawn from the top 53 bits of one engine output.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Multinomial distribution over the rows of one factor matrix.
class ModeDistribution {
 public:
  ModeDistribution() = default;

  /// Throws std::invalid_argument if entries are outside [0,1] or do not sum
  /// to 1 within 1e-10.
  explicit ModeDistribution(Vector probs);

  /// Normalized leverage scores l(A)/rank(A).
  static ModeDistribution from_factor(const Matrix& a);

  index_t size() const { return probs_.size(); }
  double operator[](index_t i) const { return probs_(i); }
  const Vector& probs() const { return probs_; }
  double max() const { return max_; }

  /// Inverse-CDF draw by binary search over the cumulative sums.
  index_t draw(Rng& rng) const;

 private:
  Vector probs_;
  std::vector<double> cdf_;
  double max_ = 0.0;
};

/// Per-mode distributions of the Khatri-Rao rows being sampled, in the same
/// mode order as the multi-indices they produce.
using DistributionRefs = std::vector<const ModeDistribution*>;

/// Draws each entry independently from its mode distribution; the joint
/// probability of the result is the product of the per-mode probabilities.
std::vector<index_t> draw_multi_index(const DistributionRefs& dists, Rng& rng);

/// prod_k p_k(multi[k]), multiplied in mode order.
double joint_probability(const DistributionRefs& dists, std::span<const index_t> multi);

struct DeterministicSet {
  MultiIndexTable idx;       // sorted by decreasing probability
  std::vector<double> prob;  // joint probability of each row
  double p_det = 0.0;        // total probability mass
  std::size_t size() const { return prob.size(); }
};

/// Every multi-index whose joint probability exceeds tau. Each mode is first
/// pruned to rows with p_k(i) > tau * alpha_k / alpha_*, where alpha_k is the
/// largest probability of mode k and alpha_* their product; only the product
/// of the surviving rows is checked. Throws NumericalError if that product
/// exceeds `candidate_cap`.
DeterministicSet didx(const DistributionRefs& dists, double tau,
                      std::uint64_t candidate_cap = 10'000'000);

struct RandomRows {
  MultiIndexTable idx;
  std::vector<double> wgt;
  std::vector<double> prob;
};

struct SidxOptions {
  /// Minimum acceptance probability 1 - p_det.
  double acceptance_floor = 1e-6;
  /// Bulk rounds before giving up.
  int max_rounds = 100;
};

/// s_rnd rejection-sampled multi-indices with joint probability <= tau,
/// each weighted sqrt((1 - p_det) / (p_i * s_rnd)). Draws are made in bulk,
/// oversampling each round by ceil(1.1 / (1 - p_det)).
RandomRows sidx(const DistributionRefs& dists, std::size_t s_rnd, double tau, double p_det, Rng& rng,
                const SidxOptions& opts = {});

struct CombinedRows {
  MultiIndexTable idx;
  std::vector<double> wgt;
  std::vector<std::int64_t> count;
};

/// Collapses repeated multi-indices into one row of weight w * sqrt(c),
/// keeping the order of first occurrence.
CombinedRows cidx(const MultiIndexTable& idx, std::span<const double> wgt);

struct SketchOptions {
  double tau = 1.0;
  bool combine = true;
  std::uint64_t candidate_cap = 10'000'000;
  SidxOptions sidx;
};

/// Row indices and weights of a hybrid deterministic/random sketch of a
/// Khatri-Rao product.
struct SketchPlan {
  MultiIndexTable idx;
  std::vector<double> wgt;
  std::vector<std::int64_t> count;  // multiplicity; 1 for deterministic rows
  std::size_t s_det = 0;            // leading rows that are deterministic
  double p_det = 0.0;
  std::size_t s_rnd = 0;            // random draws before combining
  std::size_t s_requested = 0;

  std::size_t size() const { return wgt.size(); }
};

/// Deterministic rows (p_i > tau, weight 1) followed by s - s_det random
/// rows drawn with rejection and, if enabled, combined. If more than s rows
/// qualify deterministically, the s most probable are kept. If the
/// remaining mass 1 - p_det is below the acceptance floor, the
/// deterministic rows are returned alone.
SketchPlan skrp_lev(const DistributionRefs& dists, std::size_t s, const SketchOptions& opts, Rng& rng);

/// One line per row: "i_1 ... i_d weight det|rnd multiplicity", one-based.
void write_plan_diagnostics(std::ostream& out, const SketchPlan& plan);

}  // namespace cparls
