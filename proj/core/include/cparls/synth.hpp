#pragma once

#include <cstdint>
#include <vector>

#include "cparls/kruskal.hpp"
#include "cparls/sparse_tensor.hpp"

namespace cparls {

/// Dense low-rank tensor whose factors have a few rows of concentrated
/// leverage: the first `concentrated` columns of every factor are zero except
/// for `spread` disjoint rows per column holding magnitude + U(0, seed_noise).
/// The remaining columns are standard normal.
struct SynthSpec {
  std::vector<index_t> shape{50, 50, 50};
  int rank = 25;
  int concentrated = 3;
  int spread = 5;
  double magnitude = 3.0;
  double seed_noise = 0.05;
  /// Gaussian noise with norm noise * ||M|| is added to every element.
  double noise = 0.05;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct SynthResult {
  SparseTensor tensor;
  KruskalModel truth;  // normalized, lambda holds the column norms
};

/// Forms the full tensor densely (every element is stored as a coordinate),
/// so keep the product of the mode sizes at desk scale.
SynthResult gen_synthetic(const SynthSpec& spec);

/// Mean over matched components of
///   (1 - |lambda_a - lambda_b| / max(lambda_a, lambda_b)) * prod_k |cos(a_k, b_k)|
/// after normalizing both models, with components matched greedily by the
/// largest remaining score. 1 iff the models agree up to permutation and sign.
double factor_match_score(const KruskalModel& a, const KruskalModel& b);

}  // namespace cparls
