#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cparls/multi_index.hpp"
#include "cparls/sparse_tensor.hpp"

namespace cparls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Non-owning list of factor matrices, e.g. all factors except the one being
/// solved for.
using FactorRefs = std::vector<const Matrix*>;

/// Returns pointers to every factor except `skip` (if given), in mode order.
FactorRefs factor_refs(const std::vector<Matrix>& factors, std::optional<int> skip = std::nullopt);

struct LeverageScores {
  Vector scores;
  int rank = 0;
  bool rank_deficient = false;
};

/// Squared row norms of an orthonormal basis for range(a), obtained from a
/// thin SVD. Singular values below max(n, r) * eps * sigma_max are treated
/// as zero; `rank` then reports the numerical rank.
LeverageScores leverage_scores(const Matrix& a);

/// Rows of the Khatri-Rao product selected by `idx`:
///   out(j,:) = wgt[j] * (A_0(idx[j][0],:) .* A_1(idx[j][1],:) .* ...).
Matrix krp_samp(const FactorRefs& factors, const MultiIndexTable& idx, std::span<const double> wgt);

struct LsqSolution {
  /// n x r, the minimizer B of || Zs B' - Xs ||_F.
  Matrix b;
  int rank = 0;
  bool rank_deficient = false;
};

/// Least squares with a dense s x r design and sparse s x n right-hand
/// sides, by Householder QR of the design. A rank-deficient R falls back to
/// its pseudo-inverse, which yields the minimum-norm solution.
LsqSolution solve_lsq(const Matrix& zs, const SampledRows& xs);

/// Hadamard product of the Gram matrices A_k' A_k over all factors (or all
/// but `skip`). With no factors included the result is the all-ones matrix.
Matrix gram_hadamard(const std::vector<Matrix>& factors, std::optional<int> skip = std::nullopt);

/// Mode-k unfolding of t times the Khatri-Rao product of the other factors,
/// streamed over the nonzeros.
Matrix mttkrp(const SparseTensor& t, const std::vector<Matrix>& factors, int mode);

/// Scales columns of `a` to unit 2-norm in place and returns the norms.
/// A zero column becomes e_1 with norm 0.
Vector normalize_columns(Matrix& a);

}  // namespace cparls
