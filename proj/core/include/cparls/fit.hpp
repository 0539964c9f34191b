#pragma once

#include <cstddef>
#include <vector>

#include "cparls/kruskal.hpp"
#include "cparls/krp_sampler.hpp"
#include "cparls/sparse_tensor.hpp"

namespace cparls {

/// ||X - M||^2 without forming M densely:
///   ||X||^2 - 2 <X, M> + lambda' (*_k A_k' A_k) lambda,
/// with <X, M> streamed over the nonzeros. Accumulates in extended precision
/// and clamps at zero.
double residual_norm_sq(const SparseTensor& t, const KruskalModel& model);

/// 1 - ||X - M|| / ||X||. Throws DataError if ||X|| = 0.
double exact_fit(const SparseTensor& t, const KruskalModel& model);

/// ||Z B' - X_(k)'||_F^2 for the mode-k least-squares problem whose design Z
/// is the Khatri-Rao product of the factors other than k and B is n_k x r.
double lsq_residual_sq(const SparseTensor& t, const std::vector<Matrix>& factors, int mode, const Matrix& b);

/// Exact solution of the mode-k least-squares problem via the normal
/// equations B = X_(k) Z (Z'Z)^+.
Matrix exact_lsq_solution(const SparseTensor& t, const std::vector<Matrix>& factors, int mode);

/// | r(B_sketch) - r(B_exact) | / max(1, r(B_exact)) with r the squared
/// residual above.
double residual_rel_diff(const SparseTensor& t, const std::vector<Matrix>& factors, int mode,
                         const Matrix& b_sketch, const Matrix& b_exact);

/// Stratified sample of tensor positions, frozen at construction, for cheap
/// repeated estimates of ||X - M||^2.
///
/// The nonzero stratum holds ceil(alpha * s) positions drawn uniformly from
/// the nonzeros (without replacement when that many exist); the zero stratum
/// holds floor((1 - alpha) * s) uniform positions not in the nonzero set,
/// found by rejection. Each stratum is weighted by its population size over
/// its sample size.
class FitEstimator {
 public:
  FitEstimator(const SparseTensor& t, std::size_t s_fit, double alpha, Rng& rng);

  /// Sum over samples of phi_i (m_i - x_i)^2.
  double estimate_residual_sq(const KruskalModel& model) const;

  /// 1 - sqrt(F_hat) / ||X||.
  double estimated_fit(const KruskalModel& model) const;

  int order() const { return order_; }
  std::size_t nonzero_samples() const { return nz_values_.size(); }
  std::size_t zero_samples() const { return zero_coords_.size() / static_cast<std::size_t>(order_); }
  double phi_nonzero() const { return phi_nonzero_; }
  double phi_zero() const { return phi_zero_; }
  double tensor_norm() const { return norm_; }
  /// True when the zero stratum was requested but the tensor has no zeros.
  bool zero_stratum_empty() const { return zero_stratum_empty_; }
  bool with_replacement() const { return with_replacement_; }

  std::span<const index_t> nonzero_coords(std::size_t j) const {
    return {nz_coords_.data() + j * order_, static_cast<std::size_t>(order_)};
  }
  double nonzero_value(std::size_t j) const { return nz_values_[j]; }
  std::span<const index_t> zero_coords(std::size_t j) const {
    return {zero_coords_.data() + j * order_, static_cast<std::size_t>(order_)};
  }

 private:
  int order_ = 0;
  std::vector<index_t> nz_coords_;
  std::vector<double> nz_values_;
  std::vector<index_t> zero_coords_;
  double phi_nonzero_ = 0.0;
  double phi_zero_ = 0.0;
  double norm_ = 0.0;
  bool zero_stratum_empty_ = false;
  bool with_replacement_ = false;
};

}  // namespace cparls
