#include "cparls/fit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "cparls/errors.hpp"

namespace cparls {
namespace {

void check_model_matches(const SparseTensor& t, const KruskalModel& model) {
  if (model.order() != t.order()) {
    throw DataError("model has " + std::to_string(model.order()) + " factors but tensor has " +
                    std::to_string(t.order()) + " modes");
  }
  for (int k = 0; k < t.order(); ++k) {
    if (model.factors[k].rows() != t.dim(k) || model.factors[k].cols() != model.rank()) {
      throw DataError("factor " + std::to_string(k + 1) + " is " + std::to_string(model.factors[k].rows()) + "x" +
                      std::to_string(model.factors[k].cols()) + ", expected " + std::to_string(t.dim(k)) + "x" +
                      std::to_string(model.rank()));
    }
  }
}

long double squared_sum(std::span<const double> values) {
  long double sum = 0.0L;
  for (double v : values) sum += static_cast<long double>(v) * v;
  return sum;
}

}  // namespace

double residual_norm_sq(const SparseTensor& t, const KruskalModel& model) {
  check_model_matches(t, model);
  const int r = model.rank();
  const int m = t.order();

  // <X, M>
  long double inner = 0.0L;
  const auto values = t.values();
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    long double entry = 0.0L;
    for (int j = 0; j < r; ++j) {
      long double prod = model.lambda(j);
      for (int k = 0; k < m; ++k) prod *= model.factors[k](t.coord(e, k), j);
      entry += prod;
    }
    inner += entry * values[e];
  }

  // ||M||^2 = sum_{j,l} lambda_j lambda_l prod_k (A_k' A_k)(j,l)
  long double model_sq = 0.0L;
  for (int j = 0; j < r; ++j) {
    for (int l = j; l < r; ++l) {
      long double prod = static_cast<long double>(model.lambda(j)) * model.lambda(l);
      for (int k = 0; k < m; ++k) {
        long double dot = 0.0L;
        const Matrix& a = model.factors[k];
        for (Eigen::Index i = 0; i < a.rows(); ++i) dot += static_cast<long double>(a(i, j)) * a(i, l);
        prod *= dot;
      }
      model_sq += (j == l ? 1.0L : 2.0L) * prod;
    }
  }

  const long double res = squared_sum(values) - 2.0L * inner + model_sq;
  return static_cast<double>(std::max(res, 0.0L));
}

double exact_fit(const SparseTensor& t, const KruskalModel& model) {
  const double norm = frob_norm(t);
  if (norm == 0.0) throw DataError("fit is undefined for a tensor with zero norm");
  return 1.0 - std::sqrt(residual_norm_sq(t, model)) / norm;
}

double lsq_residual_sq(const SparseTensor& t, const std::vector<Matrix>& factors, int mode, const Matrix& b) {
  const Matrix mt = mttkrp(t, factors, mode);
  if (b.rows() != mt.rows() || b.cols() != mt.cols()) {
    throw DataError("lsq_residual_sq: solution is " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                    ", expected " + std::to_string(mt.rows()) + "x" + std::to_string(mt.cols()));
  }
  const Matrix v = gram_hadamard(factors, mode);
  const Matrix bv = b * v;
  long double cross = 0.0L;
  long double quad = 0.0L;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      cross += static_cast<long double>(b(i, j)) * mt(i, j);
      quad += static_cast<long double>(bv(i, j)) * b(i, j);
    }
  }
  const long double res = squared_sum(t.values()) - 2.0L * cross + quad;
  return static_cast<double>(std::max(res, 0.0L));
}

Matrix exact_lsq_solution(const SparseTensor& t, const std::vector<Matrix>& factors, int mode) {
  const Matrix mt = mttkrp(t, factors, mode);
  const Matrix v = gram_hadamard(factors, mode);
  return v.completeOrthogonalDecomposition().solve(mt.transpose()).transpose();
}

double residual_rel_diff(const SparseTensor& t, const std::vector<Matrix>& factors, int mode,
                         const Matrix& b_sketch, const Matrix& b_exact) {
  const double sketch = lsq_residual_sq(t, factors, mode, b_sketch);
  const double exact = lsq_residual_sq(t, factors, mode, b_exact);
  return std::abs(sketch - exact) / std::max(1.0, exact);
}

FitEstimator::FitEstimator(const SparseTensor& t, std::size_t s_fit, double alpha, Rng& rng)
    : order_(t.order()) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("FitEstimator: alpha must lie in (0, 1]");
  if (s_fit < 1) throw std::invalid_argument("FitEstimator: need at least one sample");
  if (t.nnz() == 0) throw DataError("FitEstimator: tensor has no nonzeros");
  norm_ = frob_norm(t);

  const auto s = static_cast<double>(s_fit);
  const auto n_nz = static_cast<std::size_t>(std::ceil(alpha * s));
  auto n_zero = static_cast<std::size_t>(std::floor((1.0 - alpha) * s));
  const std::size_t nnz = t.nnz();

  std::vector<std::size_t> picks;
  picks.reserve(n_nz);
  if (n_nz <= nnz) {
    // Floyd's algorithm: n_nz distinct positions, uniformly.
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(n_nz);
    for (std::size_t j = nnz - n_nz; j < nnz; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, j);
      std::size_t cand = pick(rng);
      if (!chosen.insert(cand).second) {
        chosen.insert(j);
        cand = j;
      }
      picks.push_back(cand);
    }
  } else {
    with_replacement_ = true;
    std::uniform_int_distribution<std::size_t> pick(0, nnz - 1);
    for (std::size_t j = 0; j < n_nz; ++j) picks.push_back(pick(rng));
  }
  nz_coords_.reserve(n_nz * order_);
  nz_values_.reserve(n_nz);
  for (std::size_t e : picks) {
    auto c = t.coords(e);
    nz_coords_.insert(nz_coords_.end(), c.begin(), c.end());
    nz_values_.push_back(t.values()[e]);
  }
  phi_nonzero_ = static_cast<double>(nnz) / static_cast<double>(n_nz);

  const LinearIndex total = t.total_size();
  const LinearIndex zeros = total - static_cast<LinearIndex>(nnz);
  if (n_zero > 0 && zeros == 0) {
    zero_stratum_empty_ = true;
    n_zero = 0;
  }
  if (n_zero > 0) {
    std::unordered_set<LinearIndex, LinearIndexHash> nonzero_set;
    nonzero_set.reserve(nnz);
    for (std::size_t e = 0; e < nnz; ++e) nonzero_set.insert(to_linear(t.coords(e), t.shape()));
    std::vector<std::uniform_int_distribution<index_t>> modes;
    for (index_t n : t.shape()) modes.emplace_back(0, n - 1);
    std::vector<index_t> multi(order_);
    zero_coords_.reserve(n_zero * order_);
    for (std::size_t j = 0; j < n_zero;) {
      for (int k = 0; k < order_; ++k) multi[k] = modes[k](rng);
      if (nonzero_set.contains(to_linear(multi, t.shape()))) continue;
      zero_coords_.insert(zero_coords_.end(), multi.begin(), multi.end());
      ++j;
    }
    phi_zero_ = to_double(zeros) / static_cast<double>(n_zero);
  }
}

double FitEstimator::estimate_residual_sq(const KruskalModel& model) const {
  if (model.order() != order_) throw DataError("FitEstimator: model order does not match the tensor");
  long double nz = 0.0L;
  for (std::size_t j = 0; j < nz_values_.size(); ++j) {
    const long double diff = static_cast<long double>(model.value_at(nonzero_coords(j))) - nz_values_[j];
    nz += diff * diff;
  }
  long double zero = 0.0L;
  for (std::size_t j = 0; j < zero_samples(); ++j) {
    const long double mv = model.value_at(zero_coords(j));
    zero += mv * mv;
  }
  return static_cast<double>(phi_nonzero_ * nz + phi_zero_ * zero);
}

double FitEstimator::estimated_fit(const KruskalModel& model) const {
  if (norm_ == 0.0) throw DataError("fit is undefined for a tensor with zero norm");
  return 1.0 - std::sqrt(std::max(estimate_residual_sq(model), 0.0)) / norm_;
}

}  // namespace cparls
