#include "cparls/dense_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cparls/errors.hpp"

namespace cparls {
namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double rank_cutoff(Eigen::Index rows, Eigen::Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sigma_max;
}

// Accumulates U' * xs for a dense s x r matrix U into an r x n result.
Matrix transpose_times_sparse(const Matrix& u, const SampledRows& xs) {
  Matrix out = Matrix::Zero(u.cols(), xs.cols);
  for (index_t j = 0; j < xs.rows; ++j) {
    for (std::size_t p = xs.row_ptr[j]; p < xs.row_ptr[j + 1]; ++p) {
      out.col(xs.col[p]) += xs.val[p] * u.row(j).transpose();
    }
  }
  return out;
}

}  // namespace

FactorRefs factor_refs(const std::vector<Matrix>& factors, std::optional<int> skip) {
  FactorRefs refs;
  refs.reserve(factors.size());
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (skip && static_cast<int>(k) == *skip) continue;
    refs.push_back(&factors[k]);
  }
  return refs;
}

LeverageScores leverage_scores(const Matrix& a) {
  if (a.rows() < 1 || a.cols() < 1) throw std::invalid_argument("leverage_scores: empty matrix");
  if (!a.allFinite()) throw NumericalError("leverage_scores: non-finite factor entries");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const Vector& sigma = svd.singularValues();
  const double cutoff = rank_cutoff(a.rows(), a.cols(), sigma.size() ? sigma(0) : 0.0);
  int rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;

  LeverageScores out;
  out.rank = rank;
  out.rank_deficient = rank < a.cols();
  out.scores = svd.matrixU().leftCols(rank).rowwise().squaredNorm();
  return out;
}

Matrix krp_samp(const FactorRefs& factors, const MultiIndexTable& idx, std::span<const double> wgt) {
  if (factors.empty()) throw std::invalid_argument("krp_samp: no factors");
  if (idx.size() != wgt.size()) throw std::invalid_argument("krp_samp: idx and wgt sizes differ");
  if (!idx.empty() && idx.order() != static_cast<int>(factors.size())) {
    throw std::invalid_argument("krp_samp: multi-index order does not match factor count");
  }
  const Eigen::Index r = factors.front()->cols();
  const auto s = static_cast<Eigen::Index>(idx.size());
  RowMajorMatrix out(s, r);
  for (Eigen::Index j = 0; j < s; ++j) {
    auto multi = idx[static_cast<std::size_t>(j)];
    out.row(j).setConstant(wgt[static_cast<std::size_t>(j)]);
    for (std::size_t k = 0; k < factors.size(); ++k) {
      const Matrix& a = *factors[k];
      if (multi[k] < 0 || multi[k] >= a.rows()) {
        throw DataError("krp_samp: row index " + std::to_string(multi[k]) + " out of range for factor " +
                        std::to_string(k));
      }
      out.row(j).array() *= a.row(multi[k]).array();
    }
  }
  return out;
}

LsqSolution solve_lsq(const Matrix& zs, const SampledRows& xs) {
  if (zs.rows() != xs.rows) {
    throw std::invalid_argument("solve_lsq: design has " + std::to_string(zs.rows()) +
                                " rows but right-hand sides have " + std::to_string(xs.rows));
  }
  const Eigen::Index s = zs.rows();
  const Eigen::Index r = zs.cols();
  LsqSolution out;

  if (s < r) {
    // Underdetermined: minimum-norm solution from the thin SVD of the design.
    Eigen::JacobiSVD<Matrix> svd(zs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    const double cutoff = rank_cutoff(s, r, sigma.size() ? sigma(0) : 0.0);
    Matrix utx = transpose_times_sparse(svd.matrixU(), xs);
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma(i) > cutoff) {
        utx.row(i) /= sigma(i);
        ++out.rank;
      } else {
        utx.row(i).setZero();
      }
    }
    out.rank_deficient = true;
    out.b = (svd.matrixV() * utx).transpose();
    return out;
  }

  Eigen::HouseholderQR<Matrix> qr(zs);
  Matrix q = qr.householderQ() * Matrix::Identity(s, r);
  Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  Matrix c = transpose_times_sparse(q, xs);  // r x n

  Eigen::JacobiSVD<Matrix> rsvd(rr, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sigma = rsvd.singularValues();
  const double cutoff = rank_cutoff(s, r, sigma.size() ? sigma(0) : 0.0);
  int rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  out.rank = rank;
  out.rank_deficient = rank < r;
  if (!out.rank_deficient) {
    out.b = rr.triangularView<Eigen::Upper>().solve(c).transpose();
  } else {
    Matrix utc = rsvd.matrixU().transpose() * c;
    for (Eigen::Index i = 0; i < r; ++i) {
      if (i < rank) utc.row(i) /= sigma(i);
      else utc.row(i).setZero();
    }
    out.b = (rsvd.matrixV() * utc).transpose();
  }
  return out;
}

Matrix gram_hadamard(const std::vector<Matrix>& factors, std::optional<int> skip) {
  if (factors.empty()) throw std::invalid_argument("gram_hadamard: no factors");
  const Eigen::Index r = factors.front().cols();
  Matrix v = Matrix::Ones(r, r);
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (skip && static_cast<int>(k) == *skip) continue;
    if (factors[k].cols() != r) throw std::invalid_argument("gram_hadamard: factors differ in rank");
    v.array() *= (factors[k].transpose() * factors[k]).array();
  }
  return v;
}

Matrix mttkrp(const SparseTensor& t, const std::vector<Matrix>& factors, int mode) {
  if (static_cast<int>(factors.size()) != t.order()) {
    throw DataError("mttkrp: model has " + std::to_string(factors.size()) + " factors, tensor has " +
                    std::to_string(t.order()) + " modes");
  }
  if (mode < 0 || mode >= t.order()) throw std::out_of_range("mttkrp: mode out of range");
  const Eigen::Index r = factors.front().cols();
  std::vector<RowMajorMatrix> rows(factors.size());
  for (int k = 0; k < t.order(); ++k) {
    if (factors[k].rows() != t.dim(k) || factors[k].cols() != r) {
      throw DataError("mttkrp: factor " + std::to_string(k) + " is " + std::to_string(factors[k].rows()) +
                      "x" + std::to_string(factors[k].cols()) + ", expected " + std::to_string(t.dim(k)) +
                      "x" + std::to_string(r));
    }
    if (k != mode) rows[k] = factors[k];
  }

  RowMajorMatrix out = RowMajorMatrix::Zero(t.dim(mode), r);
  Eigen::RowVectorXd acc(r);
  const auto values = t.values();
  for (std::size_t e = 0; e < t.nnz(); ++e) {
    acc.setConstant(values[e]);
    for (int k = 0; k < t.order(); ++k) {
      if (k != mode) acc.array() *= rows[k].row(t.coord(e, k)).array();
    }
    out.row(t.coord(e, mode)) += acc;
  }
  return out;
}

Vector normalize_columns(Matrix& a) {
  Vector lambda(a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    lambda(j) = norm;
    if (norm > 0.0) {
      a.col(j) /= norm;
    } else {
      a.col(j).setZero();
      a(0, j) = 1.0;
    }
  }
  return lambda;
}

}  // namespace cparls
