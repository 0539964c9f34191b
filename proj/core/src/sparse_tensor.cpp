#include "cparls/sparse_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cparls/errors.hpp"

namespace cparls {

SparseTensor::SparseTensor(std::vector<index_t> shape, std::vector<index_t> coords,
                           std::vector<double> values)
    : shape_(std::move(shape)), coords_(std::move(coords)), values_(std::move(values)) {
  const std::size_t m = shape_.size();
  if (m == 0) throw DataError("tensor must have at least one mode");
  for (index_t n : shape_) {
    if (n < 1) throw DataError("mode sizes must be positive");
  }
  if (coords_.size() != values_.size() * m) {
    throw DataError("coordinate array has " + std::to_string(coords_.size()) + " entries, expected " +
                    std::to_string(values_.size() * m));
  }
  for (std::size_t e = 0; e < values_.size(); ++e) {
    if (values_[e] == 0.0) throw DataError("stored values must be nonzero (entry " + std::to_string(e) + ")");
    if (!std::isfinite(values_[e])) throw DataError("non-finite value at entry " + std::to_string(e));
    for (std::size_t k = 0; k < m; ++k) {
      index_t c = coords_[e * m + k];
      if (c < 0 || c >= shape_[k]) {
        throw DataError("coordinate " + std::to_string(c + 1) + " out of range in mode " +
                        std::to_string(k + 1) + " (size " + std::to_string(shape_[k]) + ")");
      }
    }
  }

  std::vector<std::size_t> order(values_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row = [&](std::size_t e) { return coords_.begin() + static_cast<std::ptrdiff_t>(e * m); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(row(a), row(a) + m, row(b), row(b) + m);
  });
  for (std::size_t j = 1; j < order.size(); ++j) {
    if (std::equal(row(order[j - 1]), row(order[j - 1]) + m, row(order[j]))) {
      std::string where;
      for (std::size_t k = 0; k < m; ++k) where += (k ? " " : "") + std::to_string(*(row(order[j]) + k) + 1);
      throw DataError("duplicate coordinate (" + where + ")");
    }
  }
}

std::vector<index_t> SparseTensor::other_modes_shape(int k) const {
  std::vector<index_t> out;
  out.reserve(shape_.size() - 1);
  for (int j = 0; j < order(); ++j) {
    if (j != k) out.push_back(shape_[j]);
  }
  return out;
}

void SparseTensor::precompute_mode_linearization() {
  const int m = order();
  std::vector<ModeFibers> fibers(m);
  for (int k = 0; k < m; ++k) {
    checked_product(other_modes_shape(k));
    ModeFibers& mf = fibers[k];
    mf.lin.resize(nnz());
    for (std::size_t e = 0; e < nnz(); ++e) {
      LinearIndex lin = 0;
      for (int j = m - 1; j >= 0; --j) {
        if (j == k) continue;
        lin = lin * static_cast<LinearIndex>(shape_[j]) + static_cast<LinearIndex>(coord(e, j));
      }
      mf.lin[e] = lin;
    }
    mf.perm.resize(nnz());
    std::iota(mf.perm.begin(), mf.perm.end(), std::size_t{0});
    std::sort(mf.perm.begin(), mf.perm.end(), [&](std::size_t a, std::size_t b) {
      if (mf.lin[a] != mf.lin[b]) return mf.lin[a] < mf.lin[b];
      return coord(a, k) < coord(b, k);
    });
    for (std::size_t p = 0; p < mf.perm.size(); ++p) {
      LinearIndex lin = mf.lin[mf.perm[p]];
      if (mf.keys.empty() || mf.keys.back() != lin) {
        mf.keys.push_back(lin);
        mf.offsets.push_back(p);
      }
    }
    mf.offsets.push_back(mf.perm.size());
    mf.lookup.reserve(mf.keys.size());
    for (std::size_t q = 0; q < mf.keys.size(); ++q) mf.lookup.emplace(mf.keys[q], q);
  }
  fibers_ = std::move(fibers);
}

const SparseTensor::ModeFibers& SparseTensor::mode_fibers(int k) const {
  if (k < 0 || k >= order()) throw std::out_of_range("mode " + std::to_string(k) + " out of range");
  if (fibers_.empty()) throw std::logic_error("mode linearization has not been precomputed");
  return fibers_[k];
}

std::span<const LinearIndex> SparseTensor::mode_linear_indices(int k) const {
  return mode_fibers(k).lin;
}

std::span<const std::size_t> SparseTensor::fiber(int k, LinearIndex lin) const {
  const ModeFibers& mf = mode_fibers(k);
  auto it = mf.lookup.find(lin);
  if (it == mf.lookup.end()) return {};
  std::size_t q = it->second;
  return {mf.perm.data() + mf.offsets[q], mf.offsets[q + 1] - mf.offsets[q]};
}

std::span<const LinearIndex> SparseTensor::fiber_keys(int k) const { return mode_fibers(k).keys; }

double frob_norm(const SparseTensor& t) {
  long double sum = 0.0L;
  for (double v : t.values()) sum += static_cast<long double>(v) * v;
  return static_cast<double>(std::sqrt(sum));
}

SampledRows tnsr_samp(const SparseTensor& t, int mode, std::span<const LinearIndex> idx,
                      std::span<const double> wgt) {
  if (mode < 0 || mode >= t.order()) throw std::out_of_range("tnsr_samp: mode out of range");
  if (!t.has_mode_linearization()) throw std::logic_error("tnsr_samp: mode linearization missing");
  if (idx.size() != wgt.size()) throw std::invalid_argument("tnsr_samp: idx and wgt sizes differ");

  // Look up each distinct fiber once; repeated indices share the gather.
  std::unordered_map<LinearIndex, std::span<const std::size_t>, LinearIndexHash> gathered;
  gathered.reserve(idx.size());
  std::vector<const std::span<const std::size_t>*> row_fiber(idx.size());
  std::size_t total = 0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    auto [it, inserted] = gathered.try_emplace(idx[j]);
    if (inserted) it->second = t.fiber(mode, idx[j]);
    row_fiber[j] = &it->second;
    total += it->second.size();
  }

  SampledRows out;
  out.rows = static_cast<index_t>(idx.size());
  out.cols = t.dim(mode);
  out.row_ptr.reserve(idx.size() + 1);
  out.col.reserve(total);
  out.val.reserve(total);
  const auto values = t.values();
  for (std::size_t j = 0; j < idx.size(); ++j) {
    for (std::size_t e : *row_fiber[j]) {
      out.col.push_back(t.coord(e, mode));
      out.val.push_back(wgt[j] * values[e]);
    }
    out.row_ptr.push_back(out.val.size());
  }
  return out;
}

}  // namespace cparls
