#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cparls {

/// Zero-based index along a single tensor mode.
using index_t = std::int64_t;

/// Linear index over a product of modes. Products of mode sizes for large
/// FROSTT tensors exceed 2^63, so a single 128-bit width is used everywhere.
using LinearIndex = unsigned __int128;

struct LinearIndexHash {
  std::size_t operator()(LinearIndex v) const noexcept {
    auto lo = static_cast<std::uint64_t>(v);
    auto hi = static_cast<std::uint64_t>(v >> 64);
    std::uint64_t h = lo ^ (hi * 0x9E3779B97F4A7C15ULL);
    h ^= h >> 30;
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 27;
    h *= 0x94D049BB133111EBULL;
    h ^= h >> 31;
    return static_cast<std::size_t>(h);
  }
};

std::string to_string(LinearIndex v);
double to_double(LinearIndex v);

/// Product of `sizes`; throws DataError if it does not fit in LinearIndex.
LinearIndex checked_product(std::span<const index_t> sizes);

/// Maps a multi-index to its linear index. The first mode varies fastest:
///   i = i_0 + n_0 * (i_1 + n_1 * (i_2 + ...)),
/// which is the Khatri-Rao row ordering Z = A_{d-1} (.) ... (.) A_0.
/// Both the multi-index and the result are zero-based.
LinearIndex to_linear(std::span<const index_t> multi, std::span<const index_t> shape);

/// Inverse of to_linear.
std::vector<index_t> from_linear(LinearIndex linear, std::span<const index_t> shape);

/// A flat table of multi-indices of fixed order, row j holding entries
/// [j*order, (j+1)*order).
class MultiIndexTable {
 public:
  MultiIndexTable() = default;
  explicit MultiIndexTable(int order) : order_(order) {}

  int order() const { return order_; }
  std::size_t size() const { return order_ == 0 ? 0 : data_.size() / order_; }
  bool empty() const { return data_.empty(); }

  std::span<const index_t> operator[](std::size_t j) const {
    return {data_.data() + j * order_, static_cast<std::size_t>(order_)};
  }
  std::span<index_t> operator[](std::size_t j) {
    return {data_.data() + j * order_, static_cast<std::size_t>(order_)};
  }

  void reserve(std::size_t rows) { data_.reserve(rows * order_); }
  void push_back(std::span<const index_t> multi);
  void append(const MultiIndexTable& other);
  void truncate(std::size_t rows) { data_.resize(rows * order_); }

  const std::vector<index_t>& data() const { return data_; }

  friend bool operator==(const MultiIndexTable&, const MultiIndexTable&) = default;

 private:
  int order_ = 0;
  std::vector<index_t> data_;
};

}  // namespace cparls
