#include "cparls/multi_index.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "cparls/errors.hpp"

namespace cparls {

std::string to_string(LinearIndex v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

double to_double(LinearIndex v) {
  auto hi = static_cast<std::uint64_t>(v >> 64);
  auto lo = static_cast<std::uint64_t>(v);
  return static_cast<double>(hi) * 18446744073709551616.0 + static_cast<double>(lo);
}

LinearIndex checked_product(std::span<const index_t> sizes) {
  constexpr LinearIndex kMax = ~LinearIndex{0};
  LinearIndex prod = 1;
  for (index_t n : sizes) {
    if (n < 1) throw DataError("mode size must be positive, got " + std::to_string(n));
    auto un = static_cast<LinearIndex>(n);
    if (prod > kMax / un) throw DataError("product of mode sizes overflows the 128-bit index width");
    prod *= un;
  }
  return prod;
}

LinearIndex to_linear(std::span<const index_t> multi, std::span<const index_t> shape) {
  if (multi.size() != shape.size()) {
    throw std::invalid_argument("to_linear: multi-index has " + std::to_string(multi.size()) +
                                " entries but shape has " + std::to_string(shape.size()));
  }
  LinearIndex lin = 0;
  for (std::size_t k = multi.size(); k-- > 0;) {
    if (multi[k] < 0 || multi[k] >= shape[k]) {
      throw DataError("to_linear: index " + std::to_string(multi[k]) + " out of range for mode " +
                      std::to_string(k) + " of size " + std::to_string(shape[k]));
    }
    lin = lin * static_cast<LinearIndex>(shape[k]) + static_cast<LinearIndex>(multi[k]);
  }
  return lin;
}

std::vector<index_t> from_linear(LinearIndex linear, std::span<const index_t> shape) {
  std::vector<index_t> multi(shape.size());
  for (std::size_t k = 0; k < shape.size(); ++k) {
    auto n = static_cast<LinearIndex>(shape[k]);
    multi[k] = static_cast<index_t>(linear % n);
    linear /= n;
  }
  if (linear != 0) throw DataError("from_linear: linear index out of range for shape");
  return multi;
}

void MultiIndexTable::push_back(std::span<const index_t> multi) {
  if (static_cast<int>(multi.size()) != order_) {
    throw std::invalid_argument("MultiIndexTable: order mismatch");
  }
  data_.insert(data_.end(), multi.begin(), multi.end());
}

void MultiIndexTable::append(const MultiIndexTable& other) {
  if (other.empty()) return;
  if (other.order_ != order_) throw std::invalid_argument("MultiIndexTable: order mismatch");
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
}

}  // namespace cparls
