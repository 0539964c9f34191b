#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cparls/multi_index.hpp"

namespace cparls {

/// Sampled rows of a mode unfolding in compressed-row form. Row j holds the
/// (weighted) nonzeros of one sampled fiber; columns index the solved mode.
struct SampledRows {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<index_t> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
};

/// Coordinate-format sparse tensor.
///
/// Coordinates are zero-based in memory; the FROSTT reader and writer convert
/// to and from the one-based file convention. The tensor is immutable after
/// construction except for precompute_mode_linearization(), which adds the
/// per-mode fiber index used by sampled-fiber extraction.
class SparseTensor {
 public:
  SparseTensor() = default;

  /// `coords` is nnz x order, row-major. Throws DataError on out-of-range
  /// coordinates, zero values or duplicate coordinates.
  SparseTensor(std::vector<index_t> shape, std::vector<index_t> coords, std::vector<double> values);

  int order() const { return static_cast<int>(shape_.size()); }
  index_t dim(int k) const { return shape_[k]; }
  const std::vector<index_t>& shape() const { return shape_; }
  std::size_t nnz() const { return values_.size(); }

  index_t coord(std::size_t e, int k) const { return coords_[e * shape_.size() + k]; }
  std::span<const index_t> coords(std::size_t e) const {
    return {coords_.data() + e * shape_.size(), shape_.size()};
  }
  std::span<const index_t> all_coords() const { return coords_; }
  std::span<const double> values() const { return values_; }

  /// Product of all mode sizes.
  LinearIndex total_size() const { return checked_product(shape_); }

  /// Shape with mode k removed, in increasing mode order.
  std::vector<index_t> other_modes_shape(int k) const;

  /// Builds, for every mode k, the linear index of each nonzero over the
  /// other modes together with a hash index from that linear index to the
  /// nonzeros of the corresponding mode-k fiber.
  void precompute_mode_linearization();
  bool has_mode_linearization() const { return !fibers_.empty(); }

  /// Linear index over modes != k for every nonzero.
  std::span<const LinearIndex> mode_linear_indices(int k) const;

  /// Nonzeros (as positions into values()) of the mode-k fiber whose other
  /// modes have linear index `lin`. Empty if the fiber holds no nonzeros.
  std::span<const std::size_t> fiber(int k, LinearIndex lin) const;

  /// Sorted linear indices of all nonempty mode-k fibers.
  std::span<const LinearIndex> fiber_keys(int k) const;

 private:
  struct ModeFibers {
    std::vector<LinearIndex> lin;      // per nonzero
    std::vector<std::size_t> perm;     // nonzeros sorted by (lin, coord_k)
    std::vector<LinearIndex> keys;     // unique lin, sorted
    std::vector<std::size_t> offsets;  // keys.size()+1 offsets into perm
    std::unordered_map<LinearIndex, std::size_t, LinearIndexHash> lookup;  // lin -> key position
  };

  const ModeFibers& mode_fibers(int k) const;

  std::vector<index_t> shape_;
  std::vector<index_t> coords_;
  std::vector<double> values_;
  std::vector<ModeFibers> fibers_;
};

/// Square root of the sum of squared nonzeros.
double frob_norm(const SparseTensor& t);

/// Extracts the rows of the mode-k unfolding (transposed) selected by the
/// fiber linear indices `idx`, scaling row j by `wgt[j]`. The result has
/// idx.size() rows and t.dim(k) columns; fibers without nonzeros yield
/// empty rows.
SampledRows tnsr_samp(const SparseTensor& t, int mode, std::span<const LinearIndex> idx,
                      std::span<const double> wgt);

// FROSTT .tns text format.

struct FrosttReadOptions {
  /// Explicit shape; when absent the shape is the per-mode coordinate maxima.
  std::optional<std::vector<index_t>> shape;
};

struct FrosttReadResult {
  SparseTensor tensor;
  std::size_t dropped_zeros = 0;
};

/// Parses whitespace-separated "i_1 ... i_m value" lines with one-based
/// coordinates. Lines starting with '#' and blank lines are ignored.
/// Throws DataError on malformed lines, coordinates < 1 or beyond an
/// explicit shape, duplicate coordinates, and empty input.
FrosttReadResult parse_frostt(std::istream& in, const FrosttReadOptions& opts = {});
FrosttReadResult read_frostt_file(const std::string& path, const FrosttReadOptions& opts = {});

/// Writes one-based coordinates and shortest round-trip decimal values.
void write_frostt(std::ostream& out, const SparseTensor& t);

}  // namespace cparls
