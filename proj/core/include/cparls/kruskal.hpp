#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cparls/dense_kernels.hpp"

namespace cparls {

/// CP model [[lambda; A_0, ..., A_{m-1}]].
struct KruskalModel {
  std::vector<Matrix> factors;
  Vector lambda;

  int order() const { return static_cast<int>(factors.size()); }
  int rank() const { return static_cast<int>(lambda.size()); }

  /// Model entry at a zero-based multi-index.
  double value_at(std::span<const index_t> multi) const;

  /// Rescales every factor to unit columns, absorbing the norms into lambda.
  void normalize();

  /// Throws DataError unless all factors share the rank and entries are finite.
  void validate() const;
};

/// Model with lambda = 1 built from unnormalized factors.
KruskalModel make_model(std::vector<Matrix> factors);

/// Text format: the first line holds the r lambda values; then one block per
/// factor, a header line "n r" followed by n rows of r values.
void write_kruskal(std::ostream& out, const KruskalModel& model);
KruskalModel read_kruskal(std::istream& in);
void write_kruskal_file(const std::string& path, const KruskalModel& model);
KruskalModel read_kruskal_file(const std::string& path);

/// Writes/reads a single factor block.
void write_factor(std::ostream& out, const Matrix& a);
Matrix read_factor(std::istream& in);

}  // namespace cparls
