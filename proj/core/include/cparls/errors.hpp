#pragma once

#include <stdexcept>
#include <string>

namespace cparls {

// Bad or inconsistent input data: malformed files, shape mismatches,
// out-of-range indices.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation could not produce a usable result (non-finite factors,
// degenerate sampling distributions, exhausted retry budgets).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cparls
