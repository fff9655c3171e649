#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace threeprimes {

// A nonnegative function on [N] = {1..N}; values[i] holds f(i+1).
struct DensityFunction {
  std::vector<double> values;

  DensityFunction() = default;
  explicit DensityFunction(std::vector<double> v) : values(std::move(v)) { validate(); }
  static DensityFunction constant(std::size_t N, double c)
  {
    return DensityFunction(std::vector<double>(N, c));
  }

  std::size_t N() const { return values.size(); }
  double operator()(std::int64_t n) const
  {
    return n >= 1 && n <= static_cast<std::int64_t>(values.size())
               ? values[static_cast<std::size_t>(n - 1)]
               : 0.0;
  }
  std::span<const double> span() const { return values; }

  void validate() const
  {
    for (double v : values)
      if (!(v >= 0.0) || v == std::numeric_limits<double>::infinity())
        throw std::invalid_argument("DensityFunction: values must be finite and nonnegative");
  }
};

} // namespace threeprimes
