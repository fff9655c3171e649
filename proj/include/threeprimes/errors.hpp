#pragma once

#include <stdexcept>
#include <string>

namespace threeprimes {

// A computation ran but could not reach its accuracy or validity target.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace threeprimes
