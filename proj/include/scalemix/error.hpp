#pragma once

#include <stdexcept>
#include <string>

namespace scalemix {

/// Raised for violated preconditions and numerically degenerate inputs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scalemix
