#pragma once

#include <stdexcept>
#include <string>

namespace penclr {

// Error categories mapped to CLI exit codes: usage 2, validation 3, numerical 4.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace penclr
