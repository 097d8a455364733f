#pragma once
#include <stdexcept>

namespace mss {

// Raised when an exact engine would exceed its transition/memory budget or an
// enumeration would exceed its cap.  The CLI maps this to exit code 2.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mss
