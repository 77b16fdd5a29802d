#pragma once

#include <stdexcept>
#include <string>

namespace trinodal {

// Bad arguments: invalid quantum numbers, out-of-range cutoffs, empty windows.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An internal consistency check failed. For non-tiling input these are
// unreachable; seeing one means a caller bug or a numerical fault.
class invariant_violation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A floating-point sign could not be certified even at extended precision.
class uncertified_sign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative procedures that ran out of budget (resolution caps, depth guards).
class no_convergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trinodal
