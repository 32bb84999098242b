#pragma once

#include <stdexcept>
#include <string>

namespace bregmanot {

// Input-contract violations thrown by the library. Non-convergence of a
// solver is *not* an exception: engines return their best iterate together
// with a SolveReport whose status is kMaxIterExceeded.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define BREGMANOT_DEFINE_ERROR(NAME)                     \
  struct NAME : Error {                                  \
    explicit NAME(const std::string& what) : Error(#NAME ": " + what) {} \
  }

BREGMANOT_DEFINE_ERROR(ShapeMismatch);
BREGMANOT_DEFINE_ERROR(NegativeEntry);
BREGMANOT_DEFINE_ERROR(NonPositiveKernel);
BREGMANOT_DEFINE_ERROR(WeightNotSimplex);
BREGMANOT_DEFINE_ERROR(NonAffineConstraint);
BREGMANOT_DEFINE_ERROR(NumericalOverflow);
BREGMANOT_DEFINE_ERROR(NonPositiveGamma);
BREGMANOT_DEFINE_ERROR(InfeasibleZeroRow);
BREGMANOT_DEFINE_ERROR(MassMismatch);
BREGMANOT_DEFINE_ERROR(ZeroRowSum);
BREGMANOT_DEFINE_ERROR(IndexOutOfRange);
BREGMANOT_DEFINE_ERROR(InfeasibleZeroSlice);
BREGMANOT_DEFINE_ERROR(MemoryGuard);
BREGMANOT_DEFINE_ERROR(PointOutsideGrid);
BREGMANOT_DEFINE_ERROR(InvalidPermutation);
BREGMANOT_DEFINE_ERROR(ZeroTotalMass);
BREGMANOT_DEFINE_ERROR(NonPositiveSupport);
BREGMANOT_DEFINE_ERROR(NonPositiveInput);
BREGMANOT_DEFINE_ERROR(NonPositiveArgument);
BREGMANOT_DEFINE_ERROR(GridTooCoarse);
BREGMANOT_DEFINE_ERROR(CGNotConverged);
BREGMANOT_DEFINE_ERROR(ZeroRaySum);
BREGMANOT_DEFINE_ERROR(ZeroEntryUnderPositiveWeight);

#undef BREGMANOT_DEFINE_ERROR

// CSV / PGM parsing failure with a 1-based location.
struct ParseError : Error {
  ParseError(const std::string& what, int line, int column)
      : Error("ParseError: " + what + " (line " + std::to_string(line) +
              ", column " + std::to_string(column) + ")"),
        line(line),
        column(column) {}
  int line;
  int column;
};

}  // namespace bregmanot
