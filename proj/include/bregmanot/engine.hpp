#pragma once

#include <limits>
#include <span>
#include <vector>

#include "bregmanot/constraint.hpp"
#include "bregmanot/types.hpp"

namespace bregmanot {

struct SolveOptions {
  double tol = 1e-6;
  int max_iter = 10000;
  // Store Dykstra corrections as logarithms and exponentiate on use; keeps
  // iterations finite when corrections leave the double range.
  bool log_domain = false;
  // bregman_solve normally refuses non-affine sets; this runs the plain
  // cycles anyway (diagnostic use — the limit is then *not* the KL
  // projection in general).
  bool allow_nonaffine = false;
};

enum class SolveStatus { kConverged, kMaxIterExceeded };

struct SolveReport {
  SolveStatus status = SolveStatus::kConverged;
  int iterations = 0;        // full constraint cycles
  double residual = std::numeric_limits<double>::infinity();
  double last_change = std::numeric_limits<double>::infinity();
  // Residual history of the last few cycles; oscillation here is the
  // standard symptom of an empty intersection.
  std::vector<double> trail;

  bool converged() const { return status == SolveStatus::kConverged; }
};

struct SolveResult {
  Array plan;
  SolveReport report;
};

// Cyclic Bregman projections pi <- P_{C_n}(pi), n = 1, 2, ... with sets
// repeated L-periodically. Exact for intersections of affine sets.
SolveResult bregman_solve(const Array& kernel,
                          std::span<const ConstraintSet* const> constraints,
                          const SolveOptions& options = {});

// Dykstra iterations with multiplicative corrections,
//   pi^(n) = P_{C_n}(pi^(n-1) ⊙ q^(n-L)),  q^(n) = q^(n-L) ⊙ pi^(n-1)/pi^(n),
// initialized at q = 1. Converges to the KL projection for general closed
// convex sets.
SolveResult dykstra_solve(const Array& kernel,
                          std::span<const ConstraintSet* const> constraints,
                          const SolveOptions& options = {});

}  // namespace bregmanot
