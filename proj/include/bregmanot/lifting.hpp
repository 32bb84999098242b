#pragma once

#include <span>
#include <vector>

#include "bregmanot/engine.hpp"
#include "bregmanot/types.hpp"

namespace bregmanot {

// Product-space reformulation: L copies of the plan with weights lambda > 0,
// alternating between the diagonal set (all copies equal) and the separable
// set (copy l in C_l). The iterations become symmetric in the constraint
// indexing, which plain cyclic projections are not.

// Projection onto the diagonal set: every copy becomes the entry-wise
// weighted geometric mean prod_r (pi^r)^{lambda_r}.
std::vector<Matrix> project_diagonal(const std::vector<Matrix>& copies,
                                     const Vector& lambda);

// Copy l is replaced by its own projection onto C_l.
void project_separable(std::span<Array> copies,
                       std::span<const ConstraintSet* const> constraints);

enum class LiftedMode { kBregman, kDykstra };

struct LiftedResult {
  Matrix plan;  // the common copy
  SolveReport report;
};

// Lifted solve over L = constraints.size() copies of `kernel`. Bregman mode
// requires every C_l affine; Dykstra mode handles general convex sets.
LiftedResult lifted_solve(const Matrix& kernel,
                          std::span<const ConstraintSet* const> constraints,
                          const Vector& lambda, LiftedMode mode,
                          const SolveOptions& options = {});

}  // namespace bregmanot
