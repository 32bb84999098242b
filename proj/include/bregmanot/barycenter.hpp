#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "bregmanot/engine.hpp"
#include "bregmanot/kernel_op.hpp"

namespace bregmanot {

struct BarycenterProblem {
  std::vector<Vector> marginals;  // p_1..p_K on a shared grid
  Vector weights;                 // lambda in the simplex
};

struct BarycenterOptions {
  double tol = 1e-6;
  int max_iter = 10000;
  // Called after each full cycle with the per-slot scalings.
  std::function<void(int, const std::vector<Vector>&, const std::vector<Vector>&)>
      on_iterate;
};

struct BarycenterResult {
  Vector barycenter;
  std::vector<Vector> u, v;
  SolveReport report;
};

// Weighted-KL projection onto the shared-first-marginal set: the common
// marginal is the entry-wise weighted geometric mean of the row sums,
//   p = prod_r (pibar_r 1)^{lambda_r},
// and every plan gets its rows rescaled to p. Zero-weight slots are excluded
// from the product but still rescaled (the lambda->0 limit of the formula).
std::pair<std::vector<Matrix>, Vector> project_shared_marginal(
    std::vector<Matrix> plans, const Vector& lambda);

// Iterative scaling for the barycenter of K histograms under a shared Gibbs
// kernel:
//   u_k = p / (xi v_k),  v_k = p_k / (xi^T u_k),
//   p   = prod_k (u_k ⊙ (xi v_k))^{lambda_k},
// with all per-k updates independent inside a half-step.
BarycenterResult barycenter_solve(const KernelOp& kernel,
                                  const BarycenterProblem& problem,
                                  const BarycenterOptions& options = {});

}  // namespace bregmanot
