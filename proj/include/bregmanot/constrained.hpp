#pragma once

#include <vector>

#include "bregmanot/engine.hpp"
#include "bregmanot/kernel_op.hpp"
#include "bregmanot/multimarginal.hpp"

namespace bregmanot {

// Closed-form KL projections for the inequality-constrained sets.
Matrix project_row_leq(Matrix plan, const Vector& p);   // rows clipped to <= p
Matrix project_col_leq(Matrix plan, const Vector& q);   // columns clipped to <= q
Matrix project_total_mass(Matrix plan, double mass);    // rescaled to mass m
Matrix project_capacity(Matrix plan, const Matrix& theta);  // min(pi, theta)

struct PartialProblem {
  Vector p, q;        // marginal upper bounds, possibly with different masses
  double mass = 0.0;  // fraction of mass to transport, in [0, min(sum p, sum q)]
  double eta = 1e-5;  // active-region threshold
};

struct PartialResult {
  // The iterates stay diagonal scalings of the kernel, so the solver state is
  // three factors instead of a dense plan: pi = scale * diag(a) xi diag(b).
  Vector a, b;
  double scale = 1.0;
  Vector row_sums, col_sums;
  SolveReport report;

  Matrix plan(const KernelOp& kernel) const;
};

// Dykstra over {pi 1 <= p}, {pi^T 1 <= q}, {total = m}; the three sets are
// convex but not affine, so plain cyclic projections would converge to the
// wrong point.
PartialResult partial_transport(const KernelOp& kernel, const PartialProblem& problem,
                                const SolveOptions& options = {});

// Masks where the normalized transported marginals exceed eta.
std::pair<std::vector<bool>, std::vector<bool>> active_regions(
    const Vector& row_sums, const Vector& col_sums, double mass, double eta);
std::pair<std::vector<bool>, std::vector<bool>> active_regions(const Matrix& plan,
                                                               double mass,
                                                               double eta);

struct CapacityProblem {
  Vector p, q;
  Matrix theta;  // entry-wise upper bound on the plan
};

struct CapacityResult {
  Matrix plan;
  SolveReport report;
};

// Dykstra over {rows = p}, {cols = q}, {pi <= theta}. Infeasible capacities
// are not pre-detected; they surface as MaxIterExceeded with an oscillating
// residual trail.
CapacityResult capacity_transport(const GibbsKernelDense& kernel,
                                  const CapacityProblem& problem,
                                  const SolveOptions& options = {});

struct MultimarginalPartialResult {
  DenseTensor coupling;
  SolveReport report;
};

// Dykstra over {S_k(pi) <= p_k} for every slot and {sum pi = m}.
MultimarginalPartialResult multimarginal_partial(
    const DenseTensor& kernel, const std::vector<Vector>& marginals, double mass,
    const SolveOptions& options = {});

}  // namespace bregmanot
