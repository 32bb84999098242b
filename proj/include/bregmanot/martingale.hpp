#pragma once

#include <utility>

#include "bregmanot/engine.hpp"
#include "bregmanot/types.hpp"

namespace bregmanot {

// Discrete martingale transport between measures on strictly positive
// supports x, y: marginals pi in Pi(p, q) plus the conditional-expectation
// constraint pi y = p.x, handled through the auxiliary pair (pi, phi) with
// phi = pi diag(y).
struct MartingaleProblem {
  Vector x, y;  // supports, > 0
  Vector p, q;  // marginals on the simplex
  Matrix cost;
  double gamma = 0.0;
  bool truncated_tails = false;  // set by build_lognormal_case when mass was cut
};

// pibar = exp(-C/gamma), phibar_ij = exp(-C_ij / (gamma y_j)).
std::pair<Matrix, Matrix> build_martingale_kernels(const MartingaleProblem& problem);

// C1: rows of pi to p, rows of phi to p.x. C2: columns of pi to q, rows of
// phi to p.x. Both are products of simple row/column scalings.
void project_c1_mart(Matrix& pi, Matrix& phi, const Vector& p, const Vector& x);
void project_c2_mart(Matrix& pi, Matrix& phi, const Vector& q, const Vector& p,
                     const Vector& x);

// Closed-form projection onto {phi = pi diag(y)}:
//   pi_ij = exp((y_j log(phibar_ij / y_j) + log(pibar_ij)) / (y_j + 1)),
// followed by phi = pi diag(y) exactly. Requires the "-1" KL convention.
void project_c3_mart(Matrix& pi, Matrix& phi, const Vector& y);

struct MartingaleResult {
  Matrix plan, phi;
  SolveReport report;
  double cost_linear = 0.0;       // <C, pi>
  double martingale_residual = 0.0;  // ||pi y - p.x||_inf / max(p.x)
};

// Cyclic Bregman projections C1 -> C2 -> C3 (all affine; no corrections
// needed). The cycle ends on C3 so the returned pair satisfies
// phi = pi diag(y) exactly.
MartingaleResult martingale_solve(const MartingaleProblem& problem,
                                  const SolveOptions& options = {});

// Density of e^X at t for X ~ N(mean_param, sigma^2).
double lognormal_density(double t, double mean_param, double sigma);

// The Touzi-Laborder-style test case: shared geometric grid spanning
// +-4 sigma1 in log-space, lognormal marginals with unit means, and the
// log-quadratic cost C_ij = (ln(y_j / x_i))^2. The wider law's mean is tilted
// onto the narrower one's so the discrete problem stays exactly feasible.
MartingaleProblem build_lognormal_case(int n, double sigma0_sq, double sigma1_sq,
                                       double gamma);

}  // namespace bregmanot
