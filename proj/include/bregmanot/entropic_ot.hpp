#pragma once

#include <functional>
#include <optional>

#include "bregmanot/engine.hpp"
#include "bregmanot/kernel_op.hpp"
#include "bregmanot/types.hpp"

namespace bregmanot {

// Ground cost with its builder metadata (grid locations when built from a
// grid, and whether distances wrap around).
struct CostMatrix {
  Matrix entries;
  Matrix points;  // one grid point per row (empty when built from raw entries)
  bool periodic = false;
};

// C_ij = ||x_i - x_j||^2 over the rows of `points`.
CostMatrix quadratic_cost(const Matrix& points);

// Periodic squared distance on indices {0..n0-1}: C_ij = min_k (i-j+k*n0)^2.
CostMatrix periodic_index_cost(int n0);

// Uniformly spaced column of n points over [lo, hi].
Matrix grid_1d(int n, double lo = 0.0, double hi = 1.0);
// Cell centers of an n0 x n0 grid on [0,1]^2, flattened column-major.
Matrix grid_2d(int n0);

double median_cost(const Matrix& cost);

// xi = exp(-C/gamma), entry-wise.
struct GibbsKernelDense {
  Matrix entries;
  Matrix cost;
  double gamma = 0.0;
  bool underflowed = false;  // some entry rounded to exact 0; log-domain advised
};

GibbsKernelDense build_gibbs(const CostMatrix& cost, double gamma);

// Separable Gibbs kernel for the quadratic cost on an n0 x n0 unit grid.
SeparableKernelOp build_gibbs_grid2d(int n0, double gamma);

// KL projections onto the fixed-marginal sets: multiplicative row/column
// normalization. Throws InfeasibleZeroRow when positive target mass meets an
// all-zero row/column.
Matrix project_rows(Matrix plan, const Vector& p);
Matrix project_cols(Matrix plan, const Vector& q);

struct SinkhornOptions {
  double tol = 1e-6;
  int max_iter = 10000;
  // Absorb the scalings into dual potentials whenever they leave
  // [1e-100, 1e+100]; keeps small-gamma solves inside the double range.
  bool log_domain = false;
  std::optional<Vector> v0;  // warm start for v (defaults to all-ones)
  // Called once per iteration with the current scalings (diagnostics/tests).
  std::function<void(int, const Vector&, const Vector&)> on_iterate;
};

struct SinkhornResult {
  Vector u, v;               // current diagonal scalings
  Vector log_alpha, log_beta;  // absorbed potentials (zero unless log-domain)
  SolveReport report;

  // Total log-scalings log(u)+alpha, log(v)+beta.
  Vector log_u_total() const;
  Vector log_v_total() const;
};

// Alternating scaling u = p/(xi v), v = q/(xi^T u). The fast path touches
// only matrix-vector products; no intermediate plan is ever materialized.
SinkhornResult sinkhorn(const KernelOp& kernel, const Vector& p, const Vector& q,
                        const SinkhornOptions& options = {});

// Log-domain variant needs the cost matrix to rebuild the absorbed kernel.
SinkhornResult sinkhorn(const GibbsKernelDense& kernel, const Vector& p,
                        const Vector& q, const SinkhornOptions& options = {});

// diag(u) xi diag(v) for a converged result.
Matrix materialize_plan(const KernelOp& kernel, const SinkhornResult& result);
Matrix materialize_plan(const GibbsKernelDense& kernel, const SinkhornResult& result);

// Debug path: the same Bregman cycle run on dense plans via
// project_rows/project_cols; must agree with the fast path.
Matrix sinkhorn_dense_debug(const GibbsKernelDense& kernel, const Vector& p,
                            const Vector& q, double tol, int max_iter,
                            SolveReport* report = nullptr);

struct TransportCost {
  double linear = 0.0;       // <C, pi>
  double regularized = 0.0;  // <C, pi> - gamma * E(pi)
};

TransportCost transport_cost(const Matrix& plan, const Matrix& cost, double gamma);

}  // namespace bregmanot
