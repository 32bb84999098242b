#pragma once

#include <Eigen/Dense>

#include "bregmanot/errors.hpp"

namespace bregmanot {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Array = Eigen::ArrayXd;  // flattened plans inside the projection engines

// A histogram is a nonnegative weight vector on a fixed point grid; it lies
// on the simplex when its entries sum to one.
using Histogram = Vector;

// A coupling (transport plan) is a nonnegative matrix whose row/column sums
// are the two marginals.
using CouplingMatrix = Matrix;

inline Vector row_marginal(const Matrix& plan) { return plan.rowwise().sum(); }
inline Vector col_marginal(const Matrix& plan) { return plan.colwise().sum().transpose(); }

inline double total_mass(const Matrix& plan) { return plan.sum(); }

void validate_histogram(const Vector& weights, bool require_simplex = false);

// Entry-wise a/b with the mass-scaling conventions used throughout:
// 0/0 := 0, and x/0 for x > 0 is the caller's error case (reported through
// `infeasible` when non-null, otherwise mapped to 0).
Vector safe_ratio(const Vector& numer, const Vector& denom, bool* infeasible = nullptr);

// Simplex weights: lambda >= 0, sum = 1 (within `tol`).
void validate_simplex_weights(const Vector& lambda, double tol = 1e-12);

}  // namespace bregmanot
