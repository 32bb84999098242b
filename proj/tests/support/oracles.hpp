#pragma once

// Independent reference solvers used only by tests: projected gradient with
// *Euclidean* projections for KL projections, scalar golden-section search,
// and exhaustive vertex enumeration for tiny linear programs. None of these
// share code paths with the library's multiplicative-scaling projections.

#include <functional>
#include <random>
#include <vector>

#include "bregmanot/types.hpp"

namespace oracle {

using bregmanot::Matrix;
using bregmanot::Vector;
using Array = bregmanot::Array;

// Euclidean projection onto {x : A x = b} (dense, rank-deficiency tolerated
// for consistent systems).
class AffineProjector {
 public:
  AffineProjector(Matrix a, Vector b);
  Vector project(const Vector& x) const;

 private:
  Matrix a_;
  Vector b_;
  Eigen::CompleteOrthogonalDecomposition<Matrix> gram_;
};

// Euclidean projection onto {x >= 0, sum x = total}.
Vector project_simplex_scaled(Vector x, double total);
// Euclidean projection onto {x >= 0, sum x <= cap}.
Vector project_simplex_capped(Vector x, double cap);

// Generic Euclidean projection callback.
using EuclideanProjection = std::function<Vector(const Vector&)>;

// Euclidean projections for the constraint families, acting on column-major
// flattened n x m plans.
EuclideanProjection rows_equal(const Vector& p, int cols);
EuclideanProjection cols_equal(const Vector& q, int rows);
EuclideanProjection rows_leq(const Vector& p, int cols);
EuclideanProjection cols_leq(const Vector& q, int rows);
EuclideanProjection total_mass(double mass, int size);
EuclideanProjection box_capacity(const Matrix& theta);
EuclideanProjection intersect(std::vector<EuclideanProjection> parts,
                              int dykstra_iters = 400);

// Reference KL projection: minimize sum_s w_s * KL(x_s | xi_s) over the set
// given by its Euclidean projection, by projected gradient descent with
// backtracking. `weights` has one entry per equal-sized slot of x (pass {1}
// for a single plan).
Vector kl_projection_reference(const Vector& xi, const EuclideanProjection& proj,
                               const std::vector<double>& weights = {1.0},
                               int iters = 20000, double tol = 1e-12);

// Scalar minimizer of a unimodal function on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-14);

// Exact optimum of min <c, x> over {x >= 0, A x = b} by enumerating candidate
// supports up to rank(A); exponential, for tiny instances only.
double lp_vertex_minimum(const Matrix& a, const Vector& b, const Vector& c);

// LP optimum over the transport polytope Pi(p, q).
double lp_transport_value(const Vector& p, const Vector& q, const Matrix& cost);

// LP optimum over the martingale polytope
// {pi >= 0, pi 1 = p, pi^T 1 = q, pi y = p.x}.
double lp_martingale_value(const Vector& p, const Vector& q, const Vector& x,
                           const Vector& y, const Matrix& cost);

// Deterministic random helpers.
Matrix random_positive_matrix(std::mt19937& rng, int rows, int cols, double lo = 0.2,
                              double hi = 1.8);
Vector random_histogram(std::mt19937& rng, int n, bool normalize = true);

}  // namespace oracle
