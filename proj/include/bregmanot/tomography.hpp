#pragma once

#include <vector>

#include "bregmanot/engine.hpp"
#include "bregmanot/types.hpp"

namespace bregmanot {

// Discrete partial Radon transform on an n0 x n0 grid with nearest-neighbor
// lines and cyclic boundary. A line at angle theta steps along the flatter
// axis: offsets are (s2-1)*tan(theta) when mod(theta,pi) lies in
// [0,pi/4] u [3pi/4,pi) and (s2-1)*cot(theta) otherwise, rounded to the
// nearest integer and wrapped mod n0. For a fixed angle the lines tile the
// grid exactly.
class RadonOperator {
 public:
  RadonOperator(int n0, std::vector<double> angles);

  int n0() const { return n0_; }
  int num_angles() const { return static_cast<int>(angles_.size()); }
  const std::vector<double>& angles() const { return angles_; }

  // Flat (column-major) pixel index of the s2-th cell on line s1 (0-based).
  int line_cell(int k, int s1, int s2) const;

  Vector radon(const Vector& image, int k) const;        // ray sums, length n0
  Vector back_project(const Vector& rays, int k) const;  // exact adjoint

  // Stacked forward transform, K*n0 values.
  Vector radon_all(const Vector& image) const;
  Vector back_project_all(const Vector& rays) const;

 private:
  int n0_;
  std::vector<double> angles_;
  std::vector<std::vector<int>> offsets_;  // per angle, per s2
  std::vector<bool> first_branch_;
};

// K angles uniform over [0, pi).
std::vector<double> uniform_angles(int k);

// Least squares estimate R^+(r) = R^*(RR^*)^{-1} r, the (n0*K) normal system
// solved by conjugate gradient.
Vector least_squares_inverse(const RadonOperator& op,
                             const std::vector<Vector>& measurements,
                             double cg_tol = 1e-10, SolveReport* report = nullptr);

// Projection onto {pi^T 1 = g0, pi_k 1 = r_k}: independent column/row scalings.
void project_radon_marginals(Matrix& pi, Matrix& pi_k, const Vector& g0,
                             const Vector& r_k);

// Weighted-KL projection onto {R_theta_k(pi 1) = pi_k 1}: with
// alpha = R(pibar 1), beta = pibar_k 1 and delta = alpha^l1 ⊙ beta^l2, the
// big plan's rows scale by R^*(delta/alpha) and the small plan's by
// delta/beta; afterwards the two sides agree exactly.
void project_radon_coupling(const RadonOperator& op, int k, Matrix& pi,
                            Matrix& pi_k, double lambda1, double lambda2);

struct ReconstructionProblem {
  RadonOperator op;
  Vector template_g0;                 // on the n0^2 grid, simplex
  std::vector<Vector> measurements;   // r_k, length n0 each
  double lambda1 = 0.5;               // template confidence, in (0,1]
  double gamma = 2.0;                 // index-unit regularization
};

struct ReconstructionResult {
  Vector image;  // f = pi 1
  SolveReport report;
  bool renormalized_measurements = false;
};

// Cyclic weighted-KL Bregman projections over the 2K sets; returns f = pi 1.
ReconstructionResult ot_reconstruct(const ReconstructionProblem& problem,
                                    const SolveOptions& options = {});

}  // namespace bregmanot
