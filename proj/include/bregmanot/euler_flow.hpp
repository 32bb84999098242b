#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bregmanot/engine.hpp"
#include "bregmanot/types.hpp"

namespace bregmanot {

// K-marginal coupling for generalized incompressible flows, kept in factored
// form: the kernel of the chain cost
//   C_j = sum_{k<K-1} ||x_{j_{k+1}} - x_{j_k}||^2 + ||x_{sigma(j_0)} - x_{j_{K-1}}||^2
// factors into K two-slot matrices, so the N^K tensor never exists.
struct FactoredEulerKernel {
  Matrix xi0;              // xi0(a,b) = exp(-(x_a - x_b)^2 / gamma)
  Matrix xi1;              // xi1(b,a) = xi0(b, sigma(a)): the cycle-closing hop
  std::vector<int> sigma;  // grid self-map prescribing the final positions
  int steps = 0;           // K time slots
  double gamma = 0.0;
  Vector points;

  int n() const { return static_cast<int>(xi0.rows()); }
};

// Midpoints (i + 1/2)/n of [0,1].
Vector euler_grid(int n);

// Discretized volume-preserving maps from the 1-D test family; targets are
// rounded to the nearest grid index (the maps need not be injective).
std::vector<int> euler_map_invert(int n);      // x -> 1 - x
std::vector<int> euler_map_shift_half(int n);  // x -> (x + 1/2) mod 1
std::vector<int> euler_map_tent(int n);        // x -> min(2x, 2 - 2x)
std::vector<int> euler_map_indices(const std::function<double(double)>& map, int n);

FactoredEulerKernel build_euler_kernel(const Vector& points,
                                       std::span<const int> sigma, int steps,
                                       double gamma);

struct EulerScalings {
  std::vector<Vector> u;  // one strictly positive vector per marginal
};

struct EulerOptions {
  double tol = 1e-4;    // sup-norm deviation of each marginal from 1/N
  int max_iter = 2000;  // sweeps
  int check_every = 10;
};

// IPFP sweeps over the scaling vectors: u^k_i = (1/N) / B_ii where B chains
// the K hop matrices around the cycle with every other slot's diagonal
// scaling in between. Each sweep keeps a running prefix product and rebuilds
// the suffix, so peak storage stays at a few N x N work matrices.
EulerScalings ipfp_factored(const FactoredEulerKernel& kernel,
                            const EulerOptions& options = {},
                            SolveReport* report = nullptr);

// Two-time transition T_{0,k}: slots 0 and k pinned, everything else summed
// out through partial matrix products. Both marginals are uniform at
// convergence.
Matrix transition_matrix(const EulerScalings& scalings,
                         const FactoredEulerKernel& kernel, int k);

}  // namespace bregmanot
