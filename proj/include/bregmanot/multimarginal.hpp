#pragma once

#include <span>
#include <vector>

#include "bregmanot/engine.hpp"
#include "bregmanot/types.hpp"

namespace bregmanot {

// Dense K-way coupling of side N, stored flat with slot 0 fastest
// (stride of slot k is N^k). Sizes are capped by a memory guard because the
// storage is exponential in the number of marginals.
class DenseTensor {
 public:
  static constexpr std::size_t kDefaultGuard = 100'000'000;  // scalars

  DenseTensor(int order, int side, std::size_t guard = kDefaultGuard);

  int order() const { return order_; }
  int side() const { return side_; }
  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  std::size_t stride(int slot) const;
  double& at(std::span<const int> index);
  double at(std::span<const int> index) const;

  Array values;

 private:
  int order_, side_;
};

// S_k: sum over every slot except `slot` (0-based). Mass preserving.
Vector push_forward(const DenseTensor& coupling, int slot);

// KL projection onto {S_slot(pi) = target}: scale each slice by
// target_i / S_slot(pi)_i.
DenseTensor project_marginal_k(DenseTensor coupling, int slot, const Vector& target);

// Generic-engine adapters for tensor-shaped plans.
class TensorMarginalSet final : public ConstraintSet {
 public:
  TensorMarginalSet(int order, int side, int slot, Vector target);
  void project(Array& plan) const override;
  double violation(const Array& plan) const override;
  bool affine() const override { return true; }
  std::string name() const override;

 private:
  int order_, side_, slot_;
  Vector target_;
};

class TensorMarginalLeqSet final : public ConstraintSet {
 public:
  TensorMarginalLeqSet(int order, int side, int slot, Vector bound);
  void project(Array& plan) const override;
  double violation(const Array& plan) const override;
  bool affine() const override { return false; }
  std::string name() const override;

 private:
  int order_, side_, slot_;
  Vector bound_;
};

struct MultimarginalOptions {
  double tol = 1e-6;
  int max_iter = 10000;
  // Scaling fast path: pi_j = xi_j * prod_k u^k_{j_k}; the dense path runs
  // the same cyclic projections on materialized tensors.
  bool use_scalings = true;
};

struct MultimarginalResult {
  DenseTensor coupling;
  std::vector<Vector> scalings;  // empty on the dense path
  SolveReport report;
};

// Cyclic KL projections onto the K marginal sets, slot order 0..K-1 repeated.
MultimarginalResult multimarginal_solve(const DenseTensor& kernel,
                                        const std::vector<Vector>& marginals,
                                        const MultimarginalOptions& options = {});

// Cost tensor of the barycenter reformulation over support points x_1..x_N
// (one per row): C_j = sum_k (lambda_k / 2) ||x_{j_k} - A_j||^2 with
// A_j = sum_k lambda_k x_{j_k}.
DenseTensor barycenter_cost_tensor(const Matrix& points, const Vector& lambda,
                                   std::size_t guard = DenseTensor::kDefaultGuard);

struct WeightedPointCloud {
  Matrix points;   // one location per row
  Vector masses;   // nonnegative
  double dropped_mass = 0.0;  // below-threshold tensor entries left out
};

// The barycenter measure sum_j pi_j delta_{A_j(x)}: one weighted Dirac per
// tensor entry above `drop_threshold * total mass`.
WeightedPointCloud barycenter_measure(const DenseTensor& coupling,
                                      const Matrix& points, const Vector& lambda,
                                      double drop_threshold = 1e-12);

struct GridSpec {
  Vector lo;              // lowest corner
  double cell = 1.0;      // cell side
  std::vector<int> dims;  // cells per axis
};

// Histogram of a point cloud on a regular grid, flattened with axis 0
// fastest. A mass sitting exactly on a shared cell edge goes to the
// lower-index cell.
Histogram bin_point_cloud(const WeightedPointCloud& cloud, const GridSpec& grid);

}  // namespace bregmanot
