#pragma once

#include <memory>

#include "bregmanot/types.hpp"

namespace bregmanot {

// Matrix-vector action of a Gibbs kernel. Scaling solvers only ever need
// xi*x and xi^T*x, so grid problems with separable quadratic costs can run
// without materializing the dense N x N kernel.
class KernelOp {
 public:
  virtual ~KernelOp() = default;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual Vector apply(const Vector& x) const = 0;          // xi x
  virtual Vector apply_adjoint(const Vector& x) const = 0;  // xi^T x
  // Dense materialization (debug paths, small problems, file output).
  virtual Matrix dense() const = 0;
};

class DenseKernelOp final : public KernelOp {
 public:
  explicit DenseKernelOp(Matrix entries) : entries_(std::move(entries)) {}
  Eigen::Index rows() const override { return entries_.rows(); }
  Eigen::Index cols() const override { return entries_.cols(); }
  Vector apply(const Vector& x) const override { return entries_ * x; }
  Vector apply_adjoint(const Vector& x) const override {
    return entries_.transpose() * x;
  }
  Matrix dense() const override { return entries_; }
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

// Kernel of a separable cost on an n0 x n1 grid: xi = ky ⊗ kx under
// column-major flattening (pixel (ix, iy) sits at index ix + n0*iy), so
// xi*vec(F) = vec(kx * F * ky^T).
class SeparableKernelOp final : public KernelOp {
 public:
  SeparableKernelOp(Matrix kx, Matrix ky);
  Eigen::Index rows() const override { return kx_.rows() * ky_.rows(); }
  Eigen::Index cols() const override { return kx_.cols() * ky_.cols(); }
  Vector apply(const Vector& x) const override;
  Vector apply_adjoint(const Vector& x) const override;
  Matrix dense() const override;

 private:
  Matrix kx_, ky_;
};

}  // namespace bregmanot
