#include "bregmanot/kernel_op.hpp"

namespace bregmanot {

SeparableKernelOp::SeparableKernelOp(Matrix kx, Matrix ky)
    : kx_(std::move(kx)), ky_(std::move(ky)) {}

Vector SeparableKernelOp::apply(const Vector& x) const {
  if (x.size() != cols()) throw ShapeMismatch("separable kernel apply size");
  Eigen::Map<const Matrix> f(x.data(), kx_.cols(), ky_.cols());
  Matrix g = kx_ * f * ky_.transpose();
  return Eigen::Map<Vector>(g.data(), g.size());
}

Vector SeparableKernelOp::apply_adjoint(const Vector& x) const {
  if (x.size() != rows()) throw ShapeMismatch("separable kernel adjoint size");
  Eigen::Map<const Matrix> f(x.data(), kx_.rows(), ky_.rows());
  Matrix g = kx_.transpose() * f * ky_;
  return Eigen::Map<Vector>(g.data(), g.size());
}

Matrix SeparableKernelOp::dense() const {
  Matrix out(rows(), cols());
  for (Eigen::Index jy = 0; jy < ky_.cols(); ++jy)
    for (Eigen::Index jx = 0; jx < kx_.cols(); ++jx)
      for (Eigen::Index iy = 0; iy < ky_.rows(); ++iy)
        for (Eigen::Index ix = 0; ix < kx_.rows(); ++ix)
          out(ix + kx_.rows() * iy, jx + kx_.cols() * jy) = kx_(ix, jx) * ky_(iy, jy);
  return out;
}

}  // namespace bregmanot
