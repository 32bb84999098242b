#include "bregmanot/constraint.hpp"

#include <cmath>

namespace bregmanot {

Eigen::Map<Matrix> MatrixConstraint::as_matrix(Array& plan) const {
  if (plan.size() != rows_ * cols_) throw ShapeMismatch("plan size vs constraint shape");
  return {plan.data(), rows_, cols_};
}

Eigen::Map<const Matrix> MatrixConstraint::as_matrix(const Array& plan) const {
  if (plan.size() != rows_ * cols_) throw ShapeMismatch("plan size vs constraint shape");
  return {plan.data(), rows_, cols_};
}

// ---- RowMarginalSet ---------------------------------------------------------

RowMarginalSet::RowMarginalSet(Vector target, Eigen::Index cols)
    : MatrixConstraint(target.size(), cols), target_(std::move(target)) {
  validate_histogram(target_);
}

void RowMarginalSet::project(Array& plan) const {
  auto m = as_matrix(plan);
  const Vector sums = m.rowwise().sum();
  bool infeasible = false;
  const Vector scale = safe_ratio(target_, sums, &infeasible);
  if (infeasible)
    throw InfeasibleZeroRow("positive row target on an all-zero row");
  m = scale.asDiagonal() * m;
}

double RowMarginalSet::violation(const Array& plan) const {
  return (as_matrix(plan).rowwise().sum() - target_).cwiseAbs().maxCoeff();
}

// ---- ColMarginalSet ---------------------------------------------------------

ColMarginalSet::ColMarginalSet(Vector target, Eigen::Index rows)
    : MatrixConstraint(rows, target.size()), target_(std::move(target)) {
  validate_histogram(target_);
}

void ColMarginalSet::project(Array& plan) const {
  auto m = as_matrix(plan);
  const Vector sums = m.colwise().sum().transpose();
  bool infeasible = false;
  const Vector scale = safe_ratio(target_, sums, &infeasible);
  if (infeasible)
    throw InfeasibleZeroRow("positive column target on an all-zero column");
  m = m * scale.asDiagonal();
}

double ColMarginalSet::violation(const Array& plan) const {
  return (as_matrix(plan).colwise().sum().transpose() - target_).cwiseAbs().maxCoeff();
}

// ---- RowUpperBoundSet -------------------------------------------------------

RowUpperBoundSet::RowUpperBoundSet(Vector bound, Eigen::Index cols)
    : MatrixConstraint(bound.size(), cols), bound_(std::move(bound)) {
  validate_histogram(bound_);
}

void RowUpperBoundSet::project(Array& plan) const {
  auto m = as_matrix(plan);
  const Vector sums = m.rowwise().sum();
  Vector scale(sums.size());
  for (Eigen::Index i = 0; i < sums.size(); ++i)
    scale[i] = sums[i] > bound_[i] ? bound_[i] / sums[i] : 1.0;
  m = scale.asDiagonal() * m;
}

double RowUpperBoundSet::violation(const Array& plan) const {
  return (as_matrix(plan).rowwise().sum() - bound_).cwiseMax(0.0).maxCoeff();
}

// ---- ColUpperBoundSet -------------------------------------------------------

ColUpperBoundSet::ColUpperBoundSet(Vector bound, Eigen::Index rows)
    : MatrixConstraint(rows, bound.size()), bound_(std::move(bound)) {
  validate_histogram(bound_);
}

void ColUpperBoundSet::project(Array& plan) const {
  auto m = as_matrix(plan);
  const Vector sums = m.colwise().sum().transpose();
  Vector scale(sums.size());
  for (Eigen::Index j = 0; j < sums.size(); ++j)
    scale[j] = sums[j] > bound_[j] ? bound_[j] / sums[j] : 1.0;
  m = m * scale.asDiagonal();
}

double ColUpperBoundSet::violation(const Array& plan) const {
  return (as_matrix(plan).colwise().sum().transpose() - bound_).cwiseMax(0.0).maxCoeff();
}

// ---- TotalMassSet -----------------------------------------------------------

TotalMassSet::TotalMassSet(double mass) : mass_(mass) {
  if (mass < 0.0) throw NegativeEntry("total mass must be >= 0");
}

void TotalMassSet::project(Array& plan) const {
  const double total = plan.sum();
  if (total > 0.0) {
    plan *= mass_ / total;
  } else if (mass_ > 0.0) {
    throw ZeroTotalMass("cannot rescale an all-zero plan to positive mass");
  }
}

double TotalMassSet::violation(const Array& plan) const {
  return std::abs(plan.sum() - mass_);
}

// ---- CapacitySet ------------------------------------------------------------

CapacitySet::CapacitySet(Array cap) : cap_(std::move(cap)) {
  if ((cap_ <= 0.0).any()) throw NonPositiveInput("capacity must be > 0 entry-wise");
}

void CapacitySet::project(Array& plan) const {
  if (plan.size() != cap_.size()) throw ShapeMismatch("plan vs capacity size");
  plan = plan.min(cap_);
}

double CapacitySet::violation(const Array& plan) const {
  if (plan.size() != cap_.size()) throw ShapeMismatch("plan vs capacity size");
  return (plan - cap_).max(0.0).maxCoeff();
}

}  // namespace bregmanot
