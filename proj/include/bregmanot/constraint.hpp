#pragma once

#include <memory>
#include <string>

#include "bregmanot/types.hpp"

namespace bregmanot {

// One constraint set C of the intersection being projected onto. A set knows
// how to KL-project a (flattened) plan onto itself, how far a plan is from
// membership, and whether it is an affine subspace of the positive cone
// (affine sets admit plain cyclic Bregman projections; general convex sets
// need Dykstra's correction terms).
class ConstraintSet {
 public:
  virtual ~ConstraintSet() = default;

  // In-place KL projection onto the set. Must be idempotent.
  virtual void project(Array& plan) const = 0;

  // Set-specific feasibility violation of `plan`, sup-norm flavored;
  // zero (up to round-off) exactly when the plan lies in the set.
  virtual double violation(const Array& plan) const = 0;

  virtual bool affine() const = 0;

  virtual std::string name() const = 0;
};

// ---- Matrix-shaped constraint sets -----------------------------------------
//
// Plans are stored flattened in column-major order; these sets reinterpret the
// flat array as a rows x cols matrix.

class MatrixConstraint : public ConstraintSet {
 public:
  MatrixConstraint(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {}
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

 protected:
  Eigen::Map<Matrix> as_matrix(Array& plan) const;
  Eigen::Map<const Matrix> as_matrix(const Array& plan) const;

 private:
  Eigen::Index rows_, cols_;
};

// {pi : pi 1 = p} — rows rescaled to the target marginal.
class RowMarginalSet final : public MatrixConstraint {
 public:
  RowMarginalSet(Vector target, Eigen::Index cols);
  void project(Array& plan) const override;
  double violation(const Array& plan) const override;
  bool affine() const override { return true; }
  std::string name() const override { return "rows=p"; }
  const Vector& target() const { return target_; }

 private:
  Vector target_;
};

// {pi : pi^T 1 = q}
class ColMarginalSet final : public MatrixConstraint {
 public:
  ColMarginalSet(Vector target, Eigen::Index rows);
  void project(Array& plan) const override;
  double violation(const Array& plan) const override;
  bool affine() const override { return true; }
  std::string name() const override { return "cols=q"; }
  const Vector& target() const { return target_; }

 private:
  Vector target_;
};

// {pi : pi 1 <= p}, convex but not affine.
class RowUpperBoundSet final : public MatrixConstraint {
 public:
  RowUpperBoundSet(Vector bound, Eigen::Index cols);
  void project(Array& plan) const override;
  double violation(const Array& plan) const override;
  bool affine() const override { return false; }
  std::string name() const override { return "rows<=p"; }

 private:
  Vector bound_;
};

// {pi : pi^T 1 <= q}
class ColUpperBoundSet final : public MatrixConstraint {
 public:
  ColUpperBoundSet(Vector bound, Eigen::Index rows);
  void project(Array& plan) const override;
  double violation(const Array& plan) const override;
  bool affine() const override { return false; }
  std::string name() const override { return "cols<=q"; }

 private:
  Vector bound_;
};

// {pi : 1^T pi 1 = m}
class TotalMassSet final : public ConstraintSet {
 public:
  explicit TotalMassSet(double mass);
  void project(Array& plan) const override;
  double violation(const Array& plan) const override;
  bool affine() const override { return true; }
  std::string name() const override { return "mass=m"; }

 private:
  double mass_;
};

// {pi : pi <= theta} entry-wise; projection is the entry-wise minimum.
class CapacitySet final : public ConstraintSet {
 public:
  explicit CapacitySet(Array cap);
  void project(Array& plan) const override;
  double violation(const Array& plan) const override;
  bool affine() const override { return false; }
  std::string name() const override { return "pi<=theta"; }

 private:
  Array cap_;
};

}  // namespace bregmanot
