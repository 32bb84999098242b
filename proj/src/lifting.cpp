#include "bregmanot/lifting.hpp"

#include <cmath>

namespace bregmanot {

namespace {

void check_lifted_weights(const Vector& lambda, size_t copies) {
  if (lambda.size() != static_cast<Eigen::Index>(copies))
    throw ShapeMismatch("one weight per copy");
  validate_simplex_weights(lambda);
  for (Eigen::Index l = 0; l < lambda.size(); ++l)
    if (!(lambda[l] > 0.0))
      throw WeightNotSimplex("lifted weights must be strictly positive");
}

// Diagonal-set projection on flattened copies.
Array diagonal_mean(std::span<const Array> copies, const Vector& lambda) {
  Array mean = Array::Zero(copies.front().size());
  for (size_t l = 0; l < copies.size(); ++l) {
    const Array& c = copies[l];
    if ((c <= 0.0).any())
      throw ZeroEntryUnderPositiveWeight(
          "diagonal projection needs strictly positive copies");
    mean += lambda[static_cast<Eigen::Index>(l)] * c.log();
  }
  return mean.exp();
}

class DiagonalSet final : public ConstraintSet {
 public:
  DiagonalSet(Vector lambda, Eigen::Index copy_size)
      : lambda_(std::move(lambda)), copy_size_(copy_size) {}
  void project(Array& x) const override {
    const auto L = lambda_.size();
    Array mean = Array::Zero(copy_size_);
    for (Eigen::Index l = 0; l < L; ++l) {
      auto seg = x.segment(l * copy_size_, copy_size_);
      if ((seg <= 0.0).any())
        throw ZeroEntryUnderPositiveWeight(
            "diagonal projection needs strictly positive copies");
      mean += lambda_[l] * seg.log();
    }
    mean = mean.exp();
    for (Eigen::Index l = 0; l < L; ++l) x.segment(l * copy_size_, copy_size_) = mean;
  }
  double violation(const Array& x) const override {
    double v = 0.0;
    const auto first = x.segment(0, copy_size_);
    for (Eigen::Index l = 1; l < lambda_.size(); ++l)
      v = std::max(v,
                   (x.segment(l * copy_size_, copy_size_) - first).abs().maxCoeff());
    return v;
  }
  bool affine() const override { return true; }
  std::string name() const override { return "diagonal"; }

 private:
  Vector lambda_;
  Eigen::Index copy_size_;
};

class SeparableSet final : public ConstraintSet {
 public:
  SeparableSet(std::span<const ConstraintSet* const> constraints,
               Eigen::Index copy_size)
      : constraints_(constraints.begin(), constraints.end()),
        copy_size_(copy_size) {}
  void project(Array& x) const override {
    for (size_t l = 0; l < constraints_.size(); ++l) {
      Array seg = x.segment(static_cast<Eigen::Index>(l) * copy_size_, copy_size_);
      constraints_[l]->project(seg);
      x.segment(static_cast<Eigen::Index>(l) * copy_size_, copy_size_) = seg;
    }
  }
  double violation(const Array& x) const override {
    double v = 0.0;
    for (size_t l = 0; l < constraints_.size(); ++l)
      v = std::max(v, constraints_[l]->violation(x.segment(
                          static_cast<Eigen::Index>(l) * copy_size_, copy_size_)));
    return v;
  }
  bool affine() const override {
    for (const ConstraintSet* c : constraints_)
      if (!c->affine()) return false;
    return true;
  }
  std::string name() const override { return "separable"; }

 private:
  std::vector<const ConstraintSet*> constraints_;
  Eigen::Index copy_size_;
};

}  // namespace

std::vector<Matrix> project_diagonal(const std::vector<Matrix>& copies,
                                     const Vector& lambda) {
  check_lifted_weights(lambda, copies.size());
  std::vector<Array> flat;
  flat.reserve(copies.size());
  for (const Matrix& c : copies)
    flat.emplace_back(Eigen::Map<const Array>(c.data(), c.size()));
  const Array mean = diagonal_mean(flat, lambda);
  std::vector<Matrix> out(copies.size());
  for (size_t l = 0; l < copies.size(); ++l)
    out[l] = Eigen::Map<const Matrix>(mean.data(), copies[l].rows(), copies[l].cols());
  return out;
}

void project_separable(std::span<Array> copies,
                       std::span<const ConstraintSet* const> constraints) {
  if (copies.size() != constraints.size())
    throw ShapeMismatch("one constraint per copy");
  for (size_t l = 0; l < copies.size(); ++l) constraints[l]->project(copies[l]);
}

LiftedResult lifted_solve(const Matrix& kernel,
                          std::span<const ConstraintSet* const> constraints,
                          const Vector& lambda, LiftedMode mode,
                          const SolveOptions& options) {
  const auto L = static_cast<Eigen::Index>(constraints.size());
  if (L == 0) throw ShapeMismatch("no constraints");
  check_lifted_weights(lambda, constraints.size());

  const Eigen::Index copy_size = kernel.size();
  Array stacked(L * copy_size);
  for (Eigen::Index l = 0; l < L; ++l)
    stacked.segment(l * copy_size, copy_size) =
        Eigen::Map<const Array>(kernel.data(), copy_size);

  SeparableSet separable(constraints, copy_size);
  DiagonalSet diagonal(lambda, copy_size);
  // Diagonal last, so the returned copies agree exactly.
  const ConstraintSet* sets[] = {&separable, &diagonal};

  SolveResult sol = mode == LiftedMode::kBregman
                        ? bregman_solve(stacked, sets, options)
                        : dykstra_solve(stacked, sets, options);

  LiftedResult out;
  out.plan = Eigen::Map<const Matrix>(sol.plan.data(), kernel.rows(), kernel.cols());
  out.report = std::move(sol.report);
  return out;
}

}  // namespace bregmanot
