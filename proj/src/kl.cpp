#include "bregmanot/kl.hpp"

#include <cmath>
#include <limits>

namespace bregmanot {

namespace {

double entropy_impl(const double* x, Eigen::Index n) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = x[i];
    if (v < 0.0) return -std::numeric_limits<double>::infinity();
    if (v > 0.0) acc -= v * (std::log(v) - 1.0);
  }
  return acc;
}

double kl_impl(const double* pi, const double* xi, Eigen::Index n) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(xi[i] > 0.0)) throw NonPositiveKernel("kernel entries must be > 0");
    const double v = pi[i];
    if (v < 0.0) throw NegativeEntry("plan entries must be >= 0");
    if (v > 0.0) acc += v * (std::log(v / xi[i]) - 1.0);
  }
  return acc;
}

}  // namespace

double entropy(const Matrix& plan) { return entropy_impl(plan.data(), plan.size()); }
double entropy(const Array& plan) { return entropy_impl(plan.data(), plan.size()); }

double kl_divergence(const Matrix& plan, const Matrix& kernel) {
  if (plan.rows() != kernel.rows() || plan.cols() != kernel.cols())
    throw ShapeMismatch("plan and kernel dimensions differ");
  return kl_impl(plan.data(), kernel.data(), plan.size());
}

double kl_divergence(const Array& plan, const Array& kernel) {
  if (plan.size() != kernel.size())
    throw ShapeMismatch("plan and kernel sizes differ");
  return kl_impl(plan.data(), kernel.data(), plan.size());
}

double weighted_kl(const std::vector<Matrix>& plans,
                   const std::vector<Matrix>& kernels, const Vector& weights) {
  if (plans.size() != kernels.size() ||
      static_cast<Eigen::Index>(plans.size()) != weights.size())
    throw ShapeMismatch("weighted_kl: list lengths differ");
  validate_simplex_weights(weights);
  double acc = 0.0;
  for (size_t k = 0; k < plans.size(); ++k) {
    if (weights[static_cast<Eigen::Index>(k)] == 0.0) continue;
    acc += weights[static_cast<Eigen::Index>(k)] * kl_divergence(plans[k], kernels[k]);
  }
  return acc;
}

void validate_histogram(const Vector& weights, bool require_simplex) {
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0)
      throw NegativeEntry("histogram entries must be finite and >= 0");
  }
  if (require_simplex && std::abs(weights.sum() - 1.0) > 1e-9)
    throw MassMismatch("histogram does not sum to 1");
}

Vector safe_ratio(const Vector& numer, const Vector& denom, bool* infeasible) {
  if (numer.size() != denom.size()) throw ShapeMismatch("safe_ratio sizes differ");
  Vector out(numer.size());
  for (Eigen::Index i = 0; i < numer.size(); ++i) {
    if (denom[i] > 0.0) {
      out[i] = numer[i] / denom[i];
    } else {
      if (numer[i] > 0.0 && infeasible) *infeasible = true;
      out[i] = 0.0;
    }
  }
  return out;
}

void validate_simplex_weights(const Vector& lambda, double tol) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < 0.0) throw WeightNotSimplex("negative weight");
    sum += lambda[i];
  }
  if (std::abs(sum - 1.0) > tol)
    throw WeightNotSimplex("weights sum to " + std::to_string(sum));
}

}  // namespace bregmanot
