#include "bregmanot/barycenter.hpp"

#include <cmath>

namespace bregmanot {

namespace {

// prod_k base_k^{lambda_k} entry-wise over the slots with lambda_k > 0.
Vector weighted_geometric_mean(const std::vector<Vector>& bases, const Vector& lambda) {
  Vector p = Vector::Ones(bases.front().size());
  for (size_t k = 0; k < bases.size(); ++k) {
    const double w = lambda[static_cast<Eigen::Index>(k)];
    if (w == 0.0) continue;
    p =
        p.cwiseProduct(bases[k].array().pow(w).matrix());
  }
  return p;
}

Vector row_scaling_to(const Vector& target, const Vector& sums) {
  Vector scale(target.size());
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    if (sums[i] > 0.0)
      scale[i] = target[i] / sums[i];
    else if (target[i] > 0.0)
      throw ZeroRowSum("zero row sum under positive shared-marginal mass");
    else
      scale[i] = 0.0;
  }
  return scale;
}

}  // namespace

std::pair<std::vector<Matrix>, Vector> project_shared_marginal(
    std::vector<Matrix> plans, const Vector& lambda) {
  if (plans.empty() || static_cast<Eigen::Index>(plans.size()) != lambda.size())
    throw ShapeMismatch("project_shared_marginal: plans vs weights");
  validate_simplex_weights(lambda);

  std::vector<Vector> sums(plans.size());
  for (size_t k = 0; k < plans.size(); ++k) sums[k] = plans[k].rowwise().sum();

  const Vector p = weighted_geometric_mean(sums, lambda);
  for (size_t k = 0; k < plans.size(); ++k)
    plans[k] = row_scaling_to(p, sums[k]).asDiagonal() * plans[k];
  return {std::move(plans), p};
}

BarycenterResult barycenter_solve(const KernelOp& kernel,
                                  const BarycenterProblem& problem,
                                  const BarycenterOptions& options) {
  const auto& marginals = problem.marginals;
  const Vector& lambda = problem.weights;
  if (marginals.empty() ||
      static_cast<Eigen::Index>(marginals.size()) != lambda.size())
    throw ShapeMismatch("barycenter: marginals vs weights");
  validate_simplex_weights(lambda);
  const Eigen::Index n = marginals.front().size();
  const double mass0 = marginals.front().sum();
  for (const Vector& pk : marginals) {
    validate_histogram(pk);
    if (pk.size() != n) throw ShapeMismatch("marginals on different grids");
    if (std::abs(pk.sum() - mass0) > 1e-9 * std::max(mass0, 1e-300))
      throw MassMismatch("marginals carry different total masses");
  }

  const size_t K = marginals.size();
  BarycenterResult result;
  result.u.assign(K, Vector::Ones(n));
  result.v.resize(K);

  // First half-cycle: columns to p_k, then row sums per slot.
  const Vector ones_pull = kernel.apply_adjoint(Vector::Ones(n));
  std::vector<Vector> t(K);
  for (size_t k = 0; k < K; ++k) {
    result.v[k] = row_scaling_to(marginals[k], ones_pull);
    t[k] = kernel.apply(result.v[k]);
  }

  Vector p_prev = Vector::Zero(n);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    // Shared-marginal projection: geometric mean of the current row sums.
    std::vector<Vector> rowsums(K);
    for (size_t k = 0; k < K; ++k) rowsums[k] = result.u[k].cwiseProduct(t[k]);
    result.barycenter = weighted_geometric_mean(rowsums, lambda);

    double rowres = 0.0;
    for (size_t k = 0; k < K; ++k)
      rowres = std::max(
          rowres, (rowsums[k] - result.barycenter).cwiseAbs().maxCoeff());
    const double change = (result.barycenter - p_prev).cwiseAbs().maxCoeff();
    p_prev = result.barycenter;

    result.report.iterations = iter;
    result.report.residual = rowres;
    result.report.last_change = change;
    if (rowres <= options.tol && change <= options.tol) {
      result.report.status = SolveStatus::kConverged;
      return result;
    }

    for (size_t k = 0; k < K; ++k) {
      result.u[k] = row_scaling_to(result.barycenter, t[k]);
      const Vector s = kernel.apply_adjoint(result.u[k]);
      result.v[k] = row_scaling_to(marginals[k], s);
      t[k] = kernel.apply(result.v[k]);
    }
    if (options.on_iterate) options.on_iterate(iter, result.u, result.v);
  }
  result.report.status = SolveStatus::kMaxIterExceeded;
  return result;
}

}  // namespace bregmanot
