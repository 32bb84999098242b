#include "bregmanot/constrained.hpp"

#include <cmath>

#include "bregmanot/entropic_ot.hpp"

namespace bregmanot {

Matrix project_row_leq(Matrix plan, const Vector& p) {
  if (plan.rows() != p.size()) throw ShapeMismatch("project_row_leq bound size");
  const Vector sums = plan.rowwise().sum();
  Vector f(sums.size());
  for (Eigen::Index i = 0; i < sums.size(); ++i)
    f[i] = sums[i] > p[i] ? p[i] / sums[i] : 1.0;
  plan = f.asDiagonal() * plan;
  return plan;
}

Matrix project_col_leq(Matrix plan, const Vector& q) {
  if (plan.cols() != q.size()) throw ShapeMismatch("project_col_leq bound size");
  const Vector sums = plan.colwise().sum().transpose();
  Vector f(sums.size());
  for (Eigen::Index j = 0; j < sums.size(); ++j)
    f[j] = sums[j] > q[j] ? q[j] / sums[j] : 1.0;
  plan = plan * f.asDiagonal();
  return plan;
}

Matrix project_total_mass(Matrix plan, double mass) {
  if (mass < 0.0) throw NegativeEntry("mass must be >= 0");
  const double total = plan.sum();
  if (total > 0.0)
    plan *= mass / total;
  else if (mass > 0.0)
    throw ZeroTotalMass("cannot rescale a zero plan to positive mass");
  return plan;
}

Matrix project_capacity(Matrix plan, const Matrix& theta) {
  if (plan.rows() != theta.rows() || plan.cols() != theta.cols())
    throw ShapeMismatch("capacity shape");
  return plan.cwiseMin(theta);
}

Matrix PartialResult::plan(const KernelOp& kernel) const {
  return scale * (a.asDiagonal() * kernel.dense() * b.asDiagonal());
}

namespace {

// Correction update for a scaling-type projection: projecting multiplies the
// plan by factor f (per row / per column / globally), so the Dykstra
// correction becomes 1/f; zeroed entries keep a zero correction.
double inverse_or_zero(double f) { return f > 0.0 ? 1.0 / f : 0.0; }

}  // namespace

PartialResult partial_transport(const KernelOp& kernel, const PartialProblem& problem,
                                const SolveOptions& options) {
  validate_histogram(problem.p);
  validate_histogram(problem.q);
  const double max_mass = std::min(problem.p.sum(), problem.q.sum());
  if (problem.mass < 0.0 || problem.mass > max_mass * (1.0 + 1e-12))
    throw MassMismatch("mass must lie in [0, min(sum p, sum q)]");
  if (kernel.rows() != problem.p.size() || kernel.cols() != problem.q.size())
    throw ShapeMismatch("kernel vs marginals");

  const Eigen::Index n = problem.p.size(), m = problem.q.size();
  PartialResult res;
  res.a = Vector::Ones(n);
  res.b = Vector::Ones(m);
  res.scale = 1.0;

  if (problem.mass == 0.0) {
    res.scale = 0.0;
    res.row_sums = Vector::Zero(n);
    res.col_sums = Vector::Zero(m);
    res.report.status = SolveStatus::kConverged;
    res.report.residual = 0.0;
    res.report.last_change = 0.0;
    res.report.iterations = 0;
    return res;
  }

  // All three projections act by diagonal/global scalings, so the Dykstra
  // corrections collapse to a row vector, a column vector and a scalar.
  Vector qa = Vector::Ones(n), qb = Vector::Ones(m);
  double qc = 1.0;

  Vector rows_prev = Vector::Zero(n), cols_prev = Vector::Zero(m);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    // C1: row sums <= p.
    res.a = res.a.cwiseProduct(qa);
    Vector t = kernel.apply(res.b);
    Vector rows = res.scale * res.a.cwiseProduct(t);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double f = rows[i] > problem.p[i] ? problem.p[i] / rows[i] : 1.0;
      res.a[i] *= f;
      qa[i] = inverse_or_zero(f);
    }

    // C2: column sums <= q.
    res.b = res.b.cwiseProduct(qb);
    Vector s = kernel.apply_adjoint(res.a);
    Vector cols = res.scale * res.b.cwiseProduct(s);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double f = cols[j] > problem.q[j] ? problem.q[j] / cols[j] : 1.0;
      res.b[j] *= f;
      qb[j] = inverse_or_zero(f);
    }

    // C3: total mass = m.
    res.scale *= qc;
    s = kernel.apply_adjoint(res.a);
    const double total = res.scale * res.b.dot(s);
    if (!(total > 0.0)) throw ZeroTotalMass("plan mass collapsed to zero");
    const double g = problem.mass / total;
    res.scale *= g;
    qc = inverse_or_zero(g);

    if (!res.a.allFinite() || !res.b.allFinite() || !std::isfinite(res.scale) ||
        !qa.allFinite() || !qb.allFinite())
      throw NumericalOverflow("partial-transport scalings left the double range");

    // Residuals of the current plan.
    t = kernel.apply(res.b);
    res.row_sums = res.scale * res.a.cwiseProduct(t);
    s = kernel.apply_adjoint(res.a);
    res.col_sums = res.scale * res.b.cwiseProduct(s);
    const double viol_rows = (res.row_sums - problem.p).cwiseMax(0.0).maxCoeff();
    const double viol_cols = (res.col_sums - problem.q).cwiseMax(0.0).maxCoeff();
    const double viol_mass = std::abs(res.row_sums.sum() - problem.mass);
    const double change =
        std::max((res.row_sums - rows_prev).cwiseAbs().maxCoeff(),
                 (res.col_sums - cols_prev).cwiseAbs().maxCoeff());
    rows_prev = res.row_sums;
    cols_prev = res.col_sums;

    res.report.iterations = iter;
    res.report.residual = std::max({viol_rows, viol_cols, viol_mass});
    res.report.last_change = change;
    res.report.trail.push_back(res.report.residual);
    if (res.report.trail.size() > 16)
      res.report.trail.erase(res.report.trail.begin());
    if (res.report.residual <= options.tol && change <= options.tol) {
      res.report.status = SolveStatus::kConverged;
      return res;
    }
  }
  res.report.status = SolveStatus::kMaxIterExceeded;
  return res;
}

std::pair<std::vector<bool>, std::vector<bool>> active_regions(
    const Vector& row_sums, const Vector& col_sums, double mass, double eta) {
  if (!(eta > 0.0)) throw NonPositiveArgument("eta must be > 0");
  std::vector<bool> src(static_cast<size_t>(row_sums.size()), false);
  std::vector<bool> dst(static_cast<size_t>(col_sums.size()), false);
  if (mass <= 0.0) return {src, dst};
  for (Eigen::Index i = 0; i < row_sums.size(); ++i)
    src[static_cast<size_t>(i)] = row_sums[i] / mass >= eta;
  for (Eigen::Index j = 0; j < col_sums.size(); ++j)
    dst[static_cast<size_t>(j)] = col_sums[j] / mass >= eta;
  return {src, dst};
}

std::pair<std::vector<bool>, std::vector<bool>> active_regions(const Matrix& plan,
                                                               double mass,
                                                               double eta) {
  return active_regions(row_marginal(plan), col_marginal(plan), mass, eta);
}

CapacityResult capacity_transport(const GibbsKernelDense& kernel,
                                  const CapacityProblem& problem,
                                  const SolveOptions& options) {
  const Eigen::Index n = problem.p.size(), m = problem.q.size();
  if (kernel.entries.rows() != n || kernel.entries.cols() != m)
    throw ShapeMismatch("kernel vs marginals");
  if (problem.theta.rows() != n || problem.theta.cols() != m)
    throw ShapeMismatch("theta shape");

  RowMarginalSet rows(problem.p, m);
  ColMarginalSet cols(problem.q, n);
  CapacitySet cap(Eigen::Map<const Array>(problem.theta.data(), problem.theta.size()));
  const ConstraintSet* sets[] = {&rows, &cols, &cap};

  Array kernel_flat = Eigen::Map<const Array>(kernel.entries.data(), kernel.entries.size());
  SolveResult sol = dykstra_solve(kernel_flat, sets, options);

  CapacityResult out;
  out.plan = Eigen::Map<const Matrix>(sol.plan.data(), n, m);
  out.report = std::move(sol.report);
  return out;
}

MultimarginalPartialResult multimarginal_partial(
    const DenseTensor& kernel, const std::vector<Vector>& marginals, double mass,
    const SolveOptions& options) {
  const int K = kernel.order();
  const int N = kernel.side();
  if (static_cast<int>(marginals.size()) != K)
    throw ShapeMismatch("need one marginal per slot");
  double min_mass = std::numeric_limits<double>::infinity();
  for (const Vector& p : marginals) {
    validate_histogram(p);
    if (p.size() != N) throw ShapeMismatch("marginal length");
    min_mass = std::min(min_mass, p.sum());
  }
  if (mass < 0.0 || mass > min_mass * (1.0 + 1e-12))
    throw MassMismatch("mass must lie in [0, min_k sum p_k]");

  MultimarginalPartialResult out{DenseTensor(K, N), {}};
  if (mass == 0.0) {
    out.report.status = SolveStatus::kConverged;
    out.report.residual = 0.0;
    out.report.last_change = 0.0;
    return out;
  }

  std::vector<TensorMarginalLeqSet> leq;
  leq.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) leq.emplace_back(K, N, k, marginals[static_cast<size_t>(k)]);
  TotalMassSet total(mass);
  std::vector<const ConstraintSet*> sets;
  for (const auto& s : leq) sets.push_back(&s);
  sets.push_back(&total);

  SolveResult sol = dykstra_solve(kernel.values, sets, options);
  out.coupling.values = std::move(sol.plan);
  out.report = std::move(sol.report);
  return out;
}

}  // namespace bregmanot
