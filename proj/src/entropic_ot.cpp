#include "bregmanot/entropic_ot.hpp"

#include <algorithm>
#include <cmath>

#include "bregmanot/kl.hpp"

namespace bregmanot {

namespace {

constexpr double kAbsorbThreshold = 230.2585092994046;  // log(1e100)

// target/denom with infeasibility reported where positive mass meets a zero
// sum; zero targets give a zero scaling.
Vector marginal_scaling(const Vector& target, const Vector& sums, bool underflow_risk) {
  Vector out(target.size());
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    if (sums[i] > 0.0) {
      out[i] = target[i] / sums[i];
    } else if (target[i] > 0.0) {
      if (underflow_risk)
        throw NumericalOverflow(
            "zero kernel row/column under positive target; enable log-domain mode");
      throw InfeasibleZeroRow("positive target mass on an all-zero row/column");
    } else {
      out[i] = 0.0;
    }
  }
  return out;
}

void check_masses(const Vector& p, const Vector& q) {
  validate_histogram(p);
  validate_histogram(q);
  const double sp = p.sum(), sq = q.sum();
  if (std::abs(sp - sq) > 1e-12 * std::max({sp, sq, 1e-300}))
    throw MassMismatch("total masses differ: " + std::to_string(sp) + " vs " +
                       std::to_string(sq));
}

}  // namespace

CostMatrix quadratic_cost(const Matrix& points) {
  const Eigen::Index n = points.rows();
  CostMatrix c;
  c.points = points;
  c.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      c.entries(i, j) = (points.row(i) - points.row(j)).squaredNorm();
  return c;
}

CostMatrix periodic_index_cost(int n0) {
  CostMatrix c;
  c.periodic = true;
  c.entries.resize(n0, n0);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n0; ++j) {
      int d = std::abs(i - j);
      d = std::min(d, n0 - d);
      c.entries(i, j) = static_cast<double>(d) * d;
    }
  return c;
}

Matrix grid_1d(int n, double lo, double hi) {
  Matrix pts(n, 1);
  for (int i = 0; i < n; ++i)
    pts(i, 0) = n == 1 ? lo : lo + (hi - lo) * i / (n - 1.0);
  return pts;
}

Matrix grid_2d(int n0) {
  Matrix pts(static_cast<Eigen::Index>(n0) * n0, 2);
  for (int iy = 0; iy < n0; ++iy)
    for (int ix = 0; ix < n0; ++ix) {
      const Eigen::Index r = ix + static_cast<Eigen::Index>(n0) * iy;
      pts(r, 0) = (ix + 0.5) / n0;
      pts(r, 1) = (iy + 0.5) / n0;
    }
  return pts;
}

double median_cost(const Matrix& cost) {
  std::vector<double> v(cost.data(), cost.data() + cost.size());
  auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

GibbsKernelDense build_gibbs(const CostMatrix& cost, double gamma) {
  if (!(gamma > 0.0)) throw NonPositiveGamma("gamma must be > 0");
  GibbsKernelDense k;
  k.cost = cost.entries;
  k.gamma = gamma;
  k.entries = (-cost.entries / gamma).array().exp();
  k.underflowed = (k.entries.array() == 0.0).any();
  return k;
}

SeparableKernelOp build_gibbs_grid2d(int n0, double gamma) {
  if (!(gamma > 0.0)) throw NonPositiveGamma("gamma must be > 0");
  Matrix k(n0, n0);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n0; ++j) {
      const double d = static_cast<double>(i - j) / n0;
      k(i, j) = std::exp(-d * d / gamma);
    }
  return {k, k};
}

Matrix project_rows(Matrix plan, const Vector& p) {
  if (plan.rows() != p.size()) throw ShapeMismatch("project_rows target size");
  const Vector sums = plan.rowwise().sum();
  plan = marginal_scaling(p, sums, false).asDiagonal() * plan;
  return plan;
}

Matrix project_cols(Matrix plan, const Vector& q) {
  if (plan.cols() != q.size()) throw ShapeMismatch("project_cols target size");
  const Vector sums = plan.colwise().sum().transpose();
  plan = plan * marginal_scaling(q, sums, false).asDiagonal();
  return plan;
}

Vector SinkhornResult::log_u_total() const {
  Vector lu = u.array().log().matrix();
  if (log_alpha.size() == lu.size()) lu += log_alpha;
  return lu;
}

Vector SinkhornResult::log_v_total() const {
  Vector lv = v.array().log().matrix();
  if (log_beta.size() == lv.size()) lv += log_beta;
  return lv;
}

SinkhornResult sinkhorn(const KernelOp& kernel, const Vector& p, const Vector& q,
                        const SinkhornOptions& options) {
  if (options.log_domain)
    throw Error("log-domain Sinkhorn needs the dense cost; pass a GibbsKernelDense");
  check_masses(p, q);
  if (kernel.rows() != p.size() || kernel.cols() != q.size())
    throw ShapeMismatch("kernel dimensions vs marginals");

  SinkhornResult result;
  result.v = options.v0.value_or(Vector::Ones(q.size()));
  if (result.v.size() != q.size()) throw ShapeMismatch("v0 size");
  result.u = Vector::Ones(p.size());
  result.log_alpha = Vector::Zero(p.size());
  result.log_beta = Vector::Zero(q.size());

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const Vector t = kernel.apply(result.v);
    result.u = marginal_scaling(p, t, false);
    const Vector s = kernel.apply_adjoint(result.u);

    // Rows are exact after the u-step; the column residual of the current
    // plan decides convergence before v is touched.
    const double col_res =
        (result.v.cwiseProduct(s) - q).cwiseAbs().maxCoeff();
    result.report.iterations = iter;
    result.report.residual = col_res;
    if (col_res <= options.tol) {
      result.report.status = SolveStatus::kConverged;
      result.report.last_change = 0.0;
      return result;
    }

    result.v = marginal_scaling(q, s, false);
    if (!result.u.allFinite() || !result.v.allFinite())
      throw NumericalOverflow("Sinkhorn scalings left the double range; "
                              "enable log-domain mode");
    if (options.on_iterate) options.on_iterate(iter, result.u, result.v);
  }
  result.report.status = SolveStatus::kMaxIterExceeded;
  return result;
}

namespace {

// Stabilized variant: scalings are absorbed into dual potentials whenever
// they leave [1e-100, 1e+100] and the working kernel is rebuilt as
// exp(alpha_i + beta_j - C_ij/gamma).
SinkhornResult sinkhorn_stabilized(const GibbsKernelDense& kernel, const Vector& p,
                                   const Vector& q, const SinkhornOptions& options) {
  check_masses(p, q);
  const Matrix& cost = kernel.cost;
  const double gamma = kernel.gamma;
  const Eigen::Index n = p.size(), m = q.size();
  if (cost.rows() != n || cost.cols() != m)
    throw ShapeMismatch("cost dimensions vs marginals");

  SinkhornResult result;
  // Row shift so every row of the working kernel has maximum 1; the u-step
  // overwrites the full row scaling, so the iterates are gauge-invariant.
  result.log_alpha = (cost.rowwise().minCoeff() / gamma);
  result.log_beta = Vector::Zero(m);
  result.u = Vector::Ones(n);
  result.v = options.v0.value_or(Vector::Ones(m));

  Matrix work(n, m);
  auto rebuild = [&]() {
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        work(i, j) = std::exp(result.log_alpha[i] + result.log_beta[j] -
                              cost(i, j) / gamma);
  };
  auto absorb = [&]() {
    result.log_alpha += result.u.array().log().matrix();
    result.log_beta += result.v.array().log().matrix();
    result.u.setOnes();
    result.v.setOnes();
    rebuild();
  };
  rebuild();

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    Vector t = work * result.v;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (t[i] == 0.0 && p[i] > 0.0) {  // row underflow: re-center and retry
        absorb();
        t = work * result.v;
        break;
      }
    }
    result.u = marginal_scaling(p, t, true);
    const Vector s = work.transpose() * result.u;

    const double col_res = (result.v.cwiseProduct(s) - q).cwiseAbs().maxCoeff();
    result.report.iterations = iter;
    result.report.residual = col_res;
    if (col_res <= options.tol) {
      result.report.status = SolveStatus::kConverged;
      result.report.last_change = 0.0;
      return result;
    }

    result.v = marginal_scaling(q, s, true);
    if (options.on_iterate) options.on_iterate(iter, result.u, result.v);

    const double lu = result.u.array().abs().log().maxCoeff();
    const double lv = result.v.array().abs().log().maxCoeff();
    if (std::max(lu, lv) > kAbsorbThreshold) absorb();
  }
  result.report.status = SolveStatus::kMaxIterExceeded;
  return result;
}

}  // namespace

SinkhornResult sinkhorn(const GibbsKernelDense& kernel, const Vector& p,
                        const Vector& q, const SinkhornOptions& options) {
  if (options.log_domain) return sinkhorn_stabilized(kernel, p, q, options);
  DenseKernelOp op(kernel.entries);
  return sinkhorn(op, p, q, options);
}

Matrix materialize_plan(const KernelOp& kernel, const SinkhornResult& result) {
  return result.u.asDiagonal() * kernel.dense() * result.v.asDiagonal();
}

Matrix materialize_plan(const GibbsKernelDense& kernel, const SinkhornResult& result) {
  const bool absorbed = result.log_alpha.size() > 0 &&
                        (result.log_alpha.array() != 0.0).any();
  if (!absorbed)
    return result.u.asDiagonal() * kernel.entries * result.v.asDiagonal();
  const Vector lu = result.log_u_total();
  const Vector lv = result.log_v_total();
  Matrix plan(lu.size(), lv.size());
  for (Eigen::Index j = 0; j < lv.size(); ++j)
    for (Eigen::Index i = 0; i < lu.size(); ++i)
      plan(i, j) = std::exp(lu[i] + lv[j] - kernel.cost(i, j) / kernel.gamma);
  return plan;
}

Matrix sinkhorn_dense_debug(const GibbsKernelDense& kernel, const Vector& p,
                            const Vector& q, double tol, int max_iter,
                            SolveReport* report) {
  check_masses(p, q);
  Matrix plan = kernel.entries;
  SolveReport rep;
  for (int iter = 1; iter <= max_iter; ++iter) {
    plan = project_rows(std::move(plan), p);
    const double col_res =
        (plan.colwise().sum().transpose() - q).cwiseAbs().maxCoeff();
    rep.iterations = iter;
    rep.residual = col_res;
    if (col_res <= tol) {
      rep.status = SolveStatus::kConverged;
      if (report) *report = rep;
      return plan;
    }
    plan = project_cols(std::move(plan), q);
  }
  rep.status = SolveStatus::kMaxIterExceeded;
  if (report) *report = rep;
  return plan;
}

TransportCost transport_cost(const Matrix& plan, const Matrix& cost, double gamma) {
  if (plan.rows() != cost.rows() || plan.cols() != cost.cols())
    throw ShapeMismatch("plan vs cost dimensions");
  TransportCost out;
  out.linear = plan.cwiseProduct(cost).sum();
  out.regularized = out.linear - gamma * entropy(plan);
  return out;
}

}  // namespace bregmanot
