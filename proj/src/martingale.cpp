#include "bregmanot/martingale.hpp"

#include <cmath>
#include <numbers>

namespace bregmanot {

namespace {

void check_positive_support(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0)) throw NonPositiveSupport(std::string(what) + " must be > 0");
}

Vector scaling_to(const Vector& target, const Vector& sums) {
  Vector f(target.size());
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    if (sums[i] > 0.0)
      f[i] = target[i] / sums[i];
    else if (target[i] > 0.0)
      throw InfeasibleZeroRow("positive target on an all-zero row/column");
    else
      f[i] = 0.0;
  }
  return f;
}

// The three constraint sets on the stacked pair [pi; phi].
class MartingalePairSet : public ConstraintSet {
 public:
  MartingalePairSet(Eigen::Index n, Eigen::Index m) : n_(n), m_(m) {}

 protected:
  Eigen::Map<Matrix> pi(Array& x) const { return {x.data(), n_, m_}; }
  Eigen::Map<Matrix> phi(Array& x) const { return {x.data() + n_ * m_, n_, m_}; }
  Eigen::Map<const Matrix> pi(const Array& x) const { return {x.data(), n_, m_}; }
  Eigen::Map<const Matrix> phi(const Array& x) const {
    return {x.data() + n_ * m_, n_, m_};
  }
  Eigen::Index n_, m_;
};

// The phi-side violations are measured relative to max(p.x): through
// phi = pi diag(y) they carry the martingale identity pi y = p.x, whose
// convergence contract is relative to that scale.
class MartC1 final : public MartingalePairSet {
 public:
  MartC1(Vector p, Vector px, Eigen::Index m)
      : MartingalePairSet(p.size(), m), p_(std::move(p)), px_(std::move(px)),
        px_scale_(px_.cwiseAbs().maxCoeff()) {}
  void project(Array& x) const override {
    auto pi_m = pi(x);
    auto phi_m = phi(x);
    pi_m = scaling_to(p_, pi_m.rowwise().sum()).asDiagonal() * pi_m;
    phi_m = scaling_to(px_, phi_m.rowwise().sum()).asDiagonal() * phi_m;
  }
  double violation(const Array& x) const override {
    const double a = (pi(x).rowwise().sum() - p_).cwiseAbs().maxCoeff();
    const double b = (phi(x).rowwise().sum() - px_).cwiseAbs().maxCoeff();
    return std::max(a, b / px_scale_);
  }
  bool affine() const override { return true; }
  std::string name() const override { return "mart C1"; }

 private:
  Vector p_, px_;
  double px_scale_;
};

class MartC2 final : public MartingalePairSet {
 public:
  MartC2(Vector q, Vector px, Eigen::Index n)
      : MartingalePairSet(n, q.size()), q_(std::move(q)), px_(std::move(px)),
        px_scale_(px_.cwiseAbs().maxCoeff()) {}
  void project(Array& x) const override {
    auto pi_m = pi(x);
    auto phi_m = phi(x);
    pi_m = pi_m * scaling_to(q_, pi_m.colwise().sum().transpose()).asDiagonal();
    phi_m = scaling_to(px_, phi_m.rowwise().sum()).asDiagonal() * phi_m;
  }
  double violation(const Array& x) const override {
    const double a =
        (pi(x).colwise().sum().transpose() - q_).cwiseAbs().maxCoeff();
    const double b = (phi(x).rowwise().sum() - px_).cwiseAbs().maxCoeff();
    return std::max(a, b / px_scale_);
  }
  bool affine() const override { return true; }
  std::string name() const override { return "mart C2"; }

 private:
  Vector q_, px_;
  double px_scale_;
};

class MartC3 final : public MartingalePairSet {
 public:
  MartC3(Vector y, Vector px, Eigen::Index n)
      : MartingalePairSet(n, y.size()), y_(std::move(y)),
        px_scale_(px.cwiseAbs().maxCoeff()) {}
  void project(Array& x) const override {
    auto pi_m = pi(x);
    auto phi_m = phi(x);
    Matrix pi_copy = pi_m;
    Matrix phi_copy = phi_m;
    project_c3_mart(pi_copy, phi_copy, y_);
    pi_m = pi_copy;
    phi_m = phi_copy;
  }
  // The load-bearing feasibility statement is the martingale identity
  // pi y = p.x implied by C3 together with the phi-rows of C1/C2; measured
  // relative to the scale of p.x.
  double violation(const Array& x) const override {
    const double link =
        (phi(x) - pi(x) * y_.asDiagonal()).cwiseAbs().maxCoeff();
    return link / px_scale_;
  }
  bool affine() const override { return true; }
  std::string name() const override { return "mart C3"; }

 private:
  Vector y_;
  double px_scale_;
};

}  // namespace

std::pair<Matrix, Matrix> build_martingale_kernels(const MartingaleProblem& problem) {
  if (!(problem.gamma > 0.0)) throw NonPositiveGamma("gamma must be > 0");
  check_positive_support(problem.x, "x");
  check_positive_support(problem.y, "y");
  const Eigen::Index n = problem.x.size(), m = problem.y.size();
  if (problem.cost.rows() != n || problem.cost.cols() != m)
    throw ShapeMismatch("cost shape vs supports");

  Matrix pibar = (-problem.cost / problem.gamma).array().exp();
  Matrix phibar(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      phibar(i, j) =
          std::exp(-problem.cost(i, j) / (problem.y[j] * problem.gamma));
  return {std::move(pibar), std::move(phibar)};
}

void project_c1_mart(Matrix& pi, Matrix& phi, const Vector& p, const Vector& x) {
  pi = scaling_to(p, pi.rowwise().sum()).asDiagonal() * pi;
  const Vector px = p.cwiseProduct(x);
  phi = scaling_to(px, phi.rowwise().sum()).asDiagonal() * phi;
}

void project_c2_mart(Matrix& pi, Matrix& phi, const Vector& q, const Vector& p,
                     const Vector& x) {
  pi = pi * scaling_to(q, pi.colwise().sum().transpose()).asDiagonal();
  const Vector px = p.cwiseProduct(x);
  phi = scaling_to(px, phi.rowwise().sum()).asDiagonal() * phi;
}

void project_c3_mart(Matrix& pi, Matrix& phi, const Vector& y) {
  if (pi.rows() != phi.rows() || pi.cols() != phi.cols() || pi.cols() != y.size())
    throw ShapeMismatch("pair/support shapes");
  check_positive_support(y, "y");
  for (Eigen::Index j = 0; j < pi.cols(); ++j) {
    const double yj = y[j];
    for (Eigen::Index i = 0; i < pi.rows(); ++i) {
      const double pb = pi(i, j), fb = phi(i, j);
      if (pb < 0.0 || fb < 0.0) throw NonPositiveInput("pair entries must be >= 0");
      if (pb == 0.0 || fb == 0.0) {
        pi(i, j) = 0.0;
        phi(i, j) = 0.0;
        continue;
      }
      pi(i, j) = std::exp((yj * std::log(fb / yj) + std::log(pb)) / (yj + 1.0));
      phi(i, j) = pi(i, j) * yj;
    }
  }
}

MartingaleResult martingale_solve(const MartingaleProblem& problem,
                                  const SolveOptions& options) {
  const auto [pibar, phibar] = build_martingale_kernels(problem);
  const Eigen::Index n = problem.p.size(), m = problem.q.size();
  validate_histogram(problem.p);
  validate_histogram(problem.q);

  Array stacked(2 * n * m);
  Eigen::Map<Matrix>(stacked.data(), n, m) = pibar;
  Eigen::Map<Matrix>(stacked.data() + n * m, n, m) = phibar;

  const Vector px = problem.p.cwiseProduct(problem.x);
  MartC1 c1(problem.p, px, m);
  MartC2 c2(problem.q, px, n);
  MartC3 c3(problem.y, px, n);
  const ConstraintSet* sets[] = {&c1, &c2, &c3};

  SolveResult sol = bregman_solve(stacked, sets, options);

  MartingaleResult out;
  out.plan = Eigen::Map<const Matrix>(sol.plan.data(), n, m);
  out.phi = Eigen::Map<const Matrix>(sol.plan.data() + n * m, n, m);
  out.report = std::move(sol.report);
  out.cost_linear = out.plan.cwiseProduct(problem.cost).sum();
  out.martingale_residual = (out.plan * problem.y - px).cwiseAbs().maxCoeff() /
                            px.cwiseAbs().maxCoeff();
  return out;
}

double lognormal_density(double t, double mean_param, double sigma) {
  if (!(t > 0.0)) throw NonPositiveArgument("t must be > 0");
  if (!(sigma > 0.0)) throw NonPositiveArgument("sigma must be > 0");
  const double z = (std::log(t) - mean_param) / sigma;
  return std::exp(-0.5 * z * z) /
         (t * sigma * std::sqrt(2.0 * std::numbers::pi));
}

MartingaleProblem build_lognormal_case(int n, double sigma0_sq, double sigma1_sq,
                                       double gamma) {
  if (!(sigma0_sq > 0.0) || !(sigma1_sq > sigma0_sq))
    throw NonPositiveArgument("need 0 < sigma0^2 < sigma1^2");
  const double s0 = std::sqrt(sigma0_sq), s1 = std::sqrt(sigma1_sq);
  const double m0 = -sigma0_sq / 2.0, m1 = -sigma1_sq / 2.0;

  // Shared geometric grid covering +-4 sigma1 around the wider law's log-mean.
  MartingaleProblem prob;
  prob.gamma = gamma;
  prob.x.resize(n);
  for (int i = 0; i < n; ++i) {
    const double lo = m1 - 4.0 * s1, hi = m1 + 4.0 * s1;
    prob.x[i] = std::exp(lo + (hi - lo) * i / (n - 1.0));
  }
  prob.y = prob.x;

  auto discretize = [&](double mean_param, double sigma) {
    Vector w(n);
    for (int i = 0; i < n; ++i)
      w[i] = lognormal_density(prob.x[i], mean_param, sigma);
    return Vector(w / w.sum());
  };
  prob.p = discretize(m0, s0);
  prob.q = discretize(m1, s1);

  // Truncated tail mass of the wider law outside the grid.
  const double z = 4.0;
  const double tail = std::erfc(z / std::sqrt(2.0));
  prob.truncated_tails = tail > 1e-4;

  // Exponential tilt of q so both discrete means agree exactly; a martingale
  // coupling needs sum q_j y_j = sum p_i x_i.
  const double target = prob.p.dot(prob.x);
  const Vector logy = prob.y.array().log();
  auto tilted_mean = [&](double c) {
    const Vector w = prob.q.cwiseProduct((c * logy).array().exp().matrix());
    return w.dot(prob.y) / w.sum();
  };
  double lo_c = -1.0, hi_c = 1.0;
  while (tilted_mean(lo_c) > target) lo_c *= 2.0;
  while (tilted_mean(hi_c) < target) hi_c *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo_c + hi_c);
    (tilted_mean(mid) < target ? lo_c : hi_c) = mid;
  }
  const double c = 0.5 * (lo_c + hi_c);
  Vector w = prob.q.cwiseProduct((c * logy).array().exp().matrix());
  prob.q = w / w.sum();

  prob.cost.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double r = std::log(prob.y[j] / prob.x[i]);
      prob.cost(i, j) = r * r;
    }
  return prob;
}

}  // namespace bregmanot
