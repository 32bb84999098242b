#include "bregmanot/tomography.hpp"

#include <cmath>
#include <numbers>

namespace bregmanot {

namespace {

constexpr double kPi = std::numbers::pi;

int wrap(int v, int n) {
  const int m = v % n;
  return m < 0 ? m + n : m;
}

Vector ray_scaling(const Vector& target, const Vector& sums, const char* what) {
  Vector f(target.size());
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    if (sums[i] > 0.0)
      f[i] = target[i] / sums[i];
    else if (target[i] > 0.0)
      throw InfeasibleZeroRow(std::string("positive ") + what +
                              " target on an all-zero sum");
    else
      f[i] = 0.0;
  }
  return f;
}

}  // namespace

RadonOperator::RadonOperator(int n0, std::vector<double> angles)
    : n0_(n0), angles_(std::move(angles)) {
  if (n0 < 1) throw ShapeMismatch("grid side must be >= 1");
  offsets_.resize(angles_.size());
  first_branch_.resize(angles_.size());
  for (size_t k = 0; k < angles_.size(); ++k) {
    double phi = std::fmod(angles_[k], kPi);
    if (phi < 0.0) phi += kPi;
    const bool first = phi <= kPi / 4.0 || phi >= 3.0 * kPi / 4.0;
    first_branch_[k] = first;
    const double slope = first ? std::tan(phi) : std::cos(phi) / std::sin(phi);
    offsets_[k].resize(static_cast<size_t>(n0_));
    for (int s2 = 0; s2 < n0_; ++s2)
      offsets_[k][static_cast<size_t>(s2)] =
          static_cast<int>(std::lround(s2 * slope));
  }
}

int RadonOperator::line_cell(int k, int s1, int s2) const {
  const int w = wrap(s1 + offsets_[static_cast<size_t>(k)][static_cast<size_t>(s2)], n0_);
  // (row, col) with col-major flattening; the two branches swap which
  // coordinate runs along the line.
  return first_branch_[static_cast<size_t>(k)] ? s2 + n0_ * w : w + n0_ * s2;
}

Vector RadonOperator::radon(const Vector& image, int k) const {
  if (k < 0 || k >= num_angles()) throw IndexOutOfRange("angle index");
  if (image.size() != static_cast<Eigen::Index>(n0_) * n0_)
    throw ShapeMismatch("image size vs grid");
  Vector out = Vector::Zero(n0_);
  for (int s1 = 0; s1 < n0_; ++s1) {
    double acc = 0.0;
    for (int s2 = 0; s2 < n0_; ++s2) acc += image[line_cell(k, s1, s2)];
    out[s1] = acc;
  }
  return out;
}

Vector RadonOperator::back_project(const Vector& rays, int k) const {
  if (k < 0 || k >= num_angles()) throw IndexOutOfRange("angle index");
  if (rays.size() != n0_) throw ShapeMismatch("ray vector length");
  Vector out(static_cast<Eigen::Index>(n0_) * n0_);
  for (int s1 = 0; s1 < n0_; ++s1)
    for (int s2 = 0; s2 < n0_; ++s2) out[line_cell(k, s1, s2)] = rays[s1];
  return out;
}

Vector RadonOperator::radon_all(const Vector& image) const {
  Vector out(static_cast<Eigen::Index>(num_angles()) * n0_);
  for (int k = 0; k < num_angles(); ++k)
    out.segment(static_cast<Eigen::Index>(k) * n0_, n0_) = radon(image, k);
  return out;
}

Vector RadonOperator::back_project_all(const Vector& rays) const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(n0_) * n0_);
  for (int k = 0; k < num_angles(); ++k)
    out += back_project(rays.segment(static_cast<Eigen::Index>(k) * n0_, n0_), k);
  return out;
}

std::vector<double> uniform_angles(int k) {
  std::vector<double> angles(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) angles[static_cast<size_t>(i)] = i * kPi / k;
  return angles;
}

Vector least_squares_inverse(const RadonOperator& op,
                             const std::vector<Vector>& measurements,
                             double cg_tol, SolveReport* report) {
  const int k_angles = op.num_angles();
  if (static_cast<int>(measurements.size()) != k_angles)
    throw ShapeMismatch("one measurement per angle");
  Vector rhs(static_cast<Eigen::Index>(k_angles) * op.n0());
  for (int k = 0; k < k_angles; ++k)
    rhs.segment(static_cast<Eigen::Index>(k) * op.n0(), op.n0()) =
        measurements[static_cast<size_t>(k)];

  auto apply = [&](const Vector& z) { return op.radon_all(op.back_project_all(z)); };

  // Conjugate gradient on (R R^*) z = r.
  Vector z = Vector::Zero(rhs.size());
  Vector residual = rhs;
  Vector direction = residual;
  double rr = residual.squaredNorm();
  const double target = cg_tol * rhs.norm();
  const int max_iter = 10 * static_cast<int>(rhs.size());
  SolveReport rep;
  rep.status = SolveStatus::kMaxIterExceeded;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector ad = apply(direction);
    const double da = direction.dot(ad);
    if (da <= 0.0) break;  // hit the (consistent) null space
    const double step = rr / da;
    z += step * direction;
    residual -= step * ad;
    const double rr_next = residual.squaredNorm();
    rep.iterations = it;
    rep.residual = std::sqrt(rr_next);
    if (rep.residual <= target) {
      rep.status = SolveStatus::kConverged;
      break;
    }
    direction = residual + (rr_next / rr) * direction;
    rr = rr_next;
  }
  if (report) *report = rep;
  if (rep.status != SolveStatus::kConverged)
    throw CGNotConverged("normal equations stalled at residual " +
                         std::to_string(rep.residual));
  return op.back_project_all(z);
}

void project_radon_marginals(Matrix& pi, Matrix& pi_k, const Vector& g0,
                             const Vector& r_k) {
  pi = pi * ray_scaling(g0, pi.colwise().sum().transpose(), "template").asDiagonal();
  pi_k = ray_scaling(r_k, pi_k.rowwise().sum(), "measurement").asDiagonal() * pi_k;
}

void project_radon_coupling(const RadonOperator& op, int k, Matrix& pi,
                            Matrix& pi_k, double lambda1, double lambda2) {
  if (!(lambda1 > 0.0) || !(lambda2 >= 0.0) ||
      std::abs(lambda1 + lambda2 - 1.0) > 1e-12)
    throw WeightNotSimplex("lambda1 + lambda2 must be 1 with lambda1 > 0");

  const Vector alpha = op.radon(pi.rowwise().sum(), k);
  const Vector beta = pi_k.rowwise().sum();
  Vector big_scale(alpha.size()), small_scale(beta.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > 0.0 && beta[i] > 0.0) {
      const double delta =
          std::pow(alpha[i], lambda1) * std::pow(beta[i], lambda2);
      big_scale[i] = delta / alpha[i];
      small_scale[i] = delta / beta[i];
    } else if (alpha[i] == 0.0 && beta[i] == 0.0) {
      big_scale[i] = 1.0;  // massless ray on both sides: nothing to match
      small_scale[i] = 1.0;
    } else {
      throw ZeroRaySum("ray mass vanished on one side of the coupling");
    }
  }
  pi = op.back_project(big_scale, k).asDiagonal() * pi;
  pi_k = small_scale.asDiagonal() * pi_k;
}

namespace {

// Stacked layout: [pi (N x N); pi_1 .. pi_K (n0 x n0 each)].
struct StackedView {
  Eigen::Index n;   // n0^2
  Eigen::Index n0;

  Eigen::Map<Matrix> pi(Array& x) const { return {x.data(), n, n}; }
  Eigen::Map<const Matrix> pi(const Array& x) const { return {x.data(), n, n}; }
  Eigen::Map<Matrix> pi_k(Array& x, int k) const {
    return {x.data() + n * n + static_cast<Eigen::Index>(k) * n0 * n0, n0, n0};
  }
  Eigen::Map<const Matrix> pi_k(const Array& x, int k) const {
    return {x.data() + n * n + static_cast<Eigen::Index>(k) * n0 * n0, n0, n0};
  }
};

class RadonFixedSet final : public ConstraintSet {
 public:
  RadonFixedSet(StackedView view, int k, const Vector& g0, Vector r_k)
      : view_(view), k_(k), g0_(g0), r_k_(std::move(r_k)) {}
  void project(Array& x) const override {
    auto pi = view_.pi(x);
    auto pik = view_.pi_k(x, k_);
    pi = pi * ray_scaling(g0_, pi.colwise().sum().transpose(), "template").asDiagonal();
    pik = ray_scaling(r_k_, pik.rowwise().sum(), "measurement").asDiagonal() * pik;
  }
  double violation(const Array& x) const override {
    const double a =
        (view_.pi(x).colwise().sum().transpose() - g0_).cwiseAbs().maxCoeff();
    const double b =
        (view_.pi_k(x, k_).rowwise().sum() - r_k_).cwiseAbs().maxCoeff();
    return std::max(a, b);
  }
  bool affine() const override { return true; }
  std::string name() const override { return "C_" + std::to_string(k_); }

 private:
  StackedView view_;
  int k_;
  Vector g0_, r_k_;
};

class RadonCouplingSet final : public ConstraintSet {
 public:
  RadonCouplingSet(StackedView view, const RadonOperator& op, int k,
                   double lambda1)
      : view_(view), op_(op), k_(k), lambda1_(lambda1) {}
  void project(Array& x) const override {
    auto pi_map = view_.pi(x);
    auto pik_map = view_.pi_k(x, k_);
    Matrix pi = pi_map, pik = pik_map;
    project_radon_coupling(op_, k_, pi, pik, lambda1_, 1.0 - lambda1_);
    pi_map = pi;
    pik_map = pik;
  }
  double violation(const Array& x) const override {
    const Vector lhs = op_.radon(view_.pi(x).rowwise().sum(), k_);
    const Vector rhs = view_.pi_k(x, k_).rowwise().sum();
    return (lhs - rhs).cwiseAbs().maxCoeff();
  }
  bool affine() const override { return true; }
  std::string name() const override { return "Ct_" + std::to_string(k_); }

 private:
  StackedView view_;
  const RadonOperator& op_;
  int k_;
  double lambda1_;
};

}  // namespace

ReconstructionResult ot_reconstruct(const ReconstructionProblem& problem,
                                    const SolveOptions& options) {
  const RadonOperator& op = problem.op;
  const int n0 = op.n0();
  const Eigen::Index n = static_cast<Eigen::Index>(n0) * n0;
  const int k_angles = op.num_angles();
  if (problem.template_g0.size() != n) throw ShapeMismatch("template size");
  if (static_cast<int>(problem.measurements.size()) != k_angles)
    throw ShapeMismatch("one measurement per angle");
  if (!(problem.lambda1 > 0.0 && problem.lambda1 <= 1.0))
    throw WeightNotSimplex("lambda1 must lie in (0, 1]");
  if (!(problem.gamma > 0.0)) throw NonPositiveGamma("gamma must be > 0");

  ReconstructionResult result;

  // KL marginal projections need equal masses; rescale noisy measurements.
  const double g0_mass = problem.template_g0.sum();
  std::vector<Vector> r = problem.measurements;
  for (Vector& rk : r) {
    const double mass = rk.sum();
    if (std::abs(mass - g0_mass) > 1e-12 * std::max(g0_mass, 1e-300)) {
      rk *= g0_mass / mass;
      result.renormalized_measurements = true;
    }
  }

  // Gibbs kernels: quadratic index cost on the 2-D grid (separable factors)
  // and the periodic 1-D cost for each ray coupling.
  Matrix k1(n0, n0);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n0; ++j) {
      const double d = i - j;
      k1(i, j) = std::exp(-d * d / problem.gamma);
    }
  Matrix periodic(n0, n0);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n0; ++j) {
      int d = std::abs(i - j);
      d = std::min(d, n0 - d);
      periodic(i, j) = std::exp(-static_cast<double>(d) * d / problem.gamma);
    }

  StackedView view{n, n0};
  Array stacked(n * n + static_cast<Eigen::Index>(k_angles) * n0 * n0);
  {
    auto pi = view.pi(stacked);
    for (Eigen::Index cj = 0; cj < n; ++cj)
      for (Eigen::Index ci = 0; ci < n; ++ci) {
        const int ix = static_cast<int>(ci) % n0, iy = static_cast<int>(ci) / n0;
        const int jx = static_cast<int>(cj) % n0, jy = static_cast<int>(cj) / n0;
        pi(ci, cj) = k1(ix, jx) * k1(iy, jy);
      }
    for (int k = 0; k < k_angles; ++k) view.pi_k(stacked, k) = periodic;
  }

  std::vector<RadonFixedSet> fixed;
  std::vector<RadonCouplingSet> coupling;
  fixed.reserve(static_cast<size_t>(k_angles));
  coupling.reserve(static_cast<size_t>(k_angles));
  for (int k = 0; k < k_angles; ++k) {
    fixed.emplace_back(view, k, problem.template_g0, r[static_cast<size_t>(k)]);
    coupling.emplace_back(view, op, k, problem.lambda1);
  }
  std::vector<const ConstraintSet*> sets;
  for (int k = 0; k < k_angles; ++k) {
    sets.push_back(&fixed[static_cast<size_t>(k)]);
    sets.push_back(&coupling[static_cast<size_t>(k)]);
  }

  SolveResult sol = bregman_solve(stacked, sets, options);
  result.image = view.pi(sol.plan).rowwise().sum();
  result.report = std::move(sol.report);
  return result;
}

}  // namespace bregmanot
