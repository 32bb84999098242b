#include "bregmanot/euler_flow.hpp"

#include <cmath>

namespace bregmanot {

namespace {

// Hop matrix leaving slot k: xi0 between consecutive slots, xi1 closing the
// cycle from the last slot back to slot 0.
const Matrix& hop(const FactoredEulerKernel& kernel, int k) {
  return k == kernel.steps - 1 ? kernel.xi1 : kernel.xi0;
}

// Suffix chain slot k -> slot 0: hop_k diag(u_{k+1}) hop_{k+1} ... hop_{K-1}.
Matrix suffix_chain(const FactoredEulerKernel& kernel,
                    const std::vector<Vector>& u, int k) {
  Matrix t = hop(kernel, k);
  for (int m = k + 1; m < kernel.steps; ++m)
    t = t * u[static_cast<size_t>(m)].asDiagonal() * hop(kernel, m);
  return t;
}

// diag(T * H) without forming the product.
Vector product_diagonal(const Matrix& t, const Matrix& h) {
  return (t.array() * h.transpose().array()).rowwise().sum().matrix();
}

// Sup-norm deviation of every marginal from the uniform 1/N, with the
// current scalings everywhere (no updates).
double uniform_residual(const FactoredEulerKernel& kernel,
                        const std::vector<Vector>& u) {
  const int n = kernel.n();
  const double target = 1.0 / n;
  Matrix prefix = Matrix::Identity(n, n);
  double res = 0.0;
  for (int k = 0; k < kernel.steps; ++k) {
    const Matrix t = suffix_chain(kernel, u, k);
    const Vector marg =
        u[static_cast<size_t>(k)].cwiseProduct(product_diagonal(t, prefix));
    res = std::max(res, (marg.array() - target).abs().maxCoeff());
    prefix = prefix * u[static_cast<size_t>(k)].asDiagonal() * hop(kernel, k);
  }
  return res;
}

}  // namespace

Vector euler_grid(int n) {
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = (i + 0.5) / n;
  return x;
}

std::vector<int> euler_map_indices(const std::function<double(double)>& map, int n) {
  std::vector<int> sigma(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double y = map((i + 0.5) / n);
    long j = std::lround(y * n - 0.5);
    sigma[static_cast<size_t>(i)] =
        static_cast<int>(std::clamp(j, 0L, static_cast<long>(n - 1)));
  }
  return sigma;
}

std::vector<int> euler_map_invert(int n) {
  return euler_map_indices([](double x) { return 1.0 - x; }, n);
}

std::vector<int> euler_map_shift_half(int n) {
  return euler_map_indices(
      [](double x) { return std::fmod(x + 0.5, 1.0); }, n);
}

std::vector<int> euler_map_tent(int n) {
  return euler_map_indices(
      [](double x) { return std::min(2.0 * x, 2.0 - 2.0 * x); }, n);
}

FactoredEulerKernel build_euler_kernel(const Vector& points,
                                       std::span<const int> sigma, int steps,
                                       double gamma) {
  if (!(gamma > 0.0)) throw NonPositiveGamma("gamma must be > 0");
  if (steps < 2) throw ShapeMismatch("need at least two time slots");
  const int n = static_cast<int>(points.size());
  if (static_cast<int>(sigma.size()) != n)
    throw InvalidPermutation("map length differs from grid size");
  for (int s : sigma)
    if (s < 0 || s >= n) throw InvalidPermutation("map target out of range");

  FactoredEulerKernel kernel;
  kernel.sigma.assign(sigma.begin(), sigma.end());
  kernel.steps = steps;
  kernel.gamma = gamma;
  kernel.points = points;
  kernel.xi0.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double d = points[a] - points[b];
      kernel.xi0(a, b) = std::exp(-d * d / gamma);
    }
  kernel.xi1.resize(n, n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      kernel.xi1(b, a) = kernel.xi0(b, kernel.sigma[static_cast<size_t>(a)]);
  return kernel;
}

EulerScalings ipfp_factored(const FactoredEulerKernel& kernel,
                            const EulerOptions& options, SolveReport* report) {
  const int n = kernel.n();
  const int K = kernel.steps;
  const double target = 1.0 / n;

  EulerScalings scalings;
  scalings.u.assign(static_cast<size_t>(K), Vector::Ones(n));
  std::vector<Vector> prev_u = scalings.u;

  SolveReport rep;
  for (int sweep = 1; sweep <= options.max_iter; ++sweep) {
    Matrix prefix = Matrix::Identity(n, n);
    for (int k = 0; k < K; ++k) {
      const Matrix t = suffix_chain(kernel, scalings.u, k);
      const Vector d = product_diagonal(t, prefix);
      Vector& uk = scalings.u[static_cast<size_t>(k)];
      for (int i = 0; i < n; ++i) {
        if (!(d[i] > 0.0))
          throw NumericalOverflow("cycle weight underflowed to zero; "
                                  "increase gamma or the step count");
        uk[i] = target / d[i];
      }
      prefix = prefix * uk.asDiagonal() * hop(kernel, k);
    }

    // Gauge fix: unit-max scalings, compensated into the last vector so the
    // implied plan is untouched.
    double comp = 1.0;
    for (int k = 0; k + 1 < K; ++k) {
      Vector& uk = scalings.u[static_cast<size_t>(k)];
      const double mk = uk.maxCoeff();
      uk /= mk;
      comp *= mk;
    }
    scalings.u[static_cast<size_t>(K - 1)] *= comp;

    double change = 0.0;
    for (int k = 0; k < K; ++k) {
      const Vector& uk = scalings.u[static_cast<size_t>(k)];
      change = std::max(change, (uk - prev_u[static_cast<size_t>(k)])
                                    .cwiseAbs()
                                    .maxCoeff() /
                                    uk.cwiseAbs().maxCoeff());
      prev_u[static_cast<size_t>(k)] = uk;
    }
    rep.iterations = sweep;
    rep.last_change = change;

    if (sweep % options.check_every == 0 || change <= options.tol ||
        sweep == options.max_iter) {
      rep.residual = uniform_residual(kernel, scalings.u);
      if (rep.residual <= options.tol) {
        rep.status = SolveStatus::kConverged;
        // Refresh the slot-0 scaling so its marginal is exact to round-off
        // (T_{0,0} then reads back the uniform weights directly).
        const Vector d0 =
            product_diagonal(suffix_chain(kernel, scalings.u, 0),
                             Matrix::Identity(n, n));
        for (int i = 0; i < n; ++i)
          scalings.u[0][i] = target / d0[i];
        rep.residual = uniform_residual(kernel, scalings.u);
        if (report) *report = rep;
        return scalings;
      }
    }
  }
  rep.status = SolveStatus::kMaxIterExceeded;
  rep.residual = uniform_residual(kernel, scalings.u);
  if (report) *report = rep;
  return scalings;
}

Matrix transition_matrix(const EulerScalings& scalings,
                         const FactoredEulerKernel& kernel, int k) {
  const int n = kernel.n();
  const int K = kernel.steps;
  if (k < 0 || k >= K) throw IndexOutOfRange("transition slot");
  const auto& u = scalings.u;

  if (k == 0) {
    const Vector d =
        product_diagonal(suffix_chain(kernel, u, 0), Matrix::Identity(n, n));
    return Matrix(u[0].cwiseProduct(d).asDiagonal());
  }

  // Forward chain slot 0 -> slot k and closing chain slot k -> slot 0, with
  // only the interior scalings inside each.
  Matrix fwd = hop(kernel, 0);
  for (int m = 1; m < k; ++m)
    fwd = fwd * u[static_cast<size_t>(m)].asDiagonal() * hop(kernel, m);
  const Matrix back = suffix_chain(kernel, u, k);

  return (u[0].asDiagonal() * fwd * u[static_cast<size_t>(k)].asDiagonal())
      .cwiseProduct(back.transpose());
}

}  // namespace bregmanot
