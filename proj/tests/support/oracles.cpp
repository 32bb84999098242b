#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

AffineProjector::AffineProjector(Matrix a, Vector b)
    : a_(std::move(a)), b_(std::move(b)) {
  gram_.compute(a_ * a_.transpose());
}

Vector AffineProjector::project(const Vector& x) const {
  return x - a_.transpose() * gram_.solve(a_ * x - b_);
}

Vector project_simplex_scaled(Vector x, double total) {
  // Classic threshold rule: x_i -> max(x_i - tau, 0) with tau chosen so the
  // positives sum to `total`.
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, tau = 0.0;
  int support = 0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - total) / static_cast<double>(i + 1);
    if (candidate < sorted[i]) {
      tau = candidate;
      support = static_cast<int>(i + 1);
    }
  }
  (void)support;
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::max(x[i] - tau, 0.0);
  return x;
}

Vector project_simplex_capped(Vector x, double cap) {
  Vector pos = x.cwiseMax(0.0);
  if (pos.sum() <= cap) return pos;
  return project_simplex_scaled(std::move(x), cap);
}

EuclideanProjection rows_equal(const Vector& p, int cols) {
  return [p, cols](const Vector& x) {
    const int rows = static_cast<int>(p.size());
    Eigen::Map<const Matrix> m(x.data(), rows, cols);
    Matrix out(rows, cols);
    for (int i = 0; i < rows; ++i)
      out.row(i) = project_simplex_scaled(m.row(i).transpose(), p[i]).transpose();
    return Vector(Eigen::Map<const Vector>(out.data(), out.size()));
  };
}

EuclideanProjection cols_equal(const Vector& q, int rows) {
  return [q, rows](const Vector& x) {
    const int cols = static_cast<int>(q.size());
    Eigen::Map<const Matrix> m(x.data(), rows, cols);
    Matrix out(rows, cols);
    for (int j = 0; j < cols; ++j) out.col(j) = project_simplex_scaled(m.col(j), q[j]);
    return Vector(Eigen::Map<const Vector>(out.data(), out.size()));
  };
}

EuclideanProjection rows_leq(const Vector& p, int cols) {
  return [p, cols](const Vector& x) {
    const int rows = static_cast<int>(p.size());
    Eigen::Map<const Matrix> m(x.data(), rows, cols);
    Matrix out(rows, cols);
    for (int i = 0; i < rows; ++i)
      out.row(i) = project_simplex_capped(m.row(i).transpose(), p[i]).transpose();
    return Vector(Eigen::Map<const Vector>(out.data(), out.size()));
  };
}

EuclideanProjection cols_leq(const Vector& q, int rows) {
  return [q, rows](const Vector& x) {
    const int cols = static_cast<int>(q.size());
    Eigen::Map<const Matrix> m(x.data(), rows, cols);
    Matrix out(rows, cols);
    for (int j = 0; j < cols; ++j) out.col(j) = project_simplex_capped(m.col(j), q[j]);
    return Vector(Eigen::Map<const Vector>(out.data(), out.size()));
  };
}

EuclideanProjection total_mass(double mass, int size) {
  return [mass, size](const Vector& x) {
    Vector v = x;
    (void)size;
    return project_simplex_scaled(std::move(v), mass);
  };
}

EuclideanProjection box_capacity(const Matrix& theta) {
  return [theta](const Vector& x) {
    Eigen::Map<const Vector> cap(theta.data(), theta.size());
    return Vector(x.cwiseMax(0.0).cwiseMin(cap));
  };
}

EuclideanProjection intersect(std::vector<EuclideanProjection> parts,
                              int dykstra_iters) {
  return [parts = std::move(parts), dykstra_iters](const Vector& x0) {
    // Euclidean Dykstra over the parts.
    Vector x = x0;
    std::vector<Vector> increments(parts.size(), Vector::Zero(x.size()));
    for (int it = 0; it < dykstra_iters; ++it) {
      for (size_t s = 0; s < parts.size(); ++s) {
        const Vector y = x + increments[s];
        x = parts[s](y);
        increments[s] = y - x;
      }
    }
    return x;
  };
}

Vector kl_projection_reference(const Vector& xi, const EuclideanProjection& proj,
                               const std::vector<double>& weights, int iters,
                               double tol) {
  const Eigen::Index n = xi.size();
  const Eigen::Index slot =
      n / static_cast<Eigen::Index>(weights.size());
  const double floor_value = 1e-300;

  auto objective = [&](const Vector& x) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = weights[static_cast<size_t>(i / slot)];
      if (x[i] > 0.0) acc += w * x[i] * (std::log(x[i] / xi[i]) - 1.0);
    }
    return acc;
  };
  auto gradient = [&](const Vector& x) {
    Vector g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = weights[static_cast<size_t>(i / slot)];
      g[i] = w * std::log(std::max(x[i], floor_value) / xi[i]);
    }
    return g;
  };

  Vector x = proj(xi);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = std::max(x[i], 0.0);
  double fx = objective(x);
  double step = 0.25;
  for (int it = 0; it < iters; ++it) {
    const Vector g = gradient(x);
    Vector cand = proj(x - step * g);
    for (Eigen::Index i = 0; i < n; ++i) cand[i] = std::max(cand[i], 0.0);
    double fc = objective(cand);
    int backtracks = 0;
    while (fc > fx - 1e-12 * std::abs(fx) && backtracks < 60) {
      step *= 0.5;
      cand = proj(x - step * g);
      for (Eigen::Index i = 0; i < n; ++i) cand[i] = std::max(cand[i], 0.0);
      fc = objective(cand);
      ++backtracks;
    }
    const double move = (cand - x).cwiseAbs().maxCoeff();
    x = cand;
    fx = fc;
    if (move < tol && backtracks == 0) break;
    if (backtracks == 0) step = std::min(step * 1.6, 4.0);
  }
  return x;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      double tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double lp_vertex_minimum(const Matrix& a, const Vector& b, const Vector& c) {
  const int n = static_cast<int>(a.cols());
  const int rank = static_cast<int>(
      Eigen::CompleteOrthogonalDecomposition<Matrix>(a).rank());

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> support;

  // Enumerate supports of size <= rank; every basic feasible solution shows
  // up for at least one of them.
  std::function<void(int, int)> recurse = [&](int start, int remaining) {
    if (!support.empty()) {
      Matrix sub(a.rows(), static_cast<Eigen::Index>(support.size()));
      for (size_t i = 0; i < support.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = a.col(support[i]);
      const Vector z = sub.completeOrthogonalDecomposition().solve(b);
      if ((sub * z - b).cwiseAbs().maxCoeff() < 1e-9 && (z.array() >= -1e-12).all()) {
        double value = 0.0;
        for (size_t i = 0; i < support.size(); ++i)
          value += c[support[i]] * std::max(z[static_cast<Eigen::Index>(i)], 0.0);
        best = std::min(best, value);
      }
    }
    if (remaining == 0) return;
    for (int j = start; j < n; ++j) {
      support.push_back(j);
      recurse(j + 1, remaining - 1);
      support.pop_back();
    }
  };
  recurse(0, rank);
  return best;
}

namespace {

// Stack the row- and column-sum constraints of an n x m plan (column-major).
void marginal_rows(Matrix& a, Vector& b, const Vector& p, const Vector& q) {
  const int n = static_cast<int>(p.size()), m = static_cast<int>(q.size());
  a = Matrix::Zero(n + m, n * m);
  b.resize(n + m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) a(i, i + n * j) = 1.0;
    b[i] = p[i];
  }
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) a(n + j, i + n * j) = 1.0;
    b[n + j] = q[j];
  }
}

}  // namespace

double lp_transport_value(const Vector& p, const Vector& q, const Matrix& cost) {
  Matrix a;
  Vector b;
  marginal_rows(a, b, p, q);
  return lp_vertex_minimum(a, b, Eigen::Map<const Vector>(cost.data(), cost.size()));
}

double lp_martingale_value(const Vector& p, const Vector& q, const Vector& x,
                           const Vector& y, const Matrix& cost) {
  const int n = static_cast<int>(p.size()), m = static_cast<int>(q.size());
  Matrix a0;
  Vector b0;
  marginal_rows(a0, b0, p, q);
  Matrix a(n + m + n, n * m);
  Vector b(n + m + n);
  a.topRows(n + m) = a0;
  b.head(n + m) = b0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) a(n + m + i, i + n * j) = y[j];
    b[n + m + i] = p[i] * x[i];
  }
  return lp_vertex_minimum(a, b, Eigen::Map<const Vector>(cost.data(), cost.size()));
}

Matrix random_positive_matrix(std::mt19937& rng, int rows, int cols, double lo,
                              double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

Vector random_histogram(std::mt19937& rng, int n, bool normalize) {
  std::uniform_real_distribution<double> dist(0.1, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  if (normalize) v /= v.sum();
  return v;
}

}  // namespace oracle
