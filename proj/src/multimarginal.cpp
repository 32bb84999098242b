#include "bregmanot/multimarginal.hpp"

#include <cmath>

namespace bregmanot {

namespace {

std::size_t checked_size(int order, int side, std::size_t guard) {
  if (order < 1 || side < 1) throw ShapeMismatch("tensor order/side must be >= 1");
  std::size_t n = 1;
  for (int k = 0; k < order; ++k) {
    if (n > guard / static_cast<std::size_t>(side))
      throw MemoryGuard("dense coupling would exceed " + std::to_string(guard) +
                        " scalars");
    n *= static_cast<std::size_t>(side);
  }
  return n;
}

// Accumulate S_slot over a flat tensor.
void push_forward_into(const Array& values, int order, int side, int slot,
                       Vector& out) {
  if (slot < 0 || slot >= order) throw IndexOutOfRange("marginal slot");
  std::size_t stride = 1;
  for (int k = 0; k < slot; ++k) stride *= static_cast<std::size_t>(side);
  const std::size_t period = stride * static_cast<std::size_t>(side);
  const std::size_t total = static_cast<std::size_t>(values.size());

  out.setZero(side);
  for (std::size_t base = 0; base < total; base += period)
    for (int d = 0; d < side; ++d) {
      const double* v = values.data() + base + stride * static_cast<std::size_t>(d);
      double acc = 0.0;
      for (std::size_t i = 0; i < stride; ++i) acc += v[i];
      out[d] += acc;
    }
}

// Multiply slice j_slot = d by factor[d], for every d.
void scale_slices(Array& values, int order, int side, int slot,
                  const Vector& factor) {
  std::size_t stride = 1;
  for (int k = 0; k < slot; ++k) stride *= static_cast<std::size_t>(side);
  const std::size_t period = stride * static_cast<std::size_t>(side);
  const std::size_t total = static_cast<std::size_t>(values.size());
  (void)order;

  for (std::size_t base = 0; base < total; base += period)
    for (int d = 0; d < side; ++d) {
      double* v = values.data() + base + stride * static_cast<std::size_t>(d);
      const double f = factor[d];
      for (std::size_t i = 0; i < stride; ++i) v[i] *= f;
    }
}

Vector slice_scaling(const Vector& target, const Vector& sums) {
  Vector f(target.size());
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    if (sums[i] > 0.0)
      f[i] = target[i] / sums[i];
    else if (target[i] > 0.0)
      throw InfeasibleZeroSlice("positive marginal mass on an all-zero slice");
    else
      f[i] = 0.0;
  }
  return f;
}

}  // namespace

DenseTensor::DenseTensor(int order, int side, std::size_t guard)
    : order_(order), side_(side) {
  values.setZero(static_cast<Eigen::Index>(checked_size(order, side, guard)));
}

std::size_t DenseTensor::stride(int slot) const {
  if (slot < 0 || slot >= order_) throw IndexOutOfRange("tensor slot");
  std::size_t s = 1;
  for (int k = 0; k < slot; ++k) s *= static_cast<std::size_t>(side_);
  return s;
}

double& DenseTensor::at(std::span<const int> index) {
  return values[static_cast<Eigen::Index>(
      [&] {
        std::size_t flat = 0, s = 1;
        for (int k = 0; k < order_; ++k, s *= static_cast<std::size_t>(side_))
          flat += s * static_cast<std::size_t>(index[static_cast<std::size_t>(k)]);
        return flat;
      }())];
}

double DenseTensor::at(std::span<const int> index) const {
  return const_cast<DenseTensor*>(this)->at(index);
}

Vector push_forward(const DenseTensor& coupling, int slot) {
  Vector out;
  push_forward_into(coupling.values, coupling.order(), coupling.side(), slot, out);
  return out;
}

DenseTensor project_marginal_k(DenseTensor coupling, int slot, const Vector& target) {
  if (target.size() != coupling.side()) throw ShapeMismatch("marginal length");
  Vector sums;
  push_forward_into(coupling.values, coupling.order(), coupling.side(), slot, sums);
  scale_slices(coupling.values, coupling.order(), coupling.side(), slot,
               slice_scaling(target, sums));
  return coupling;
}

// ---- generic-engine adapters ------------------------------------------------

TensorMarginalSet::TensorMarginalSet(int order, int side, int slot, Vector target)
    : order_(order), side_(side), slot_(slot), target_(std::move(target)) {
  if (slot < 0 || slot >= order) throw IndexOutOfRange("marginal slot");
  if (target_.size() != side) throw ShapeMismatch("marginal length");
}

void TensorMarginalSet::project(Array& plan) const {
  Vector sums;
  push_forward_into(plan, order_, side_, slot_, sums);
  scale_slices(plan, order_, side_, slot_, slice_scaling(target_, sums));
}

double TensorMarginalSet::violation(const Array& plan) const {
  Vector sums;
  push_forward_into(plan, order_, side_, slot_, sums);
  return (sums - target_).cwiseAbs().maxCoeff();
}

std::string TensorMarginalSet::name() const {
  return "S_" + std::to_string(slot_) + "=p";
}

TensorMarginalLeqSet::TensorMarginalLeqSet(int order, int side, int slot, Vector bound)
    : order_(order), side_(side), slot_(slot), bound_(std::move(bound)) {
  if (slot < 0 || slot >= order) throw IndexOutOfRange("marginal slot");
  if (bound_.size() != side) throw ShapeMismatch("marginal length");
}

void TensorMarginalLeqSet::project(Array& plan) const {
  Vector sums;
  push_forward_into(plan, order_, side_, slot_, sums);
  Vector f(sums.size());
  for (Eigen::Index i = 0; i < sums.size(); ++i)
    f[i] = sums[i] > bound_[i] ? bound_[i] / sums[i] : 1.0;
  scale_slices(plan, order_, side_, slot_, f);
}

double TensorMarginalLeqSet::violation(const Array& plan) const {
  Vector sums;
  push_forward_into(plan, order_, side_, slot_, sums);
  return (sums - bound_).cwiseMax(0.0).maxCoeff();
}

std::string TensorMarginalLeqSet::name() const {
  return "S_" + std::to_string(slot_) + "<=p";
}

// ---- solver ------------------------------------------------------------------

MultimarginalResult multimarginal_solve(const DenseTensor& kernel,
                                        const std::vector<Vector>& marginals,
                                        const MultimarginalOptions& options) {
  const int K = kernel.order();
  const int N = kernel.side();
  if (static_cast<int>(marginals.size()) != K)
    throw ShapeMismatch("need one marginal per tensor slot");
  const double mass0 = marginals.front().sum();
  for (const Vector& p : marginals) {
    validate_histogram(p);
    if (p.size() != N) throw ShapeMismatch("marginal length");
    if (std::abs(p.sum() - mass0) > 1e-9 * std::max(mass0, 1e-300))
      throw MassMismatch("marginals carry different total masses");
  }

  MultimarginalResult result{DenseTensor(K, N), {}, {}};
  result.coupling.values = kernel.values;
  if (options.use_scalings) result.scalings.assign(K, Vector::Ones(N));

  Vector sums;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    double change = 0.0;
    for (int k = 0; k < K; ++k) {
      push_forward_into(result.coupling.values, K, N, k, sums);
      const Vector f = slice_scaling(marginals[k], sums);
      scale_slices(result.coupling.values, K, N, k, f);
      if (options.use_scalings) {
        Vector& u = result.scalings[k];
        change = std::max(change, (u.cwiseProduct(f) - u).cwiseAbs().maxCoeff());
        u = u.cwiseProduct(f);
      }
    }

    double residual = 0.0;
    for (int k = 0; k < K; ++k) {
      push_forward_into(result.coupling.values, K, N, k, sums);
      residual = std::max(residual, (sums - marginals[k]).cwiseAbs().maxCoeff());
    }
    result.report.iterations = iter;
    result.report.residual = residual;
    result.report.last_change = change;
    if (residual <= options.tol) {
      result.report.status = SolveStatus::kConverged;
      return result;
    }
  }
  result.report.status = SolveStatus::kMaxIterExceeded;
  return result;
}

DenseTensor barycenter_cost_tensor(const Matrix& points, const Vector& lambda,
                                   std::size_t guard) {
  validate_simplex_weights(lambda);
  const int N = static_cast<int>(points.rows());
  const int K = static_cast<int>(lambda.size());
  const int d = static_cast<int>(points.cols());

  DenseTensor cost(K, N, guard);
  std::vector<int> digits(static_cast<std::size_t>(K), 0);
  Vector mean(d);
  const std::size_t total = cost.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    mean.setZero();
    for (int k = 0; k < K; ++k)
      mean += lambda[k] * points.row(digits[static_cast<std::size_t>(k)]).transpose();
    double c = 0.0;
    for (int k = 0; k < K; ++k)
      c += 0.5 * lambda[k] *
           (points.row(digits[static_cast<std::size_t>(k)]).transpose() - mean)
               .squaredNorm();
    cost.values[static_cast<Eigen::Index>(flat)] = c;

    for (int k = 0; k < K; ++k) {  // odometer
      if (++digits[static_cast<std::size_t>(k)] < N) break;
      digits[static_cast<std::size_t>(k)] = 0;
    }
  }
  return cost;
}

WeightedPointCloud barycenter_measure(const DenseTensor& coupling,
                                      const Matrix& points, const Vector& lambda,
                                      double drop_threshold) {
  validate_simplex_weights(lambda);
  const int K = coupling.order();
  const int N = coupling.side();
  if (points.rows() != N) throw ShapeMismatch("points vs tensor side");
  const double total = coupling.values.sum();
  const double cutoff = drop_threshold * total;

  std::vector<int> digits(static_cast<std::size_t>(K), 0);
  std::vector<Vector> locs;
  std::vector<double> masses;
  double dropped = 0.0;
  const std::size_t n_entries = coupling.size();
  for (std::size_t flat = 0; flat < n_entries; ++flat) {
    const double w = coupling.values[static_cast<Eigen::Index>(flat)];
    if (w > cutoff) {
      Vector loc = Vector::Zero(points.cols());
      for (int k = 0; k < K; ++k)
        loc += lambda[k] * points.row(digits[static_cast<std::size_t>(k)]).transpose();
      locs.push_back(std::move(loc));
      masses.push_back(w);
    } else {
      dropped += w;
    }
    for (int k = 0; k < K; ++k) {
      if (++digits[static_cast<std::size_t>(k)] < N) break;
      digits[static_cast<std::size_t>(k)] = 0;
    }
  }

  WeightedPointCloud cloud;
  cloud.points.resize(static_cast<Eigen::Index>(locs.size()), points.cols());
  cloud.masses.resize(static_cast<Eigen::Index>(masses.size()));
  for (size_t i = 0; i < locs.size(); ++i) {
    cloud.points.row(static_cast<Eigen::Index>(i)) = locs[i].transpose();
    cloud.masses[static_cast<Eigen::Index>(i)] = masses[i];
  }
  cloud.dropped_mass = dropped;
  return cloud;
}

Histogram bin_point_cloud(const WeightedPointCloud& cloud, const GridSpec& grid) {
  const int d = static_cast<int>(grid.dims.size());
  if (cloud.points.cols() != d || grid.lo.size() != d)
    throw ShapeMismatch("grid dimension vs cloud dimension");

  std::size_t cells = 1;
  for (int ax = 0; ax < d; ++ax) cells *= static_cast<std::size_t>(grid.dims[ax]);
  Histogram out = Histogram::Zero(static_cast<Eigen::Index>(cells));

  for (Eigen::Index i = 0; i < cloud.masses.size(); ++i) {
    std::size_t flat = 0, stride = 1;
    for (int ax = 0; ax < d; ++ax) {
      const double u = (cloud.points(i, ax) - grid.lo[ax]) / grid.cell;
      if (u < 0.0 || u > grid.dims[static_cast<std::size_t>(ax)])
        throw PointOutsideGrid("point falls outside the binning grid");
      // Ties on a shared edge go to the lower-index cell.
      long idx = static_cast<long>(std::ceil(u)) - 1;
      if (idx < 0) idx = 0;
      flat += stride * static_cast<std::size_t>(idx);
      stride *= static_cast<std::size_t>(grid.dims[static_cast<std::size_t>(ax)]);
    }
    out[static_cast<Eigen::Index>(flat)] += cloud.masses[i];
  }
  return out;
}

}  // namespace bregmanot
