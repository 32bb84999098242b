#include "bregmanot/engine.hpp"

#include <cmath>

namespace bregmanot {

namespace {

constexpr int kTrailLength = 16;

double max_violation(const Array& plan,
                     std::span<const ConstraintSet* const> constraints) {
  double r = 0.0;
  for (const ConstraintSet* c : constraints) r = std::max(r, c->violation(plan));
  return r;
}

void push_trail(SolveReport& report, double residual) {
  report.trail.push_back(residual);
  if (report.trail.size() > kTrailLength)
    report.trail.erase(report.trail.begin());
}

void check_kernel(const Array& kernel) {
  if (kernel.size() == 0) throw ShapeMismatch("empty kernel");
  if ((kernel < 0.0).any() || !kernel.isFinite().all())
    throw NonPositiveKernel("kernel entries must be finite and >= 0");
}

}  // namespace

SolveResult bregman_solve(const Array& kernel,
                          std::span<const ConstraintSet* const> constraints,
                          const SolveOptions& options) {
  check_kernel(kernel);
  if (constraints.empty()) throw ShapeMismatch("no constraints");
  if (!options.allow_nonaffine) {
    for (const ConstraintSet* c : constraints)
      if (!c->affine())
        throw NonAffineConstraint(c->name() + " (use dykstra_solve)");
  }

  SolveResult out{kernel, {}};
  Array prev = out.plan;
  Array best = out.plan;
  double best_residual = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    prev = out.plan;
    for (const ConstraintSet* c : constraints) c->project(out.plan);
    if (!out.plan.isFinite().all())
      throw NumericalOverflow("non-finite plan during Bregman cycles");

    out.report.iterations = iter;
    out.report.residual = max_violation(out.plan, constraints);
    out.report.last_change = (out.plan - prev).abs().maxCoeff();
    push_trail(out.report, out.report.residual);

    if (out.report.residual < best_residual) {
      best_residual = out.report.residual;
      best = out.plan;
    }
    if (out.report.residual <= options.tol &&
        out.report.last_change <= options.tol) {
      out.report.status = SolveStatus::kConverged;
      return out;
    }
  }

  out.report.status = SolveStatus::kMaxIterExceeded;
  out.plan = best;
  out.report.residual = best_residual;
  return out;
}

SolveResult dykstra_solve(const Array& kernel,
                          std::span<const ConstraintSet* const> constraints,
                          const SolveOptions& options) {
  check_kernel(kernel);
  if (constraints.empty()) throw ShapeMismatch("no constraints");

  const size_t n_sets = constraints.size();
  SolveResult out{kernel, {}};

  // One multiplicative correction per set, all-ones at start; in log-domain
  // mode the logs are kept instead (zeros of the plan map to -inf, which
  // exponentiates back to an exact 0 contribution).
  std::vector<Array> corrections(
      n_sets, options.log_domain ? Array::Zero(kernel.size()).eval()
                                 : Array::Ones(kernel.size()).eval());

  Array prev_cycle = out.plan;
  Array prev = out.plan;
  Array best = out.plan;
  double best_residual = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    prev_cycle = out.plan;
    for (size_t s = 0; s < n_sets; ++s) {
      prev = out.plan;
      Array& q = corrections[s];
      if (options.log_domain) {
        out.plan = (prev.log() + q).exp();
      } else {
        out.plan = prev * q;
      }
      constraints[s]->project(out.plan);

      // q <- q ⊙ prev/plan with 0/0 := 0. Entries the projection zeroed stay
      // zero in every later cycle, so their correction is dropped as well.
      if (options.log_domain) {
        for (Eigen::Index i = 0; i < q.size(); ++i) {
          if (out.plan[i] > 0.0)
            q[i] += std::log(prev[i]) - std::log(out.plan[i]);
          else
            q[i] = -std::numeric_limits<double>::infinity();
        }
      } else {
        for (Eigen::Index i = 0; i < q.size(); ++i)
          q[i] = out.plan[i] > 0.0 ? q[i] * (prev[i] / out.plan[i]) : 0.0;
        if (!q.isFinite().all())
          throw NumericalOverflow(
              "Dykstra correction out of double range; enable log-domain mode");
      }
    }
    if (!out.plan.isFinite().all())
      throw NumericalOverflow("non-finite plan during Dykstra iterations");

    out.report.iterations = iter;
    out.report.residual = max_violation(out.plan, constraints);
    out.report.last_change = (out.plan - prev_cycle).abs().maxCoeff();
    push_trail(out.report, out.report.residual);

    if (out.report.residual < best_residual) {
      best_residual = out.report.residual;
      best = out.plan;
    }
    if (out.report.residual <= options.tol &&
        out.report.last_change <= options.tol) {
      out.report.status = SolveStatus::kConverged;
      return out;
    }
  }

  out.report.status = SolveStatus::kMaxIterExceeded;
  out.plan = best;
  out.report.residual = best_residual;
  return out;
}

}  // namespace bregmanot
