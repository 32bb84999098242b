#include "bregmanot/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "bregmanot/barycenter.hpp"
#include "bregmanot/constrained.hpp"
#include "bregmanot/entropic_ot.hpp"
#include "bregmanot/euler_flow.hpp"
#include "bregmanot/io.hpp"
#include "bregmanot/lifting.hpp"
#include "bregmanot/martingale.hpp"
#include "bregmanot/multimarginal.hpp"
#include "bregmanot/tomography.hpp"

namespace bregmanot {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOpts {
  double gamma = 0.0;
  double gamma_rel = 0.0;  // gamma = g * median(C) convenience
  double tol = 1e-6;
  int max_iter = 10000;
  bool log_domain = false;
  std::string out = ".";
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_gamma = true) {
  auto* g = cmd->add_option("--gamma", o.gamma, "entropic regularization");
  auto* gr = cmd->add_option("--gamma-rel", o.gamma_rel,
                             "gamma as a multiple of median(C)");
  if (needs_gamma) {
    g->excludes(gr);
    gr->excludes(g);
  }
  cmd->add_option("--tol", o.tol, "convergence tolerance");
  cmd->add_option("--max-iter", o.max_iter, "iteration cap");
  cmd->add_flag("--log-domain", o.log_domain, "stabilized log-domain scalings");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--threads", o.threads,
                  "worker threads (BREGMANOT_THREADS overrides)");
}

void apply_threads(const CommonOpts& o) {
  int threads = o.threads;
  if (const char* env = std::getenv("BREGMANOT_THREADS")) threads = std::atoi(env);
  if (threads > 0) Eigen::setNbThreads(threads);
}

double resolve_gamma(const CommonOpts& o, const Matrix& cost) {
  if (o.gamma > 0.0) return o.gamma;
  if (o.gamma_rel > 0.0) return o.gamma_rel * median_cost(cost);
  throw NonPositiveGamma("provide --gamma or --gamma-rel");
}

std::string out_path(const CommonOpts& o, const std::string& name) {
  fs::create_directories(o.out);
  return (fs::path(o.out) / name).string();
}

Vector load_histogram(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".pgm")
    return pgm_to_histogram(read_pgm(path));
  return read_vector_csv(path);
}

const char* status_name(SolveStatus s) {
  return s == SolveStatus::kConverged ? "converged" : "max_iter_exceeded";
}

int finish(const json& diag, SolveStatus status) {
  std::cout << diag.dump() << "\n";
  return status == SolveStatus::kConverged ? 0 : 2;
}

// Square heatmap written both ways: exact CSV and a PGM preview.
void emit_matrix(const CommonOpts& o, const std::string& stem, const Matrix& m,
                 json& outputs) {
  const std::string csv = out_path(o, stem + ".csv");
  write_matrix_csv(csv, m);
  outputs.push_back(csv);
  const std::string pgm = out_path(o, stem + ".pgm");
  write_pgm(pgm, matrix_to_pgm(m));
  outputs.push_back(pgm);
}

int cmd_sinkhorn(const CommonOpts& o, const std::string& p_path,
                 const std::string& q_path, const std::string& cost_path) {
  apply_threads(o);
  const Vector p = load_histogram(p_path);
  const Vector q = load_histogram(q_path);
  CostMatrix cost;
  cost.entries = read_matrix_csv(cost_path);
  const double gamma = resolve_gamma(o, cost.entries);
  const GibbsKernelDense kernel = build_gibbs(cost, gamma);
  if (kernel.underflowed && !o.log_domain)
    std::cerr << "warning: kernel underflowed to zero entries; "
                 "consider --log-domain\n";

  SinkhornOptions opts;
  opts.tol = o.tol;
  opts.max_iter = o.max_iter;
  opts.log_domain = o.log_domain;
  const SinkhornResult res = sinkhorn(kernel, p, q, opts);
  const Matrix plan = materialize_plan(kernel, res);
  const TransportCost tc = transport_cost(plan, cost.entries, gamma);

  json outputs = json::array();
  const std::string plan_path = out_path(o, "plan.csv");
  write_matrix_csv(plan_path, plan);
  outputs.push_back(plan_path);

  json diag{{"command", "sinkhorn"},
            {"status", status_name(res.report.status)},
            {"iterations", res.report.iterations},
            {"residual", res.report.residual},
            {"gamma", gamma},
            {"cost", tc.linear},
            {"regularized_cost", tc.regularized},
            {"outputs", outputs}};
  return finish(diag, res.report.status);
}

int cmd_barycenter(const CommonOpts& o, const std::vector<std::string>& marginal_paths,
                   std::vector<double> weights, const std::string& cost_path,
                   int grid_side) {
  apply_threads(o);
  BarycenterProblem problem;
  for (const auto& path : marginal_paths)
    problem.marginals.push_back(load_histogram(path));
  const size_t K = problem.marginals.size();
  if (weights.empty()) weights.assign(K, 1.0 / static_cast<double>(K));
  problem.weights = Eigen::Map<Vector>(weights.data(), static_cast<Eigen::Index>(K));

  std::unique_ptr<KernelOp> kernel;
  double gamma = o.gamma;
  if (!cost_path.empty()) {
    const Matrix cost = read_matrix_csv(cost_path);
    gamma = resolve_gamma(o, cost);
    kernel = std::make_unique<DenseKernelOp>(Matrix((-cost / gamma).array().exp()));
  } else {
    if (grid_side <= 0) throw Error("provide --cost or --grid-side");
    if (!(gamma > 0.0)) throw NonPositiveGamma("provide --gamma");
    kernel = std::make_unique<SeparableKernelOp>(build_gibbs_grid2d(grid_side, gamma));
  }

  BarycenterOptions opts;
  opts.tol = o.tol;
  opts.max_iter = o.max_iter;
  const BarycenterResult res = barycenter_solve(*kernel, problem, opts);

  json outputs = json::array();
  const std::string bary_path = out_path(o, "barycenter.csv");
  write_vector_csv(bary_path, res.barycenter);
  outputs.push_back(bary_path);
  if (grid_side > 0) {
    Eigen::Map<const Matrix> img(res.barycenter.data(), grid_side, grid_side);
    const std::string pgm = out_path(o, "barycenter.pgm");
    write_pgm(pgm, matrix_to_pgm(img));
    outputs.push_back(pgm);
  }

  json diag{{"command", "barycenter"},
            {"status", status_name(res.report.status)},
            {"iterations", res.report.iterations},
            {"residual", res.report.residual},
            {"gamma", gamma},
            {"mass", res.barycenter.sum()},
            {"outputs", outputs}};
  return finish(diag, res.report.status);
}

int cmd_multimarginal(const CommonOpts& o, const std::vector<std::string>& marginal_paths,
                      const std::string& points_path, std::vector<double> weights,
                      int bin_side) {
  apply_threads(o);
  std::vector<Vector> marginals;
  for (const auto& path : marginal_paths) marginals.push_back(load_histogram(path));
  const int K = static_cast<int>(marginals.size());
  if (weights.empty()) weights.assign(static_cast<size_t>(K), 1.0 / K);
  const Vector lambda =
      Eigen::Map<Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));

  const Matrix points = read_matrix_csv(points_path);
  if (!(o.gamma > 0.0)) throw NonPositiveGamma("provide --gamma");
  DenseTensor cost = barycenter_cost_tensor(points, lambda);
  DenseTensor kernel(cost.order(), cost.side());
  kernel.values = (-cost.values / o.gamma).exp();

  MultimarginalOptions opts;
  opts.tol = o.tol;
  opts.max_iter = o.max_iter;
  const MultimarginalResult res = multimarginal_solve(kernel, marginals, opts);

  json outputs = json::array();
  for (int k = 0; k < K; ++k) {
    const std::string path = out_path(o, "pushforward_" + std::to_string(k) + ".csv");
    write_vector_csv(path, push_forward(res.coupling, k));
    outputs.push_back(path);
  }
  if (bin_side > 0) {
    const WeightedPointCloud cloud = barycenter_measure(res.coupling, points, lambda);
    GridSpec grid;
    grid.lo = Vector::Zero(points.cols());
    grid.cell = 1.0 / bin_side;
    grid.dims.assign(static_cast<size_t>(points.cols()), bin_side);
    const Histogram binned = bin_point_cloud(cloud, grid);
    const std::string path = out_path(o, "barycenter_measure.csv");
    write_vector_csv(path, binned);
    outputs.push_back(path);
    if (points.cols() == 2) {
      Eigen::Map<const Matrix> img(binned.data(), bin_side, bin_side);
      const std::string pgm = out_path(o, "barycenter_measure.pgm");
      write_pgm(pgm, matrix_to_pgm(img));
      outputs.push_back(pgm);
    }
  }

  json diag{{"command", "multimarginal"},
            {"status", status_name(res.report.status)},
            {"iterations", res.report.iterations},
            {"residual", res.report.residual},
            {"gamma", o.gamma},
            {"outputs", outputs}};
  return finish(diag, res.report.status);
}

int cmd_euler(const CommonOpts& o, int n, int k_steps, const std::string& map_name) {
  apply_threads(o);
  if (!(o.gamma > 0.0)) throw NonPositiveGamma("provide --gamma");
  std::vector<int> sigma;
  if (map_name == "invert")
    sigma = euler_map_invert(n);
  else if (map_name == "shift")
    sigma = euler_map_shift_half(n);
  else if (map_name == "tent")
    sigma = euler_map_tent(n);
  else
    throw Error("unknown --map (use invert|shift|tent)");

  const FactoredEulerKernel kernel =
      build_euler_kernel(euler_grid(n), sigma, k_steps, o.gamma);
  EulerOptions opts;
  opts.tol = o.tol;
  opts.max_iter = o.max_iter;
  SolveReport report;
  const EulerScalings scalings = ipfp_factored(kernel, opts, &report);

  json outputs = json::array();
  for (int k = 0; k < k_steps; ++k) {
    const Matrix t = transition_matrix(scalings, kernel, k);
    emit_matrix(o, "transition_" + std::to_string(k), t, outputs);
  }

  json diag{{"command", "euler-flow"},
            {"status", status_name(report.status)},
            {"sweeps", report.iterations},
            {"residual", report.residual},
            {"gamma", o.gamma},
            {"outputs", outputs}};
  return finish(diag, report.status);
}

int cmd_partial(const CommonOpts& o, const std::string& p_path,
                const std::string& q_path, const std::string& cost_path,
                int grid_side, double mass, double mass_frac, double eta,
                bool emit_plan) {
  apply_threads(o);
  PartialProblem problem;
  problem.p = load_histogram(p_path);
  problem.q = load_histogram(q_path);
  problem.eta = eta;
  const double min_mass = std::min(problem.p.sum(), problem.q.sum());
  problem.mass = mass_frac > 0.0 ? mass_frac * min_mass : mass;

  std::unique_ptr<KernelOp> kernel;
  double gamma = o.gamma;
  if (!cost_path.empty()) {
    const Matrix cost = read_matrix_csv(cost_path);
    gamma = resolve_gamma(o, cost);
    kernel = std::make_unique<DenseKernelOp>(Matrix((-cost / gamma).array().exp()));
  } else {
    if (grid_side <= 0) throw Error("provide --cost or --grid-side");
    if (!(gamma > 0.0)) throw NonPositiveGamma("provide --gamma");
    kernel = std::make_unique<SeparableKernelOp>(build_gibbs_grid2d(grid_side, gamma));
  }

  SolveOptions opts;
  opts.tol = o.tol;
  opts.max_iter = o.max_iter;
  const PartialResult res = partial_transport(*kernel, problem, opts);
  const auto [src, dst] =
      active_regions(res.row_sums, res.col_sums, problem.mass, problem.eta);

  json outputs = json::array();
  const std::string rows_path = out_path(o, "row_marginal.csv");
  write_vector_csv(rows_path, res.row_sums);
  outputs.push_back(rows_path);
  const std::string cols_path = out_path(o, "col_marginal.csv");
  write_vector_csv(cols_path, res.col_sums);
  outputs.push_back(cols_path);

  auto mask_image = [&](const std::vector<bool>& mask) {
    Matrix m(mask.size(), 1);
    for (size_t i = 0; i < mask.size(); ++i)
      m(static_cast<Eigen::Index>(i), 0) = mask[i] ? 1.0 : 0.0;
    if (grid_side > 0)
      return Matrix(Eigen::Map<const Matrix>(m.data(), grid_side, grid_side));
    return m;
  };
  const std::string src_path = out_path(o, "active_source.pgm");
  write_pgm(src_path, matrix_to_pgm(mask_image(src), 255));
  outputs.push_back(src_path);
  const std::string dst_path = out_path(o, "active_target.pgm");
  write_pgm(dst_path, matrix_to_pgm(mask_image(dst), 255));
  outputs.push_back(dst_path);
  if (emit_plan) {
    const std::string plan_path = out_path(o, "plan.csv");
    write_matrix_csv(plan_path, res.plan(*kernel));
    outputs.push_back(plan_path);
  }

  json diag{{"command", "partial"},
            {"status", status_name(res.report.status)},
            {"iterations", res.report.iterations},
            {"residual", res.report.residual},
            {"gamma", gamma},
            {"mass", problem.mass},
            {"transported_mass", res.row_sums.sum()},
            {"outputs", outputs}};
  return finish(diag, res.report.status);
}

int cmd_capacity(const CommonOpts& o, const std::string& p_path,
                 const std::string& q_path, const std::string& cost_path,
                 double theta_scalar, const std::string& theta_path) {
  apply_threads(o);
  CapacityProblem problem;
  problem.p = load_histogram(p_path);
  problem.q = load_histogram(q_path);
  CostMatrix cost;
  cost.entries = read_matrix_csv(cost_path);
  const double gamma = resolve_gamma(o, cost);
  const GibbsKernelDense kernel = build_gibbs(cost, gamma);
  if (!theta_path.empty())
    problem.theta = read_matrix_csv(theta_path);
  else if (theta_scalar > 0.0)
    problem.theta = Matrix::Constant(problem.p.size(), problem.q.size(),
                                     theta_scalar);
  else
    throw Error("provide --theta or --theta-csv");

  SolveOptions opts;
  opts.tol = o.tol;
  opts.max_iter = o.max_iter;
  opts.log_domain = o.log_domain;
  const CapacityResult res = capacity_transport(kernel, problem, opts);

  json outputs = json::array();
  const std::string plan_path = out_path(o, "plan.csv");
  write_matrix_csv(plan_path, res.plan);
  outputs.push_back(plan_path);

  json diag{{"command", "capacity"},
            {"status", status_name(res.report.status)},
            {"iterations", res.report.iterations},
            {"residual", res.report.residual},
            {"gamma", gamma},
            {"cost", res.plan.cwiseProduct(cost.entries).sum()},
            {"outputs", outputs}};
  if (res.report.status != SolveStatus::kConverged)
    diag["residual_trail"] = res.report.trail;
  return finish(diag, res.report.status);
}

int cmd_partial_mm(const CommonOpts& o, const std::vector<std::string>& marginal_paths,
                   const std::string& points_path, double mass_frac, double eta) {
  apply_threads(o);
  std::vector<Vector> marginals;
  for (const auto& path : marginal_paths) marginals.push_back(load_histogram(path));
  const int K = static_cast<int>(marginals.size());
  const Matrix points = read_matrix_csv(points_path);
  if (!(o.gamma > 0.0)) throw NonPositiveGamma("provide --gamma");

  const Vector lambda = Vector::Constant(K, 1.0 / K);
  DenseTensor cost = barycenter_cost_tensor(points, lambda);
  // Pairwise quadratic cost of the partial multi-marginal problem: the
  // barycentric form differs from sum_{s<t} ||x_s - x_t||^2/2 by the constant
  // factor K, absorbed into gamma here.
  DenseTensor kernel(cost.order(), cost.side());
  kernel.values = (-cost.values * static_cast<double>(K) / o.gamma).exp();

  double min_mass = std::numeric_limits<double>::infinity();
  for (const Vector& p : marginals) min_mass = std::min(min_mass, p.sum());
  const double mass = mass_frac * min_mass;

  SolveOptions opts;
  opts.tol = o.tol;
  opts.max_iter = o.max_iter;
  const MultimarginalPartialResult res =
      multimarginal_partial(kernel, marginals, mass, opts);

  json outputs = json::array();
  for (int k = 0; k < K; ++k) {
    const Vector pf = push_forward(res.coupling, k);
    const std::string path = out_path(o, "marginal_" + std::to_string(k) + ".csv");
    write_vector_csv(path, pf);
    outputs.push_back(path);
    Matrix mask(pf.size(), 1);
    for (Eigen::Index i = 0; i < pf.size(); ++i)
      mask(i, 0) = mass > 0.0 && pf[i] / mass >= eta ? 1.0 : 0.0;
    const std::string mask_path = out_path(o, "active_" + std::to_string(k) + ".pgm");
    write_pgm(mask_path, matrix_to_pgm(mask, 255));
    outputs.push_back(mask_path);
  }

  json diag{{"command", "partial-mm"},
            {"status", status_name(res.report.status)},
            {"iterations", res.report.iterations},
            {"residual", res.report.residual},
            {"gamma", o.gamma},
            {"mass", mass},
            {"outputs", outputs}};
  return finish(diag, res.report.status);
}

int cmd_martingale(const CommonOpts& o, bool lognormal, double sigma0_sq,
                   double sigma1_sq, int n, const std::string& x_path,
                   const std::string& y_path, const std::string& p_path,
                   const std::string& q_path, const std::string& cost_path) {
  apply_threads(o);
  MartingaleProblem problem;
  if (lognormal) {
    if (!(o.gamma > 0.0)) throw NonPositiveGamma("provide --gamma");
    problem = build_lognormal_case(n, sigma0_sq, sigma1_sq, o.gamma);
    if (problem.truncated_tails)
      std::cerr << "warning: grid truncates more than 1e-4 tail mass\n";
  } else {
    problem.x = read_vector_csv(x_path);
    problem.y = read_vector_csv(y_path);
    problem.p = load_histogram(p_path);
    problem.q = load_histogram(q_path);
    problem.cost = read_matrix_csv(cost_path);
    problem.gamma = resolve_gamma(o, problem.cost);
  }

  SolveOptions opts;
  opts.tol = o.tol;
  opts.max_iter = o.max_iter;
  const MartingaleResult res = martingale_solve(problem, opts);

  json outputs = json::array();
  const std::string plan_path = out_path(o, "plan.csv");
  write_matrix_csv(plan_path, res.plan);
  outputs.push_back(plan_path);
  const std::string marg_path = out_path(o, "marginals.csv");
  Matrix marg(problem.p.size(), 4);
  marg.col(0) = row_marginal(res.plan);
  marg.col(1) = problem.p;
  marg.col(2) = col_marginal(res.plan);
  marg.col(3) = problem.q;
  write_matrix_csv(marg_path, marg);
  outputs.push_back(marg_path);

  json diag{{"command", "martingale"},
            {"status", status_name(res.report.status)},
            {"iterations", res.report.iterations},
            {"residual", res.report.residual},
            {"martingale_residual", res.martingale_residual},
            {"gamma", problem.gamma},
            {"cost", res.cost_linear},
            {"outputs", outputs}};
  if (res.report.status != SolveStatus::kConverged)
    diag["residual_trail"] = res.report.trail;
  return finish(diag, res.report.status);
}

int cmd_radon(const CommonOpts& o, const std::string& mode,
              const std::string& image_path, const std::string& sinogram_path,
              const std::string& template_path, int k_angles, double lambda1) {
  apply_threads(o);
  if (mode == "forward") {
    const Vector image = load_histogram(image_path);
    const int n0 = static_cast<int>(std::lround(std::sqrt(double(image.size()))));
    RadonOperator op(n0, uniform_angles(k_angles));
    Matrix sino(k_angles, n0);
    for (int k = 0; k < k_angles; ++k)
      sino.row(k) = op.radon(image, k).transpose();
    json outputs = json::array();
    const std::string path = out_path(o, "sinogram.csv");
    write_matrix_csv(path, sino);
    outputs.push_back(path);
    json diag{{"command", "radon"}, {"mode", "forward"}, {"status", "converged"},
              {"outputs", outputs}};
    return finish(diag, SolveStatus::kConverged);
  }

  const Matrix sino = read_matrix_csv(sinogram_path);
  const int K = static_cast<int>(sino.rows());
  const int n0 = static_cast<int>(sino.cols());
  RadonOperator op(n0, uniform_angles(K));
  std::vector<Vector> measurements;
  for (int k = 0; k < K; ++k) measurements.push_back(sino.row(k).transpose());

  if (mode == "lsq") {
    SolveReport report;
    const Vector f = least_squares_inverse(op, measurements, 1e-10, &report);
    json outputs = json::array();
    Eigen::Map<const Matrix> img(f.data(), n0, n0);
    const std::string csv = out_path(o, "lsq.csv");
    write_matrix_csv(csv, img);
    outputs.push_back(csv);
    const std::string pgm = out_path(o, "lsq.pgm");
    write_pgm(pgm, matrix_to_pgm(img));
    outputs.push_back(pgm);
    json diag{{"command", "radon"},       {"mode", "lsq"},
              {"status", "converged"},    {"cg_iterations", report.iterations},
              {"cg_residual", report.residual}, {"outputs", outputs}};
    return finish(diag, SolveStatus::kConverged);
  }

  if (mode != "reconstruct") throw Error("unknown --mode (forward|lsq|reconstruct)");
  ReconstructionProblem problem{op, load_histogram(template_path), measurements,
                                lambda1, o.gamma > 0.0 ? o.gamma : 2.0};
  SolveOptions opts;
  opts.tol = o.tol;
  opts.max_iter = o.max_iter;
  const ReconstructionResult res = ot_reconstruct(problem, opts);
  if (res.renormalized_measurements)
    std::cerr << "warning: measurements renormalized to the template mass\n";

  json outputs = json::array();
  Eigen::Map<const Matrix> img(res.image.data(), n0, n0);
  const std::string csv = out_path(o, "reconstruction.csv");
  write_matrix_csv(csv, img);
  outputs.push_back(csv);
  const std::string pgm = out_path(o, "reconstruction.pgm");
  write_pgm(pgm, matrix_to_pgm(img));
  outputs.push_back(pgm);

  json diag{{"command", "radon"},
            {"mode", "reconstruct"},
            {"status", status_name(res.report.status)},
            {"iterations", res.report.iterations},
            {"residual", res.report.residual},
            {"lambda1", problem.lambda1},
            {"gamma", problem.gamma},
            {"outputs", outputs}};
  return finish(diag, res.report.status);
}

int cmd_lifted(const CommonOpts& o, const std::string& p_path,
               const std::string& q_path, const std::string& cost_path,
               const std::string& mode_name, std::vector<double> weights,
               double mass) {
  apply_threads(o);
  const Vector p = load_histogram(p_path);
  const Vector q = load_histogram(q_path);
  CostMatrix cost;
  cost.entries = read_matrix_csv(cost_path);
  const double gamma = resolve_gamma(o, cost);
  const GibbsKernelDense kernel = build_gibbs(cost, gamma);

  const LiftedMode mode =
      mode_name == "dykstra" ? LiftedMode::kDykstra : LiftedMode::kBregman;

  std::vector<const ConstraintSet*> sets;
  RowMarginalSet rows(p, q.size());
  ColMarginalSet cols(q, p.size());
  RowUpperBoundSet rows_leq(p, q.size());
  ColUpperBoundSet cols_leq(q, p.size());
  TotalMassSet total(mass);
  if (mass > 0.0) {
    sets = {&rows_leq, &cols_leq, &total};
  } else {
    sets = {&rows, &cols};
  }
  if (weights.empty())
    weights.assign(sets.size(), 1.0 / static_cast<double>(sets.size()));
  const Vector lambda =
      Eigen::Map<Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));

  SolveOptions opts;
  opts.tol = o.tol;
  opts.max_iter = o.max_iter;
  const LiftedResult res = lifted_solve(kernel.entries, sets, lambda, mode, opts);

  json outputs = json::array();
  const std::string plan_path = out_path(o, "plan.csv");
  write_matrix_csv(plan_path, res.plan);
  outputs.push_back(plan_path);

  json diag{{"command", "lifted"},
            {"status", status_name(res.report.status)},
            {"iterations", res.report.iterations},
            {"residual", res.report.residual},
            {"gamma", gamma},
            {"outputs", outputs}};
  return finish(diag, res.report.status);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"entropic transport solvers via iterative KL projections"};
  app.require_subcommand(1);

  // sinkhorn
  CommonOpts so;
  std::string s_p, s_q, s_cost;
  auto* sink = app.add_subcommand("sinkhorn", "two-marginal entropic transport");
  sink->add_option("--p", s_p)->required();
  sink->add_option("--q", s_q)->required();
  sink->add_option("--cost", s_cost)->required();
  add_common(sink, so);

  // barycenter
  CommonOpts bo;
  std::vector<std::string> b_marginals;
  std::vector<double> b_weights;
  std::string b_cost;
  int b_grid = 0;
  auto* bary = app.add_subcommand("barycenter", "weighted transport barycenter");
  bary->add_option("--marginal", b_marginals)->required();
  bary->add_option("--weights", b_weights);
  bary->add_option("--cost", b_cost);
  bary->add_option("--grid-side", b_grid, "unit-square grid side (separable kernel)");
  add_common(bary, bo);

  // multimarginal
  CommonOpts mo;
  std::vector<std::string> m_marginals;
  std::vector<double> m_weights;
  std::string m_points;
  int m_bin = 0;
  auto* mm = app.add_subcommand("multimarginal", "dense K-marginal transport");
  mm->add_option("--marginal", m_marginals)->required();
  mm->add_option("--points", m_points)->required();
  mm->add_option("--weights", m_weights);
  mm->add_option("--bin-side", m_bin, "emit the binned barycenter measure");
  add_common(mm, mo);

  // euler-flow
  CommonOpts eo;
  int e_n = 200, e_k = 16;
  std::string e_map = "invert";
  auto* euler = app.add_subcommand("euler-flow", "generalized incompressible flow");
  euler->add_option("--n", e_n);
  euler->add_option("--k", e_k);
  euler->add_option("--map", e_map, "invert|shift|tent");
  add_common(euler, eo);

  // partial
  CommonOpts po;
  std::string p_p, p_q, p_cost;
  int p_grid = 0;
  double p_mass = 0.0, p_frac = 0.0, p_eta = 1e-5;
  bool p_plan = false;
  auto* part = app.add_subcommand("partial", "partial transport (mass fraction)");
  part->add_option("--p", p_p)->required();
  part->add_option("--q", p_q)->required();
  part->add_option("--cost", p_cost);
  part->add_option("--grid-side", p_grid);
  part->add_option("--mass", p_mass);
  part->add_option("--mass-frac", p_frac, "fraction of min(sum p, sum q)");
  part->add_option("--eta", p_eta, "active-region threshold");
  part->add_flag("--emit-plan", p_plan, "write the dense plan (large)");
  add_common(part, po);

  // capacity
  CommonOpts co;
  std::string c_p, c_q, c_cost, c_theta_csv;
  double c_theta = 0.0;
  auto* cap = app.add_subcommand("capacity", "capacity-constrained transport");
  cap->add_option("--p", c_p)->required();
  cap->add_option("--q", c_q)->required();
  cap->add_option("--cost", c_cost)->required();
  cap->add_option("--theta", c_theta, "scalar capacity");
  cap->add_option("--theta-csv", c_theta_csv, "capacity matrix");
  add_common(cap, co);

  // partial-mm
  CommonOpts pmo;
  std::vector<std::string> pm_marginals;
  std::string pm_points;
  double pm_frac = 0.7, pm_eta = 1e-5;
  auto* pmm = app.add_subcommand("partial-mm", "multi-marginal partial transport");
  pmm->add_option("--marginal", pm_marginals)->required();
  pmm->add_option("--points", pm_points)->required();
  pmm->add_option("--mass-frac", pm_frac);
  pmm->add_option("--eta", pm_eta);
  add_common(pmm, pmo);

  // martingale
  CommonOpts mao;
  bool ma_lognormal = false;
  double ma_s0 = 0.04, ma_s1 = 0.32;
  int ma_n = 50;
  std::string ma_x, ma_y, ma_p, ma_q, ma_cost;
  auto* mart = app.add_subcommand("martingale", "discrete martingale transport");
  mart->add_flag("--lognormal", ma_lognormal, "built-in lognormal test case");
  mart->add_option("--sigma0sq", ma_s0);
  mart->add_option("--sigma1sq", ma_s1);
  mart->add_option("--n", ma_n);
  mart->add_option("--x", ma_x);
  mart->add_option("--y", ma_y);
  mart->add_option("--p", ma_p);
  mart->add_option("--q", ma_q);
  mart->add_option("--cost", ma_cost);
  add_common(mart, mao);

  // radon
  CommonOpts ro;
  std::string r_mode = "reconstruct", r_image, r_sino, r_template;
  int r_angles = 12;
  double r_lambda1 = 0.5;
  auto* radon = app.add_subcommand("radon", "partial Radon transform tools");
  radon->add_option("--mode", r_mode, "forward|lsq|reconstruct");
  radon->add_option("--image", r_image);
  radon->add_option("--sinogram", r_sino);
  radon->add_option("--template", r_template);
  radon->add_option("--angles", r_angles);
  radon->add_option("--lambda1", r_lambda1);
  add_common(radon, ro, false);

  // lifted
  CommonOpts lo;
  std::string l_p, l_q, l_cost, l_mode = "bregman";
  std::vector<double> l_weights;
  double l_mass = 0.0;
  auto* lift = app.add_subcommand("lifted", "product-space lifted projections");
  lift->add_option("--p", l_p)->required();
  lift->add_option("--q", l_q)->required();
  lift->add_option("--cost", l_cost)->required();
  lift->add_option("--mode", l_mode, "bregman|dykstra");
  lift->add_option("--weights", l_weights);
  lift->add_option("--mass", l_mass, "partial-transport sets with this mass");
  add_common(lift, lo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e);
      return 0;
    }
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (sink->parsed()) return cmd_sinkhorn(so, s_p, s_q, s_cost);
    if (bary->parsed()) return cmd_barycenter(bo, b_marginals, b_weights, b_cost, b_grid);
    if (mm->parsed()) return cmd_multimarginal(mo, m_marginals, m_points, m_weights, m_bin);
    if (euler->parsed()) return cmd_euler(eo, e_n, e_k, e_map);
    if (part->parsed())
      return cmd_partial(po, p_p, p_q, p_cost, p_grid, p_mass, p_frac, p_eta, p_plan);
    if (cap->parsed()) return cmd_capacity(co, c_p, c_q, c_cost, c_theta, c_theta_csv);
    if (pmm->parsed()) return cmd_partial_mm(pmo, pm_marginals, pm_points, pm_frac, pm_eta);
    if (mart->parsed())
      return cmd_martingale(mao, ma_lognormal, ma_s0, ma_s1, ma_n, ma_x, ma_y,
                            ma_p, ma_q, ma_cost);
    if (radon->parsed())
      return cmd_radon(ro, r_mode, r_image, r_sino, r_template, r_angles, r_lambda1);
    if (lift->parsed())
      return cmd_lifted(lo, l_p, l_q, l_cost, l_mode, l_weights, l_mass);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace bregmanot
