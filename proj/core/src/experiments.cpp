#include "sbadmm/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "sbadmm/errors.hpp"
#include "sbadmm/io.hpp"
#include "sbadmm/phantom.hpp"

namespace sbadmm {

GeneratedProblem make_problem(const ExperimentConfig& config) {
  config.validate();
  ImageGrid truth = config.image == "phantom"
                        ? shepp_logan_phantom(config.phantom_height, config.phantom_width)
                        : io::read_image(config.image);
  const ConvolutionKernel kernel = config.kernel();
  ImageGrid y = blur_forward(kernel, truth);
  if (config.noise_std > 0.0) {
    const auto [lo, hi] = std::minmax_element(truth.values().begin(), truth.values().end());
    const double sigma = config.noise_std * (*hi - *lo);
    std::mt19937_64 rng(config.noise_seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : y.values()) v += noise(rng);
  }
  return GeneratedProblem{
      RestorationProblem(std::move(y), kernel,
                         DifferenceOperator{config.mask_mode, config.directions},
                         config.make_potential()),
      std::move(truth)};
}

namespace {

ImageGrid normal_operator(const RestorationProblem& p, const ImageGrid& x) {
  ImageGrid hx = p.forward_adjoint(p.forward(x));
  axpy(p.alpha(), p.diff_adjoint(p.diff_forward(x)), hx);
  return hx;
}

Reference dense_reference(const RestorationProblem& problem) {
  if (problem.potential().kind() != PotentialKind::quadratic) {
    throw ParameterError("dense reference needs a quadratic potential");
  }
  const std::size_t n = problem.shape().size();
  if (n > kDenseReferenceMaxPixels) {
    throw ParameterError("dense reference is limited to 64x64 pixels");
  }
  if (!problem.convergence_guaranteed()) {
    throw RankDeficiencyError("A'A + alpha C'C is singular on its circulant surrogate");
  }
  const auto idx = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  Eigen::MatrixXd hessian(idx(n), idx(n));
  ImageGrid unit(problem.shape());
  for (std::size_t j = 0; j < n; ++j) {
    unit[j] = 1.0;
    const ImageGrid col = normal_operator(problem, unit);
    for (std::size_t i = 0; i < n; ++i) hessian(idx(i), idx(j)) = col[i];
    unit[j] = 0.0;
  }
  const ImageGrid rhs = problem.forward_adjoint(problem.y());
  Eigen::Map<const Eigen::VectorXd> b(rhs.values().data(), idx(n));
  Eigen::LLT<Eigen::MatrixXd> llt(hessian);
  if (llt.info() != Eigen::Success) {
    throw RankDeficiencyError("A'A + alpha C'C is not positive definite");
  }
  Eigen::VectorXd x = llt.solve(b);
  ImageGrid xg(problem.shape(), std::vector<double>(x.data(), x.data() + x.size()));
  // Iterative refinement with the operator-form residual.
  for (int pass = 0; pass < 3; ++pass) {
    ImageGrid r = rhs;
    axpy(-1.0, normal_operator(problem, xg), r);
    if (norm(r) <= 1e-13 * norm(rhs)) break;
    Eigen::Map<const Eigen::VectorXd> rv(r.values().data(), idx(n));
    const Eigen::VectorXd dx = llt.solve(rv);
    for (std::size_t i = 0; i < n; ++i) xg[i] += dx(idx(i));
  }
  return Reference{xg, problem.cost(xg)};
}

Reference circulant_reference(const RestorationProblem& problem) {
  if (problem.potential().kind() != PotentialKind::quadratic ||
      !problem.exactly_circulant()) {
    throw ParameterError(
        "circulant reference needs a quadratic potential and periodic operators");
  }
  if (!problem.convergence_guaranteed()) {
    throw RankDeficiencyError("A'A + alpha C'C is singular");
  }
  const ImageGrid x = circulant_solve(problem.lambda(), problem.omega(), 1.0,
                                      problem.alpha(),
                                      problem.forward_adjoint(problem.y()));
  return Reference{x, problem.cost(x)};
}

Reference long_run_reference(const RestorationProblem& problem) {
  OuterConfig cfg;
  cfg.rho = 1.0;
  cfg.eta = problem.alpha();
  cfg.algorithm = Algorithm::admm2;
  cfg.max_iterations = kLongRunIterations;
  if (problem.exactly_circulant()) {
    cfg.inner.mode = InnerMode::circulant_exact;
  } else {
    cfg.inner.mode = InnerMode::pcg;
    cfg.inner.pcg_iterations = kLongRunPcgIterations;
    cfg.inner.preconditioner = PreconditionerKind::circulant;
  }
  SolverState state = canonical_init(problem, cfg.rho, cfg.eta);
  int quiet_steps = 0;
  for (int k = 1; k <= cfg.max_iterations && quiet_steps < kLongRunQuietSteps; ++k) {
    SolverState next = step(state, problem, cfg);
    if (!next.all_finite()) {
      throw SolverError("long-run reference: non-finite iterate at step " +
                        std::to_string(k));
    }
    const double change = norm(linear_combination(1.0, next.x, -1.0, state.x));
    const double scale = norm(next.x);
    quiet_steps = change <= kLongRunStagnation * scale ? quiet_steps + 1 : 0;
    state = std::move(next);
  }
  return Reference{state.x, problem.cost(state.x)};
}

}  // namespace

Reference reference_solution(const RestorationProblem& problem,
                             ReferenceMethod method) {
  switch (method) {
    case ReferenceMethod::circulant:
      return circulant_reference(problem);
    case ReferenceMethod::dense:
      return dense_reference(problem);
    case ReferenceMethod::long_run:
      return long_run_reference(problem);
    case ReferenceMethod::automatic:
      if (problem.potential().kind() == PotentialKind::quadratic &&
          problem.exactly_circulant()) {
        return circulant_reference(problem);
      }
      if (problem.potential().kind() == PotentialKind::quadratic &&
          problem.shape().size() <= kDenseReferenceMaxPixels) {
        return dense_reference(problem);
      }
      return long_run_reference(problem);
  }
  throw ParameterError("unknown reference method");
}

MetricTrace metrics(std::span<const ImageGrid> iterates,
                    const RestorationProblem& problem,
                    const ImageGrid& reference, double reference_cost) {
  MetricTrace trace;
  trace.absolute_cost_error = reference_cost == 0.0;
  const Reference ref{reference, reference_cost};
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    trace.records.push_back(measure(static_cast<int>(k), iterates[k],
                                    problem.cost(iterates[k]), 0.0, &ref));
  }
  return trace;
}

std::string run_label(double rho, double eta) {
  std::ostringstream os;
  os << "rho" << std::setprecision(6) << rho << "_eta" << eta;
  return os.str();
}

Figure2Result run_figure2(const ExperimentConfig& config) {
  GeneratedProblem gen = make_problem(config);
  const RestorationProblem& problem = gen.problem;
  Figure2Result result{gen.truth, problem.y(), reference_solution(problem, config.reference), {}};

  const auto grid = config.effective_grid();
  std::vector<std::future<Figure2Run>> pending;
  for (const auto& pair : grid) {
    pending.push_back(std::async(std::launch::async, [&, pair] {
      Figure2Run run;
      run.rho = pair.rho;
      run.eta = pair.eta;
      run.label = run_label(pair.rho, pair.eta);
      try {
        RunResult r = sbadmm::run(problem, config.outer(pair.rho, pair.eta),
                                  &result.reference);
        run.trace = std::move(r.trace);
        run.iterations_to_tolerance = run.trace.iterations_to(kFigure2Tolerance);
        run.final_x = std::move(r.final_state.x);
      } catch (const Error& e) {
        run.error = e.what();
      }
      return run;
    }));
  }
  for (auto& f : pending) result.runs.push_back(f.get());
  return result;
}

void write_figure2_outputs(const ExperimentConfig& config,
                           const Figure2Result& result) {
  const auto& dir = config.output_dir;
  std::filesystem::create_directories(dir);
  io::write_pgm(dir / "truth.pgm", result.truth);
  io::write_pgm(dir / "data.pgm", result.data);
  io::write_pgm(dir / "reference.pgm", result.reference.x);

  std::ofstream summary(dir / "summary.csv");
  if (!summary) throw IoError("cannot write summary.csv in '" + dir.string() + "'");
  summary << std::setprecision(std::numeric_limits<double>::max_digits10);
  summary << "label,rho,eta,iterations,iterations_to_tol,final_rel_cost_err,"
             "final_rmsd,status\n";
  for (const auto& run : result.runs) {
    if (run.error.empty()) {
      write_trace_csv(dir / ("trace_" + run.label + ".csv"), run.trace);
      if (run.final_x) io::write_pgm(dir / ("final_" + run.label + ".pgm"), *run.final_x);
    }
    summary << run.label << ',' << run.rho << ',' << run.eta << ',';
    if (run.error.empty()) {
      summary << run.trace.back().iter << ',';
      if (run.iterations_to_tolerance) summary << *run.iterations_to_tolerance;
      else summary << "none";
      summary << ',' << run.trace.back().rel_cost_err << ',' << run.trace.back().rmsd
              << ",ok\n";
    } else {
      std::string msg = run.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      summary << ",,,,failed: " << msg << '\n';
    }
  }
}

Figure2Result figure2_protocol(const ExperimentConfig& config) {
  Figure2Result result = run_figure2(config);
  write_figure2_outputs(config, result);
  return result;
}

}  // namespace sbadmm
