#include "sbadmm/algorithms.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "sbadmm/errors.hpp"

namespace sbadmm {

RestorationProblem::RestorationProblem(ImageGrid y, ConvolutionKernel blur,
                                       DifferenceOperator diff,
                                       Potential potential)
    : y_(std::move(y)),
      blur_(std::move(blur)),
      diff_(diff),
      potential_(potential),
      lambda_(bccb_spectrum_of_gram(blur_, y_.shape())),
      omega_(bccb_spectrum_of_gram(diff_, y_.shape())),
      rank_(split_operator_rank_check(lambda_, omega_)) {
  if (!y_.all_finite()) throw ShapeError("data y must be finite");
}

bool RestorationProblem::exactly_circulant() const {
  return blur_.boundary() == Boundary::periodic &&
         diff_.mode == MaskMode::periodic;
}

double RestorationProblem::cost(const ImageGrid& x) const {
  ImageGrid residual = forward(x);
  axpy(-1.0, y_, residual);
  return 0.5 * squared_norm(residual) + eval(potential_, diff_forward(x));
}

bool SolverState::all_finite() const {
  return x.all_finite() && u.all_finite() && v.all_finite() &&
         d.all_finite() && e.all_finite();
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::sb: return "sb";
    case Algorithm::admm2: return "admm2";
    case Algorithm::admm2_simplified: return "admm2_simplified";
    case Algorithm::quadratic_closed_form: return "quadratic_closed_form";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "sb") return Algorithm::sb;
  if (text == "admm2") return Algorithm::admm2;
  if (text == "admm2_simplified") return Algorithm::admm2_simplified;
  if (text == "quadratic_closed_form" || text == "closed_form") {
    return Algorithm::quadratic_closed_form;
  }
  throw ConfigError("unknown algorithm '" + text + "'");
}

namespace {

void require_penalties(double rho, double eta) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ParameterError("rho must be positive and finite");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ParameterError("eta must be positive and finite");
  }
}

void check_state(const SolverState& s, const RestorationProblem& p) {
  if (s.x.shape() != p.shape() || s.u.shape() != p.shape() ||
      s.d.shape() != p.shape() || s.v.shape() != p.shape() ||
      s.e.shape() != p.shape() || s.v.directions() != p.diff().directions ||
      s.e.directions() != p.diff().directions) {
    throw ShapeError("solver state does not match the problem grid");
  }
}

}  // namespace

void OuterConfig::validate() const {
  require_penalties(rho, eta);
  if (max_iterations < 0) throw ParameterError("max_iterations must be >= 0");
  inner.validate();
}

SolverState canonical_init(const RestorationProblem& problem, double rho,
                           double eta, InitialX initial_x) {
  require_penalties(rho, eta);
  SolverState s;
  s.x = initial_x == InitialX::data ? problem.y() : ImageGrid(problem.shape());
  s.u = problem.forward(s.x);
  s.v = problem.diff_forward(s.x);
  s.d = linear_combination(1.0 / rho, problem.y(), -1.0 / rho, s.u);
  if (problem.potential().kind() == PotentialKind::quadratic) {
    s.e = scaled(-problem.alpha() / eta, s.v);
  } else {
    s.e = s.v;
    for (double& v : s.e.values()) v = 0.0;
  }
  s.k = 0;
  return s;
}

ImageGrid solve_x_update(const RestorationProblem& problem, double rho,
                         double eta, const ImageGrid& rhs,
                         const ImageGrid& warm, const InnerSolveConfig& inner,
                         double* relative_residual) {
  auto hessian = [&](const ImageGrid& x) {
    ImageGrid hx = problem.forward_adjoint(problem.forward(x));
    for (double& v : hx.values()) v *= rho;
    axpy(eta, problem.diff_adjoint(problem.diff_forward(x)), hx);
    return hx;
  };

  ImageGrid x;
  if (inner.mode == InnerMode::circulant_exact) {
    if (!problem.exactly_circulant()) {
      throw ParameterError(
          "exact inner solves need periodic blur and periodic differences; "
          "use the pcg inner mode for masked operators");
    }
    x = circulant_solve(problem.lambda(), problem.omega(), rho, eta, rhs);
  } else {
    std::optional<CirculantPreconditioner> pre;
    if (inner.preconditioner == PreconditionerKind::circulant) {
      pre.emplace(combined_hessian_spectrum(problem.lambda(), problem.omega(),
                                            rho, eta));
    }
    x = pcg_solve(hessian, pre ? &*pre : nullptr, rhs, inner, warm).x;
  }
  if (relative_residual) {
    ImageGrid r = rhs;
    axpy(-1.0, hessian(x), r);
    const double bn = norm(rhs);
    *relative_residual = bn > 0.0 ? norm(r) / bn : norm(r);
  }
  return x;
}

ImageGrid u_update(const ImageGrid& ax, const ImageGrid& d, const ImageGrid& y,
                   double rho) {
  return linear_combination(rho / (rho + 1.0), linear_combination(1.0, ax, -1.0, d),
                            1.0 / (rho + 1.0), y);
}

SolverState sb_step(const SolverState& state, const RestorationProblem& problem,
                    double eta, const InnerSolveConfig& inner) {
  require_penalties(1.0, eta);
  check_state(state, problem);
  SolverState next = state;

  // x: min 1/2||y - Ax||^2 + eta/2 ||Cx - v - e||^2
  ImageGrid rhs = problem.forward_adjoint(problem.y());
  axpy(eta, problem.diff_adjoint(linear_combination(1.0, state.v, 1.0, state.e)),
       rhs);
  next.x = solve_x_update(problem, 1.0, eta, rhs, state.x, inner,
                          &next.inner_residual);

  const GradientField cx = problem.diff_forward(next.x);
  next.v = prox(problem.potential(), linear_combination(1.0, cx, -1.0, state.e),
                eta);
  next.e = linear_combination(1.0, state.e, -1.0, cx);
  axpy(1.0, next.v, next.e);
  next.k = state.k + 1;
  return next;
}

SolverState admm2_step(const SolverState& state,
                       const RestorationProblem& problem, double rho,
                       double eta, const InnerSolveConfig& inner) {
  require_penalties(rho, eta);
  check_state(state, problem);
  SolverState next = state;

  // x: min rho/2 ||Ax - u - d||^2 + eta/2 ||Cx - v - e||^2
  ImageGrid rhs = problem.forward_adjoint(linear_combination(rho, state.u, rho, state.d));
  axpy(eta, problem.diff_adjoint(linear_combination(1.0, state.v, 1.0, state.e)),
       rhs);
  next.x = solve_x_update(problem, rho, eta, rhs, state.x, inner,
                          &next.inner_residual);

  const ImageGrid ax = problem.forward(next.x);
  next.u = u_update(ax, state.d, problem.y(), rho);
  const GradientField cx = problem.diff_forward(next.x);
  next.v = prox(problem.potential(), linear_combination(1.0, cx, -1.0, state.e),
                eta);
  next.d = linear_combination(1.0, state.d, -1.0, ax);
  axpy(1.0, next.u, next.d);
  next.e = linear_combination(1.0, state.e, -1.0, cx);
  axpy(1.0, next.v, next.e);
  next.k = state.k + 1;
  return next;
}

SolverState admm2_simplified_step(const SolverState& state,
                                  const RestorationProblem& problem, double rho,
                                  double eta, const InnerSolveConfig& inner) {
  require_penalties(rho, eta);
  check_state(state, problem);
  SolverState next = state;

  // x: min rho/2 ||Ax - y/rho - (1 - 1/rho) u||^2 + eta/2 ||Cx - v - e||^2,
  // whose normal-equation rhs is A'y + (rho - 1) A'u + eta C'(v + e).
  ImageGrid rhs = problem.forward_adjoint(
      linear_combination(1.0, problem.y(), rho - 1.0, state.u));
  axpy(eta, problem.diff_adjoint(linear_combination(1.0, state.v, 1.0, state.e)),
       rhs);
  next.x = solve_x_update(problem, rho, eta, rhs, state.x, inner,
                          &next.inner_residual);

  const ImageGrid ax = problem.forward(next.x);
  next.u = linear_combination(rho / (rho + 1.0), ax, 1.0 / (rho + 1.0), state.u);
  const GradientField cx = problem.diff_forward(next.x);
  next.v = prox(problem.potential(), linear_combination(1.0, cx, -1.0, state.e),
                eta);
  next.e = linear_combination(1.0, state.e, -1.0, cx);
  axpy(1.0, next.v, next.e);
  next.d = linear_combination(1.0 / rho, problem.y(), -1.0 / rho, next.u);
  next.k = state.k + 1;
  return next;
}

SolverState quadratic_closed_form_step(const SolverState& state,
                                       const RestorationProblem& problem,
                                       double rho, double eta) {
  require_penalties(rho, eta);
  check_state(state, problem);
  if (problem.potential().kind() != PotentialKind::quadratic) {
    throw ParameterError("closed-form recursion needs a quadratic potential");
  }
  if (!problem.exactly_circulant()) {
    throw ParameterError("closed-form recursion needs periodic operators");
  }
  const double alpha = problem.alpha();
  SolverState next = state;

  // x = (rho A'A + eta C'C)^{-1} (A'y + (rho-1) A'u + (eta-alpha) C'v)
  ImageGrid rhs = problem.forward_adjoint(
      linear_combination(1.0, problem.y(), rho - 1.0, state.u));
  axpy(eta - alpha, problem.diff_adjoint(state.v), rhs);
  next.x = circulant_solve(problem.lambda(), problem.omega(), rho, eta, rhs);
  {
    ImageGrid r = rhs;
    ImageGrid hx = problem.forward_adjoint(problem.forward(next.x));
    for (double& v : hx.values()) v *= rho;
    axpy(eta, problem.diff_adjoint(problem.diff_forward(next.x)), hx);
    axpy(-1.0, hx, r);
    const double bn = norm(rhs);
    next.inner_residual = bn > 0.0 ? norm(r) / bn : norm(r);
  }

  next.u = linear_combination(rho / (rho + 1.0), problem.forward(next.x),
                              1.0 / (rho + 1.0), state.u);
  next.v = linear_combination(eta / (eta + alpha), problem.diff_forward(next.x),
                              alpha / (eta + alpha), state.v);
  // Duals follow from u + rho d = y and alpha v + eta e = 0.
  next.d = linear_combination(1.0 / rho, problem.y(), -1.0 / rho, next.u);
  next.e = scaled(-alpha / eta, next.v);
  next.k = state.k + 1;
  return next;
}

SolverState step(const SolverState& state, const RestorationProblem& problem,
                 const OuterConfig& config) {
  switch (config.algorithm) {
    case Algorithm::sb:
      return sb_step(state, problem, config.eta, config.inner);
    case Algorithm::admm2:
      return admm2_step(state, problem, config.rho, config.eta, config.inner);
    case Algorithm::admm2_simplified:
      return admm2_simplified_step(state, problem, config.rho, config.eta,
                                   config.inner);
    case Algorithm::quadratic_closed_form:
      return quadratic_closed_form_step(state, problem, config.rho, config.eta);
  }
  throw ParameterError("unknown algorithm");
}

RunResult run(const RestorationProblem& problem, const OuterConfig& config,
              const Reference* reference, const StepObserver& observer) {
  config.validate();
  if (config.inner.mode == InnerMode::circulant_exact && !problem.exactly_circulant()) {
    throw ParameterError(
        "exact inner solves need periodic blur and periodic differences; "
        "use the pcg inner mode for masked operators");
  }
  if (config.algorithm == Algorithm::quadratic_closed_form &&
      (problem.potential().kind() != PotentialKind::quadratic ||
       !problem.exactly_circulant())) {
    throw ParameterError(
        "the closed-form recursion needs a quadratic potential and periodic operators");
  }
  if (reference && reference->x.shape() != problem.shape()) {
    throw ShapeError("reference image does not match the problem grid");
  }
  RunResult result;
  result.convergence_guaranteed = problem.convergence_guaranteed();
  result.trace.absolute_cost_error = reference && reference->cost == 0.0;

  SolverState state = canonical_init(problem, config.rho, config.eta,
                                     config.initial_x);
  const double initial_cost = problem.cost(state.x);
  result.trace.records.push_back(measure(0, state.x, initial_cost, 0.0, reference));
  if (observer) observer(state);

  const double guard =
      kDivergenceFactor * std::max(initial_cost, std::numeric_limits<double>::min());
  for (int k = 1; k <= config.max_iterations; ++k) {
    try {
      state = step(state, problem, config);
    } catch (const Error& err) {
      throw SolverError("outer iteration " + std::to_string(k) + ": " + err.what());
    }
    const double c = problem.cost(state.x);
    if (!std::isfinite(c) || !state.all_finite()) {
      throw SolverError("outer iteration " + std::to_string(k) +
                        ": non-finite iterate or cost");
    }
    if (c > guard) {
      throw SolverError("outer iteration " + std::to_string(k) +
                        ": divergence guard tripped (cost " + std::to_string(c) +
                        " exceeds 1e6 x initial cost " +
                        std::to_string(initial_cost) + ")");
    }
    result.trace.records.push_back(
        measure(k, state.x, c, state.inner_residual, reference));
    if (observer) observer(state);
  }
  result.final_state = std::move(state);
  return result;
}

std::optional<int> MetricTrace::iterations_to(double tolerance) const {
  for (const auto& r : records) {
    if (r.rel_cost_err <= tolerance) return r.iter;
  }
  return std::nullopt;
}

MetricRecord measure(int iter, const ImageGrid& x, double cost,
                     double inner_residual, const Reference* reference) {
  MetricRecord rec;
  rec.iter = iter;
  rec.cost = cost;
  rec.inner_residual = inner_residual;
  if (reference) {
    const double diff = cost - reference->cost;
    rec.rel_cost_err = reference->cost != 0.0 ? diff / reference->cost : diff;
    rec.rmsd = rmsd(x, reference->x);
  } else {
    rec.rel_cost_err = std::numeric_limits<double>::quiet_NaN();
    rec.rmsd = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

void write_trace_csv(const std::filesystem::path& path,
                     const MetricTrace& trace) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "iter,cost,rel_cost_err,rmsd,inner_residual\n";
  for (const auto& r : trace.records) {
    out << r.iter << ',' << r.cost << ',' << r.rel_cost_err << ',' << r.rmsd
        << ',' << r.inner_residual << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace sbadmm
