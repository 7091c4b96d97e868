#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sbadmm/image_grid.hpp"
#include "sbadmm/inner_solvers.hpp"
#include "sbadmm/metric_trace.hpp"
#include "sbadmm/operators.hpp"
#include "sbadmm/prox.hpp"

namespace sbadmm {

/// min_x 1/2 ||y - A x||^2 + Phi(C x) with its precomputed Gram spectra.
class RestorationProblem {
 public:
  RestorationProblem(ImageGrid y, ConvolutionKernel blur,
                     DifferenceOperator diff, Potential potential);

  const ImageGrid& y() const { return y_; }
  GridShape shape() const { return y_.shape(); }
  const ConvolutionKernel& blur() const { return blur_; }
  const DifferenceOperator& diff() const { return diff_; }
  const Potential& potential() const { return potential_; }
  double alpha() const { return potential_.alpha(); }

  const BccbSpectrum& lambda() const { return lambda_; }
  const BccbSpectrum& omega() const { return omega_; }
  const RankCheck& rank_check() const { return rank_; }
  /// False when [A; C] is rank deficient on the circulant surrogate.
  bool convergence_guaranteed() const { return rank_.full_rank; }
  /// Both A and C periodic, so the spectra are exact.
  bool exactly_circulant() const;

  ImageGrid forward(const ImageGrid& x) const { return blur_forward(blur_, x); }
  ImageGrid forward_adjoint(const ImageGrid& r) const {
    return blur_adjoint(blur_, r);
  }
  GradientField diff_forward(const ImageGrid& x) const { return apply(diff_, x); }
  ImageGrid diff_adjoint(const GradientField& g) const {
    return apply_adjoint(diff_, g);
  }

  /// 1/2 ||y - A x||^2 + Phi(C x) with the true (masked) operators.
  double cost(const ImageGrid& x) const;

 private:
  ImageGrid y_;
  ConvolutionKernel blur_;
  DifferenceOperator diff_;
  Potential potential_;
  BccbSpectrum lambda_;
  BccbSpectrum omega_;
  RankCheck rank_;
};

/// Iterate (x, u, v, d, e) after k outer steps. d and e are scaled duals of
/// the splits u = A x and v = C x.
struct SolverState {
  ImageGrid x;
  ImageGrid u;
  GradientField v;
  ImageGrid d;
  GradientField e;
  int k = 0;
  double inner_residual = 0.0;

  bool all_finite() const;
};

enum class Algorithm { sb, admm2, admm2_simplified, quadratic_closed_form };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& text);

enum class InitialX { zero, data };

struct OuterConfig {
  double rho = 1.0;
  double eta = 1.0;
  int max_iterations = 100;
  InnerSolveConfig inner{};
  Algorithm algorithm = Algorithm::admm2;
  InitialX initial_x = InitialX::zero;

  void validate() const;
};

/// x0 (zero or y), u0 = A x0, v0 = C x0, d0 = (y - u0)/rho, and
/// e0 = -(alpha/eta) v0 for a quadratic potential (e0 = 0 otherwise).
SolverState canonical_init(const RestorationProblem& problem, double rho,
                           double eta, InitialX initial_x = InitialX::zero);

/// Solves (rho A'A + eta C'C) x = rhs with the configured inner solver,
/// warm-started at `warm`. Writes the relative residual when requested.
ImageGrid solve_x_update(const RestorationProblem& problem, double rho,
                         double eta, const ImageGrid& rhs,
                         const ImageGrid& warm, const InnerSolveConfig& inner,
                         double* relative_residual = nullptr);

/// Split-variable update of the two-split ADMM: (rho (Ax - d) + y)/(rho + 1).
ImageGrid u_update(const ImageGrid& ax, const ImageGrid& d, const ImageGrid& y,
                   double rho);

SolverState sb_step(const SolverState& state, const RestorationProblem& problem,
                    double eta, const InnerSolveConfig& inner);

SolverState admm2_step(const SolverState& state,
                       const RestorationProblem& problem, double rho,
                       double eta, const InnerSolveConfig& inner);

/// ADMM with d eliminated through u + rho d = y; d is recomputed from that
/// identity so the returned state stays comparable with admm2_step.
SolverState admm2_simplified_step(const SolverState& state,
                                  const RestorationProblem& problem, double rho,
                                  double eta, const InnerSolveConfig& inner);

/// Quadratic-potential recursion with both duals eliminated. Requires
/// periodic operators; the x-update is an exact circulant solve.
SolverState quadratic_closed_form_step(const SolverState& state,
                                       const RestorationProblem& problem,
                                       double rho, double eta);

SolverState step(const SolverState& state, const RestorationProblem& problem,
                 const OuterConfig& config);

inline constexpr double kDivergenceFactor = 1e6;

struct RunResult {
  MetricTrace trace;
  SolverState final_state;
  bool convergence_guaranteed = true;
};

using StepObserver = std::function<void(const SolverState&)>;

/// Runs max_iterations outer steps from canonical_init, recording the
/// initial point and every step. The observer sees every state including
/// the initial one. Throws SolverError (with the iteration number) on inner
/// failures, non-finite cost, or cost above kDivergenceFactor times the
/// initial cost. Inner modes or algorithms the problem cannot support are
/// rejected up front with ParameterError.
RunResult run(const RestorationProblem& problem, const OuterConfig& config,
              const Reference* reference = nullptr,
              const StepObserver& observer = {});

}  // namespace sbadmm
