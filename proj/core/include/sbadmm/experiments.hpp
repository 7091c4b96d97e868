#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbadmm/algorithms.hpp"
#include "sbadmm/experiment_config.hpp"

namespace sbadmm {

struct GeneratedProblem {
  RestorationProblem problem;
  ImageGrid truth;
};

/// y = A truth + N(0, (noise_std * range(truth))^2), deterministic in
/// noise_seed. Throws IoError for unreadable image files.
GeneratedProblem make_problem(const ExperimentConfig& config);

inline constexpr std::size_t kDenseReferenceMaxPixels = 64 * 64;
inline constexpr int kLongRunIterations = 2000;
inline constexpr int kLongRunPcgIterations = 50;
inline constexpr double kLongRunStagnation = 1e-14;
inline constexpr int kLongRunQuietSteps = 3;

/// Converged reconstruction used as the error yardstick.
///   circulant: one exact FFT solve (quadratic potential, periodic A and C)
///   dense:    factor A'A + alpha C'C (quadratic potential, <= 64x64 pixels)
///   long_run: up to 2000 two-split ADMM steps at (rho, eta) = (1, alpha)
///             with exact (periodic) or 50-step PCG x-updates, stopping
///             early after 3 consecutive steps with relative change
///             ||x_k+1 - x_k|| <= 1e-14 ||x_k+1||
///   automatic picks the first applicable of circulant, dense, long_run.
Reference reference_solution(const RestorationProblem& problem,
                             ReferenceMethod method = ReferenceMethod::automatic);

/// Recomputes cost, relative cost error and RMSD for a sequence of iterates.
MetricTrace metrics(std::span<const ImageGrid> iterates,
                    const RestorationProblem& problem,
                    const ImageGrid& reference, double reference_cost);

inline constexpr double kFigure2Tolerance = 1e-6;

struct Figure2Run {
  std::string label;
  double rho = 0.0;
  double eta = 0.0;
  MetricTrace trace;
  std::optional<int> iterations_to_tolerance;
  // Empty on success, otherwise the failure message.
  std::string error;
  std::optional<ImageGrid> final_x;
};

struct Figure2Result {
  ImageGrid truth;
  ImageGrid data;
  Reference reference;
  std::vector<Figure2Run> runs;
};

/// Runs every (rho, eta) of the configured grid on the shared problem in
/// parallel. A failing run is recorded and the others continue.
Figure2Result run_figure2(const ExperimentConfig& config);

/// Writes trace_<label>.csv per run, summary.csv, and PGM snapshots of the
/// truth, data, reference and final iterates into config.output_dir.
void write_figure2_outputs(const ExperimentConfig& config,
                           const Figure2Result& result);

/// run_figure2 followed by write_figure2_outputs.
Figure2Result figure2_protocol(const ExperimentConfig& config);

/// File-system friendly name such as "rho1_eta0.0625".
std::string run_label(double rho, double eta);

}  // namespace sbadmm
