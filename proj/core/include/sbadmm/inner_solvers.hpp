#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sbadmm/image_grid.hpp"
#include "sbadmm/operators.hpp"

namespace sbadmm {

enum class InnerMode { circulant_exact, pcg };
enum class PreconditionerKind { none, circulant };

const char* to_string(InnerMode m);
InnerMode parse_inner_mode(const std::string& text);
const char* to_string(PreconditionerKind p);
PreconditionerKind parse_preconditioner(const std::string& text);

struct InnerSolveConfig {
  InnerMode mode = InnerMode::pcg;
  int pcg_iterations = 3;
  // Relative residual stop; 0 means iteration-count limited.
  double pcg_tolerance = 0.0;
  PreconditionerKind preconditioner = PreconditionerKind::circulant;

  /// Throws ParameterError on invalid settings.
  void validate() const;
};

/// Spectrum of rho A'A + eta C'C.
BccbSpectrum combined_hessian_spectrum(const BccbSpectrum& lambda,
                                       const BccbSpectrum& omega, double rho,
                                       double eta);

/// Exact solve of (rho A'A + eta C'C) x = rhs by per-frequency division.
/// Throws SingularHessianError naming the first frequency where
/// rho*lambda + eta*omega vanishes.
ImageGrid circulant_solve(const BccbSpectrum& lambda, const BccbSpectrum& omega,
                          double rho, double eta, const ImageGrid& rhs);

using LinearMap = std::function<ImageGrid(const ImageGrid&)>;

inline constexpr double kPreconditionerFloor = 1e-8;

/// Applies the inverse of a circulant surrogate Hessian. Eigenvalues are
/// clamped below at floor * max.
class CirculantPreconditioner {
 public:
  explicit CirculantPreconditioner(BccbSpectrum hessian_spectrum,
                                   double floor = kPreconditionerFloor);
  ImageGrid apply(const ImageGrid& r) const;
  const BccbSpectrum& clamped_spectrum() const { return spectrum_; }

 private:
  BccbSpectrum spectrum_;
};

struct PcgResult {
  ImageGrid x;
  int iterations = 0;
  // ||b - H x_k||, index 0 is the warm start.
  std::vector<double> residual_norms;
  // Decrease of 0.5 x'Hx - b'x per step; nonnegative means the H-norm error
  // did not grow.
  std::vector<double> energy_decrease;
};

/// Preconditioned conjugate gradients from `warm_start`. Runs exactly
/// config.pcg_iterations steps unless the relative residual drops below
/// config.pcg_tolerance (or to zero). `preconditioner` may be null.
/// Throws SolverError on zero or negative curvature and on non-finite
/// iterates, naming the step index.
PcgResult pcg_solve(const LinearMap& hessian,
                    const CirculantPreconditioner* preconditioner,
                    const ImageGrid& rhs, const InnerSolveConfig& config,
                    const ImageGrid& warm_start);

void write_residual_history_csv(const std::filesystem::path& path,
                                const PcgResult& result);

}  // namespace sbadmm
