#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "sbadmm/operators.hpp"

namespace sbadmm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Per-frequency ratio delta_i = omega_i / lambda_i. +inf where only
/// lambda_i vanishes; NaN marks frequencies where both vanish, which are
/// excluded from delta_min / delta_max.
struct DeltaSpectrum {
  GridShape shape;
  std::vector<double> deltas;
  double delta_min = 0.0;
  double delta_max = 0.0;
  double alpha = 0.0;

  static bool defined(double delta) { return delta == delta; }
};

/// Throws RankDeficiencyError if both spectra vanish at some frequency and
/// ParameterError if alpha <= 0. Eigenvalues at or below `tolerance` count
/// as zero.
DeltaSpectrum delta_spectrum(const BccbSpectrum& lambda,
                             const BccbSpectrum& omega, double alpha,
                             double tolerance = kRankTolerance);

/// Builds a spectrum directly from a list of deltas (synthetic spectra).
DeltaSpectrum delta_spectrum_from_values(std::vector<double> deltas,
                                         double alpha);

/// Case I (rho = 1, split Bregman) per-frequency rate
///   (eta/(eta+alpha)) (alpha + eta^2 delta) / (eta + eta^2 delta),
/// with the delta = inf limit eta/(eta+alpha).
double rate_s1(double delta, double eta, double alpha);
/// Case II (eta = alpha) per-frequency rate
///   (rho/(rho+1)) (rho^2 + alpha delta) / (rho^2 + alpha rho delta),
/// with the delta = inf limit 1/(rho+1).
double rate_s2(double delta, double rho, double alpha);
/// Case III (rho = eta/alpha): uniform eta/(eta+alpha).
double rate_s3(double eta, double alpha);

/// median{delta_min, delta_max, 1/alpha} under the extended-real order.
double gamma_of(const DeltaSpectrum& spectrum);

struct OptimalEta {
  double eta_star = 0.0;
  double gamma = 0.0;
};

/// eta* = sqrt(alpha / gamma). Throws ParameterError when gamma is 0 or inf.
OptimalEta optimal_eta_sb(const DeltaSpectrum& spectrum);
/// rho* = sqrt(alpha * gamma), the Case II optimum.
double optimal_rho_al(const DeltaSpectrum& spectrum);

enum class RateCase { I_sb, II_al, III_matched };

const char* to_string(RateCase c);
RateCase parse_rate_case(const std::string& text);

struct RateParameters {
  double rho = 1.0;
  double eta = 1.0;
  double alpha = 1.0;
};

struct RateReport {
  RateCase rate_case = RateCase::I_sb;
  // Per frequency, NaN where delta is undefined.
  std::vector<double> rates;
  double spectral_radius = 0.0;
  double rho = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  double optimal_eta = 0.0;
  double optimal_rho = 0.0;
  double gamma = 0.0;
};

inline constexpr double kCaseTolerance = 1e-12;

/// Rejects (ParameterError, naming the constraint) parameter sets outside
/// the case: I needs rho = 1, II needs eta = alpha, III needs rho = eta/alpha.
RateReport predict(RateCase rate_case, const RateParameters& params,
                   const DeltaSpectrum& spectrum);

enum class Faster { sb, admm_matched, tie };

const char* to_string(Faster f);

struct Comparison {
  Faster faster = Faster::tie;
  double rho_recommended = 1.0;
  double sb_radius = 0.0;
  double admm_radius = 0.0;
};

/// Split Bregman at eta versus matched two-split ADMM (rho = eta/alpha).
/// The matched ADMM wins strictly for eta < alpha; otherwise the predicted
/// radii coincide asymptotically (SB tends to be marginally faster in
/// practice because most of its frequencies decay faster).
Comparison compare_sb_vs_admm(double eta, double alpha,
                              const DeltaSpectrum& spectrum);

/// Per-frequency CSV (freq_row,freq_col,delta,rate) followed by a
/// '# radius=..., eta_star=..., rho_star=..., gamma=...' summary line.
void write_rate_report_csv(const std::filesystem::path& path,
                           const RateReport& report,
                           const DeltaSpectrum& spectrum);

/// Geometric-mean ratio of errors[k+1]/errors[k] over the last quarter of
/// the sequence, ignoring the first half.
double empirical_rate(const std::vector<double>& errors);

}  // namespace sbadmm

namespace sbadmm {

/// Throws ParameterError naming the violated constraint when (rho, eta,
/// alpha) lie outside `rate_case`.
void require_case_parameters(RateCase rate_case, const RateParameters& params);

}  // namespace sbadmm
