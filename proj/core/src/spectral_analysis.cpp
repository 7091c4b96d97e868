#include "sbadmm/spectral_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "sbadmm/errors.hpp"

namespace sbadmm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(std::string(name) + " must be positive and finite");
  }
}

void fill_extrema(DeltaSpectrum& s) {
  s.delta_min = kInfinity;
  s.delta_max = -kInfinity;
  bool any = false;
  for (double d : s.deltas) {
    if (!DeltaSpectrum::defined(d)) continue;
    any = true;
    s.delta_min = std::min(s.delta_min, d);
    s.delta_max = std::max(s.delta_max, d);
  }
  if (!any) throw RankDeficiencyError("delta spectrum has no defined entries");
}

bool close(double a, double b) {
  return std::abs(a - b) <= kCaseTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

DeltaSpectrum delta_spectrum(const BccbSpectrum& lambda,
                             const BccbSpectrum& omega, double alpha,
                             double tolerance) {
  require_positive(alpha, "alpha");
  if (lambda.shape != omega.shape) throw ShapeError("spectrum shapes differ");
  DeltaSpectrum s;
  s.shape = lambda.shape;
  s.alpha = alpha;
  s.deltas.resize(lambda.eigenvalues.size());
  for (std::size_t i = 0; i < s.deltas.size(); ++i) {
    const double l = lambda.eigenvalues[i];
    const double w = omega.eigenvalues[i];
    const bool l_zero = l <= tolerance;
    const bool w_zero = w <= tolerance;
    if (l_zero && w_zero) {
      throw RankDeficiencyError(
          "A'A and C'C both vanish at frequency (" +
          std::to_string(i / s.shape.width) + ", " +
          std::to_string(i % s.shape.width) + "); the split is rank deficient");
    }
    if (l_zero) {
      s.deltas[i] = kInfinity;
    } else {
      s.deltas[i] = w_zero ? 0.0 : w / l;
    }
  }
  fill_extrema(s);
  return s;
}

DeltaSpectrum delta_spectrum_from_values(std::vector<double> deltas,
                                         double alpha) {
  require_positive(alpha, "alpha");
  if (deltas.empty()) throw ShapeError("empty delta list");
  for (double d : deltas) {
    if (DeltaSpectrum::defined(d) && d < 0.0) {
      throw ParameterError("deltas must be nonnegative");
    }
  }
  DeltaSpectrum s;
  s.shape = {1, deltas.size()};
  s.alpha = alpha;
  s.deltas = std::move(deltas);
  fill_extrema(s);
  return s;
}

double rate_s1(double delta, double eta, double alpha) {
  require_positive(eta, "eta");
  require_positive(alpha, "alpha");
  const double outer = eta / (eta + alpha);
  if (std::isinf(delta)) return outer;
  return outer * (alpha + eta * eta * delta) / (eta + eta * eta * delta);
}

double rate_s2(double delta, double rho, double alpha) {
  require_positive(rho, "rho");
  require_positive(alpha, "alpha");
  if (std::isinf(delta)) return 1.0 / (rho + 1.0);
  return rho / (rho + 1.0) * (rho * rho + alpha * delta) /
         (rho * rho + alpha * rho * delta);
}

double rate_s3(double eta, double alpha) {
  require_positive(eta, "eta");
  require_positive(alpha, "alpha");
  return eta / (eta + alpha);
}

double gamma_of(const DeltaSpectrum& spectrum) {
  std::array<double, 3> v = {spectrum.delta_min, spectrum.delta_max,
                             1.0 / spectrum.alpha};
  std::sort(v.begin(), v.end());
  return v[1];
}

OptimalEta optimal_eta_sb(const DeltaSpectrum& spectrum) {
  const double gamma = gamma_of(spectrum);
  if (!(gamma > 0.0) || std::isinf(gamma)) {
    throw ParameterError("gamma = " + std::to_string(gamma) +
                         " leaves no finite positive optimal eta");
  }
  return OptimalEta{std::sqrt(spectrum.alpha / gamma), gamma};
}

double optimal_rho_al(const DeltaSpectrum& spectrum) {
  const double gamma = gamma_of(spectrum);
  if (!(gamma > 0.0) || std::isinf(gamma)) {
    throw ParameterError("gamma = " + std::to_string(gamma) +
                         " leaves no finite positive optimal rho");
  }
  return std::sqrt(spectrum.alpha * gamma);
}

const char* to_string(RateCase c) {
  switch (c) {
    case RateCase::I_sb: return "I";
    case RateCase::II_al: return "II";
    case RateCase::III_matched: return "III";
  }
  return "?";
}

RateCase parse_rate_case(const std::string& text) {
  if (text == "I" || text == "1" || text == "sb") return RateCase::I_sb;
  if (text == "II" || text == "2" || text == "al") return RateCase::II_al;
  if (text == "III" || text == "3" || text == "matched") return RateCase::III_matched;
  throw ConfigError("unknown case '" + text + "' (expected I, II or III)");
}

void require_case_parameters(RateCase rate_case, const RateParameters& params) {
  require_positive(params.rho, "rho");
  require_positive(params.eta, "eta");
  require_positive(params.alpha, "alpha");
  switch (rate_case) {
    case RateCase::I_sb:
      if (!close(params.rho, 1.0)) {
        throw ParameterError("case I requires rho = 1, got rho = " +
                             std::to_string(params.rho));
      }
      break;
    case RateCase::II_al:
      if (!close(params.eta, params.alpha)) {
        throw ParameterError("case II requires eta = alpha");
      }
      break;
    case RateCase::III_matched:
      if (!close(params.rho, params.eta / params.alpha)) {
        throw ParameterError("case III requires rho = eta/alpha (" +
                             std::to_string(params.eta / params.alpha) +
                             "), got rho = " + std::to_string(params.rho));
      }
      break;
  }
}

RateReport predict(RateCase rate_case, const RateParameters& params,
                   const DeltaSpectrum& spectrum) {
  require_positive(params.rho, "rho");
  require_positive(params.eta, "eta");
  require_positive(params.alpha, "alpha");
  if (!close(params.alpha, spectrum.alpha)) {
    throw ParameterError("alpha differs from the alpha of the delta spectrum");
  }
  require_case_parameters(rate_case, params);

  RateReport report;
  report.rate_case = rate_case;
  report.rho = params.rho;
  report.eta = params.eta;
  report.alpha = params.alpha;
  report.rates.resize(spectrum.deltas.size());
  double radius = 0.0;
  for (std::size_t i = 0; i < spectrum.deltas.size(); ++i) {
    const double d = spectrum.deltas[i];
    if (!DeltaSpectrum::defined(d)) {
      report.rates[i] = kNaN;
      continue;
    }
    double r = 0.0;
    switch (rate_case) {
      case RateCase::I_sb: r = rate_s1(d, params.eta, params.alpha); break;
      case RateCase::II_al: r = rate_s2(d, params.rho, params.alpha); break;
      case RateCase::III_matched: r = rate_s3(params.eta, params.alpha); break;
    }
    report.rates[i] = r;
    radius = std::max(radius, r);
  }
  report.spectral_radius = radius;
  report.gamma = gamma_of(spectrum);
  if (report.gamma > 0.0 && !std::isinf(report.gamma)) {
    report.optimal_eta = optimal_eta_sb(spectrum).eta_star;
    report.optimal_rho = optimal_rho_al(spectrum);
  } else {
    report.optimal_eta = kNaN;
    report.optimal_rho = kNaN;
  }
  return report;
}

const char* to_string(Faster f) {
  switch (f) {
    case Faster::sb: return "sb";
    case Faster::admm_matched: return "admm_matched";
    case Faster::tie: return "tie";
  }
  return "?";
}

Comparison compare_sb_vs_admm(double eta, double alpha,
                              const DeltaSpectrum& spectrum) {
  require_positive(eta, "eta");
  require_positive(alpha, "alpha");
  Comparison c;
  c.rho_recommended = eta / alpha;
  c.sb_radius = predict(RateCase::I_sb, {1.0, eta, alpha}, spectrum).spectral_radius;
  c.admm_radius = rate_s3(eta, alpha);
  c.faster = eta < alpha ? Faster::admm_matched : Faster::tie;
  return c;
}

void write_rate_report_csv(const std::filesystem::path& path,
                           const RateReport& report,
                           const DeltaSpectrum& spectrum) {
  if (report.rates.size() != spectrum.deltas.size()) {
    throw ShapeError("rate report and spectrum sizes differ");
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "freq_row,freq_col,delta,rate\n";
  const std::size_t w = spectrum.shape.width;
  for (std::size_t i = 0; i < report.rates.size(); ++i) {
    out << i / w << ',' << i % w << ',' << spectrum.deltas[i] << ','
        << report.rates[i] << '\n';
  }
  out << "# case=" << to_string(report.rate_case)
      << ",radius=" << report.spectral_radius << ",eta_star=" << report.optimal_eta
      << ",rho_star=" << report.optimal_rho << ",gamma=" << report.gamma << '\n';
}

double empirical_rate(const std::vector<double>& errors) {
  const std::size_t n = errors.size();
  if (n < 4) throw ParameterError("empirical_rate needs at least 4 samples");
  const std::size_t start = std::max(n / 2, n - std::max<std::size_t>(n / 4, 1) - 1);
  const double first = errors[start];
  const double last = errors[n - 1];
  if (!(first > 0.0) || !(last > 0.0)) {
    throw ParameterError("empirical_rate needs positive errors");
  }
  return std::pow(last / first, 1.0 / static_cast<double>(n - 1 - start));
}

}  // namespace sbadmm
