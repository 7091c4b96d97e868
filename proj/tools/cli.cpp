#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "sbadmm/dense_oracle.hpp"
#include "sbadmm/errors.hpp"
#include "sbadmm/experiments.hpp"
#include "sbadmm/io.hpp"
#include "sbadmm/spectral_analysis.hpp"

namespace sbadmm::cli {
namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> rho;
  std::optional<std::string> eta;
  std::optional<std::string> alpha;
  std::optional<int> iterations;
  std::optional<std::string> inner;
  std::optional<int> pcg_iterations;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algorithm;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value configuration file");
  cmd->add_option("--rho", o.rho, "ADMM penalty rho (may be written as 20a, a/20, ...)");
  cmd->add_option("--eta", o.eta, "penalty eta (may be relative to alpha)");
  cmd->add_option("--alpha", o.alpha, "regularization weight");
  cmd->add_option("--iters", o.iterations, "outer iterations");
  cmd->add_option("--inner", o.inner, "x-update solver")
      ->check(CLI::IsMember({"exact", "pcg"}));
  cmd->add_option("--pcg-iters", o.pcg_iterations, "PCG steps per x-update");
  cmd->add_option("--output-dir", o.output_dir, "directory for all artifacts");
  cmd->add_option("--seed", o.seed, "noise seed");
  cmd->add_option("--algorithm", o.algorithm,
                  "sb | admm2 | admm2_simplified | quadratic_closed_form");
}

// Flags beat config-file values.
ExperimentConfig resolve_config(const Overrides& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.alpha) c.alpha = parse_scaled_value(*o.alpha, 1.0);
  if (o.rho) c.rho = *o.rho;
  if (o.eta) c.eta = *o.eta;
  if (o.iterations) c.max_iterations = *o.iterations;
  if (o.inner) c.inner.mode = parse_inner_mode(*o.inner);
  if (o.pcg_iterations) c.inner.pcg_iterations = *o.pcg_iterations;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.seed) c.noise_seed = *o.seed;
  if (o.algorithm) c.algorithm = parse_algorithm(*o.algorithm);
  c.validate();
  return c;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

std::string short_num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void require_quadratic(const ExperimentConfig& c) {
  if (c.potential != PotentialKind::quadratic) {
    throw ParameterError(
        "rate analysis applies to the quadratic potential only; the linear "
        "convergence theory does not cover potential '" +
        std::string(to_string(c.potential)) + "'");
  }
}

RateCase infer_case(const RateParameters& p) {
  if (std::abs(p.rho - 1.0) <= kCaseTolerance) return RateCase::I_sb;
  if (std::abs(p.eta - p.alpha) <= kCaseTolerance * std::max(1.0, p.alpha)) {
    return RateCase::II_al;
  }
  if (std::abs(p.rho - p.eta / p.alpha) <= kCaseTolerance * std::max(1.0, p.rho)) {
    return RateCase::III_matched;
  }
  throw ParameterError(
      "(rho, eta) fits none of the analysed cases: need rho = 1, eta = alpha "
      "or rho = eta/alpha");
}

DeltaSpectrum band_spectrum(const std::vector<double>& band, double alpha) {
  if (band.size() != 2 || !(band[0] > 0.0) || !(band[1] >= band[0]) ||
      !std::isfinite(band[1])) {
    throw ParameterError("--delta-band needs 0 < lo <= hi < inf");
  }
  constexpr int kSamples = 257;
  std::vector<double> deltas;
  const double lr = std::log(band[1] / band[0]);
  for (int i = 0; i < kSamples; ++i) {
    deltas.push_back(i == kSamples - 1 ? band[1]
                                       : band[0] * std::exp(lr * i / (kSamples - 1)));
  }
  return delta_spectrum_from_values(std::move(deltas), alpha);
}

DeltaSpectrum problem_spectrum(const ExperimentConfig& c) {
  const GeneratedProblem gen = make_problem(c);
  return delta_spectrum(gen.problem.lambda(), gen.problem.omega(), c.alpha);
}

void print_optimum(std::ostream& out, const DeltaSpectrum& s) {
  out << "delta_min = " << num(s.delta_min) << "\n"
      << "delta_max = " << num(s.delta_max) << "\n";
  const OptimalEta opt = optimal_eta_sb(s);
  out << "gamma = " << num(opt.gamma) << "\n"
      << "eta_star = " << num(opt.eta_star) << "\n"
      << "rho_star = " << num(optimal_rho_al(s)) << "\n";
}

int cmd_restore(const Overrides& o, bool no_reference, std::ostream& out) {
  const ExperimentConfig c = resolve_config(o);
  const GeneratedProblem gen = make_problem(c);
  std::optional<Reference> ref;
  if (!no_reference) ref = reference_solution(gen.problem, c.reference);
  const OuterConfig outer = c.outer(c.rho_value(), c.eta_value());
  const RunResult r = run(gen.problem, outer, ref ? &*ref : nullptr);

  std::filesystem::create_directories(c.output_dir);
  write_trace_csv(c.output_dir / "trace.csv", r.trace);
  io::write_pgm(c.output_dir / "final.pgm", r.final_state.x);
  io::write_matrix_text(c.output_dir / "final.txt", r.final_state.x);

  const MetricRecord& last = r.trace.records.back();
  out << "algorithm = " << to_string(outer.algorithm) << "\n"
      << "rho = " << num(outer.rho) << ", eta = " << num(outer.eta)
      << ", alpha = " << num(c.alpha) << "\n"
      << "iterations = " << last.iter << "\n"
      << "final cost = " << num(last.cost) << "\n";
  if (ref) {
    out << "final rel_cost_err = " << num(last.rel_cost_err) << "\n"
        << "final rmsd = " << num(last.rmsd) << "\n";
    const auto hit = r.trace.iterations_to(kFigure2Tolerance);
    out << "iterations to rel_cost_err <= 1e-6 = "
        << (hit ? std::to_string(*hit) : std::string("not reached")) << "\n";
  }
  if (!r.convergence_guaranteed) {
    out << "warning: [A; C] is rank deficient, convergence is not guaranteed\n";
  }
  out << "wrote " << (c.output_dir / "trace.csv").string() << "\n";
  return kExitOk;
}

int cmd_predict(const Overrides& o, const std::string& case_text,
                const std::vector<double>& band, std::ostream& out) {
  const ExperimentConfig c = resolve_config(o);
  require_quadratic(c);
  const DeltaSpectrum s = band.empty() ? problem_spectrum(c) : band_spectrum(band, c.alpha);
  const RateParameters params{c.rho_value(), c.eta_value(), c.alpha};
  const RateCase rc = case_text.empty() ? infer_case(params) : parse_rate_case(case_text);
  const RateReport report = predict(rc, params, s);

  std::filesystem::create_directories(c.output_dir);
  write_rate_report_csv(c.output_dir / "rate_report.csv", report, s);
  out << "case = " << to_string(rc) << "\n"
      << "rho = " << num(params.rho) << ", eta = " << num(params.eta)
      << ", alpha = " << num(params.alpha) << "\n";
  print_optimum(out, s);
  out << "radius = " << num(report.spectral_radius) << "\n";
  out << "radius at optimum: case I (eta_star) = "
      << num(predict(RateCase::I_sb, {1.0, report.optimal_eta, c.alpha}, s).spectral_radius)
      << ", case II (rho_star) = "
      << num(predict(RateCase::II_al, {report.optimal_rho, c.alpha, c.alpha}, s)
                 .spectral_radius)
      << ", case III (eta) = " << num(rate_s3(params.eta, c.alpha)) << "\n";
  out << "wrote " << (c.output_dir / "rate_report.csv").string() << "\n";
  return kExitOk;
}

int cmd_recommend(const Overrides& o, const std::vector<double>& band,
                  std::ostream& out) {
  const ExperimentConfig c = resolve_config(o);
  require_quadratic(c);
  const DeltaSpectrum s = band.empty() ? problem_spectrum(c) : band_spectrum(band, c.alpha);
  const OptimalEta opt = optimal_eta_sb(s);
  const RateReport sb = predict(RateCase::I_sb, {1.0, opt.eta_star, c.alpha}, s);

  std::filesystem::create_directories(c.output_dir);
  write_rate_report_csv(c.output_dir / "recommend.csv", sb, s);
  out << "alpha = " << num(c.alpha) << "\n";
  print_optimum(out, s);
  out << "split Bregman radius at eta_star = " << num(sb.spectral_radius) << "\n"
      << "augmented Lagrangian radius at rho_star = "
      << num(predict(RateCase::II_al, {optimal_rho_al(s), c.alpha, c.alpha}, s)
                 .spectral_radius)
      << "\n"
      << "wrote " << (c.output_dir / "recommend.csv").string() << "\n";
  return kExitOk;
}

int cmd_figure2(const Overrides& o, std::ostream& out) {
  const ExperimentConfig c = resolve_config(o);
  const Figure2Result r = figure2_protocol(c);
  bool failed = false;
  out << std::left << std::setw(28) << "setting" << std::setw(12) << "iters_1e-6"
      << std::setw(16) << "final_rel_err" << "final_rmsd\n";
  for (const auto& run : r.runs) {
    out << std::setw(28) << run.label;
    if (!run.error.empty()) {
      failed = true;
      out << "failed: " << run.error << "\n";
      continue;
    }
    const MetricRecord& last = run.trace.records.back();
    out << std::setw(12)
        << (run.iterations_to_tolerance ? std::to_string(*run.iterations_to_tolerance)
                                        : std::string("-"))
        << std::setw(16) << short_num(last.rel_cost_err) << short_num(last.rmsd)
        << "\n";
  }
  out << "wrote " << r.runs.size() << " traces and summary.csv to "
      << c.output_dir.string() << "\n";
  return failed ? kExitSolver : kExitOk;
}

int cmd_spectra(const Overrides& o, std::ostream& out) {
  const ExperimentConfig c = resolve_config(o);
  const GeneratedProblem gen = make_problem(c);
  const auto& p = gen.problem;
  std::filesystem::create_directories(c.output_dir);
  io::write_spectra_csv(c.output_dir / "spectra.csv", p.lambda(), p.omega());
  out << "grid = " << p.shape().height << "x" << p.shape().width << "\n"
      << "lambda in [" << num(p.lambda().min()) << ", " << num(p.lambda().max())
      << "]" << (p.lambda().approximate ? " (circulant surrogate)" : "") << "\n"
      << "omega in [" << num(p.omega().min()) << ", " << num(p.omega().max())
      << "]" << (p.omega().approximate ? " (circulant surrogate)" : "") << "\n"
      << "omega at DC = " << num(p.omega().eigenvalues.front()) << "\n"
      << "full rank = " << (p.rank_check().full_rank ? "yes" : "no")
      << " (min lambda + omega = " << num(p.rank_check().min_combined_eigenvalue)
      << ")\n"
      << "wrote " << (c.output_dir / "spectra.csv").string() << "\n";
  return kExitOk;
}

GridShape parse_grid_shape(const std::string& text) {
  const auto x = text.find_first_of("xX");
  std::size_t h = 0, w = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    h = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    w = std::stoul(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument(text);
  } catch (const std::logic_error&) {
    throw ParameterError("--grid expects HxW, got '" + text + "'");
  }
  if (h == 0 || w == 0 || h * w > kDenseOracleMaxPixels) {
    throw ParameterError("--grid must have between 1 and " +
                         std::to_string(kDenseOracleMaxPixels) + " pixels");
  }
  return {h, w};
}

int cmd_oracle(const Overrides& o, const std::string& grid_text,
               const std::string& case_text, std::ostream& out) {
  ExperimentConfig c = resolve_config(o);
  require_quadratic(c);
  const GridShape shape = parse_grid_shape(grid_text);
  c.image = "phantom";
  c.phantom_height = shape.height;
  c.phantom_width = shape.width;
  c.psf_boundary = Boundary::periodic;
  c.mask_mode = MaskMode::periodic;
  const GeneratedProblem gen = make_problem(c);
  const RateParameters params{c.rho_value(), c.eta_value(), c.alpha};
  const RateCase rc = case_text.empty() ? infer_case(params) : parse_rate_case(case_text);
  const DeltaSpectrum s = delta_spectrum(gen.problem.lambda(), gen.problem.omega(), c.alpha);
  const RateReport analytic = predict(rc, params, s);
  const DenseTransition dense = dense_transition_oracle(gen.problem, rc, params);

  const double diff = std::abs(dense.radius_H - analytic.spectral_radius);
  out << "grid = " << shape.height << "x" << shape.width << ", case = " << to_string(rc)
      << "\n"
      << "rho = " << num(params.rho) << ", eta = " << num(params.eta)
      << ", alpha = " << num(params.alpha) << "\n"
      << "dense x-transition radius = " << num(dense.radius_H) << "\n"
      << "analytic radius = " << num(analytic.spectral_radius) << "\n"
      << "split-variable transition radius = " << num(dense.radius_G) << "\n"
      << "difference = " << num(diff) << "\n"
      << "agree to 1e-10 = " << (diff <= 1e-10 ? "yes" : "no") << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Split Bregman / two-split ADMM image restoration and rate analysis",
               "sbadmm"};
  app.require_subcommand(1);

  Overrides o;
  bool no_reference = false;
  std::string case_text;
  std::string grid_text = "4x4";
  std::vector<double> band;

  auto* restore = app.add_subcommand("restore", "run one restoration");
  add_common_options(restore, o);
  restore->add_flag("--no-reference", no_reference,
                    "skip the reference solve (no error metrics)");

  auto* predict_cmd = app.add_subcommand("predict", "predicted convergence rates");
  add_common_options(predict_cmd, o);
  predict_cmd->add_option("--case", case_text, "I | II | III (default: inferred)");
  predict_cmd->add_option("--delta-band", band, "synthetic spectrum lo,hi")
      ->delimiter(',')
      ->expected(2);

  auto* recommend = app.add_subcommand("recommend", "optimal eta and rho");
  add_common_options(recommend, o);
  recommend->add_option("--delta-band", band, "synthetic spectrum lo,hi")
      ->delimiter(',')
      ->expected(2);

  auto* figure2 = app.add_subcommand("figure2", "penalty-grid convergence protocol");
  add_common_options(figure2, o);

  auto* spectra = app.add_subcommand("spectra", "Gram eigenvalues of A and C");
  add_common_options(spectra, o);

  auto* oracle = app.add_subcommand("oracle", "dense versus analytic radius");
  add_common_options(oracle, o);
  oracle->add_option("--grid", grid_text, "HxW, at most 256 pixels");
  oracle->add_option("--case", case_text, "I | II | III (default: inferred)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*restore) return cmd_restore(o, no_reference, out);
    if (*predict_cmd) return cmd_predict(o, case_text, band, out);
    if (*recommend) return cmd_recommend(o, band, out);
    if (*figure2) return cmd_figure2(o, out);
    if (*spectra) return cmd_spectra(o, out);
    if (*oracle) return cmd_oracle(o, grid_text, case_text, out);
  } catch (const SolverError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const SingularHessianError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace sbadmm::cli
