#include "sbadmm/experiment_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sbadmm/errors.hpp"

namespace sbadmm {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("cannot parse number '" + text + "' for " + context);
  }
  return v;
}

// "p" or "p/q"
double parse_fraction(const std::string& text, const std::string& context) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_number(text, context);
  const double num = parse_number(text.substr(0, slash), context);
  const double den = parse_number(text.substr(slash + 1), context);
  if (den == 0.0) throw ConfigError("division by zero in '" + text + "'");
  return num / den;
}

template <typename T>
T parse_integer(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  T v{};
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

}  // namespace

const char* to_string(ReferenceMethod m) {
  switch (m) {
    case ReferenceMethod::automatic: return "auto";
    case ReferenceMethod::circulant: return "circulant";
    case ReferenceMethod::dense: return "dense";
    case ReferenceMethod::long_run: return "long_run";
  }
  return "?";
}

ReferenceMethod parse_reference_method(const std::string& text) {
  if (text == "auto") return ReferenceMethod::automatic;
  if (text == "circulant") return ReferenceMethod::circulant;
  if (text == "dense") return ReferenceMethod::dense;
  if (text == "long_run") return ReferenceMethod::long_run;
  throw ConfigError("unknown reference method '" + text + "'");
}

double parse_scaled_value(const std::string& raw, double alpha) {
  std::string text;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) text.push_back(ch);
  }
  const auto apos = text.find('a');
  if (apos == std::string::npos) return parse_fraction(text, "'" + raw + "'");
  if (text.find('a', apos + 1) != std::string::npos) {
    throw ConfigError("alpha appears twice in '" + raw + "'");
  }
  std::string prefix = text.substr(0, apos);
  std::string suffix = text.substr(apos + 1);
  if (!prefix.empty() && prefix.back() == '*') prefix.pop_back();
  double value = alpha * (prefix.empty() ? 1.0 : parse_fraction(prefix, "'" + raw + "'"));
  if (!suffix.empty()) {
    const char op = suffix.front();
    const double operand = parse_fraction(suffix.substr(1), "'" + raw + "'");
    if (op == '/') {
      if (operand == 0.0) throw ConfigError("division by zero in '" + raw + "'");
      value /= operand;
    } else if (op == '*') {
      value *= operand;
    } else {
      throw ConfigError("cannot parse '" + raw + "'");
    }
  }
  return value;
}

std::vector<PenaltyPair> parse_grid(const std::string& text, double alpha) {
  std::vector<PenaltyPair> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("grid entry '" + item + "' must be rho:eta");
    }
    grid.push_back({parse_scaled_value(item.substr(0, colon), alpha),
                    parse_scaled_value(item.substr(colon + 1), alpha)});
  }
  if (grid.empty()) throw ConfigError("parameter grid is empty");
  return grid;
}

ConvolutionKernel ExperimentConfig::kernel() const {
  if (psf == "gaussian") return ConvolutionKernel::gaussian(psf_size, psf_sigma, psf_boundary);
  if (psf == "uniform") return ConvolutionKernel::uniform(psf_size, psf_boundary);
  if (psf == "identity") return ConvolutionKernel::identity(psf_boundary);
  throw ConfigError("unknown psf '" + psf + "'");
}

Potential ExperimentConfig::make_potential() const {
  switch (potential) {
    case PotentialKind::quadratic: return Potential::quadratic(alpha);
    case PotentialKind::l1: return Potential::l1(alpha);
    case PotentialKind::huber: return Potential::huber(alpha, potential_threshold);
    case PotentialKind::fair: return Potential::fair(alpha, potential_threshold);
  }
  throw ConfigError("unknown potential");
}

double ExperimentConfig::rho_value() const { return parse_scaled_value(rho, alpha); }
double ExperimentConfig::eta_value() const { return parse_scaled_value(eta, alpha); }

OuterConfig ExperimentConfig::outer(double rho_value, double eta_value) const {
  OuterConfig c;
  c.rho = rho_value;
  c.eta = eta_value;
  c.max_iterations = max_iterations;
  c.inner = inner;
  c.algorithm = algorithm;
  return c;
}

std::vector<PenaltyPair> ExperimentConfig::effective_grid() const {
  if (!grid.empty()) return parse_grid(grid, alpha);
  return {{1.0, alpha},
          {1.0, 20.0 * alpha},
          {20.0, 20.0 * alpha},
          {1.0, alpha / 20.0},
          {1.0 / 20.0, alpha / 20.0}};
}

void ExperimentConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive");
  if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be nonnegative");
  if (phantom_height == 0 || phantom_width == 0) {
    throw ConfigError("phantom dimensions must be positive");
  }
  if (psf_size == 0) throw ConfigError("psf_size must be positive");
  if (!(psf_sigma > 0.0)) throw ConfigError("psf_sigma must be positive");
  if (!(potential_threshold > 0.0)) throw ConfigError("potential_threshold must be positive");
  if (directions == 0 || directions > kMaxDirections) {
    throw ConfigError("directions must be in [1, 4]");
  }
  if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  const double r = rho_value(), e = eta_value();
  if (!(r > 0.0)) throw ConfigError("constraint rho > 0 violated (rho = " + rho + ")");
  if (!(e > 0.0)) throw ConfigError("constraint eta > 0 violated (eta = " + eta + ")");
  for (const auto& p : effective_grid()) {
    if (!(p.rho > 0.0) || !(p.eta > 0.0)) {
      throw ConfigError("grid entries need rho > 0 and eta > 0");
    }
  }
  if (inner.mode == InnerMode::pcg && inner.pcg_iterations < 1) {
    throw ConfigError("pcg_iters must be >= 1");
  }
  if (!(inner.pcg_tolerance >= 0.0)) throw ConfigError("pcg_tolerance must be >= 0");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "image") c.image = value;
    else if (key == "phantom_size") {
      c.phantom_height = c.phantom_width = parse_integer<std::size_t>(value, key);
    }
    else if (key == "phantom_height") c.phantom_height = parse_integer<std::size_t>(value, key);
    else if (key == "phantom_width") c.phantom_width = parse_integer<std::size_t>(value, key);
    else if (key == "psf") c.psf = value;
    else if (key == "psf_size") c.psf_size = parse_integer<std::size_t>(value, key);
    else if (key == "psf_sigma") c.psf_sigma = parse_number(value, key);
    else if (key == "psf_boundary") c.psf_boundary = parse_boundary(value);
    else if (key == "noise_std") c.noise_std = parse_number(value, key);
    else if (key == "noise_seed") c.noise_seed = parse_integer<std::uint64_t>(value, key);
    else if (key == "potential") c.potential = parse_potential_kind(value);
    else if (key == "alpha") c.alpha = parse_fraction(value, key);
    else if (key == "potential_threshold") c.potential_threshold = parse_number(value, key);
    else if (key == "mask_mode") c.mask_mode = parse_mask_mode(value);
    else if (key == "directions") c.directions = parse_integer<std::size_t>(value, key);
    else if (key == "algorithm") c.algorithm = parse_algorithm(value);
    else if (key == "rho") c.rho = value;
    else if (key == "eta") c.eta = value;
    else if (key == "grid") c.grid = value;
    else if (key == "max_iterations") c.max_iterations = parse_integer<int>(value, key);
    else if (key == "inner") c.inner.mode = parse_inner_mode(value);
    else if (key == "pcg_iters") c.inner.pcg_iterations = parse_integer<int>(value, key);
    else if (key == "pcg_tolerance") c.inner.pcg_tolerance = parse_number(value, key);
    else if (key == "preconditioner") c.inner.preconditioner = parse_preconditioner(value);
    else if (key == "reference") c.reference = parse_reference_method(value);
    else if (key == "output_dir") c.output_dir = value;
    else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace sbadmm
