#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sbadmm/algorithms.hpp"
#include "sbadmm/inner_solvers.hpp"
#include "sbadmm/operators.hpp"
#include "sbadmm/prox.hpp"

namespace sbadmm {

struct PenaltyPair {
  double rho = 1.0;
  double eta = 1.0;
};

enum class ReferenceMethod { automatic, circulant, dense, long_run };

const char* to_string(ReferenceMethod m);
ReferenceMethod parse_reference_method(const std::string& text);

/// Settings of one restoration experiment. Read from a flat `key = value`
/// file; see README for the schema.
struct ExperimentConfig {
  // "phantom" or a path to a .pgm / plain-text matrix.
  std::string image = "phantom";
  std::size_t phantom_height = 64;
  std::size_t phantom_width = 64;

  std::string psf = "gaussian";  // gaussian | uniform | identity
  std::size_t psf_size = 7;
  double psf_sigma = 2.0;
  Boundary psf_boundary = Boundary::periodic;

  // Fraction of the true image's dynamic range.
  double noise_std = 0.01;
  std::uint64_t noise_seed = 1;

  PotentialKind potential = PotentialKind::quadratic;
  double alpha = 0.0625;
  double potential_threshold = 1.0;

  MaskMode mask_mode = MaskMode::masked;
  std::size_t directions = 2;

  Algorithm algorithm = Algorithm::admm2;
  // Penalties may be written relative to alpha ("a", "20a", "a/20"), so
  // they are kept as text and resolved against the current alpha.
  std::string rho = "1";
  std::string eta = "a";
  std::string grid;  // "rho:eta, ..."; empty selects the default five
  int max_iterations = 500;
  InnerSolveConfig inner{};
  ReferenceMethod reference = ReferenceMethod::automatic;

  std::filesystem::path output_dir = "out";

  ConvolutionKernel kernel() const;
  Potential make_potential() const;
  double rho_value() const;
  double eta_value() const;
  OuterConfig outer(double rho_value, double eta_value) const;
  /// `grid`, or {(1,a), (1,20a), (20,20a), (1,a/20), (1/20,a/20)} when empty.
  std::vector<PenaltyPair> effective_grid() const;

  /// Throws ConfigError on violated constraints.
  void validate() const;
};

/// Parses one number that may be scaled by alpha: "0.5", "1/20", "a",
/// "20a", "20*a", "a/20".
double parse_scaled_value(const std::string& text, double alpha);

/// "rho:eta, rho:eta, ..." with parse_scaled_value entries.
std::vector<PenaltyPair> parse_grid(const std::string& text, double alpha);

ExperimentConfig parse_config_text(const std::string& text);
/// Throws ConfigError naming the path when the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace sbadmm
