#pragma once

#include <string>

#include "sbadmm/image_grid.hpp"

namespace sbadmm {

enum class PotentialKind { quadratic, l1, huber, fair };

const char* to_string(PotentialKind k);
PotentialKind parse_potential_kind(const std::string& text);

/// Separable convex potential Phi(v) = sum_j phi(v_j):
///   quadratic  (alpha/2) v^2
///   l1         alpha |v|
///   huber      alpha * (v^2/2            if |v| <= t
///                       t|v| - t^2/2     otherwise)
///   fair       alpha * t^2 (|v|/t - log(1 + |v|/t))
class Potential {
 public:
  static Potential quadratic(double alpha);
  static Potential l1(double alpha);
  static Potential huber(double alpha, double threshold);
  static Potential fair(double alpha, double threshold);

  PotentialKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double threshold() const { return threshold_; }

  double value(double v) const;
  /// argmin_v phi(v) + (eta/2)(z - v)^2
  double prox(double z, double eta) const;

 private:
  Potential(PotentialKind kind, double alpha, double threshold);

  PotentialKind kind_;
  double alpha_;
  double threshold_;
};

/// Elementwise proximal map on valid entries; masked entries stay zero.
/// Throws ParameterError when eta <= 0.
GradientField prox(const Potential& potential, const GradientField& z,
                   double eta);

/// Phi(v) summed over valid entries.
double eval(const Potential& potential, const GradientField& v);

}  // namespace sbadmm
