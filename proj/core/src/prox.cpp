#include "sbadmm/prox.hpp"

#include <algorithm>
#include <cmath>

#include "sbadmm/errors.hpp"

namespace sbadmm {
namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Positive root of eta v^2 + b v - eta a t = 0 where a = |z|; returns 0 when
// a = 0.
double fair_prox_magnitude(double a, double alpha, double t, double eta) {
  if (a == 0.0) return 0.0;
  const double b = eta * t + alpha * t - eta * a;
  const double disc = b * b + 4.0 * eta * eta * a * t;
  double v;
  if (b > 0.0) {
    v = 2.0 * eta * a * t / (b + std::sqrt(disc));
  } else {
    v = (-b + std::sqrt(disc)) / (2.0 * eta);
  }
  if (std::isfinite(v) && v >= 0.0) return v;
  // Newton on g(v) = alpha t v / (t + v) + eta (v - a), bracketed in [0, a].
  double lo = 0.0, hi = a;
  v = a;
  for (int it = 0; it < 200; ++it) {
    const double g = alpha * t * v / (t + v) + eta * (v - a);
    if (g > 0.0) hi = v; else lo = v;
    const double dg = alpha * t * t / ((t + v) * (t + v)) + eta;
    double next = v - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - v) <= 1e-16 * std::max(1.0, a)) return next;
    v = next;
  }
  return v;
}

}  // namespace

const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::quadratic: return "quadratic";
    case PotentialKind::l1: return "l1";
    case PotentialKind::huber: return "huber";
    case PotentialKind::fair: return "fair";
  }
  return "?";
}

PotentialKind parse_potential_kind(const std::string& text) {
  if (text == "quadratic") return PotentialKind::quadratic;
  if (text == "l1") return PotentialKind::l1;
  if (text == "huber") return PotentialKind::huber;
  if (text == "fair") return PotentialKind::fair;
  throw ConfigError("unknown potential '" + text + "'");
}

Potential::Potential(PotentialKind kind, double alpha, double threshold)
    : kind_(kind), alpha_(alpha), threshold_(threshold) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("potential alpha must be positive and finite");
  }
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw ParameterError("potential threshold must be positive and finite");
  }
}

Potential Potential::quadratic(double alpha) {
  return Potential(PotentialKind::quadratic, alpha, 1.0);
}
Potential Potential::l1(double alpha) {
  return Potential(PotentialKind::l1, alpha, 1.0);
}
Potential Potential::huber(double alpha, double threshold) {
  return Potential(PotentialKind::huber, alpha, threshold);
}
Potential Potential::fair(double alpha, double threshold) {
  return Potential(PotentialKind::fair, alpha, threshold);
}

double Potential::value(double v) const {
  const double a = std::abs(v);
  const double t = threshold_;
  switch (kind_) {
    case PotentialKind::quadratic:
      return 0.5 * alpha_ * v * v;
    case PotentialKind::l1:
      return alpha_ * a;
    case PotentialKind::huber:
      return alpha_ * (a <= t ? 0.5 * v * v : t * a - 0.5 * t * t);
    case PotentialKind::fair:
      return alpha_ * t * t * (a / t - std::log1p(a / t));
  }
  return 0.0;
}

double Potential::prox(double z, double eta) const {
  const double t = threshold_;
  switch (kind_) {
    case PotentialKind::quadratic:
      return eta / (eta + alpha_) * z;
    case PotentialKind::l1: {
      const double shrink = alpha_ / eta;
      return sign(z) * std::max(std::abs(z) - shrink, 0.0);
    }
    case PotentialKind::huber: {
      const double inner = eta / (eta + alpha_) * z;
      if (std::abs(inner) <= t) return inner;
      return z - sign(z) * alpha_ * t / eta;
    }
    case PotentialKind::fair:
      return sign(z) * fair_prox_magnitude(std::abs(z), alpha_, t, eta);
  }
  return z;
}

GradientField prox(const Potential& potential, const GradientField& z,
                   double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ParameterError("prox: eta must be positive and finite");
  }
  GradientField out = z;
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) {
    ov[i] = out.valid(i) ? potential.prox(z[i], eta) : 0.0;
  }
  return out;
}

double eval(const Potential& potential, const GradientField& v) {
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v.valid(i)) total += potential.value(v[i]);
  }
  return total;
}

}  // namespace sbadmm
