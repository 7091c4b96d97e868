#include "sbadmm/image_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbadmm/errors.hpp"

namespace sbadmm {
namespace {

void require_nonempty(GridShape shape) {
  if (shape.height == 0 || shape.width == 0) {
    throw ShapeError("grid dimensions must be positive, got " +
                     std::to_string(shape.height) + "x" +
                     std::to_string(shape.width));
  }
}

bool finite_span(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

template <typename T>
void require_same(const T& a, const T& b, const char* what) {
  if (a.shape() != b.shape() || a.size() != b.size()) {
    throw ShapeError(std::string(what) + ": shape mismatch");
  }
}

}  // namespace

ImageGrid::ImageGrid(GridShape shape) : ImageGrid(shape, 0.0) {}

ImageGrid::ImageGrid(GridShape shape, double fill)
    : shape_(shape), values_((require_nonempty(shape), shape.size()), fill) {}

ImageGrid::ImageGrid(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  require_nonempty(shape);
  if (values_.size() != shape.size()) {
    throw ShapeError("value count " + std::to_string(values_.size()) +
                     " does not match grid " + std::to_string(shape.height) +
                     "x" + std::to_string(shape.width));
  }
  if (!all_finite()) throw ShapeError("grid values must be finite");
}

bool ImageGrid::all_finite() const { return finite_span(values_); }

GradientField::GradientField(GridShape shape, std::size_t directions)
    : shape_(shape), directions_(directions) {
  require_nonempty(shape);
  if (directions == 0) throw ShapeError("gradient field needs a direction");
  values_.assign(directions * shape.size(), 0.0);
  mask_.assign(values_.size(), 1);
}

std::span<double> GradientField::plane(std::size_t direction) {
  return std::span<double>(values_).subspan(direction * shape_.size(),
                                            shape_.size());
}

std::span<const double> GradientField::plane(std::size_t direction) const {
  return std::span<const double>(values_).subspan(direction * shape_.size(),
                                                  shape_.size());
}

void GradientField::set_mask(std::vector<unsigned char> mask) {
  if (mask.size() != values_.size()) throw ShapeError("mask size mismatch");
  mask_ = std::move(mask);
  apply_mask();
}

void GradientField::apply_mask() {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!mask_[i]) values_[i] = 0.0;
  }
}

bool GradientField::all_finite() const { return finite_span(values_); }

namespace {

double dot_span(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs_diff_span(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace

double dot(const ImageGrid& a, const ImageGrid& b) {
  require_same(a, b, "dot");
  return dot_span(a.values(), b.values());
}

double dot(const GradientField& a, const GradientField& b) {
  require_same(a, b, "dot");
  return dot_span(a.values(), b.values());
}

double squared_norm(const ImageGrid& a) { return dot_span(a.values(), a.values()); }
double squared_norm(const GradientField& a) {
  return dot_span(a.values(), a.values());
}
double norm(const ImageGrid& a) { return std::sqrt(squared_norm(a)); }
double norm(const GradientField& a) { return std::sqrt(squared_norm(a)); }

void axpy(double a, const ImageGrid& x, ImageGrid& y) {
  require_same(x, y, "axpy");
  auto yv = y.values();
  auto xv = x.values();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] += a * xv[i];
}

void axpy(double a, const GradientField& x, GradientField& y) {
  require_same(x, y, "axpy");
  auto yv = y.values();
  auto xv = x.values();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] += a * xv[i];
  y.apply_mask();
}

ImageGrid linear_combination(double a, const ImageGrid& x, double b,
                             const ImageGrid& y) {
  require_same(x, y, "linear_combination");
  ImageGrid out(x.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

GradientField linear_combination(double a, const GradientField& x, double b,
                                 const GradientField& y) {
  require_same(x, y, "linear_combination");
  GradientField out = x;
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = a * x[i] + b * y[i];
  out.apply_mask();
  return out;
}

ImageGrid scaled(double a, const ImageGrid& x) {
  ImageGrid out = x;
  for (double& v : out.values()) v *= a;
  return out;
}

GradientField scaled(double a, const GradientField& x) {
  GradientField out = x;
  for (double& v : out.values()) v *= a;
  return out;
}

double max_abs_difference(const ImageGrid& a, const ImageGrid& b) {
  require_same(a, b, "max_abs_difference");
  return max_abs_diff_span(a.values(), b.values());
}

double max_abs_difference(const GradientField& a, const GradientField& b) {
  require_same(a, b, "max_abs_difference");
  return max_abs_diff_span(a.values(), b.values());
}

double rmsd(const ImageGrid& a, const ImageGrid& b) {
  require_same(a, b, "rmsd");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace sbadmm
