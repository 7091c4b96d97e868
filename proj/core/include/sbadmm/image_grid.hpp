#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sbadmm {

struct GridShape {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return height * width; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Row-major 2D array of doubles. Holds images, the data y, and the
/// A-range split variable u.
class ImageGrid {
 public:
  ImageGrid() = default;
  /// Zero-filled grid. Throws ShapeError on a zero dimension.
  explicit ImageGrid(GridShape shape);
  ImageGrid(GridShape shape, double fill);
  /// Takes ownership of `values`; length must equal height * width and
  /// every entry must be finite.
  ImageGrid(GridShape shape, std::vector<double> values);

  GridShape shape() const { return shape_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t row, std::size_t col) {
    return values_[row * shape_.width + col];
  }
  double operator()(std::size_t row, std::size_t col) const {
    return values_[row * shape_.width + col];
  }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

 private:
  GridShape shape_{};
  std::vector<double> values_;
};

/// Stack of per-direction difference planes over an image grid, with a
/// validity mask per entry. Masked entries are held at zero.
class GradientField {
 public:
  GradientField() = default;
  /// Zero-filled, every entry valid.
  GradientField(GridShape shape, std::size_t directions);

  GridShape shape() const { return shape_; }
  std::size_t directions() const { return directions_; }
  /// Total entry count: directions * height * width.
  std::size_t size() const { return values_.size(); }

  std::span<double> plane(std::size_t direction);
  std::span<const double> plane(std::size_t direction) const;

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool valid(std::size_t i) const { return mask_[i] != 0; }
  std::span<const unsigned char> mask() const { return mask_; }
  /// Replaces the mask and zeroes every newly invalid entry.
  void set_mask(std::vector<unsigned char> mask);
  /// Zeroes masked-out entries.
  void apply_mask();

  bool all_finite() const;

 private:
  GridShape shape_{};
  std::size_t directions_ = 0;
  std::vector<double> values_;
  std::vector<unsigned char> mask_;
};

// Vector-space helpers over the flat value arrays. Shapes must agree;
// mismatches throw ShapeError.
double dot(const ImageGrid& a, const ImageGrid& b);
double dot(const GradientField& a, const GradientField& b);
double squared_norm(const ImageGrid& a);
double squared_norm(const GradientField& a);
double norm(const ImageGrid& a);
double norm(const GradientField& a);

/// y <- y + a*x
void axpy(double a, const ImageGrid& x, ImageGrid& y);
void axpy(double a, const GradientField& x, GradientField& y);

/// a*x + b*y
ImageGrid linear_combination(double a, const ImageGrid& x, double b,
                             const ImageGrid& y);
GradientField linear_combination(double a, const GradientField& x, double b,
                                 const GradientField& y);

ImageGrid scaled(double a, const ImageGrid& x);
GradientField scaled(double a, const GradientField& x);

double max_abs_difference(const ImageGrid& a, const ImageGrid& b);
double max_abs_difference(const GradientField& a, const GradientField& b);

/// sqrt(mean((a - b)^2))
double rmsd(const ImageGrid& a, const ImageGrid& b);

}  // namespace sbadmm
