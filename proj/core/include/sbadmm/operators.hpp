#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sbadmm/image_grid.hpp"

namespace sbadmm {

enum class Boundary {
  periodic,  // circular convolution
  masked,    // outputs whose stencil leaves the grid are zeroed
};

const char* to_string(Boundary b);
Boundary parse_boundary(const std::string& text);

/// Shift-invariant degradation A. Output pixel i is
///   (A x)[i] = sum_p taps[p] * x[i + anchor - p]
/// i.e. a true convolution whose tap at `anchor` multiplies x[i].
class ConvolutionKernel {
 public:
  ConvolutionKernel(GridShape tap_shape, std::vector<double> taps,
                    std::size_t anchor_row, std::size_t anchor_col,
                    Boundary boundary = Boundary::periodic);

  static ConvolutionKernel identity(Boundary boundary = Boundary::periodic);
  /// size x size box filter with taps 1/size^2, centered anchor.
  static ConvolutionKernel uniform(std::size_t size,
                                   Boundary boundary = Boundary::periodic);
  /// Normalized, truncated isotropic Gaussian, centered anchor.
  static ConvolutionKernel gaussian(std::size_t size, double sigma,
                                    Boundary boundary = Boundary::periodic);

  GridShape tap_shape() const { return tap_shape_; }
  double tap(std::size_t row, std::size_t col) const {
    return taps_[row * tap_shape_.width + col];
  }
  std::size_t anchor_row() const { return anchor_row_; }
  std::size_t anchor_col() const { return anchor_col_; }
  Boundary boundary() const { return boundary_; }

  ConvolutionKernel with_boundary(Boundary boundary) const;

 private:
  GridShape tap_shape_;
  std::vector<double> taps_;
  std::size_t anchor_row_;
  std::size_t anchor_col_;
  Boundary boundary_;
};

ImageGrid blur_forward(const ConvolutionKernel& kernel, const ImageGrid& x);
ImageGrid blur_adjoint(const ConvolutionKernel& kernel, const ImageGrid& r);
/// Validity mask of the blur output (all ones for periodic boundary).
std::vector<unsigned char> blur_output_mask(const ConvolutionKernel& kernel,
                                            GridShape shape);

enum class MaskMode {
  masked,    // differences that would wrap across the border are removed
  periodic,  // differences wrap
};

const char* to_string(MaskMode m);
MaskMode parse_mask_mode(const std::string& text);

/// Forward first-order differences x[p + offset] - x[p]. Direction 0 is
/// horizontal (0,+1), 1 vertical (+1,0), 2 diagonal (+1,+1), 3 anti-diagonal
/// (+1,-1).
struct DifferenceOperator {
  MaskMode mode = MaskMode::masked;
  std::size_t directions = 2;
};

inline constexpr std::size_t kMaxDirections = 4;

std::vector<unsigned char> difference_mask(GridShape shape, MaskMode mode,
                                           std::size_t directions);

GradientField finite_diff_forward(const ImageGrid& x, MaskMode mode,
                                  std::size_t directions = 2);
ImageGrid finite_diff_adjoint(const GradientField& g, MaskMode mode);

inline GradientField apply(const DifferenceOperator& c, const ImageGrid& x) {
  return finite_diff_forward(x, c.mode, c.directions);
}
inline ImageGrid apply_adjoint(const DifferenceOperator& c,
                               const GradientField& g) {
  return finite_diff_adjoint(g, c.mode);
}

enum class GramLabel {
  blur,        // lambda_i of A'A
  difference,  // omega_i of C'C
  custom,
};

/// Per-frequency eigenvalues of a symmetric BCCB Gram matrix. Indexing
/// follows the unshifted 2D DFT: entry (r, c) is frequency (r, c).
struct BccbSpectrum {
  GridShape shape;
  std::vector<double> eigenvalues;
  GramLabel label = GramLabel::custom;
  // True when the operator is not exactly circulant (masked boundary) and
  // the spectrum belongs to its periodic surrogate.
  bool approximate = false;

  double at(std::size_t row, std::size_t col) const {
    return eigenvalues[row * shape.width + col];
  }
  double min() const;
  double max() const;

  static BccbSpectrum constant(GridShape shape, double value,
                               GramLabel label = GramLabel::custom);
};

BccbSpectrum bccb_spectrum_of_gram(const ConvolutionKernel& kernel,
                                   GridShape shape);
BccbSpectrum bccb_spectrum_of_gram(const DifferenceOperator& diff,
                                   GridShape shape);

struct RankCheck {
  bool full_rank = false;
  double min_combined_eigenvalue = 0.0;
};

inline constexpr double kRankTolerance = 1e-12;

/// Full column rank of S = [A; C] via min_i(lambda_i + omega_i).
RankCheck split_operator_rank_check(const BccbSpectrum& lambda,
                                    const BccbSpectrum& omega,
                                    double tolerance = kRankTolerance);

/// Pointwise multiplication by a spectrum in the DFT domain.
ImageGrid apply_spectrum(const BccbSpectrum& spectrum, const ImageGrid& x);

}  // namespace sbadmm
