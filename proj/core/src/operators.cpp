#include "sbadmm/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "sbadmm/errors.hpp"
#include "sbadmm/fft.hpp"

namespace sbadmm {
namespace {

struct Offset {
  long dr;
  long dc;
};

constexpr Offset kDifferenceOffsets[kMaxDirections] = {
    {0, 1}, {1, 0}, {1, 1}, {1, -1}};

long wrap(long i, long n) {
  long r = i % n;
  return r < 0 ? r + n : r;
}

void require_directions(std::size_t directions) {
  if (directions == 0 || directions > kMaxDirections) {
    throw ShapeError("difference directions must be in [1, " +
                     std::to_string(kMaxDirections) + "], got " +
                     std::to_string(directions));
  }
}

void require_differentiable(GridShape shape) {
  if (shape.size() < 2) {
    throw ShapeError("finite differences need at least two pixels");
  }
}

}  // namespace

const char* to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "masked";
}

Boundary parse_boundary(const std::string& text) {
  if (text == "periodic") return Boundary::periodic;
  if (text == "masked" || text == "masked-valid") return Boundary::masked;
  throw ConfigError("unknown boundary '" + text + "'");
}

const char* to_string(MaskMode m) {
  return m == MaskMode::periodic ? "periodic" : "masked";
}

MaskMode parse_mask_mode(const std::string& text) {
  if (text == "periodic") return MaskMode::periodic;
  if (text == "masked") return MaskMode::masked;
  throw ConfigError("unknown mask mode '" + text + "'");
}

ConvolutionKernel::ConvolutionKernel(GridShape tap_shape,
                                     std::vector<double> taps,
                                     std::size_t anchor_row,
                                     std::size_t anchor_col, Boundary boundary)
    : tap_shape_(tap_shape),
      taps_(std::move(taps)),
      anchor_row_(anchor_row),
      anchor_col_(anchor_col),
      boundary_(boundary) {
  if (tap_shape.size() == 0 || taps_.size() != tap_shape.size()) {
    throw ShapeError("kernel tap count does not match its shape");
  }
  if (anchor_row >= tap_shape.height || anchor_col >= tap_shape.width) {
    throw ShapeError("kernel anchor outside the tap array");
  }
  if (std::none_of(taps_.begin(), taps_.end(),
                   [](double t) { return t != 0.0; })) {
    throw ShapeError("kernel needs at least one nonzero tap");
  }
  if (std::any_of(taps_.begin(), taps_.end(),
                  [](double t) { return !std::isfinite(t); })) {
    throw ShapeError("kernel taps must be finite");
  }
}

ConvolutionKernel ConvolutionKernel::identity(Boundary boundary) {
  return ConvolutionKernel({1, 1}, {1.0}, 0, 0, boundary);
}

ConvolutionKernel ConvolutionKernel::uniform(std::size_t size,
                                             Boundary boundary) {
  if (size == 0) throw ShapeError("uniform kernel size must be positive");
  const double w = 1.0 / static_cast<double>(size * size);
  return ConvolutionKernel({size, size}, std::vector<double>(size * size, w),
                           size / 2, size / 2, boundary);
}

ConvolutionKernel ConvolutionKernel::gaussian(std::size_t size, double sigma,
                                              Boundary boundary) {
  if (size == 0) throw ShapeError("gaussian kernel size must be positive");
  if (!(sigma > 0.0)) throw ParameterError("gaussian sigma must be positive");
  const double center = static_cast<double>(size - 1) / 2.0;
  std::vector<double> taps(size * size);
  double total = 0.0;
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const double dr = static_cast<double>(r) - center;
      const double dc = static_cast<double>(c) - center;
      const double v = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
      taps[r * size + c] = v;
      total += v;
    }
  }
  for (double& t : taps) t /= total;
  return ConvolutionKernel({size, size}, std::move(taps), size / 2, size / 2,
                           boundary);
}

ConvolutionKernel ConvolutionKernel::with_boundary(Boundary boundary) const {
  ConvolutionKernel k = *this;
  k.boundary_ = boundary;
  return k;
}

std::vector<unsigned char> blur_output_mask(const ConvolutionKernel& kernel,
                                            GridShape shape) {
  std::vector<unsigned char> mask(shape.size(), 1);
  if (kernel.boundary() == Boundary::periodic) return mask;
  // Output i reads x[i + anchor - p] for every tap p.
  const long kh = static_cast<long>(kernel.tap_shape().height);
  const long kw = static_cast<long>(kernel.tap_shape().width);
  const long ar = static_cast<long>(kernel.anchor_row());
  const long ac = static_cast<long>(kernel.anchor_col());
  const long h = static_cast<long>(shape.height);
  const long w = static_cast<long>(shape.width);
  const long r_lo = kh - 1 - ar, r_hi = h - 1 - ar;
  const long c_lo = kw - 1 - ac, c_hi = w - 1 - ac;
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      const bool ok = r >= r_lo && r <= r_hi && c >= c_lo && c <= c_hi;
      mask[static_cast<std::size_t>(r * w + c)] = ok ? 1 : 0;
    }
  }
  return mask;
}

namespace {

// out[r, c] += t * src[r + dr, c + dc] with periodic wrap.
void accumulate_shifted(std::span<double> out, std::span<const double> src,
                        double t, long dr, long dc, long h, long w) {
  const long s0 = wrap(dc, w);
  const long split = w - s0;
  for (long r = 0; r < h; ++r) {
    double* o = out.data() + r * w;
    const double* in = src.data() + wrap(r + dr, h) * w;
    for (long c = 0; c < split; ++c) o[c] += t * in[c + s0];
    for (long c = split; c < w; ++c) o[c] += t * in[c - split];
  }
}

void check_blur_shape(const ConvolutionKernel& kernel, GridShape shape) {
  if (kernel.boundary() == Boundary::masked &&
      (kernel.tap_shape().height > shape.height ||
       kernel.tap_shape().width > shape.width)) {
    throw ShapeError("masked-valid kernel larger than the image grid");
  }
}

}  // namespace

ImageGrid blur_forward(const ConvolutionKernel& kernel, const ImageGrid& x) {
  check_blur_shape(kernel, x.shape());
  const long h = static_cast<long>(x.height());
  const long w = static_cast<long>(x.width());
  ImageGrid out(x.shape());
  for (std::size_t p = 0; p < kernel.tap_shape().height; ++p) {
    for (std::size_t q = 0; q < kernel.tap_shape().width; ++q) {
      const double t = kernel.tap(p, q);
      if (t == 0.0) continue;
      const long dr = static_cast<long>(kernel.anchor_row()) - static_cast<long>(p);
      const long dc = static_cast<long>(kernel.anchor_col()) - static_cast<long>(q);
      accumulate_shifted(out.values(), x.values(), t, dr, dc, h, w);
    }
  }
  if (kernel.boundary() == Boundary::masked) {
    const auto mask = blur_output_mask(kernel, x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!mask[i]) out[i] = 0.0;
    }
  }
  return out;
}

ImageGrid blur_adjoint(const ConvolutionKernel& kernel, const ImageGrid& r) {
  check_blur_shape(kernel, r.shape());
  ImageGrid masked_r = r;
  if (kernel.boundary() == Boundary::masked) {
    const auto mask = blur_output_mask(kernel, r.shape());
    for (std::size_t i = 0; i < masked_r.size(); ++i) {
      if (!mask[i]) masked_r[i] = 0.0;
    }
  }
  const long h = static_cast<long>(r.height());
  const long w = static_cast<long>(r.width());
  ImageGrid out(r.shape());
  for (std::size_t p = 0; p < kernel.tap_shape().height; ++p) {
    for (std::size_t q = 0; q < kernel.tap_shape().width; ++q) {
      const double t = kernel.tap(p, q);
      if (t == 0.0) continue;
      const long dr = static_cast<long>(kernel.anchor_row()) - static_cast<long>(p);
      const long dc = static_cast<long>(kernel.anchor_col()) - static_cast<long>(q);
      // Gather form of the transpose: out[j] += t * r[j - offset].
      accumulate_shifted(out.values(), masked_r.values(), t, -dr, -dc, h, w);
    }
  }
  return out;
}

std::vector<unsigned char> difference_mask(GridShape shape, MaskMode mode,
                                           std::size_t directions) {
  require_directions(directions);
  std::vector<unsigned char> mask(directions * shape.size(), 1);
  if (mode == MaskMode::periodic) return mask;
  const long h = static_cast<long>(shape.height);
  const long w = static_cast<long>(shape.width);
  for (std::size_t d = 0; d < directions; ++d) {
    const Offset off = kDifferenceOffsets[d];
    for (long r = 0; r < h; ++r) {
      for (long c = 0; c < w; ++c) {
        const long nr = r + off.dr, nc = c + off.dc;
        const bool ok = nr >= 0 && nr < h && nc >= 0 && nc < w;
        mask[d * shape.size() + static_cast<std::size_t>(r * w + c)] =
            ok ? 1 : 0;
      }
    }
  }
  return mask;
}

GradientField finite_diff_forward(const ImageGrid& x, MaskMode mode,
                                  std::size_t directions) {
  require_differentiable(x.shape());
  require_directions(directions);
  GradientField g(x.shape(), directions);
  const long h = static_cast<long>(x.height());
  const long w = static_cast<long>(x.width());
  for (std::size_t d = 0; d < directions; ++d) {
    const Offset off = kDifferenceOffsets[d];
    auto plane = g.plane(d);
    for (long r = 0; r < h; ++r) {
      const long nr = wrap(r + off.dr, h);
      for (long c = 0; c < w; ++c) {
        const long nc = wrap(c + off.dc, w);
        plane[static_cast<std::size_t>(r * w + c)] =
            x[static_cast<std::size_t>(nr * w + nc)] -
            x[static_cast<std::size_t>(r * w + c)];
      }
    }
  }
  g.set_mask(difference_mask(x.shape(), mode, directions));
  return g;
}

ImageGrid finite_diff_adjoint(const GradientField& g, MaskMode mode) {
  require_differentiable(g.shape());
  const auto mask = difference_mask(g.shape(), mode, g.directions());
  const long h = static_cast<long>(g.shape().height);
  const long w = static_cast<long>(g.shape().width);
  const std::size_t n = g.shape().size();
  ImageGrid out(g.shape());
  for (std::size_t d = 0; d < g.directions(); ++d) {
    const Offset off = kDifferenceOffsets[d];
    auto plane = g.plane(d);
    for (long r = 0; r < h; ++r) {
      const long nr = wrap(r + off.dr, h);
      for (long c = 0; c < w; ++c) {
        const std::size_t q = static_cast<std::size_t>(r * w + c);
        if (!mask[d * n + q]) continue;
        const double v = plane[q];
        out[static_cast<std::size_t>(nr * w + wrap(c + off.dc, w))] += v;
        out[q] -= v;
      }
    }
  }
  return out;
}

double BccbSpectrum::min() const {
  return *std::min_element(eigenvalues.begin(), eigenvalues.end());
}

double BccbSpectrum::max() const {
  return *std::max_element(eigenvalues.begin(), eigenvalues.end());
}

BccbSpectrum BccbSpectrum::constant(GridShape shape, double value,
                                    GramLabel label) {
  if (shape.size() == 0) throw ShapeError("empty spectrum shape");
  if (value < 0.0) throw ParameterError("Gram eigenvalues must be nonnegative");
  return BccbSpectrum{shape, std::vector<double>(shape.size(), value), label,
                      false};
}

namespace {

// |DFT|^2 of a periodic impulse response given as (offset, weight) pairs.
void accumulate_power(GridShape shape,
                      const std::vector<std::pair<Offset, double>>& taps,
                      std::vector<double>& acc) {
  std::vector<double> impulse(shape.size(), 0.0);
  const long h = static_cast<long>(shape.height);
  const long w = static_cast<long>(shape.width);
  for (const auto& [off, weight] : taps) {
    impulse[static_cast<std::size_t>(wrap(off.dr, h) * w + wrap(off.dc, w))] +=
        weight;
  }
  const ComplexGrid spec = dft2(shape, impulse);
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::norm(spec[i]);
}

void clamp_nonnegative(std::vector<double>& v) {
  for (double& e : v) e = std::max(e, 0.0);
}

}  // namespace

BccbSpectrum bccb_spectrum_of_gram(const ConvolutionKernel& kernel,
                                   GridShape shape) {
  if (shape.size() == 0) throw ShapeError("empty spectrum shape");
  // A x = sum_p t_p x[i + anchor - p] is circular convolution with impulse
  // response h[p - anchor] = t_p.
  std::vector<std::pair<Offset, double>> taps;
  for (std::size_t p = 0; p < kernel.tap_shape().height; ++p) {
    for (std::size_t q = 0; q < kernel.tap_shape().width; ++q) {
      taps.push_back({{static_cast<long>(p) - static_cast<long>(kernel.anchor_row()),
                       static_cast<long>(q) - static_cast<long>(kernel.anchor_col())},
                      kernel.tap(p, q)});
    }
  }
  BccbSpectrum s{shape, std::vector<double>(shape.size(), 0.0),
                 GramLabel::blur, kernel.boundary() == Boundary::masked};
  accumulate_power(shape, taps, s.eigenvalues);
  clamp_nonnegative(s.eigenvalues);
  return s;
}

BccbSpectrum bccb_spectrum_of_gram(const DifferenceOperator& diff,
                                   GridShape shape) {
  require_directions(diff.directions);
  if (shape.size() == 0) throw ShapeError("empty spectrum shape");
  // Masked operators use the spectrum of their periodic surrogate.
  BccbSpectrum s{shape, std::vector<double>(shape.size(), 0.0),
                 GramLabel::difference, diff.mode == MaskMode::masked};
  for (std::size_t d = 0; d < diff.directions; ++d) {
    const Offset off = kDifferenceOffsets[d];
    // (D x)[p] = x[p + off] - x[p]: impulse response -1 at 0, +1 at -off.
    accumulate_power(shape, {{{0, 0}, -1.0}, {{-off.dr, -off.dc}, 1.0}},
                     s.eigenvalues);
  }
  clamp_nonnegative(s.eigenvalues);
  return s;
}

RankCheck split_operator_rank_check(const BccbSpectrum& lambda,
                                    const BccbSpectrum& omega,
                                    double tolerance) {
  if (lambda.shape != omega.shape) {
    throw ShapeError("rank check: spectrum shapes differ");
  }
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lambda.eigenvalues.size(); ++i) {
    m = std::min(m, lambda.eigenvalues[i] + omega.eigenvalues[i]);
  }
  return RankCheck{m > tolerance, m};
}

ImageGrid apply_spectrum(const BccbSpectrum& spectrum, const ImageGrid& x) {
  if (spectrum.shape != x.shape()) throw ShapeError("apply_spectrum: shape");
  ComplexGrid f = dft2(x.shape(), x.values());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= spectrum.eigenvalues[i];
  return ImageGrid(x.shape(), idft2_real(x.shape(), f));
}

}  // namespace sbadmm
