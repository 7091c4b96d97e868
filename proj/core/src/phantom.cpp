#include "sbadmm/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sbadmm {
namespace {

struct Ellipse {
  double intensity;
  double semi_x;
  double semi_y;
  double center_x;
  double center_y;
  double angle_deg;
};

// Toft's modified intensities.
constexpr Ellipse kEllipses[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
};

}  // namespace

ImageGrid shepp_logan_phantom(std::size_t height, std::size_t width) {
  ImageGrid img({height, width});
  const double hs = height > 1 ? static_cast<double>(height - 1) : 1.0;
  const double ws = width > 1 ? static_cast<double>(width - 1) : 1.0;
  for (std::size_t r = 0; r < height; ++r) {
    const double py = 1.0 - 2.0 * static_cast<double>(r) / hs;
    for (std::size_t c = 0; c < width; ++c) {
      const double px = -1.0 + 2.0 * static_cast<double>(c) / ws;
      double value = 0.0;
      for (const Ellipse& e : kEllipses) {
        const double th = e.angle_deg * std::numbers::pi / 180.0;
        const double dx = px - e.center_x;
        const double dy = py - e.center_y;
        const double xr = dx * std::cos(th) + dy * std::sin(th);
        const double yr = -dx * std::sin(th) + dy * std::cos(th);
        if ((xr * xr) / (e.semi_x * e.semi_x) + (yr * yr) / (e.semi_y * e.semi_y) <= 1.0) {
          value += e.intensity;
        }
      }
      img(r, c) = std::clamp(value, 0.0, 1.0);
    }
  }
  return img;
}

}  // namespace sbadmm
