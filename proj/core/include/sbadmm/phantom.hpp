#pragma once

#include <cstddef>

#include "sbadmm/image_grid.hpp"

namespace sbadmm {

/// Modified Shepp-Logan head phantom on a height x width grid, intensities
/// in [0, 1].
ImageGrid shepp_logan_phantom(std::size_t height, std::size_t width);

}  // namespace sbadmm
