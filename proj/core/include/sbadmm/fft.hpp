#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sbadmm/image_grid.hpp"

namespace sbadmm {

using ComplexGrid = std::vector<std::complex<double>>;

/// Unnormalized forward 2D DFT of a real row-major array.
ComplexGrid dft2(GridShape shape, std::span<const double> values);

/// Inverse 2D DFT scaled by 1/N; returns the real part.
std::vector<double> idft2_real(GridShape shape, const ComplexGrid& spectrum);

}  // namespace sbadmm
