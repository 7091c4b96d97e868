#pragma once

#include <filesystem>

#include "sbadmm/image_grid.hpp"
#include "sbadmm/operators.hpp"

namespace sbadmm::io {

/// Binary 8-bit PGM (P5). Values are linearly rescaled from [min, max] to
/// [0, 255]; a constant image maps to 0.
void write_pgm(const std::filesystem::path& path, const ImageGrid& image);
/// Reads P5 or P2 with maxval <= 255, mapping intensities to [0, 1].
ImageGrid read_pgm(const std::filesystem::path& path);

/// One row per line, space-separated decimals with round-trip precision.
void write_matrix_text(const std::filesystem::path& path,
                       const ImageGrid& image);
ImageGrid read_matrix_text(const std::filesystem::path& path);

/// Dispatches on extension: .pgm via read_pgm, anything else as text.
ImageGrid read_image(const std::filesystem::path& path);

/// CSV with header freq_row,freq_col,lambda,omega.
void write_spectra_csv(const std::filesystem::path& path,
                       const BccbSpectrum& lambda, const BccbSpectrum& omega);

}  // namespace sbadmm::io
