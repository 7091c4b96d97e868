#include "sbadmm/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sbadmm/errors.hpp"

namespace sbadmm::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string discard;
      std::getline(in, discard);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  return tok;
}

std::size_t parse_size(const std::string& tok, const std::filesystem::path& p) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw IoError("malformed PGM header in '" + p.string() + "'");
  }
  return v;
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const ImageGrid& image) {
  auto out = open_out(path, true);
  const auto v = image.values();
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it, hi = *hi_it;
  const double span = hi > lo ? hi - lo : 1.0;
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<unsigned char> bytes(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = std::round(255.0 * (v[i] - lo) / span);
    bytes[i] = static_cast<unsigned char>(std::clamp(s, 0.0, 255.0));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

ImageGrid read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  const std::string magic = pgm_token(in);
  if (magic != "P5" && magic != "P2") {
    throw IoError("'" + path.string() + "' is not a P5/P2 PGM file");
  }
  const std::size_t width = parse_size(pgm_token(in), path);
  const std::size_t height = parse_size(pgm_token(in), path);
  const std::size_t maxval = parse_size(pgm_token(in), path);
  if (width == 0 || height == 0 || maxval == 0 || maxval > 255) {
    throw IoError("unsupported PGM geometry or depth in '" + path.string() + "'");
  }
  std::vector<double> values(width * height);
  if (magic == "P5") {
    std::vector<unsigned char> bytes(values.size());
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
      throw IoError("truncated PGM data in '" + path.string() + "'");
    }
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      values[i] = static_cast<double>(bytes[i]) / static_cast<double>(maxval);
    }
  } else {
    for (double& v : values) {
      const std::string tok = pgm_token(in);
      if (tok.empty()) throw IoError("truncated PGM data in '" + path.string() + "'");
      v = static_cast<double>(parse_size(tok, path)) / static_cast<double>(maxval);
    }
  }
  return ImageGrid({height, width}, std::move(values));
}

void write_matrix_text(const std::filesystem::path& path,
                       const ImageGrid& image) {
  auto out = open_out(path, false);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t c = 0; c < image.width(); ++c) {
      if (c) out << ' ';
      out << image(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

ImageGrid read_matrix_text(const std::filesystem::path& path) {
  auto in = open_in(path, false);
  std::vector<double> values;
  std::size_t width = 0, height = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::size_t count = 0;
    double v;
    while (row >> v) {
      values.push_back(v);
      ++count;
    }
    if (!row.eof()) {
      throw IoError("non-numeric entry on line " + std::to_string(height + 1) +
                    " of '" + path.string() + "'");
    }
    if (count == 0) continue;
    if (width == 0) width = count;
    if (count != width) {
      throw IoError("ragged matrix row " + std::to_string(height + 1) +
                    " in '" + path.string() + "'");
    }
    ++height;
  }
  if (height == 0) throw IoError("empty matrix file '" + path.string() + "'");
  return ImageGrid({height, width}, std::move(values));
}

ImageGrid read_image(const std::filesystem::path& path) {
  if (path.extension() == ".pgm") return read_pgm(path);
  return read_matrix_text(path);
}

void write_spectra_csv(const std::filesystem::path& path,
                       const BccbSpectrum& lambda, const BccbSpectrum& omega) {
  if (lambda.shape != omega.shape) throw ShapeError("spectra shapes differ");
  auto out = open_out(path, false);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "freq_row,freq_col,lambda,omega\n";
  for (std::size_t r = 0; r < lambda.shape.height; ++r) {
    for (std::size_t c = 0; c < lambda.shape.width; ++c) {
      out << r << ',' << c << ',' << lambda.at(r, c) << ',' << omega.at(r, c)
          << '\n';
    }
  }
}

}  // namespace sbadmm::io
