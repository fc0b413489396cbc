// File formats: CSV vectors and PGM grayscale images.

#ifndef MMOT_IO_HPP_
#define MMOT_IO_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmot/signals.hpp"

namespace mmot {

/// One real per line. Blank lines and lines whose first non-blank character
/// is '#' are skipped. Throws ParseError naming the path and line.
std::vector<double> parse_csv_vector(const std::filesystem::path& path);
std::vector<double> parse_csv_vector_text(std::string_view text, std::string_view origin = "<text>");

/// One value per line with 17 significant digits, so parsing it back is exact.
void write_csv_vector(const std::filesystem::path& path, std::span<const double> values);

/// P2 (ASCII) or P5 (binary) grayscale, 1 <= maxval <= 65535. Header
/// comments ('#' to end of line) are allowed. Throws ParseError naming the
/// byte offset of the problem.
GrayImage parse_pgm(const std::filesystem::path& path);
GrayImage parse_pgm_bytes(std::string_view bytes, std::string_view origin = "<bytes>");

void write_pgm(const std::filesystem::path& path, const GrayImage& image, bool binary = true);

/// Throws InvalidParam when `path` cannot be opened for writing.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace mmot

#endif  // MMOT_IO_HPP_
