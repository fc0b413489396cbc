#include "mmot/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mmot {

namespace {

[[noreturn]] void parse_fail(std::string_view origin, const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ParseError, std::string(origin) + ":" + where + ": " + what);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<double> parse_csv_vector_text(std::string_view text, std::string_view origin) {
  std::vector<double> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    // a trailing comma from spreadsheet exports is harmless
    if (line.back() == ',') line = trim(line.substr(0, line.size() - 1));
    double v = 0.0;
    const char* first = line.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size())
      parse_fail(origin, "line " + std::to_string(line_no), "not a number: '" + std::string(line) + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_csv_vector(const std::filesystem::path& path) {
  return parse_csv_vector_text(read_file(path), path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidParam, path.string() + ": cannot write file");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void write_csv_vector(const std::filesystem::path& path, std::span<const double> values) {
  std::string text;
  char buf[32];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    text += buf;
  }
  write_text_file(path, text);
}

namespace {

class PgmReader {
 public:
  PgmReader(std::string_view bytes, std::string_view origin) : b_(bytes), origin_(origin) {}

  [[noreturn]] void fail(const std::string& what) const {
    parse_fail(origin_, "byte " + std::to_string(pos_), what);
  }

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      const char c = b_[pos_];
      if (c == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    unsigned long v = 0;
    const auto [ptr, ec] = std::from_chars(b_.data() + pos_, b_.data() + b_.size(), v);
    if (ec != std::errc()) fail(std::string("expected ") + what);
    pos_ = static_cast<std::size_t>(ptr - b_.data());
    if (pos_ < b_.size() && !std::isspace(static_cast<unsigned char>(b_[pos_])) && b_[pos_] != '#') {
      pos_ = start;
      fail(std::string("malformed ") + what);
    }
    return v;
  }

  GrayImage read() {
    if (b_.size() < 2 || b_[0] != 'P' || (b_[1] != '2' && b_[1] != '5'))
      fail("not a P2 or P5 PGM file");
    const bool binary = b_[1] == '5';
    pos_ = 2;
    GrayImage img;
    img.width = number("width");
    img.height = number("height");
    if (img.width == 0 || img.height == 0) fail("image has zero size");
    const unsigned long maxval = number("maxval");
    if (maxval < 1 || maxval > 65535) fail("maxval must lie in 1..65535");
    img.maxval = static_cast<unsigned>(maxval);
    const std::size_t count = img.width * img.height;
    img.pixels.resize(count);
    if (binary) {
      // exactly one whitespace byte separates the header from the raster
      if (pos_ >= b_.size()) fail("missing raster");
      ++pos_;
      const std::size_t bpp = maxval < 256 ? 1 : 2;
      if (b_.size() - pos_ < count * bpp) fail("raster is truncated");
      for (std::size_t e = 0; e < count; ++e) {
        unsigned v = static_cast<unsigned char>(b_[pos_]);
        if (bpp == 2) v = (v << 8) | static_cast<unsigned char>(b_[pos_ + 1]);
        if (v > maxval) fail("pixel exceeds maxval");
        img.pixels[e] = v;
        pos_ += bpp;
      }
    } else {
      for (std::size_t e = 0; e < count; ++e) {
        skip_space_and_comments();
        if (pos_ >= b_.size()) fail("raster is truncated");
        const unsigned long v = number("pixel");
        if (v > maxval) fail("pixel exceeds maxval");
        img.pixels[e] = static_cast<unsigned>(v);
      }
    }
    return img;
  }

 private:
  std::string_view b_;
  std::string_view origin_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm_bytes(std::string_view bytes, std::string_view origin) {
  return PgmReader(bytes, origin).read();
}

GrayImage parse_pgm(const std::filesystem::path& path) {
  return parse_pgm_bytes(read_file(path), path.string());
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image, bool binary) {
  if (image.pixels.size() != image.width * image.height)
    throw Error(ErrorKind::ShapeMismatch, "image pixel count does not match its size");
  std::string out = (binary ? "P5\n" : "P2\n") + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n" + std::to_string(image.maxval) + "\n";
  if (binary) {
    for (unsigned v : image.pixels) {
      if (image.maxval >= 256) out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xff));
    }
  } else {
    for (std::size_t r = 0; r < image.height; ++r) {
      for (std::size_t c = 0; c < image.width; ++c) {
        if (c) out += ' ';
        out += std::to_string(image.at(r, c));
      }
      out += '\n';
    }
  }
  write_text_file(path, out);
}

}  // namespace mmot
