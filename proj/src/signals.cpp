#include "mmot/signals.hpp"

#include <cmath>
#include <numbers>

namespace mmot {

double ricker(double t, double A, double F0) {
  const double a = std::numbers::pi * std::numbers::pi * F0 * F0 * t * t;
  return A * (1.0 - 2.0 * a) * std::exp(-a);
}

void RickerConfig::validate() const {
  if (!(F0 > 0.0)) throw Error(ErrorKind::InvalidParam, "F0 must be positive");
  if (n < 2) throw Error(ErrorKind::InvalidParam, "need at least two samples");
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidParam, "delta must be nonnegative");
  if (!(t_min < t_max)) throw Error(ErrorKind::InvalidParam, "need t_min < t_max");
}

std::vector<double> sample_ricker(const RickerConfig& config) {
  config.validate();
  std::vector<double> f(config.n);
  const double step = (config.t_max - config.t_min) / static_cast<double>(config.n - 1);
  for (std::size_t i = 0; i < config.n; ++i) {
    const double t = config.t_min + step * static_cast<double>(i);
    f[i] = ricker(t - config.tau, config.A, config.F0);
  }
  return f;
}

Grid1D ricker_grid(const RickerConfig& config) {
  config.validate();
  return Grid1D::on_interval(config.n, config.t_min, config.t_max);
}

Marginal1D normalize_signal(std::span<const double> f, double delta) {
  if (f.empty()) throw Error(ErrorKind::ShapeMismatch, "signal is empty");
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidParam, "delta must be nonnegative");
  if (!all_finite(f)) throw Error(ErrorKind::NonFinite, "signal is NaN or infinite");
  double norm = 0.0;
  for (double x : f) norm += x * x;
  if (norm == 0.0) throw Error(ErrorKind::ZeroSignal, "signal is identically zero");
  const double L = static_cast<double>(f.size());
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) w[i] = (f[i] * f[i] / norm + delta) / (1.0 + L * delta);
  return validate_marginal(w);
}

Marginal1D normalize_signal_density(std::span<const double> f, double delta, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidParam, "h must be positive");
  if (f.empty()) throw Error(ErrorKind::ShapeMismatch, "signal is empty");
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidParam, "delta must be nonnegative");
  if (!all_finite(f)) throw Error(ErrorKind::NonFinite, "signal is NaN or infinite");
  double norm = 0.0;
  for (double x : f) norm += x * x;
  if (norm == 0.0) throw Error(ErrorKind::ZeroSignal, "signal is identically zero");
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) w[i] = f[i] * f[i] / (h * norm) + delta;
  return validate_marginal(w);
}

Marginal1D ricker_marginal(const RickerConfig& config) {
  const auto f = sample_ricker(config);
  if (config.normalization == SignalNormalization::Density)
    return normalize_signal_density(f, config.delta, ricker_grid(config).h);
  return normalize_signal(f, config.delta);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a simple combination
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (a + 1) + 0xBF58476D1CE4E5B9ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Marginal1D random_marginal(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidParam, "n must be at least 1");
  Rng rng(seed);
  std::vector<double> w(n);
  for (double& x : w) x = rng.uniform();
  return validate_marginal(w);
}

Marginal2D random_marginal_2d(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw Error(ErrorKind::InvalidParam, "grid must be nonempty");
  Rng rng(seed);
  std::vector<double> w(rows * cols);
  for (double& x : w) x = rng.uniform();
  return validate_marginal_2d(w, rows, cols);
}

Marginal2D image_to_marginal(const GrayImage& image, double delta) {
  const std::size_t rows = image.height, cols = image.width;
  if (rows == 0 || cols == 0 || image.pixels.size() != rows * cols)
    throw Error(ErrorKind::ShapeMismatch, "image is empty or inconsistent");
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidParam, "delta must be nonnegative");
  double total = 0.0;
  for (unsigned p : image.pixels) total += p;
  if (total == 0.0 && delta == 0.0) throw Error(ErrorKind::ZeroMass, "image is entirely black");
  const double floor = delta / static_cast<double>(rows * cols);
  std::vector<double> w(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      w[r + rows * c] = (total > 0.0 ? image.at(r, c) / total : 0.0) + floor;
  return validate_marginal_2d(w, rows, cols);
}

GrayImage synthetic_image(std::size_t height, std::size_t width, std::uint64_t seed) {
  if (height == 0 || width == 0) throw Error(ErrorKind::InvalidParam, "image must be nonempty");
  Rng rng(seed);
  struct Blob { double r, c, s, a; };
  Blob blobs[3];
  for (auto& b : blobs) {
    b.r = rng.uniform() * static_cast<double>(height);
    b.c = rng.uniform() * static_cast<double>(width);
    b.s = (0.05 + 0.15 * rng.uniform()) * static_cast<double>(std::max(height, width));
    b.a = 0.3 + 0.7 * rng.uniform();
  }
  std::vector<double> v(height * width, 0.0);
  double peak = 0.0;
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) {
      double s = 0.0;
      for (const auto& b : blobs) {
        const double dr = (static_cast<double>(r) - b.r) / b.s;
        const double dc = (static_cast<double>(c) - b.c) / b.s;
        s += b.a * std::exp(-0.5 * (dr * dr + dc * dc));
      }
      v[r * width + c] = s;
      peak = std::max(peak, s);
    }
  GrayImage img;
  img.width = width;
  img.height = height;
  img.maxval = 255;
  img.pixels.resize(v.size());
  for (std::size_t e = 0; e < v.size(); ++e)
    img.pixels[e] = static_cast<unsigned>(std::lround(255.0 * v[e] / peak));
  return img;
}

}  // namespace mmot
