// Test instances: seeded random marginals, Ricker wavelets and grayscale
// images turned into distributions.

#ifndef MMOT_SIGNALS_HPP_
#define MMOT_SIGNALS_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "mmot/core.hpp"

namespace mmot {

/// A(1 - 2 pi^2 F0^2 t^2) e^(-pi^2 F0^2 t^2)
double ricker(double t, double A, double F0);

/// How a sampled signal becomes weights. Discrete divides f^2 by its plain
/// sum. Density treats f^2 / ||f^2||_1 as a density on [t_min, t_max]
/// (||.||_1 the integral, L the interval length) and takes grid masses from it,
/// which amounts to a mass floor of delta * h instead of delta.
enum class SignalNormalization { Discrete, Density };

struct RickerConfig {
  double A = 1.0;
  double F0 = 1.0;
  double tau = 0.0;    // time shift: samples R(t - tau)
  double delta = 0.0;  // mass added to every sample before renormalizing
  double t_min = -2.0;
  double t_max = 2.0;
  std::size_t n = 80;
  SignalNormalization normalization = SignalNormalization::Discrete;

  // Throws InvalidParam unless F0 > 0, n >= 2, delta >= 0, t_min < t_max.
  void validate() const;
};

/// R(t_i - tau) at n equispaced points t_i on [t_min, t_max].
std::vector<double> sample_ricker(const RickerConfig& config);

/// The grid the samples live on.
Grid1D ricker_grid(const RickerConfig& config);

/// (f^2 / ||f^2||_1 + delta) / (1 + L delta), L = number of samples.
/// Throws ZeroSignal if f is identically zero, InvalidParam if delta < 0.
Marginal1D normalize_signal(std::span<const double> f, double delta);

/// Density reading on a grid of spacing h: weights proportional to
/// f^2 / (h sum f^2) + delta, normalized to unit sum.
Marginal1D normalize_signal_density(std::span<const double> f, double delta, double h);

/// The sampled wavelet normalized as config.normalization says.
Marginal1D ricker_marginal(const RickerConfig& config);

/// Portable uniform generator: std::mt19937_64 (whose output sequence is
/// fixed by the C++ standard) mapped to (0, 1) as ((x >> 11) + 0.5) * 2^-53.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with extra coordinates (instance size, marginal index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// n iid uniform(0, 1) weights, normalized.
Marginal1D random_marginal(std::size_t n, std::uint64_t seed);
/// rows x cols iid uniform(0, 1) weights on the unit square, column-major.
Marginal2D random_marginal_2d(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Grayscale image, row-major: pixel(r, c) = pixels[r * width + c].
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned maxval = 255;
  std::vector<unsigned> pixels;

  unsigned at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }
};

/// Image row r maps to i1 = r and column c to i2 = c on the unit square
/// (rows x cols = height x width). Adds delta / (rows * cols) to every
/// normalized cell, then renormalizes. Throws ZeroMass if every pixel is 0
/// and delta == 0.
Marginal2D image_to_marginal(const GrayImage& image, double delta = 0.0);

/// A few Gaussian blobs at seeded positions, scaled to 0..255.
GrayImage synthetic_image(std::size_t height, std::size_t width, std::uint64_t seed);

}  // namespace mmot

#endif  // MMOT_SIGNALS_HPP_
