#include "mmot/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mmot {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeMass: return "NegativeMass";
    case ErrorKind::ZeroMass: return "ZeroMass";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::SizeOverflow: return "SizeOverflow";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NumericalOverflow: return "NumericalOverflow";
    case ErrorKind::FactorialBudget: return "FactorialBudget";
    case ErrorKind::ZeroSignal: return "ZeroSignal";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

NumericalOverflowError::NumericalOverflowError(const std::string& message,
                                               SolveReport partial,
                                               std::size_t failed_iteration)
    : Error(ErrorKind::NumericalOverflow, message),
      partial_(std::move(partial)),
      failed_iteration_(failed_iteration) {}

Grid1D Grid1D::make(std::size_t n, double h) {
  if (n < 1) throw Error(ErrorKind::InvalidParam, "grid needs at least one point");
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::InvalidParam, "grid spacing must be positive and finite");
  return Grid1D{n, h};
}

Grid1D Grid1D::on_interval(std::size_t n, double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorKind::InvalidParam, "interval must satisfy lo < hi");
  if (n == 1) return make(1, hi - lo);
  return make(n, (hi - lo) / static_cast<double>(n - 1));
}

namespace {

std::vector<double> normalized_weights(std::span<const double> raw) {
  if (raw.empty()) throw Error(ErrorKind::ShapeMismatch, "marginal is empty");
  double sum = 0.0;
  for (double x : raw) {
    if (!std::isfinite(x)) throw Error(ErrorKind::NonFinite, "marginal entry is NaN or infinite");
    if (x < 0.0) throw Error(ErrorKind::NegativeMass, "marginal entry is negative");
    sum += x;
  }
  if (sum == 0.0) throw Error(ErrorKind::ZeroMass, "marginal has zero total mass");
  std::vector<double> w(raw.begin(), raw.end());
  // Already-normalized input is passed through untouched so that
  // normalization is idempotent bit for bit.
  if (std::abs(sum - 1.0) > 1e-14)
    for (double& x : w) x /= sum;
  return w;
}

}  // namespace

Marginal1D validate_marginal(std::span<const double> raw) {
  return Marginal1D(normalized_weights(raw));
}

Marginal2D validate_marginal_2d(std::span<const double> raw, std::size_t rows,
                                std::size_t cols, double h1, double h2) {
  if (rows == 0 || cols == 0 || raw.size() != rows * cols)
    throw Error(ErrorKind::ShapeMismatch, "2D marginal size does not match rows x cols");
  if (!(h1 > 0.0) || !(h2 > 0.0))
    throw Error(ErrorKind::InvalidParam, "grid spacings must be positive");
  Marginal2D m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.h1_ = h1;
  m.h2_ = h2;
  m.weights_ = normalized_weights(raw);
  return m;
}

Marginal2D validate_marginal_2d(std::span<const double> raw, std::size_t rows,
                                std::size_t cols) {
  return validate_marginal_2d(raw, rows, cols, Grid1D::unit_interval(rows).h,
                              Grid1D::unit_interval(cols).h);
}

KernelParams kernel_params(double h, double epsilon) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::InvalidParam, "grid spacing must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorKind::InvalidParam, "epsilon must be positive");
  return KernelParams(h, epsilon, std::exp(-h / epsilon));
}

int region_of(std::int64_t i, std::int64_t j, std::int64_t k) {
  if (i <= j && j <= k) return 1;
  if (j < i && i <= k) return 2;
  if (i <= k && k < j) return 3;
  if (j <= k && k < i) return 4;
  if (k < i && i <= j) return 5;
  return 6;  // k < j < i
}

ScalingState ScalingState::uniform(std::size_t marginals, std::size_t n) {
  ScalingState s;
  const double init = 1.0 / static_cast<double>(n);
  s.scalings.assign(marginals, std::vector<double>(n, init));
  s.potentials.assign(marginals, std::vector<double>(n, 0.0));
  return s;
}

bool ScalingState::has_potentials() const noexcept {
  for (const auto& p : potentials)
    for (double x : p)
      if (x != 0.0) return true;
  return false;
}

std::string_view to_string(ResidualMode mode) {
  return mode == ResidualMode::Paper ? "paper" : "full";
}

ResidualMode parse_residual_mode(std::string_view text) {
  if (text == "paper") return ResidualMode::Paper;
  if (text == "full") return ResidualMode::Full;
  throw Error(ErrorKind::InvalidParam, "residual mode must be 'paper' or 'full'");
}

void SinkhornConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorKind::InvalidParam, "epsilon must be positive");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParam, "tol must be positive");
  if (itr_max < 1) throw Error(ErrorKind::InvalidParam, "itr_max must be at least 1");
  if (!(tau > 1.0)) throw Error(ErrorKind::InvalidParam, "tau must exceed 1");
}

double SolveReport::final_residual() const {
  return trace.residuals.empty() ? std::numeric_limits<double>::infinity()
                                 : trace.residuals.back();
}

bool all_finite(std::span<const double> x) noexcept {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

void require_same_size(std::size_t a, std::size_t b, std::string_view what) {
  if (a != b)
    throw Error(ErrorKind::ShapeMismatch,
                std::string(what) + ": sizes " + std::to_string(a) + " and " +
                    std::to_string(b) + " differ");
}

void fill_zero_mass_potentials(std::span<const double> scalings, std::span<double> potentials) {
  const std::size_t n = scalings.size();
  std::size_t prev = n;  // last positive site seen, n if none yet
  for (std::size_t i = 0; i <= n; ++i) {
    if (i < n && scalings[i] == 0.0) continue;
    // sites prev+1 .. i-1 have zero scaling
    const std::size_t lo = prev == n ? 0 : prev + 1;
    for (std::size_t z = lo; z < i; ++z) {
      if (prev == n && i == n) break;  // no positive site at all
      if (prev == n) potentials[z] = potentials[i];
      else if (i == n) potentials[z] = potentials[prev];
      else {
        const double t = static_cast<double>(z - prev) / static_cast<double>(i - prev);
        potentials[z] = (1.0 - t) * potentials[prev] + t * potentials[i];
      }
    }
    prev = i;
  }
}

void absorb_scalings(ScalingState& state, double epsilon) {
  state.potentials.resize(state.scalings.size());
  for (std::size_t q = 0; q < state.scalings.size(); ++q) {
    auto& s = state.scalings[q];
    auto& a = state.potentials[q];
    a.resize(s.size(), 0.0);
    for (std::size_t x = 0; x < s.size(); ++x) {
      if (s[x] > 0.0) {
        a[x] += epsilon * std::log(s[x]);
        s[x] = 1.0;
      }
    }
    fill_zero_mass_potentials(s, a);
  }
}

void divide_marginal(std::span<const double> u, std::span<const double> d,
                     std::span<double> out) noexcept {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] == 0.0 ? 0.0 : u[i] / d[i];
}

}  // namespace mmot
