// Domain types shared by every solver: grids, marginals, kernel parameters,
// scaling state, solver configuration and reports.
//
// Index conventions: formulas in comments are written with 1-based indices
// i, j, k in {1..N}; storage is 0-based.

#ifndef MMOT_CORE_HPP_
#define MMOT_CORE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mmot {

enum class ErrorKind {
  NegativeMass,
  ZeroMass,
  NonFinite,
  InvalidParam,
  SizeOverflow,
  ShapeMismatch,
  NumericalOverflow,
  FactorialBudget,
  ZeroSignal,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Grid / marginals

struct Grid1D {
  std::size_t n = 1;
  double h = 1.0;

  // Throws InvalidParam unless n >= 1 and h > 0.
  static Grid1D make(std::size_t n, double h);
  // n points on [lo, hi] including both endpoints: h = (hi - lo) / (n - 1).
  // A single point gets h = hi - lo (the spacing is irrelevant when n = 1).
  static Grid1D on_interval(std::size_t n, double lo, double hi);
  static Grid1D unit_interval(std::size_t n) { return on_interval(n, 0.0, 1.0); }
};

/// Nonnegative weights summing to one.
class Marginal1D {
 public:
  Marginal1D() = default;

  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  friend Marginal1D validate_marginal(std::span<const double> raw);
  explicit Marginal1D(std::vector<double> w) : weights_(std::move(w)) {}
  std::vector<double> weights_;
};

/// Normalizes `raw` to unit sum. Rejects NaN/inf (NonFinite), negative
/// entries (NegativeMass) and all-zero input (ZeroMass). Idempotent.
Marginal1D validate_marginal(std::span<const double> raw);

/// Weights on an rows x cols grid, flattened column-major:
/// value(i1, i2) = weights[i1 + rows * i2].
class Marginal2D {
 public:
  Marginal2D() = default;

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double h1() const noexcept { return h1_; }
  double h2() const noexcept { return h2_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double at(std::size_t i1, std::size_t i2) const { return weights_[i1 + rows_ * i2]; }

 private:
  friend Marginal2D validate_marginal_2d(std::span<const double>, std::size_t,
                                         std::size_t, double, double);
  std::size_t rows_ = 0, cols_ = 0;
  double h1_ = 1.0, h2_ = 1.0;
  std::vector<double> weights_;
};

/// Column-major rows x cols weights with per-axis spacings h1 (along rows
/// index i1) and h2 (along column index i2). Same checks as validate_marginal.
Marginal2D validate_marginal_2d(std::span<const double> raw, std::size_t rows,
                                std::size_t cols, double h1, double h2);

/// Default spacings place the grid on [0,1] x [0,1].
Marginal2D validate_marginal_2d(std::span<const double> raw, std::size_t rows,
                                std::size_t cols);

// ---------------------------------------------------------------------------
// Kernel parameters

/// lambda = exp(-h / epsilon), computed once from (h, epsilon).
class KernelParams {
 public:
  double epsilon() const noexcept { return epsilon_; }
  double h() const noexcept { return h_; }
  double lambda() const noexcept { return lambda_; }

 private:
  friend KernelParams kernel_params(double h, double epsilon);
  KernelParams(double h, double eps, double lam) : epsilon_(eps), h_(h), lambda_(lam) {}
  double epsilon_, h_, lambda_;
};

KernelParams kernel_params(double h, double epsilon);

/// Exponent coefficients of the six order regions of a 3-index tuple.
/// Within region p the L1 exponent |i-j|+|i-k|+|j-k| equals
/// a[p]*i + b[p]*j + c[p]*k. Regions (1-based p):
///   1: i <= j <= k    2: j < i <= k    3: i <= k < j
///   4: j <= k < i     5: k < i <= j    6: k < j < i
struct CoefficientTable {
  static constexpr std::array<int, 6> a{-2, 0, -2, 2, 0, 2};
  static constexpr std::array<int, 6> b{0, -2, 2, -2, 2, 0};
  static constexpr std::array<int, 6> c{2, 2, 0, 0, -2, -2};

  static constexpr bool rows_sum_to_zero() {
    for (std::size_t p = 0; p < 6; ++p)
      if (a[p] + b[p] + c[p] != 0) return false;
    return true;
  }
};
static_assert(CoefficientTable::rows_sum_to_zero());

/// Region index p in {1..6} of the tuple (i, j, k).
int region_of(std::int64_t i, std::int64_t j, std::int64_t k);

// ---------------------------------------------------------------------------
// Solver state and configuration

/// One scaling vector per marginal, plus log-domain potentials (cost units)
/// that are all zero unless stabilization absorbed something. The effective
/// scaling of marginal q at site x is scalings[q][x] * exp(potentials[q][x] / eps).
/// Scalings are zero exactly where the marginal has zero mass.
struct ScalingState {
  std::vector<std::vector<double>> scalings;
  std::vector<std::vector<double>> potentials;

  static ScalingState uniform(std::size_t marginals, std::size_t n);
  bool has_potentials() const noexcept;
  std::size_t marginal_count() const noexcept { return scalings.size(); }
};

enum class ResidualMode {
  Paper,  // sum of |marginal violation| over all but the last marginal
  Full,   // all marginals
};

std::string_view to_string(ResidualMode mode);
ResidualMode parse_residual_mode(std::string_view text);

struct SinkhornConfig {
  double epsilon = 0.1;
  double tol = 1e-9;
  std::size_t itr_max = 100;
  bool stabilize = false;
  double tau = 1e30;
  ResidualMode residual_mode = ResidualMode::Paper;

  // Throws InvalidParam on epsilon <= 0, tol <= 0, itr_max == 0, tau <= 1.
  void validate() const;
};

struct IterationTrace {
  std::vector<double> residuals;          // one per completed iteration
  std::vector<std::size_t> absorptions;   // cumulative absorption count
  std::vector<double> elapsed_s;          // wall time since solve start
};

struct SolveReport {
  double distance = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double elapsed_s = 0.0;
  IterationTrace trace;
  SinkhornConfig config;
  std::string solver;
  std::vector<std::string> warnings;

  std::span<const double> residuals() const noexcept { return trace.residuals; }
  double final_residual() const;
};

/// Raised when a scaling vector becomes non-finite. Carries the report up to
/// the last completed iteration.
class NumericalOverflowError : public Error {
 public:
  NumericalOverflowError(const std::string& message, SolveReport partial,
                         std::size_t failed_iteration);
  const SolveReport& partial_report() const noexcept { return partial_; }
  std::size_t failed_iteration() const noexcept { return failed_iteration_; }

 private:
  SolveReport partial_;
  std::size_t failed_iteration_;
};

/// Scalings (and potentials) at termination together with the run report.
struct SolveResult {
  ScalingState state;
  SolveReport report;
};

/// Called after every completed iteration with the 1-based iteration number.
using IterationObserver = std::function<void(std::size_t, const ScalingState&)>;

// ---------------------------------------------------------------------------
// Small helpers shared by the solvers.

bool all_finite(std::span<const double> x) noexcept;
void require_same_size(std::size_t a, std::size_t b, std::string_view what);

/// Sets the potential of every zero-scaling (zero-mass) site by linear
/// interpolation between the nearest sites with positive scaling; constant
/// beyond the outermost ones. Keeps neighbouring potentials close so the
/// rescaled sweeps never see a large artificial jump.
void fill_zero_mass_potentials(std::span<const double> scalings, std::span<double> potentials);

/// Moves every positive scaling into its potential: alpha += eps * ln(phi),
/// phi = 1. Zero scalings stay zero and get interpolated potentials. The
/// effective scaling phi * e^(alpha/eps) is unchanged up to rounding.
void absorb_scalings(ScalingState& state, double epsilon);

/// u / d elementwise, with 0 / anything = 0 so zero-mass sites stay at zero.
void divide_marginal(std::span<const double> u, std::span<const double> d,
                     std::span<double> out) noexcept;

}  // namespace mmot

#endif  // MMOT_CORE_HPP_
