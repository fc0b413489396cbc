// Linear-time contractions of the 1D three-marginal kernel
// K_ijk = lambda^(|i-j| + |i-k| + |j-k|) against two vectors.

#ifndef MMOT_FTVP1D_HPP_
#define MMOT_FTVP1D_HPP_

#include <array>
#include <span>
#include <vector>

#include "mmot/core.hpp"
#include "mmot/detail/ftvp_kernels.hpp"

namespace mmot {

/// Scratch space for one sweep. Grows on demand; reusing it across calls
/// avoids reallocation and never changes results. Not thread-safe.
class FtvpWorkspace {
 public:
  FtvpWorkspace() = default;

  detail::FtvpBuffers<double> buffers;
  std::vector<double> A, B, G;  // potentials / epsilon for the log sweeps
};

/// (K x_i phi x_j psi)_k. lambda in (0, 1].
std::vector<double> ftvp1(std::span<const double> phi, std::span<const double> psi, double lambda);
void ftvp1(std::span<const double> phi, std::span<const double> psi, double lambda,
           std::span<double> out, FtvpWorkspace& ws);

/// ((C . K) x_i phi x_j psi)_k with c_ijk = h * (|i-j| + |i-k| + |j-k|).
std::vector<double> ftvp2(std::span<const double> phi, std::span<const double> psi, double lambda,
                          double h);
void ftvp2(std::span<const double> phi, std::span<const double> psi, double lambda, double h,
           std::span<double> out, FtvpWorkspace& ws);

/// Contraction of the rescaled kernel e^((alpha_i + beta_j + gamma_k)/eps) K_ijk.
/// Throws NumericalOverflow if the result leaves the finite range.
std::vector<double> ftvp_log(std::span<const double> phi, std::span<const double> psi,
                             std::span<const double> alpha, std::span<const double> beta,
                             std::span<const double> gamma, double lambda, double epsilon);
void ftvp_log(std::span<const double> phi, std::span<const double> psi,
              std::span<const double> alpha, std::span<const double> beta,
              std::span<const double> gamma, double lambda, double epsilon,
              std::span<double> out, FtvpWorkspace& ws);

/// Cost-weighted counterpart of ftvp_log.
std::vector<double> ftvp2_log(std::span<const double> phi, std::span<const double> psi,
                              std::span<const double> alpha, std::span<const double> beta,
                              std::span<const double> gamma, double lambda, double epsilon,
                              double h);
void ftvp2_log(std::span<const double> phi, std::span<const double> psi,
               std::span<const double> alpha, std::span<const double> beta,
               std::span<const double> gamma, double lambda, double epsilon, double h,
               std::span<double> out, FtvpWorkspace& ws);

/// Per-region parts; parts[p-1] is the region-p contribution and the six sum
/// to the corresponding ftvp1 / ftvp2 output.
struct RegionParts {
  std::array<std::vector<double>, 6> parts;
};
RegionParts ftvp1_regions(std::span<const double> phi, std::span<const double> psi, double lambda);
RegionParts ftvp2_regions(std::span<const double> phi, std::span<const double> psi, double lambda,
                          double h);

enum class BoundModes { IJ, IK, JK };

/// K contracted over the two bound modes with (a, b) in mode order. K is
/// symmetric under any index permutation, so every choice reduces to ftvp1(a, b).
std::vector<double> contract_mode(std::span<const double> a, std::span<const double> b,
                                  double lambda, BoundModes modes);

namespace detail {
// Argument checks shared by the public entry points.
void check_ftvp_inputs(std::span<const double> phi, std::span<const double> psi, double lambda);

// Unchecked sweeps for callers that already validated their inputs.
// weighted=false gives ftvp1 and ignores h.
void ftvp_plain(std::span<const double> x, std::span<const double> y, double lambda,
                bool weighted, double h, std::span<double> out, FtvpWorkspace& ws);
// A, B, G are potentials already divided by epsilon.
void ftvp_scaled(std::span<const double> x, std::span<const double> y,
                 std::span<const double> A, std::span<const double> B,
                 std::span<const double> G, double lambda, bool weighted, double h,
                 std::span<double> out, FtvpWorkspace& ws);
}  // namespace detail

}  // namespace mmot

#endif  // MMOT_FTVP1D_HPP_
