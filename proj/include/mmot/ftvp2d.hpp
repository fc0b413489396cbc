// Three-marginal transport on an N x M grid. The kernel factors across the
// two axes, K = K1(i1, j1, k1) * K2(i2, j2, k2), so a contraction is a
// six-region sweep over columns whose "products" are 1D contractions along
// the rows.

#ifndef MMOT_FTVP2D_HPP_
#define MMOT_FTVP2D_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "mmot/core.hpp"

namespace mmot {

/// rows x cols values, column-major: value(i1, i2) = values[i1 + rows * i2].
struct Field2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Field2D() = default;
  Field2D(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}
  Field2D(std::size_t r, std::size_t c, std::vector<double> v);

  double& operator()(std::size_t i1, std::size_t i2) { return values[i1 + rows * i2]; }
  double operator()(std::size_t i1, std::size_t i2) const { return values[i1 + rows * i2]; }
  /// Swaps the axes.
  Field2D transposed() const;
};

/// (K x phi x psi) over both axes. lambda1 acts along rows (i1), lambda2
/// along columns (i2).
Field2D ftvp2d_1(const Field2D& phi, const Field2D& psi, double lambda1, double lambda2);

/// ((C . K) x phi x psi) with c = h1 * (row L1 sum) + h2 * (column L1 sum).
Field2D ftvp2d_2(const Field2D& phi, const Field2D& psi, double lambda1, double lambda2,
                 double h1, double h2);

/// Rescaled kernel e^((alpha + beta + gamma)/eps) K; potentials are fields.
Field2D ftvp2d_log(const Field2D& phi, const Field2D& psi, const Field2D& alpha,
                   const Field2D& beta, const Field2D& gamma, double lambda1, double lambda2,
                   double epsilon);
Field2D ftvp2d_2_log(const Field2D& phi, const Field2D& psi, const Field2D& alpha,
                     const Field2D& beta, const Field2D& gamma, double lambda1, double lambda2,
                     double epsilon, double h1, double h2);

/// Sinkhorn on three same-shape 2D marginals, lambda_a = e^(-h_a / eps).
/// Scalings in the result are flattened column-major.
SolveResult fast_sinkhorn_2d(const Marginal2D& u, const Marginal2D& v, const Marginal2D& w,
                             const SinkhornConfig& config,
                             const IterationObserver& observer = {});

}  // namespace mmot

#endif  // MMOT_FTVP2D_HPP_
