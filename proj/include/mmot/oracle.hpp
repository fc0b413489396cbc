// Dense brute-force reference: explicit cost/kernel tensors, full tensor
// contractions and the textbook generalized Sinkhorn loop. Everything here is
// O(N^l) and exists to check the fast paths at small sizes.

#ifndef MMOT_ORACLE_HPP_
#define MMOT_ORACLE_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mmot/core.hpp"

namespace mmot {

inline constexpr std::size_t kDefaultElementBudget = 100'000'000;

/// Row-major order-l tensor (last index fastest).
class DenseTensor {
 public:
  DenseTensor() = default;
  DenseTensor(std::vector<std::size_t> shape, std::size_t budget = kDefaultElementBudget);

  std::size_t order() const noexcept { return shape_.size(); }
  std::span<const std::size_t> shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::span<const double> entries() const noexcept { return entries_; }
  std::span<double> entries() noexcept { return entries_; }

  double at(std::span<const std::size_t> index) const { return entries_[flat_index(index)]; }
  std::size_t flat_index(std::span<const std::size_t> index) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> entries_;
};

/// Throws SizeOverflow if the product of `shape` exceeds `budget`.
std::size_t checked_element_count(std::span<const std::size_t> shape, std::size_t budget);

/// c(i_1..i_l) = h * sum_{p<q} |i_p - i_q|, all modes of length grid.n.
DenseTensor dense_cost(const Grid1D& grid, std::size_t marginals,
                       std::size_t budget = kDefaultElementBudget);
/// Same cost for modes of possibly different lengths on a common spacing h.
DenseTensor dense_cost(std::span<const std::size_t> shape, double h,
                       std::size_t budget = kDefaultElementBudget);

/// K = lambda^(sum_{p<q} |i_p - i_q|).
DenseTensor dense_kernel(const Grid1D& grid, const KernelParams& params, std::size_t marginals,
                         std::size_t budget = kDefaultElementBudget);

/// Elementwise exp(-C / epsilon).
DenseTensor kernel_from_cost(const DenseTensor& cost, double epsilon);

/// Three-marginal 2D problem on a rows x cols grid. Each mode runs over the
/// rows*cols sites in column-major order; the cost is the L1 pairwise sum
/// split by axis: h1 * (row part) + h2 * (column part).
DenseTensor dense_cost_2d(std::size_t rows, std::size_t cols, double h1, double h2,
                          std::size_t budget = kDefaultElementBudget);

/// sum over every mode except `free_mode` (0-based) of t * prod vectors.
/// `vectors` lists the bound-mode vectors in increasing mode order.
std::vector<double> dense_contract(const DenseTensor& t,
                                   std::span<const std::vector<double>> vectors,
                                   std::size_t free_mode);

using DenseSolution = SolveResult;

/// Generalized Sinkhorn on an explicit cost tensor (one marginal per mode).
/// Initialization, update order and residual follow the textbook loop:
/// scalings start at 1/n, marginals are updated cyclically, and the
/// residual sums marginal violations after each full sweep.
DenseSolution dense_sinkhorn(std::span<const Marginal1D> marginals, const DenseTensor& cost,
                             const SinkhornConfig& config,
                             const IterationObserver& observer = {});

/// Three 1D marginals on `grid`.
DenseSolution dense_sinkhorn(const Marginal1D& u, const Marginal1D& v, const Marginal1D& w,
                             const Grid1D& grid, const SinkhornConfig& config,
                             const IterationObserver& observer = {});

/// t = K * prod_q scalings_q. Ignores potentials; use dense_plan_from_cost
/// for stabilized states.
DenseTensor dense_plan(const ScalingState& state, const DenseTensor& kernel);

/// t = exp(sum_q (ln s_q + alpha_q / eps) - C / eps), evaluated in log space
/// so it stays accurate where exp(-C/eps) alone would underflow.
DenseTensor dense_plan_from_cost(const ScalingState& state, const DenseTensor& cost,
                                 double epsilon);

/// sum C * K * prod_q scalings_q, i.e. <C, dense_plan(state, kernel)>.
double dense_distance(const ScalingState& state, const DenseTensor& cost,
                      const DenseTensor& kernel);

/// Frobenius norm of (a - b).
double frobenius_distance(const DenseTensor& a, const DenseTensor& b);

}  // namespace mmot

#endif  // MMOT_ORACLE_HPP_
