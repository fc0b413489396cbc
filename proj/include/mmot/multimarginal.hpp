// l-marginal contractions of K = lambda^(sum_{p<q} |i_p - i_q|).
//
// Index tuples are split by sort order into l! regions. Inside a region the
// exponent is linear in the sorted values, sum_r (2r - l - 1) x_(r), which
// equals sum over gaps r of r(l - r) (x_(r+1) - x_(r)) (1-based ranks), so a
// region sum is a chain of prefix sums from the lowest rank up to the free
// index and suffix sums from the highest rank down to it.

#ifndef MMOT_MULTIMARGINAL_HPP_
#define MMOT_MULTIMARGINAL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "mmot/core.hpp"

namespace mmot {

inline constexpr std::size_t kMaxMarginals = 8;

/// One sort-order region. order[r] is the mode (0-based) holding the r-th
/// smallest value; strict[r] says whether x_order[r] < x_order[r+1] is
/// required (otherwise <=). strict[r] holds iff order[r] > order[r+1].
struct RegionSpec {
  std::vector<std::size_t> order;
  std::vector<bool> strict;
  std::vector<int> rank_coeff;  // 2r - l - 1 for ranks r = 1..l

  std::size_t marginals() const noexcept { return order.size(); }
  /// Whether `tuple` (one index per mode) lies in this region.
  bool contains(std::span<const std::size_t> tuple) const;
};

/// All l! regions in lexicographic order of `order`. They partition the
/// index hypercube. Throws FactorialBudget for l > 8, InvalidParam for l < 2.
std::vector<RegionSpec> region_table(std::size_t l);

/// Output over the last mode: out[k] = sum over the other indices of
/// K * prod_q vectors[q][i_q]. `vectors` holds l-1 equal-length vectors.
std::vector<double> ftvp_lm(std::span<const std::vector<double>> vectors, double lambda,
                            std::size_t l);

/// Same with the cost tensor: ((C . K) x ...), c = h * sum_{p<q} |i_p - i_q|.
std::vector<double> ftvp_lm_cost(std::span<const std::vector<double>> vectors, double lambda,
                                 std::size_t l, double h);

/// Contribution of each region (same order as region_table). With h > 0 the
/// cost-weighted parts are returned instead.
std::vector<std::vector<double>> ftvp_lm_regions(std::span<const std::vector<double>> vectors,
                                                 double lambda, std::size_t l, double h = 0.0);

/// Cyclic Sinkhorn over l marginals on a common grid spacing grid.h.
/// Marginals of unequal length fall back to the dense solver and a warning
/// is recorded in the report. Stabilization is not available here and a
/// config with stabilize=true is rejected with InvalidParam.
SolveResult fast_sinkhorn_lm(std::span<const Marginal1D> marginals, const Grid1D& grid,
                             const SinkhornConfig& config,
                             const IterationObserver& observer = {});

}  // namespace mmot

#endif  // MMOT_MULTIMARGINAL_HPP_
