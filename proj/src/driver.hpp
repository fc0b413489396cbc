// Shared generalized Sinkhorn loop. Each solver supplies the contraction of
// its kernel; the loop owns update order, residual, absorption and reporting.

#ifndef MMOT_SRC_DRIVER_HPP_
#define MMOT_SRC_DRIVER_HPP_

#include <span>
#include <string>
#include <vector>

#include "mmot/core.hpp"

namespace mmot::detail {

class ProductOperator {
 public:
  virtual ~ProductOperator() = default;
  /// Kernel contracted against every scaling except `skip`. With `scaled`
  /// the kernel carries the factor e^(sum of potentials / eps), including
  /// the potential of the free mode.
  virtual void contract(const ScalingState& s, std::size_t skip, bool scaled,
                        std::span<double> out) = 0;
  /// <C . K, prod scalings>, rescaled the same way when `scaled`.
  virtual double distance(const ScalingState& s, bool scaled) = 0;
};

SolveResult run_sinkhorn(std::span<const std::span<const double>> marginals, ProductOperator& op,
                         const SinkhornConfig& config, std::string solver,
                         const IterationObserver& observer);

}  // namespace mmot::detail

#endif  // MMOT_SRC_DRIVER_HPP_
