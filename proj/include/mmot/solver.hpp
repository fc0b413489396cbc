// Linear-time Sinkhorn for three 1D marginals with L1 pairwise cost.

#ifndef MMOT_SOLVER_HPP_
#define MMOT_SOLVER_HPP_

#include "mmot/core.hpp"

namespace mmot {

/// Updates phi, psi, phi~ in that order each iteration, then evaluates the
/// residual. With config.stabilize the scalings are absorbed into potentials
/// whenever one exceeds config.tau, and the rescaled sweeps take over.
/// Throws NumericalOverflowError if a scaling becomes non-finite.
SolveResult fast_sinkhorn_3m(const Marginal1D& u, const Marginal1D& v, const Marginal1D& w,
                             const Grid1D& grid, const SinkhornConfig& config,
                             const IterationObserver& observer = {});

/// fast_sinkhorn_3m with stabilization forced on.
SolveResult fast_sinkhorn_3m_stabilized(const Marginal1D& u, const Marginal1D& v,
                                        const Marginal1D& w, const Grid1D& grid,
                                        SinkhornConfig config,
                                        const IterationObserver& observer = {});

/// Paper mode: sum |phi . K(psi, phi~) - u| + sum |psi . K(phi, phi~) - v|.
/// Full mode adds the w term. Potentials in `state` are honoured.
double residual(const ScalingState& state, const Marginal1D& u, const Marginal1D& v,
                const Marginal1D& w, const KernelParams& params, ResidualMode mode);

/// <phi~, (C . K) x_i phi x_j psi> with h = params.h() applied once.
double distance(const ScalingState& state, const KernelParams& params);

}  // namespace mmot

#endif  // MMOT_SOLVER_HPP_
