#include "mmot/solver.hpp"

#include <cmath>

#include "driver.hpp"
#include "mmot/ftvp1d.hpp"

namespace mmot {

namespace {

// Bound-mode pairs for each free mode: (first, second).
constexpr std::size_t kFirst[3] = {1, 0, 0};
constexpr std::size_t kSecond[3] = {2, 2, 1};

class Operator3m final : public detail::ProductOperator {
 public:
  explicit Operator3m(const KernelParams& p) : p_(p) {}

  void contract(const ScalingState& s, std::size_t skip, bool scaled,
                std::span<double> out) override {
    const auto& x = s.scalings[kFirst[skip]];
    const auto& y = s.scalings[kSecond[skip]];
    if (!scaled) {
      detail::ftvp_plain(x, y, p_.lambda(), false, 0.0, out, ws_);
      return;
    }
    load_potentials(s);
    detail::ftvp_scaled(x, y, pot_[kFirst[skip]], pot_[kSecond[skip]], pot_[skip], p_.lambda(),
                        false, 0.0, out, ws_);
  }

  double distance(const ScalingState& s, bool scaled) override {
    const std::size_t n = s.scalings[0].size();
    out_.resize(n);
    if (scaled) {
      load_potentials(s);
      detail::ftvp_scaled(s.scalings[0], s.scalings[1], pot_[0], pot_[1], pot_[2], p_.lambda(),
                          true, p_.h(), out_, ws_);
    } else {
      detail::ftvp_plain(s.scalings[0], s.scalings[1], p_.lambda(), true, p_.h(), out_, ws_);
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += s.scalings[2][k] * out_[k];
    return acc;
  }

 private:
  void load_potentials(const ScalingState& s) {
    for (std::size_t q = 0; q < 3; ++q) {
      pot_[q].resize(s.potentials[q].size());
      for (std::size_t x = 0; x < pot_[q].size(); ++x)
        pot_[q][x] = s.potentials[q][x] / p_.epsilon();
    }
  }

  KernelParams p_;
  FtvpWorkspace ws_;
  std::vector<double> pot_[3];
  std::vector<double> out_;
};

void check_state(const ScalingState& s, std::size_t n) {
  if (s.marginal_count() != 3) throw Error(ErrorKind::ShapeMismatch, "expected three scalings");
  for (std::size_t q = 0; q < 3; ++q) {
    require_same_size(s.scalings[q].size(), n, "scaling vector");
    if (!s.potentials.empty()) require_same_size(s.potentials[q].size(), n, "potential vector");
  }
}

bool uses_potentials(const ScalingState& s) {
  return s.potentials.size() == 3 && s.has_potentials();
}

}  // namespace

SolveResult fast_sinkhorn_3m(const Marginal1D& u, const Marginal1D& v, const Marginal1D& w,
                             const Grid1D& grid, const SinkhornConfig& config,
                             const IterationObserver& observer) {
  config.validate();
  require_same_size(u.size(), grid.n, "marginal u");
  require_same_size(v.size(), grid.n, "marginal v");
  require_same_size(w.size(), grid.n, "marginal w");
  Operator3m op(kernel_params(grid.h, config.epsilon));
  const std::span<const double> m[3] = {u.weights(), v.weights(), w.weights()};
  return detail::run_sinkhorn(m, op, config, config.stabilize ? "fast-stabilized" : "fast",
                              observer);
}

SolveResult fast_sinkhorn_3m_stabilized(const Marginal1D& u, const Marginal1D& v,
                                        const Marginal1D& w, const Grid1D& grid,
                                        SinkhornConfig config, const IterationObserver& observer) {
  config.stabilize = true;
  return fast_sinkhorn_3m(u, v, w, grid, config, observer);
}

double residual(const ScalingState& state, const Marginal1D& u, const Marginal1D& v,
                const Marginal1D& w, const KernelParams& params, ResidualMode mode) {
  const std::size_t n = u.size();
  require_same_size(v.size(), n, "marginal v");
  require_same_size(w.size(), n, "marginal w");
  check_state(state, n);
  Operator3m op(params);
  const bool scaled = uses_potentials(state);
  const std::span<const double> m[3] = {u.weights(), v.weights(), w.weights()};
  const std::size_t checked = mode == ResidualMode::Paper ? 2 : 3;
  std::vector<double> d(n);
  double res = 0.0;
  for (std::size_t q = 0; q < checked; ++q) {
    op.contract(state, q, scaled, d);
    for (std::size_t x = 0; x < n; ++x) res += std::abs(state.scalings[q][x] * d[x] - m[q][x]);
  }
  return res;
}

double distance(const ScalingState& state, const KernelParams& params) {
  if (state.marginal_count() != 3) throw Error(ErrorKind::ShapeMismatch, "expected three scalings");
  check_state(state, state.scalings[0].size());
  Operator3m op(params);
  return op.distance(state, uses_potentials(state));
}

}  // namespace mmot
