#include "driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace mmot::detail {

SolveResult run_sinkhorn(std::span<const std::span<const double>> marginals, ProductOperator& op,
                         const SinkhornConfig& config, std::string solver,
                         const IterationObserver& observer) {
  config.validate();
  const std::size_t l = marginals.size();
  SolveResult r;
  ScalingState& st = r.state;
  SolveReport& rep = r.report;
  rep.config = config;
  rep.solver = std::move(solver);
  st.scalings.resize(l);
  st.potentials.resize(l);
  std::vector<std::vector<double>> d(l);
  for (std::size_t q = 0; q < l; ++q) {
    const std::size_t n = marginals[q].size();
    st.scalings[q].assign(n, 1.0 / static_cast<double>(n));
    st.potentials[q].assign(n, 0.0);
    d[q].resize(n);
  }

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };
  auto fail = [&](std::size_t t, const std::string& what) {
    rep.elapsed_s = seconds();
    throw NumericalOverflowError(what, rep, t);
  };

  const std::size_t checked = config.residual_mode == ResidualMode::Paper ? l - 1 : l;
  bool scaled = false;
  std::size_t absorptions = 0;
  double res = std::numeric_limits<double>::infinity();
  std::size_t t = 0;
  while (t < config.itr_max && res > config.tol) {
    ++t;
    try {
      for (std::size_t q = 0; q < l; ++q) {
        op.contract(st, q, scaled, d[q]);
        divide_marginal(marginals[q], d[q], st.scalings[q]);
        if (!all_finite(st.scalings[q]))
          fail(t, "scaling " + std::to_string(q + 1) + " became non-finite at iteration " +
                      std::to_string(t));
      }
      res = 0.0;
      for (std::size_t q = 0; q < checked; ++q) {
        op.contract(st, q, scaled, d[q]);
        const auto& s = st.scalings[q];
        for (std::size_t x = 0; x < s.size(); ++x) res += std::abs(s[x] * d[q][x] - marginals[q][x]);
      }
    } catch (const NumericalOverflowError&) {
      throw;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NumericalOverflow) fail(t, e.what());
      throw;
    }
    if (!std::isfinite(res)) fail(t, "residual became non-finite at iteration " + std::to_string(t));

    if (config.stabilize) {
      double peak = 0.0;
      for (const auto& s : st.scalings)
        for (double x : s) peak = std::max(peak, x);
      if (peak > config.tau) {
        absorb_scalings(st, config.epsilon);
        scaled = true;
        ++absorptions;
      }
    }
    rep.iterations = t;
    rep.trace.residuals.push_back(res);
    rep.trace.absorptions.push_back(absorptions);
    rep.trace.elapsed_s.push_back(seconds());
    if (observer) observer(t, st);
  }
  rep.converged = res <= config.tol;
  try {
    rep.distance = op.distance(st, scaled);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NumericalOverflow) fail(t, e.what());
    throw;
  }
  rep.elapsed_s = seconds();
  return r;
}

}  // namespace mmot::detail
