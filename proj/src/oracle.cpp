#include "mmot/oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace mmot {

std::size_t checked_element_count(std::span<const std::size_t> shape, std::size_t budget) {
  std::size_t count = 1;
  for (std::size_t n : shape) {
    if (n == 0) throw Error(ErrorKind::ShapeMismatch, "tensor mode has length zero");
    if (count > budget / n)
      throw Error(ErrorKind::SizeOverflow,
                  "dense tensor exceeds element budget of " + std::to_string(budget));
    count *= n;
  }
  return count;
}

DenseTensor::DenseTensor(std::vector<std::size_t> shape, std::size_t budget)
    : shape_(std::move(shape)) {
  if (shape_.size() < 2) throw Error(ErrorKind::InvalidParam, "tensor order must be at least 2");
  entries_.assign(checked_element_count(shape_, budget), 0.0);
}

std::size_t DenseTensor::flat_index(std::span<const std::size_t> index) const {
  std::size_t flat = 0;
  for (std::size_t m = 0; m < shape_.size(); ++m) flat = flat * shape_[m] + index[m];
  return flat;
}

namespace {

// Visits every multi-index of `t` in storage order.
template <class F>
void for_each_index(const std::vector<std::size_t>& shape, F&& f) {
  std::vector<std::size_t> idx(shape.size(), 0);
  std::size_t total = 1;
  for (std::size_t n : shape) total *= n;
  for (std::size_t flat = 0; flat < total; ++flat) {
    f(flat, idx);
    for (std::size_t m = shape.size(); m-- > 0;) {
      if (++idx[m] < shape[m]) break;
      idx[m] = 0;
    }
  }
}

std::size_t pairwise_l1(const std::vector<std::size_t>& idx) {
  std::size_t s = 0;
  for (std::size_t p = 0; p < idx.size(); ++p)
    for (std::size_t q = p + 1; q < idx.size(); ++q)
      s += idx[p] > idx[q] ? idx[p] - idx[q] : idx[q] - idx[p];
  return s;
}

}  // namespace

DenseTensor dense_cost(std::span<const std::size_t> shape, double h, std::size_t budget) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidParam, "grid spacing must be positive");
  DenseTensor t(std::vector<std::size_t>(shape.begin(), shape.end()), budget);
  auto e = t.entries();
  std::vector<std::size_t> sh(shape.begin(), shape.end());
  for_each_index(sh, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
    e[flat] = h * static_cast<double>(pairwise_l1(idx));
  });
  return t;
}

DenseTensor dense_cost(const Grid1D& grid, std::size_t marginals, std::size_t budget) {
  std::vector<std::size_t> shape(marginals, grid.n);
  return dense_cost(shape, grid.h, budget);
}

DenseTensor dense_kernel(const Grid1D& grid, const KernelParams& params, std::size_t marginals,
                         std::size_t budget) {
  std::vector<std::size_t> shape(marginals, grid.n);
  DenseTensor t(shape, budget);
  auto e = t.entries();
  const double lam = params.lambda();
  for_each_index(shape, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
    e[flat] = std::pow(lam, static_cast<double>(pairwise_l1(idx)));
  });
  return t;
}

DenseTensor kernel_from_cost(const DenseTensor& cost, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidParam, "epsilon must be positive");
  DenseTensor k = cost;
  for (double& x : k.entries()) x = std::exp(-x / epsilon);
  return k;
}

DenseTensor dense_cost_2d(std::size_t rows, std::size_t cols, double h1, double h2,
                          std::size_t budget) {
  if (!(h1 > 0.0) || !(h2 > 0.0))
    throw Error(ErrorKind::InvalidParam, "grid spacings must be positive");
  const std::size_t sites = rows * cols;
  std::vector<std::size_t> shape(3, sites);
  DenseTensor t(shape, budget);
  auto e = t.entries();
  auto d = [](std::size_t a, std::size_t b) { return static_cast<double>(a > b ? a - b : b - a); };
  std::size_t flat = 0;
  for (std::size_t s0 = 0; s0 < sites; ++s0)
    for (std::size_t s1 = 0; s1 < sites; ++s1)
      for (std::size_t s2 = 0; s2 < sites; ++s2) {
        const std::size_t r0 = s0 % rows, c0 = s0 / rows;
        const std::size_t r1 = s1 % rows, c1 = s1 / rows;
        const std::size_t r2 = s2 % rows, c2 = s2 / rows;
        e[flat++] = h1 * (d(r0, r1) + d(r0, r2) + d(r1, r2)) +
                    h2 * (d(c0, c1) + d(c0, c2) + d(c1, c2));
      }
  return t;
}

std::vector<double> dense_contract(const DenseTensor& t,
                                   std::span<const std::vector<double>> vectors,
                                   std::size_t free_mode) {
  const std::size_t l = t.order();
  if (free_mode >= l) throw Error(ErrorKind::InvalidParam, "free mode out of range");
  if (vectors.size() + 1 != l)
    throw Error(ErrorKind::ShapeMismatch, "need one vector per bound mode");
  auto shape = t.shape();
  std::vector<const double*> vec(l, nullptr);
  for (std::size_t m = 0, v = 0; m < l; ++m) {
    if (m == free_mode) continue;
    require_same_size(vectors[v].size(), shape[m], "dense_contract vector");
    vec[m] = vectors[v++].data();
  }

  std::vector<double> out(shape[free_mode], 0.0);
  auto entries = t.entries();
  if (l == 1) {
    std::copy(entries.begin(), entries.end(), out.begin());
    return out;
  }
  // Odometer over the leading l-2 modes, explicit loops over the last two.
  const std::size_t a_mode = l - 2, b_mode = l - 1;
  const std::size_t na = shape[a_mode], nb = shape[b_mode];
  const std::size_t outer = t.size() / (na * nb);
  std::vector<std::size_t> idx(a_mode, 0);
  for (std::size_t o = 0; o < outer; ++o) {
    double w = 1.0;
    for (std::size_t m = 0; m < a_mode; ++m)
      if (m != free_mode) w *= vec[m][idx[m]];
    const double* block = entries.data() + o * na * nb;
    if (free_mode == b_mode) {
      for (std::size_t a = 0; a < na; ++a) {
        const double wa = w * vec[a_mode][a];
        const double* row = block + a * nb;
        for (std::size_t b = 0; b < nb; ++b) out[b] += wa * row[b];
      }
    } else {
      double acc = 0.0;
      for (std::size_t a = 0; a < na; ++a) {
        const double* row = block + a * nb;
        double s = 0.0;
        for (std::size_t b = 0; b < nb; ++b) s += row[b] * vec[b_mode][b];
        if (free_mode == a_mode) out[a] += w * s;
        else acc += vec[a_mode][a] * s;
      }
      if (free_mode < a_mode) out[idx[free_mode]] += w * acc;
    }
    for (std::size_t m = a_mode; m-- > 0;) {
      if (++idx[m] < shape[m]) break;
      idx[m] = 0;
    }
  }
  return out;
}

DenseSolution dense_sinkhorn(std::span<const Marginal1D> marginals, const DenseTensor& cost,
                             const SinkhornConfig& config, const IterationObserver& observer) {
  config.validate();
  const std::size_t l = marginals.size();
  if (l != cost.order()) throw Error(ErrorKind::ShapeMismatch, "one marginal per cost mode");
  for (std::size_t q = 0; q < l; ++q)
    require_same_size(marginals[q].size(), cost.shape()[q], "dense_sinkhorn marginal");

  const DenseTensor kernel = kernel_from_cost(cost, config.epsilon);
  DenseSolution sol;
  ScalingState& st = sol.state;
  st.scalings.resize(l);
  st.potentials.resize(l);
  for (std::size_t q = 0; q < l; ++q) {
    const std::size_t n = marginals[q].size();
    st.scalings[q].assign(n, 1.0 / static_cast<double>(n));
    st.potentials[q].assign(n, 0.0);
  }
  SolveReport& rep = sol.report;
  rep.config = config;
  rep.solver = "dense";

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<double>> args(l - 1);
  auto others = [&](std::size_t skip) -> std::span<const std::vector<double>> {
    for (std::size_t q = 0, v = 0; q < l; ++q)
      if (q != skip) args[v++].assign(st.scalings[q].begin(), st.scalings[q].end());
    return args;
  };
  const std::size_t checked = config.residual_mode == ResidualMode::Paper ? l - 1 : l;
  double res = std::numeric_limits<double>::infinity();
  std::size_t t = 0;
  while (t < config.itr_max && res > config.tol) {
    ++t;
    for (std::size_t q = 0; q < l; ++q) {
      const auto d = dense_contract(kernel, others(q), q);
      divide_marginal(marginals[q].weights(), d, st.scalings[q]);
      if (!all_finite(st.scalings[q])) {
        rep.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        throw NumericalOverflowError("scaling became non-finite at iteration " + std::to_string(t),
                                     rep, t);
      }
    }
    res = 0.0;
    for (std::size_t q = 0; q < checked; ++q) {
      const auto d = dense_contract(kernel, others(q), q);
      const auto u = marginals[q].weights();
      for (std::size_t x = 0; x < d.size(); ++x) res += std::abs(st.scalings[q][x] * d[x] - u[x]);
    }
    rep.iterations = t;
    rep.trace.residuals.push_back(res);
    rep.trace.absorptions.push_back(0);
    rep.trace.elapsed_s.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (observer) observer(t, st);
  }
  rep.converged = res <= config.tol;
  rep.distance = dense_distance(st, cost, kernel);
  rep.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

DenseSolution dense_sinkhorn(const Marginal1D& u, const Marginal1D& v, const Marginal1D& w,
                             const Grid1D& grid, const SinkhornConfig& config,
                             const IterationObserver& observer) {
  require_same_size(u.size(), grid.n, "marginal u");
  require_same_size(v.size(), grid.n, "marginal v");
  require_same_size(w.size(), grid.n, "marginal w");
  const DenseTensor cost = dense_cost(grid, 3);
  const Marginal1D m[3] = {u, v, w};
  return dense_sinkhorn(std::span<const Marginal1D>(m, 3), cost, config, observer);
}

namespace {

void check_state_shape(const ScalingState& state, const DenseTensor& t) {
  if (state.marginal_count() != t.order())
    throw Error(ErrorKind::ShapeMismatch, "state and tensor order differ");
  for (std::size_t q = 0; q < t.order(); ++q)
    require_same_size(state.scalings[q].size(), t.shape()[q], "scaling vector");
}

}  // namespace

DenseTensor dense_plan(const ScalingState& state, const DenseTensor& kernel) {
  check_state_shape(state, kernel);
  DenseTensor plan = kernel;
  auto e = plan.entries();
  std::vector<std::size_t> shape(kernel.shape().begin(), kernel.shape().end());
  for_each_index(shape, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
    double w = e[flat];
    for (std::size_t q = 0; q < idx.size(); ++q) w *= state.scalings[q][idx[q]];
    e[flat] = w;
  });
  return plan;
}

DenseTensor dense_plan_from_cost(const ScalingState& state, const DenseTensor& cost,
                                 double epsilon) {
  check_state_shape(state, cost);
  const bool pot = state.potentials.size() == state.scalings.size();
  DenseTensor plan = cost;
  auto e = plan.entries();
  std::vector<std::size_t> shape(cost.shape().begin(), cost.shape().end());
  for_each_index(shape, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
    double lg = -e[flat] / epsilon;
    bool zero = false;
    for (std::size_t q = 0; q < idx.size(); ++q) {
      const double s = state.scalings[q][idx[q]];
      if (s == 0.0) zero = true;
      else lg += std::log(s) + (pot ? state.potentials[q][idx[q]] / epsilon : 0.0);
    }
    e[flat] = zero ? 0.0 : std::exp(lg);
  });
  return plan;
}

double dense_distance(const ScalingState& state, const DenseTensor& cost,
                      const DenseTensor& kernel) {
  check_state_shape(state, kernel);
  if (cost.size() != kernel.size())
    throw Error(ErrorKind::ShapeMismatch, "cost and kernel shapes differ");
  const DenseTensor plan = dense_plan(state, kernel);
  double s = 0.0;
  auto c = cost.entries();
  auto p = plan.entries();
  for (std::size_t x = 0; x < c.size(); ++x) s += c[x] * p[x];
  return s;
}

double frobenius_distance(const DenseTensor& a, const DenseTensor& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::ShapeMismatch, "tensor shapes differ");
  double s = 0.0;
  auto x = a.entries();
  auto y = b.entries();
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

}  // namespace mmot
