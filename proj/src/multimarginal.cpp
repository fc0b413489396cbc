#include "mmot/multimarginal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "driver.hpp"
#include "mmot/oracle.hpp"

namespace mmot {

bool RegionSpec::contains(std::span<const std::size_t> tuple) const {
  for (std::size_t r = 0; r + 1 < order.size(); ++r) {
    const std::size_t a = tuple[order[r]], b = tuple[order[r + 1]];
    if (strict[r] ? !(a < b) : !(a <= b)) return false;
  }
  return true;
}

std::vector<RegionSpec> region_table(std::size_t l) {
  if (l < 2) throw Error(ErrorKind::InvalidParam, "need at least two marginals");
  if (l > kMaxMarginals)
    throw Error(ErrorKind::FactorialBudget,
                std::to_string(l) + " marginals exceed the limit of " + std::to_string(kMaxMarginals));
  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), 0);
  std::vector<RegionSpec> table;
  do {
    RegionSpec R;
    R.order = order;
    for (std::size_t r = 0; r + 1 < l; ++r) R.strict.push_back(order[r] > order[r + 1]);
    for (std::size_t r = 1; r <= l; ++r)
      R.rank_coeff.push_back(2 * static_cast<int>(r) - static_cast<int>(l) - 1);
    table.push_back(std::move(R));
  } while (std::next_permutation(order.begin(), order.end()));
  return table;
}

namespace {

class RegionEngine {
 public:
  RegionEngine(std::size_t l, double lambda) : l_(l), table_(region_table(l)) {
    for (std::size_t r = 0; r + 1 < l; ++r) {
      const double w = static_cast<double>((r + 1) * (l - r - 1));
      weight_.push_back(w);
      mu_.push_back(std::pow(lambda, w));
    }
  }

  const std::vector<RegionSpec>& table() const { return table_; }

  // Adds region `R`'s contribution over the last mode to J (and to Jh).
  // bound[m] is the vector of mode m for m < l-1.
  void region(const RegionSpec& R, std::span<const double* const> bound, std::size_t n,
              bool weighted, double* J, double* Jh) {
    const std::size_t free_mode = l_ - 1;
    const std::size_t top = l_ - 1;
    const std::size_t rs = static_cast<std::size_t>(
        std::find(R.order.begin(), R.order.end(), free_mode) - R.order.begin());
    Cf_.assign(n, 1.0);
    Cb_.assign(n, 1.0);
    Hf_.assign(n, 0.0);
    Hb_.assign(n, 0.0);
    auto factor = [&](std::size_t rank, std::size_t x) {
      const std::size_t m = R.order[rank];
      return m == free_mode ? 1.0 : bound[m][x];
    };

    for (std::size_t x = 0; x < n; ++x) Cf_[x] = factor(0, x);
    for (std::size_t r = 0; r < rs; ++r) {
      const double mu = mu_[r], w = weight_[r];
      const bool strict = R.strict[r];
      double s_prev = 0.0, h_prev = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        const double carry = mu * s_prev;
        const double carry_h = weighted ? mu * (h_prev + w * s_prev) : 0.0;
        const double s = carry + Cf_[x];
        const double hs = carry_h + Hf_[x];
        const double f = factor(r + 1, x);
        Cf_[x] = f * (strict ? carry : s);
        Hf_[x] = f * (strict ? carry_h : hs);
        s_prev = s;
        h_prev = hs;
      }
    }

    for (std::size_t x = 0; x < n; ++x) Cb_[x] = factor(top, x);
    for (std::size_t r = top; r-- > rs;) {
      // gap r joins rank r (lower) and rank r+1 (upper)
      const double mu = mu_[r], w = weight_[r];
      const bool strict = R.strict[r];
      double s_prev = 0.0, h_prev = 0.0;
      for (std::size_t x = n; x-- > 0;) {
        const double carry = mu * s_prev;
        const double carry_h = weighted ? mu * (h_prev + w * s_prev) : 0.0;
        const double s = carry + Cb_[x];
        const double hs = carry_h + Hb_[x];
        const double f = factor(r, x);
        Cb_[x] = f * (strict ? carry : s);
        Hb_[x] = f * (strict ? carry_h : hs);
        s_prev = s;
        h_prev = hs;
      }
    }

    for (std::size_t k = 0; k < n; ++k) {
      J[k] += Cf_[k] * Cb_[k];
      if (weighted) Jh[k] += Hf_[k] * Cb_[k] + Cf_[k] * Hb_[k];
    }
  }

 private:
  std::size_t l_;
  std::vector<RegionSpec> table_;
  std::vector<double> weight_, mu_;
  std::vector<double> Cf_, Cb_, Hf_, Hb_;
};

std::vector<const double*> check_lm(std::span<const std::vector<double>> vectors, double lambda,
                                    std::size_t l) {
  if (l < 2) throw Error(ErrorKind::InvalidParam, "need at least two marginals");
  if (l > kMaxMarginals)
    throw Error(ErrorKind::FactorialBudget,
                std::to_string(l) + " marginals exceed the limit of " + std::to_string(kMaxMarginals));
  if (vectors.size() + 1 != l)
    throw Error(ErrorKind::ShapeMismatch, "need l-1 vectors for l marginals");
  if (vectors[0].empty()) throw Error(ErrorKind::ShapeMismatch, "empty vector");
  std::vector<const double*> ptr;
  for (const auto& v : vectors) {
    require_same_size(v.size(), vectors[0].size(), "ftvp_lm vectors");
    if (!all_finite(v)) throw Error(ErrorKind::NonFinite, "ftvp_lm: input is NaN or infinite");
    ptr.push_back(v.data());
  }
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw Error(ErrorKind::InvalidParam, "lambda must lie in (0, 1]");
  return ptr;
}

}  // namespace

std::vector<double> ftvp_lm(std::span<const std::vector<double>> vectors, double lambda,
                            std::size_t l) {
  const auto ptr = check_lm(vectors, lambda, l);
  const std::size_t n = vectors[0].size();
  RegionEngine eng(l, lambda);
  std::vector<double> out(n, 0.0);
  for (const auto& R : eng.table()) eng.region(R, ptr, n, false, out.data(), nullptr);
  return out;
}

std::vector<double> ftvp_lm_cost(std::span<const std::vector<double>> vectors, double lambda,
                                 std::size_t l, double h) {
  const auto ptr = check_lm(vectors, lambda, l);
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidParam, "h must be positive");
  const std::size_t n = vectors[0].size();
  RegionEngine eng(l, lambda);
  std::vector<double> J(n, 0.0), out(n, 0.0);
  for (const auto& R : eng.table()) eng.region(R, ptr, n, true, J.data(), out.data());
  for (double& v : out) v *= h;
  return out;
}

std::vector<std::vector<double>> ftvp_lm_regions(std::span<const std::vector<double>> vectors,
                                                 double lambda, std::size_t l, double h) {
  const auto ptr = check_lm(vectors, lambda, l);
  const std::size_t n = vectors[0].size();
  const bool weighted = h > 0.0;
  RegionEngine eng(l, lambda);
  std::vector<std::vector<double>> parts;
  std::vector<double> J(n), Jh(n);
  for (const auto& R : eng.table()) {
    std::fill(J.begin(), J.end(), 0.0);
    std::fill(Jh.begin(), Jh.end(), 0.0);
    eng.region(R, ptr, n, weighted, J.data(), Jh.data());
    if (weighted) {
      for (double& v : Jh) v *= h;
      parts.push_back(Jh);
    } else {
      parts.push_back(J);
    }
  }
  return parts;
}

namespace {

class OperatorLm final : public detail::ProductOperator {
 public:
  OperatorLm(std::size_t l, std::size_t n, double lambda, double h)
      : l_(l), n_(n), h_(h), eng_(l, lambda), bound_(l - 1) {}

  void contract(const ScalingState& s, std::size_t skip, bool, std::span<double> out) override {
    // The kernel is symmetric, so the skipped mode can play the last one.
    for (std::size_t q = 0, b = 0; q < l_; ++q)
      if (q != skip) bound_[b++] = s.scalings[q].data();
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& R : eng_.table()) eng_.region(R, bound_, n_, false, out.data(), nullptr);
  }

  double distance(const ScalingState& s, bool) override {
    for (std::size_t q = 0; q + 1 < l_; ++q) bound_[q] = s.scalings[q].data();
    std::vector<double> J(n_, 0.0), Jh(n_, 0.0);
    for (const auto& R : eng_.table()) eng_.region(R, bound_, n_, true, J.data(), Jh.data());
    double acc = 0.0;
    for (std::size_t k = 0; k < n_; ++k) acc += s.scalings[l_ - 1][k] * Jh[k];
    return h_ * acc;
  }

 private:
  std::size_t l_, n_;
  double h_;
  RegionEngine eng_;
  std::vector<const double*> bound_;
};

}  // namespace

SolveResult fast_sinkhorn_lm(std::span<const Marginal1D> marginals, const Grid1D& grid,
                             const SinkhornConfig& config, const IterationObserver& observer) {
  config.validate();
  const std::size_t l = marginals.size();
  if (l < 3) throw Error(ErrorKind::InvalidParam, "need at least three marginals");
  if (l > kMaxMarginals)
    throw Error(ErrorKind::FactorialBudget,
                std::to_string(l) + " marginals exceed the limit of " + std::to_string(kMaxMarginals));
  if (config.stabilize)
    throw Error(ErrorKind::InvalidParam,
                "log-domain stabilization is not available for the l-marginal solver");
  const std::size_t n = marginals[0].size();
  bool equal = true;
  for (const auto& m : marginals) equal = equal && m.size() == n;
  if (!equal) {
    std::vector<std::size_t> shape;
    for (const auto& m : marginals) shape.push_back(m.size());
    const DenseTensor cost = dense_cost(shape, grid.h);
    SolveResult r = dense_sinkhorn(marginals, cost, config, observer);
    r.report.warnings.push_back(
        "marginals have unequal lengths; solved with the dense solver instead");
    return r;
  }
  OperatorLm op(l, n, kernel_params(grid.h, config.epsilon).lambda(), grid.h);
  std::vector<std::span<const double>> m;
  for (const auto& x : marginals) m.push_back(x.weights());
  return detail::run_sinkhorn(m, op, config, "fast-lm", observer);
}

}  // namespace mmot
