#include "mmot/ftvp2d.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "driver.hpp"
#include "mmot/ftvp1d.hpp"

namespace mmot {

Field2D::Field2D(std::size_t r, std::size_t c, std::vector<double> v)
    : rows(r), cols(c), values(std::move(v)) {
  if (values.size() != rows * cols)
    throw Error(ErrorKind::ShapeMismatch, "field size does not match rows x cols");
}

Field2D Field2D::transposed() const {
  Field2D t(cols, rows);
  for (std::size_t i2 = 0; i2 < cols; ++i2)
    for (std::size_t i1 = 0; i1 < rows; ++i1) t(i2, i1) = (*this)(i1, i2);
  return t;
}

namespace {

// inner(a, b, ca, cb, cg, out): row contraction of columns a and b, where
// ca, cb, cg name the columns whose potentials apply to a, b and the output.
using Inner = std::function<void(const double*, const double*, std::size_t, std::size_t,
                                 std::size_t, double*)>;

// Column sweep. The 1D recurrences of ftvp_kernels.hpp with every scalar
// accumulator replaced by a column and every product by an inner call.
// Only the suffix columns are stored whole; prefix accumulators and the
// running region sums advance one column at a time. Writes sum_p J_p
// (weighted = false) or sum_p Ĵ_p without any h factor.
class ColumnSweep {
 public:
  void run(std::size_t N, std::size_t M, const double* x, const double* y, double lambda,
           const double* A, const double* B, const double* G, bool weighted, const Inner& inner,
           double* out) {
    N_ = N;
    l2_ = lambda * lambda;
    ll2_ = 2.0 * std::log(lambda);
    const std::size_t NM = N * M;
    Ux.resize(NM);
    Uy.resize(NM);
    if (weighted) {
      Uxh.resize(NM);
      Uyh.resize(NM);
    }
    for (auto* v : {&Lx, &Ly, &P2, &Lxh, &Lyh, &P2h, &J1, &J2, &J5, &J6, &H1, &H2, &H5, &H6, &P6,
                    &P6h, &rA, &rB, &g_, &tmp_})
      v->resize(N);

    auto call = [&](const double* a, const double* b, std::size_t ca, std::size_t cb,
                    std::size_t cg) {
      inner(a, b, ca, cb, cg, tmp_.data());
      return tmp_.data();
    };
    auto xc = [&](std::size_t c) { return x + N * c; };
    auto yc = [&](std::size_t c) { return y + N * c; };
    auto col = [&](std::vector<double>& v, std::size_t c) { return v.data() + N * c; };

    // Suffix columns.
    for (std::size_t i = 0; i < N; ++i) {
      col(Ux, M - 1)[i] = l2_ * xc(M - 1)[i];
      col(Uy, M - 1)[i] = l2_ * yc(M - 1)[i];
    }
    if (weighted)
      for (std::size_t i = 0; i < N; ++i) {
        col(Uxh, M - 1)[i] = 2.0 * col(Ux, M - 1)[i];
        col(Uyh, M - 1)[i] = 2.0 * col(Uy, M - 1)[i];
      }
    for (std::size_t c = M - 1; c-- > 0;) {
      const double* ra = ratio(A, c + 1, c, rA);
      const double* rb = ratio(B, c + 1, c, rB);
      if (weighted)
        for (std::size_t i = 0; i < N; ++i) {
          col(Uxh, c)[i] = ra[i] * (col(Uxh, c + 1)[i] + 2.0 * col(Ux, c + 1)[i]) + 2.0 * l2_ * xc(c)[i];
          col(Uyh, c)[i] = rb[i] * (col(Uyh, c + 1)[i] + 2.0 * col(Uy, c + 1)[i]) + 2.0 * l2_ * yc(c)[i];
        }
      for (std::size_t i = 0; i < N; ++i) {
        col(Ux, c)[i] = ra[i] * col(Ux, c + 1)[i] + l2_ * xc(c)[i];
        col(Uy, c)[i] = rb[i] * col(Uy, c + 1)[i] + l2_ * yc(c)[i];
      }
    }

    // Regions 5 and 6 run downwards: J5[c-1] and J6[c-1] are ready at step c.
    std::fill_n(out + N * (M - 1), N, 0.0);
    std::fill(J5.begin(), J5.end(), 0.0);
    std::fill(J6.begin(), J6.end(), 0.0);
    std::fill(H5.begin(), H5.end(), 0.0);
    std::fill(H6.begin(), H6.end(), 0.0);
    for (std::size_t c = M - 1; c >= 1; --c) {
      const double* g = ratio(G, c - 1, c, g_);
      if (weighted) {
        shift(H5, g, J5, call(xc(c), col(Uyh, c), c, c, c - 1));
        if (c + 1 < M) {
          for (std::size_t i = 0; i < N; ++i)
            P6h[i] = l2_ * (col(Uxh, c + 1)[i] + 2.0 * col(Ux, c + 1)[i]);
          shift(H6, g, J6, call(P6h.data(), yc(c), c + 1, c, c - 1));
        }
      }
      step(J5, g, call(xc(c), col(Uy, c), c, c, c - 1));
      if (c + 1 < M) {
        for (std::size_t i = 0; i < N; ++i) P6[i] = l2_ * col(Ux, c + 1)[i];
        step(J6, g, call(P6.data(), yc(c), c + 1, c, c - 1));
      }
      const auto& a = weighted ? H5 : J5;
      const auto& b = weighted ? H6 : J6;
      for (std::size_t i = 0; i < N; ++i) out[N * (c - 1) + i] = a[i] + b[i];
    }

    // Regions 1 to 4 run upwards.
    std::copy_n(xc(0), N, Lx.data());
    std::copy_n(yc(0), N, Ly.data());
    for (std::size_t i = 0; i < N; ++i) P2[i] = l2_ * yc(0)[i];
    std::fill(J2.begin(), J2.end(), 0.0);
    std::fill(H1.begin(), H1.end(), 0.0);
    std::fill(H2.begin(), H2.end(), 0.0);
    if (weighted) {
      std::fill(Lxh.begin(), Lxh.end(), 0.0);
      std::fill(Lyh.begin(), Lyh.end(), 0.0);
      for (std::size_t i = 0; i < N; ++i) P2h[i] = 2.0 * P2[i];
    }
    std::copy_n(call(Lx.data(), yc(0), 0, 0, 0), N, J1.data());
    for (std::size_t c = 0; c < M; ++c) {
      if (c > 0) {
        const double* g = ratio(G, c, c - 1, g_);
        // P2 and P2h still hold column c-1 here.
        if (weighted) shift(H2, g, J2, call(xc(c), P2h.data(), c, c - 1, c));
        step(J2, g, call(xc(c), P2.data(), c, c - 1, c));
        const double* ra = ratio(A, c - 1, c, rA);
        const double* rb = ratio(B, c - 1, c, rB);
        if (weighted)
          for (std::size_t i = 0; i < N; ++i) {
            Lxh[i] = ra[i] * (Lxh[i] + 2.0 * Lx[i]);
            Lyh[i] = rb[i] * (Lyh[i] + 2.0 * Ly[i]);
            P2h[i] = rb[i] * (P2h[i] + 2.0 * P2[i]) + 2.0 * l2_ * yc(c)[i];
          }
        for (std::size_t i = 0; i < N; ++i) {
          Lx[i] = ra[i] * Lx[i] + xc(c)[i];
          Ly[i] = rb[i] * Ly[i] + yc(c)[i];
          P2[i] = rb[i] * P2[i] + l2_ * yc(c)[i];
        }
        if (weighted) shift(H1, g, J1, call(Lxh.data(), yc(c), c, c, c));
        step(J1, g, call(Lx.data(), yc(c), c, c, c));
      }
      double* o = out + N * c;
      if (weighted) {
        for (std::size_t i = 0; i < N; ++i) o[i] += H1[i] + H2[i];
        if (c + 1 < M) {
          add(o, call(Lxh.data(), col(Uy, c + 1), c, c + 1, c));
          add(o, call(Lx.data(), col(Uyh, c + 1), c, c + 1, c));
          add(o, call(col(Uxh, c + 1), Ly.data(), c + 1, c, c));
          add(o, call(col(Ux, c + 1), Lyh.data(), c + 1, c, c));
        }
      } else {
        for (std::size_t i = 0; i < N; ++i) o[i] += J1[i] + J2[i];
        if (c + 1 < M) {
          add(o, call(Lx.data(), col(Uy, c + 1), c, c + 1, c));
          add(o, call(col(Ux, c + 1), Ly.data(), c + 1, c, c));
        }
      }
    }
  }

 private:
  // l2 * e^(P[:, from] - P[:, to]); all l2 without potentials.
  const double* ratio(const double* P, std::size_t from, std::size_t to, std::vector<double>& r) const {
    if (P == nullptr) {
      std::fill(r.begin(), r.end(), l2_);
    } else {
      for (std::size_t i = 0; i < N_; ++i) r[i] = std::exp(ll2_ + P[i + N_ * from] - P[i + N_ * to]);
    }
    return r.data();
  }
  // acc = g * acc + v
  void step(std::vector<double>& acc, const double* g, const double* v) const {
    for (std::size_t i = 0; i < N_; ++i) acc[i] = g[i] * acc[i] + v[i];
  }
  // hat = g * (hat + 2 * plain) + v, with plain still at the previous column
  void shift(std::vector<double>& hat, const double* g, const std::vector<double>& plain,
             const double* v) const {
    for (std::size_t i = 0; i < N_; ++i) hat[i] = g[i] * (hat[i] + 2.0 * plain[i]) + v[i];
  }
  void add(double* dst, const double* v) const {
    for (std::size_t i = 0; i < N_; ++i) dst[i] += v[i];
  }

  std::size_t N_ = 0;
  double l2_ = 0.0, ll2_ = 0.0;
  std::vector<double> Ux, Uy, Uxh, Uyh;
  std::vector<double> Lx, Ly, P2, Lxh, Lyh, P2h, J1, J2, J5, J6, H1, H2, H5, H6, P6, P6h;
  std::vector<double> rA, rB, g_, tmp_;
};

// All 2D contractions with reusable scratch space.
class Contractor2d {
 public:
  // Potentials, when given, are already divided by epsilon.
  void contract(std::size_t N, std::size_t M, const double* x, const double* y, double lam1,
                double lam2, const double* A, const double* B, const double* G,
                std::span<double> out) {
    sweep_.run(N, M, x, y, lam2, A, B, G, false, inner(N, lam1, A, B, G, false, 0.0), out.data());
  }

  void contract_cost(std::size_t N, std::size_t M, const double* x, const double* y, double lam1,
                     double lam2, double h1, double h2, const double* A, const double* B,
                     const double* G, std::span<double> out) {
    // Row part of the cost: row-weighted inner, plain column sweep.
    sweep_.run(N, M, x, y, lam2, A, B, G, false, inner(N, lam1, A, B, G, true, h1), out.data());
    // Column part: plain inner, weighted column sweep.
    second_.resize(N * M);
    sweep_.run(N, M, x, y, lam2, A, B, G, true, inner(N, lam1, A, B, G, false, 0.0),
               second_.data());
    for (std::size_t e = 0; e < N * M; ++e) out[e] += h2 * second_[e];
  }

 private:
  Inner inner(std::size_t N, double lam1, const double* A, const double* B, const double* G,
              bool weighted, double h) {
    if (A == nullptr) {
      return [this, N, lam1, weighted, h](const double* a, const double* b, std::size_t,
                                          std::size_t, std::size_t, double* o) {
        detail::ftvp_plain({a, N}, {b, N}, lam1, weighted, h, {o, N}, ws_);
      };
    }
    return [this, N, lam1, A, B, G, weighted, h](const double* a, const double* b, std::size_t ca,
                                                 std::size_t cb, std::size_t cg, double* o) {
      detail::ftvp_scaled({a, N}, {b, N}, {A + N * ca, N}, {B + N * cb, N}, {G + N * cg, N}, lam1,
                          weighted, h, {o, N}, ws_);
    };
  }

  ColumnSweep sweep_;
  FtvpWorkspace ws_;
  std::vector<double> second_;
};

void check_pair(const Field2D& phi, const Field2D& psi, double lambda1, double lambda2) {
  if (phi.rows == 0 || phi.cols == 0) throw Error(ErrorKind::ShapeMismatch, "empty field");
  if (phi.values.size() != phi.rows * phi.cols || psi.values.size() != psi.rows * psi.cols)
    throw Error(ErrorKind::ShapeMismatch, "field size does not match rows x cols");
  if (phi.rows != psi.rows || phi.cols != psi.cols)
    throw Error(ErrorKind::ShapeMismatch, "fields have different shapes");
  if (!all_finite(phi.values) || !all_finite(psi.values))
    throw Error(ErrorKind::NonFinite, "field is NaN or infinite");
  for (double l : {lambda1, lambda2})
    if (!(l > 0.0 && l <= 1.0)) throw Error(ErrorKind::InvalidParam, "lambda must lie in (0, 1]");
}

std::vector<double> scaled_potential(const Field2D& p, const Field2D& like, double epsilon) {
  if (p.rows != like.rows || p.cols != like.cols || p.values.size() != like.values.size())
    throw Error(ErrorKind::ShapeMismatch, "potential shape differs from field");
  if (!all_finite(p.values)) throw Error(ErrorKind::NonFinite, "potential is NaN or infinite");
  std::vector<double> s(p.values.size());
  for (std::size_t e = 0; e < s.size(); ++e) s[e] = p.values[e] / epsilon;
  return s;
}

void check_eps(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorKind::InvalidParam, "epsilon must be positive");
}

void check_h(double h1, double h2) {
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw Error(ErrorKind::InvalidParam, "h1, h2 must be positive");
}

}  // namespace

Field2D ftvp2d_1(const Field2D& phi, const Field2D& psi, double lambda1, double lambda2) {
  check_pair(phi, psi, lambda1, lambda2);
  Field2D out(phi.rows, phi.cols);
  Contractor2d c;
  c.contract(phi.rows, phi.cols, phi.values.data(), psi.values.data(), lambda1, lambda2, nullptr,
             nullptr, nullptr, out.values);
  return out;
}

Field2D ftvp2d_2(const Field2D& phi, const Field2D& psi, double lambda1, double lambda2,
                 double h1, double h2) {
  check_pair(phi, psi, lambda1, lambda2);
  check_h(h1, h2);
  Field2D out(phi.rows, phi.cols);
  Contractor2d c;
  c.contract_cost(phi.rows, phi.cols, phi.values.data(), psi.values.data(), lambda1, lambda2, h1,
                  h2, nullptr, nullptr, nullptr, out.values);
  return out;
}

Field2D ftvp2d_log(const Field2D& phi, const Field2D& psi, const Field2D& alpha,
                   const Field2D& beta, const Field2D& gamma, double lambda1, double lambda2,
                   double epsilon) {
  check_pair(phi, psi, lambda1, lambda2);
  check_eps(epsilon);
  const auto A = scaled_potential(alpha, phi, epsilon);
  const auto B = scaled_potential(beta, phi, epsilon);
  const auto G = scaled_potential(gamma, phi, epsilon);
  Field2D out(phi.rows, phi.cols);
  Contractor2d c;
  c.contract(phi.rows, phi.cols, phi.values.data(), psi.values.data(), lambda1, lambda2, A.data(),
             B.data(), G.data(), out.values);
  return out;
}

Field2D ftvp2d_2_log(const Field2D& phi, const Field2D& psi, const Field2D& alpha,
                     const Field2D& beta, const Field2D& gamma, double lambda1, double lambda2,
                     double epsilon, double h1, double h2) {
  check_pair(phi, psi, lambda1, lambda2);
  check_eps(epsilon);
  check_h(h1, h2);
  const auto A = scaled_potential(alpha, phi, epsilon);
  const auto B = scaled_potential(beta, phi, epsilon);
  const auto G = scaled_potential(gamma, phi, epsilon);
  Field2D out(phi.rows, phi.cols);
  Contractor2d c;
  c.contract_cost(phi.rows, phi.cols, phi.values.data(), psi.values.data(), lambda1, lambda2, h1,
                  h2, A.data(), B.data(), G.data(), out.values);
  return out;
}

namespace {

constexpr std::size_t kFirst[3] = {1, 0, 0};
constexpr std::size_t kSecond[3] = {2, 2, 1};

class Operator2d final : public detail::ProductOperator {
 public:
  Operator2d(std::size_t rows, std::size_t cols, double h1, double h2, double epsilon)
      : N_(rows), M_(cols), h1_(h1), h2_(h2), eps_(epsilon),
        lam1_(kernel_params(h1, epsilon).lambda()), lam2_(kernel_params(h2, epsilon).lambda()) {}

  void contract(const ScalingState& s, std::size_t skip, bool scaled,
                std::span<double> out) override {
    const double* x = s.scalings[kFirst[skip]].data();
    const double* y = s.scalings[kSecond[skip]].data();
    if (!scaled) {
      c_.contract(N_, M_, x, y, lam1_, lam2_, nullptr, nullptr, nullptr, out);
      return;
    }
    load(s);
    c_.contract(N_, M_, x, y, lam1_, lam2_, pot_[kFirst[skip]].data(),
                pot_[kSecond[skip]].data(), pot_[skip].data(), out);
  }

  double distance(const ScalingState& s, bool scaled) override {
    out_.resize(N_ * M_);
    const double* x = s.scalings[0].data();
    const double* y = s.scalings[1].data();
    if (scaled) {
      load(s);
      c_.contract_cost(N_, M_, x, y, lam1_, lam2_, h1_, h2_, pot_[0].data(), pot_[1].data(),
                       pot_[2].data(), out_);
    } else {
      c_.contract_cost(N_, M_, x, y, lam1_, lam2_, h1_, h2_, nullptr, nullptr, nullptr, out_);
    }
    double acc = 0.0;
    for (std::size_t e = 0; e < out_.size(); ++e) acc += s.scalings[2][e] * out_[e];
    return acc;
  }

 private:
  void load(const ScalingState& s) {
    for (std::size_t q = 0; q < 3; ++q) {
      pot_[q].resize(s.potentials[q].size());
      for (std::size_t e = 0; e < pot_[q].size(); ++e) pot_[q][e] = s.potentials[q][e] / eps_;
    }
  }

  std::size_t N_, M_;
  double h1_, h2_, eps_, lam1_, lam2_;
  Contractor2d c_;
  std::vector<double> pot_[3];
  std::vector<double> out_;
};

}  // namespace

SolveResult fast_sinkhorn_2d(const Marginal2D& u, const Marginal2D& v, const Marginal2D& w,
                             const SinkhornConfig& config, const IterationObserver& observer) {
  config.validate();
  for (const Marginal2D* m : {&v, &w}) {
    if (m->rows() != u.rows() || m->cols() != u.cols())
      throw Error(ErrorKind::ShapeMismatch, "2D marginals have different shapes");
    if (m->h1() != u.h1() || m->h2() != u.h2())
      throw Error(ErrorKind::ShapeMismatch, "2D marginals have different grid spacings");
  }
  Operator2d op(u.rows(), u.cols(), u.h1(), u.h2(), config.epsilon);
  const std::span<const double> m[3] = {u.weights(), v.weights(), w.weights()};
  return detail::run_sinkhorn(m, op, config,
                              config.stabilize ? "fast2d-stabilized" : "fast2d", observer);
}

}  // namespace mmot
