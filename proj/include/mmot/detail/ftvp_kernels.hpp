// Region sweeps behind ftvp1 / ftvp2 / ftvp_log.
//
// Storage is 0-based. For output index k the contraction
//   F[k] = sum_{i,j} lambda^(|i-j|+|i-k|+|j-k|) x_i y_j
// splits into six order regions (see CoefficientTable). Each region sum is a
// product of a prefix accumulator (indices below k) and a suffix accumulator
// (indices above k), or a running sum of such products. With l2 = lambda^2:
//
//   Lx[m] = sum_{i<=m} l2^(m-i)   x_i        Ux[m] = sum_{i>=m} l2^(i-m+1) x_i
//   P2[m] = sum_{j<=m} l2^(m-j+1) y_j        P6[m] = l2 * Ux[m]
//
//   J1[k] = l2 J1[k-1] + y_k Lx[k]           (i <= j <= k)
//   J2[k] = l2 J2[k-1] + x_k P2[k-1]         (j <  i <= k)
//   J3[k] = Lx[k] Uy[k+1]                    (i <= k <  j)
//   J4[k] = Ly[k] Ux[k+1]                    (j <= k <  i)
//   J5[k-1] = l2 J5[k] + x_k Uy[k]           (k <  i <= j)
//   J6[k-1] = l2 J6[k] + y_k P6[k+1]         (k <  j <  i)
//
// The cost-weighted sweep carries, next to every accumulator S, the sum Ŝ of
// the same terms each multiplied by its own exponent (distance in units of
// h). Shifting an accumulator by one step adds 2 to every exponent, so
//   Ŝ_next = l2 * (Ŝ + 2 S) + (new term) * (its exponent).
// This form only ever adds nonnegative quantities.
//
// In the log variant every vector carries a hidden factor e^A (x), e^B (y),
// and the output e^G. Accumulators are stored relative to the factor at
// their anchor index, so each l2 above becomes l2 * e^(A[prev] - A[cur]) and
// each product picks up e^(A+B+G) at the indices it touches. No factor e^A
// is ever formed on its own.

#ifndef MMOT_DETAIL_FTVP_KERNELS_HPP_
#define MMOT_DETAIL_FTVP_KERNELS_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mmot::detail {

template <class T>
struct FtvpBuffers {
  std::vector<T> Lx, Ly, P2, Ux, Uy, P6;
  std::vector<T> Lxh, Lyh, P2h, Uxh, Uyh, P6h;
  std::array<std::vector<T>, 6> J, Jh;

  // Every entry a sweep reads is written earlier in the same sweep, so the
  // buffers are only resized, never cleared.
  void resize(std::size_t n, bool weighted) {
    for (auto* v : {&Lx, &Ly, &P2, &Ux, &Uy, &P6}) v->resize(n);
    for (auto& v : J) v.resize(n);
    if (weighted) {
      for (auto* v : {&Lxh, &Lyh, &P2h, &Uxh, &Uyh, &P6h}) v->resize(n);
      for (auto& v : Jh) v.resize(n);
    }
  }
};

/// Potentials already divided by epsilon, plus ln(lambda^2).
struct LogFactors {
  const double* A = nullptr;  // first bound vector
  const double* B = nullptr;  // second bound vector
  const double* G = nullptr;  // output mode
  double log_l2 = 0.0;
};

template <class T, bool Log, bool Weighted>
void ftvp_sweep(std::size_t n, const T* x, const T* y, T l2, const LogFactors& lf,
                FtvpBuffers<T>& w) {
  w.resize(n, Weighted);
  const T two(2.0);
  auto& [J1, J2, J3, J4, J5, J6] = w.J;

  // Step factors. In the plain sweep these are all l2.
  auto rA = [&](std::size_t k) -> T {  // forward step k-1 -> k on x
    if constexpr (Log) return T(std::exp(lf.log_l2 + lf.A[k - 1] - lf.A[k]));
    else return l2;
  };
  auto rB = [&](std::size_t k) -> T {
    if constexpr (Log) return T(std::exp(lf.log_l2 + lf.B[k - 1] - lf.B[k]));
    else return l2;
  };
  auto sA = [&](std::size_t m) -> T {  // backward step m+1 -> m on x
    if constexpr (Log) return T(std::exp(lf.log_l2 + lf.A[m + 1] - lf.A[m]));
    else return l2;
  };
  auto sB = [&](std::size_t m) -> T {
    if constexpr (Log) return T(std::exp(lf.log_l2 + lf.B[m + 1] - lf.B[m]));
    else return l2;
  };
  auto gF = [&](std::size_t k) -> T {
    if constexpr (Log) return T(std::exp(lf.log_l2 + lf.G[k] - lf.G[k - 1]));
    else return l2;
  };
  auto gB = [&](std::size_t k) -> T {
    if constexpr (Log) return T(std::exp(lf.log_l2 + lf.G[k - 1] - lf.G[k]));
    else return l2;
  };
  // x_a y_b at output g. Multiplies `v` by e^(A_a + B_b + G_g) in the log sweep.
  auto site = [&](std::size_t a, std::size_t b, std::size_t g, T v) -> T {
    if constexpr (Log) return T(std::exp(lf.A[a] + lf.B[b] + lf.G[g])) * v;
    else return v;
  };

  // Prefix accumulators.
  w.Lx[0] = x[0];
  w.Ly[0] = y[0];
  w.P2[0] = l2 * y[0];
  for (std::size_t k = 1; k < n; ++k) {
    w.Lx[k] = rA(k) * w.Lx[k - 1] + x[k];
    w.Ly[k] = rB(k) * w.Ly[k - 1] + y[k];
    if constexpr (Log) w.P2[k] = rB(k) * w.P2[k - 1] + l2 * y[k];
    else w.P2[k] = l2 * (w.P2[k - 1] + y[k]);
  }
  // Suffix accumulators.
  w.Ux[n - 1] = l2 * x[n - 1];
  w.Uy[n - 1] = l2 * y[n - 1];
  for (std::size_t m = n - 1; m-- > 0;) {
    if constexpr (Log) {
      w.Ux[m] = sA(m) * w.Ux[m + 1] + l2 * x[m];
      w.Uy[m] = sB(m) * w.Uy[m + 1] + l2 * y[m];
    } else {
      w.Ux[m] = l2 * (w.Ux[m + 1] + x[m]);
      w.Uy[m] = l2 * (w.Uy[m + 1] + y[m]);
    }
  }
  for (std::size_t m = 2; m < n; ++m) w.P6[m] = l2 * w.Ux[m];

  if constexpr (Weighted) {
    w.Lxh[0] = T(0);
    w.Lyh[0] = T(0);
    w.P2h[0] = two * w.P2[0];
    for (std::size_t k = 1; k < n; ++k) {
      w.Lxh[k] = rA(k) * (w.Lxh[k - 1] + two * w.Lx[k - 1]);
      w.Lyh[k] = rB(k) * (w.Lyh[k - 1] + two * w.Ly[k - 1]);
      if constexpr (Log) w.P2h[k] = rB(k) * (w.P2h[k - 1] + two * w.P2[k - 1]) + two * l2 * y[k];
      else w.P2h[k] = l2 * w.P2h[k - 1] + two * w.P2[k];
    }
    w.Uxh[n - 1] = two * w.Ux[n - 1];
    w.Uyh[n - 1] = two * w.Uy[n - 1];
    for (std::size_t m = n - 1; m-- > 0;) {
      if constexpr (Log) {
        w.Uxh[m] = sA(m) * (w.Uxh[m + 1] + two * w.Ux[m + 1]) + two * l2 * x[m];
        w.Uyh[m] = sB(m) * (w.Uyh[m + 1] + two * w.Uy[m + 1]) + two * l2 * y[m];
      } else {
        w.Uxh[m] = l2 * w.Uxh[m + 1] + two * w.Ux[m];
        w.Uyh[m] = l2 * w.Uyh[m + 1] + two * w.Uy[m];
      }
    }
    for (std::size_t m = 2; m < n; ++m) w.P6h[m] = l2 * (w.Uxh[m] + two * w.Ux[m]);
  }

  // Regions 1 and 2 run forward.
  J1[0] = site(0, 0, 0, y[0] * w.Lx[0]);
  J2[0] = T(0);
  for (std::size_t k = 1; k < n; ++k) {
    J1[k] = gF(k) * J1[k - 1] + site(k, k, k, y[k] * w.Lx[k]);
    J2[k] = gF(k) * J2[k - 1] + site(k, k - 1, k, x[k] * w.P2[k - 1]);
  }
  // Regions 3 and 4 are closed products.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    J3[k] = site(k, k + 1, k, w.Lx[k] * w.Uy[k + 1]);
    J4[k] = site(k + 1, k, k, w.Ly[k] * w.Ux[k + 1]);
  }
  J3[n - 1] = T(0);
  J4[n - 1] = T(0);
  // Regions 5 and 6 run backward.
  J5[n - 1] = T(0);
  for (std::size_t k = n - 1; k >= 1; --k)
    J5[k - 1] = gB(k) * J5[k] + site(k, k, k - 1, x[k] * w.Uy[k]);
  J6[n - 1] = T(0);
  if (n >= 2) J6[n - 2] = T(0);
  for (std::size_t k = n - 2; k >= 1 && k < n; --k)
    J6[k - 1] = gB(k) * J6[k] + site(k + 1, k, k - 1, y[k] * w.P6[k + 1]);

  if constexpr (Weighted) {
    auto& [H1, H2, H3, H4, H5, H6] = w.Jh;
    H1[0] = T(0);
    H2[0] = T(0);
    for (std::size_t k = 1; k < n; ++k) {
      H1[k] = gF(k) * (H1[k - 1] + two * J1[k - 1]) + site(k, k, k, y[k] * w.Lxh[k]);
      H2[k] = gF(k) * (H2[k - 1] + two * J2[k - 1]) + site(k, k - 1, k, x[k] * w.P2h[k - 1]);
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
      H3[k] = site(k, k + 1, k, w.Lxh[k] * w.Uy[k + 1] + w.Lx[k] * w.Uyh[k + 1]);
      H4[k] = site(k + 1, k, k, w.Lyh[k] * w.Ux[k + 1] + w.Ly[k] * w.Uxh[k + 1]);
    }
    H3[n - 1] = T(0);
    H4[n - 1] = T(0);
    H5[n - 1] = T(0);
    for (std::size_t k = n - 1; k >= 1; --k)
      H5[k - 1] = gB(k) * (H5[k] + two * J5[k]) + site(k, k, k - 1, x[k] * w.Uyh[k]);
    H6[n - 1] = T(0);
    if (n >= 2) H6[n - 2] = T(0);
    for (std::size_t k = n - 2; k >= 1 && k < n; --k)
      H6[k - 1] = gB(k) * (H6[k] + two * J6[k]) + site(k + 1, k, k - 1, y[k] * w.P6h[k + 1]);
  }
}

/// ftvp_sweep<T, false, Weighted> followed by sum_regions(_scaled), fused.
/// Same recurrences and operation count, but only the suffix accumulators
/// are stored: one backward pass builds them and writes regions 5 and 6 into
/// out, one forward pass carries the prefix accumulators and regions 1 to 4
/// as scalars. The plain ftvp1 / ftvp2 path runs this.
template <class T, bool Weighted>
void ftvp_stream(std::size_t n, const T* x, const T* y, T l2, T h, FtvpBuffers<T>& w, T* out) {
  const T two(2.0);
  w.Ux.resize(n);
  w.Uy.resize(n);
  if constexpr (Weighted) {
    w.Uxh.resize(n);
    w.Uyh.resize(n);
  }
  T* Ux = w.Ux.data();
  T* Uy = w.Uy.data();
  T* Uxh = w.Uxh.data();
  T* Uyh = w.Uyh.data();

  // Backward: suffix accumulators and regions 5, 6.
  Ux[n - 1] = l2 * x[n - 1];
  Uy[n - 1] = l2 * y[n - 1];
  if constexpr (Weighted) {
    Uxh[n - 1] = two * Ux[n - 1];
    Uyh[n - 1] = two * Uy[n - 1];
  }
  out[n - 1] = T(0);
  T J5(0), J6(0), H5(0), H6(0);
  for (std::size_t k = n - 1; k >= 1; --k) {
    if (k + 1 < n) {
      Ux[k] = l2 * (Ux[k + 1] + x[k]);
      Uy[k] = l2 * (Uy[k + 1] + y[k]);
      if constexpr (Weighted) {
        Uxh[k] = l2 * Uxh[k + 1] + two * Ux[k];
        Uyh[k] = l2 * Uyh[k + 1] + two * Uy[k];
      }
    }
    if constexpr (Weighted) {
      H5 = l2 * (H5 + two * J5) + x[k] * Uyh[k];
      if (k + 1 < n) H6 = l2 * (H6 + two * J6) + y[k] * (l2 * (Uxh[k + 1] + two * Ux[k + 1]));
    }
    J5 = l2 * J5 + x[k] * Uy[k];
    if (k + 1 < n) J6 = l2 * J6 + y[k] * (l2 * Ux[k + 1]);
    if constexpr (Weighted) out[k - 1] = H5 + H6;
    else out[k - 1] = J5 + J6;
  }

  // Forward: prefix accumulators and regions 1 to 4.
  T Lx = x[0], Ly = y[0], P2 = l2 * y[0];
  T J1 = y[0] * Lx, J2(0);
  T Lxh(0), Lyh(0), P2h = two * P2, H1(0), H2(0);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      if constexpr (Weighted) {
        H2 = l2 * (H2 + two * J2) + x[k] * P2h;
        Lxh = l2 * (Lxh + two * Lx);
        Lyh = l2 * (Lyh + two * Ly);
      }
      J2 = l2 * J2 + x[k] * P2;
      Lx = l2 * Lx + x[k];
      Ly = l2 * Ly + y[k];
      P2 = l2 * (P2 + y[k]);
      if constexpr (Weighted) {
        P2h = l2 * P2h + two * P2;
        H1 = l2 * (H1 + two * J1) + y[k] * Lxh;
      }
      J1 = l2 * J1 + y[k] * Lx;
    }
    if constexpr (Weighted) {
      T acc = out[k] + H1 + H2;
      if (k + 1 < n) acc = acc + (Lxh * Uy[k + 1] + Lx * Uyh[k + 1]) + (Lyh * Ux[k + 1] + Ly * Uxh[k + 1]);
      out[k] = h * acc;
    } else {
      T acc = out[k] + J1 + J2;
      if (k + 1 < n) acc = acc + Lx * Uy[k + 1] + Ly * Ux[k + 1];
      out[k] = acc;
    }
  }
}

/// out[k] = sum_p J_p[k]
template <class T>
void sum_regions(const std::array<std::vector<T>, 6>& J, std::size_t n, T* out) {
  for (std::size_t k = 0; k < n; ++k)
    out[k] = J[0][k] + J[1][k] + J[2][k] + J[3][k] + J[4][k] + J[5][k];
}

/// out[k] = h * sum_p Ĵ_p[k]
template <class T>
void sum_regions_scaled(const std::array<std::vector<T>, 6>& J, std::size_t n, T h, T* out) {
  for (std::size_t k = 0; k < n; ++k)
    out[k] = h * (J[0][k] + J[1][k] + J[2][k] + J[3][k] + J[4][k] + J[5][k]);
}

}  // namespace mmot::detail

#endif  // MMOT_DETAIL_FTVP_KERNELS_HPP_
