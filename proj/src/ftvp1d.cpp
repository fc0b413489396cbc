#include "mmot/ftvp1d.hpp"

#include <cmath>
#include <string>

namespace mmot {

namespace detail {

void check_ftvp_inputs(std::span<const double> phi, std::span<const double> psi, double lambda) {
  if (phi.empty()) throw Error(ErrorKind::ShapeMismatch, "ftvp: empty input");
  require_same_size(phi.size(), psi.size(), "ftvp inputs");
  if (!all_finite(phi) || !all_finite(psi))
    throw Error(ErrorKind::NonFinite, "ftvp: input is NaN or infinite");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw Error(ErrorKind::InvalidParam, "ftvp: lambda must lie in (0, 1]");
}

void ftvp_plain(std::span<const double> x, std::span<const double> y, double lambda,
                bool weighted, double h, std::span<double> out, FtvpWorkspace& ws) {
  const std::size_t n = x.size();
  const double l2 = lambda * lambda;
  if (weighted) ftvp_stream<double, true>(n, x.data(), y.data(), l2, h, ws.buffers, out.data());
  else ftvp_stream<double, false>(n, x.data(), y.data(), l2, 1.0, ws.buffers, out.data());
}

void ftvp_scaled(std::span<const double> x, std::span<const double> y,
                 std::span<const double> A, std::span<const double> B,
                 std::span<const double> G, double lambda, bool weighted, double h,
                 std::span<double> out, FtvpWorkspace& ws) {
  const std::size_t n = x.size();
  const double l2 = lambda * lambda;
  LogFactors lf{A.data(), B.data(), G.data(), 2.0 * std::log(lambda)};
  auto& b = ws.buffers;
  if (weighted) {
    ftvp_sweep<double, true, true>(n, x.data(), y.data(), l2, lf, b);
    sum_regions_scaled(b.Jh, n, h, out.data());
  } else {
    ftvp_sweep<double, true, false>(n, x.data(), y.data(), l2, lf, b);
    sum_regions(b.J, n, out.data());
  }
  if (!all_finite(out.first(n)))
    throw Error(ErrorKind::NumericalOverflow,
                "rescaled contraction left the floating-point range; absorb earlier (lower tau)");
}

}  // namespace detail

namespace {

void check_out(std::span<double> out, std::size_t n) {
  require_same_size(out.size(), n, "ftvp output");
}

void check_h(double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::InvalidParam, "ftvp2: h must be positive");
}

void prepare_log(std::span<const double> phi, std::span<const double> alpha,
                 std::span<const double> beta, std::span<const double> gamma, double epsilon,
                 FtvpWorkspace& ws) {
  const std::size_t n = phi.size();
  require_same_size(alpha.size(), n, "ftvp_log alpha");
  require_same_size(beta.size(), n, "ftvp_log beta");
  require_same_size(gamma.size(), n, "ftvp_log gamma");
  if (!all_finite(alpha) || !all_finite(beta) || !all_finite(gamma))
    throw Error(ErrorKind::NonFinite, "ftvp_log: potential is NaN or infinite");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw Error(ErrorKind::InvalidParam, "ftvp_log: epsilon must be positive");
  ws.A.resize(n);
  ws.B.resize(n);
  ws.G.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ws.A[i] = alpha[i] / epsilon;
    ws.B[i] = beta[i] / epsilon;
    ws.G[i] = gamma[i] / epsilon;
  }
}

}  // namespace

void ftvp1(std::span<const double> phi, std::span<const double> psi, double lambda,
           std::span<double> out, FtvpWorkspace& ws) {
  detail::check_ftvp_inputs(phi, psi, lambda);
  check_out(out, phi.size());
  detail::ftvp_plain(phi, psi, lambda, false, 0.0, out, ws);
}

std::vector<double> ftvp1(std::span<const double> phi, std::span<const double> psi,
                          double lambda) {
  FtvpWorkspace ws;
  std::vector<double> out(phi.size());
  ftvp1(phi, psi, lambda, out, ws);
  return out;
}

void ftvp2(std::span<const double> phi, std::span<const double> psi, double lambda, double h,
           std::span<double> out, FtvpWorkspace& ws) {
  detail::check_ftvp_inputs(phi, psi, lambda);
  check_h(h);
  check_out(out, phi.size());
  detail::ftvp_plain(phi, psi, lambda, true, h, out, ws);
}

std::vector<double> ftvp2(std::span<const double> phi, std::span<const double> psi,
                          double lambda, double h) {
  FtvpWorkspace ws;
  std::vector<double> out(phi.size());
  ftvp2(phi, psi, lambda, h, out, ws);
  return out;
}

void ftvp_log(std::span<const double> phi, std::span<const double> psi,
              std::span<const double> alpha, std::span<const double> beta,
              std::span<const double> gamma, double lambda, double epsilon,
              std::span<double> out, FtvpWorkspace& ws) {
  detail::check_ftvp_inputs(phi, psi, lambda);
  check_out(out, phi.size());
  prepare_log(phi, alpha, beta, gamma, epsilon, ws);
  detail::ftvp_scaled(phi, psi, ws.A, ws.B, ws.G, lambda, false, 0.0, out, ws);
}

std::vector<double> ftvp_log(std::span<const double> phi, std::span<const double> psi,
                             std::span<const double> alpha, std::span<const double> beta,
                             std::span<const double> gamma, double lambda, double epsilon) {
  FtvpWorkspace ws;
  std::vector<double> out(phi.size());
  ftvp_log(phi, psi, alpha, beta, gamma, lambda, epsilon, out, ws);
  return out;
}

void ftvp2_log(std::span<const double> phi, std::span<const double> psi,
               std::span<const double> alpha, std::span<const double> beta,
               std::span<const double> gamma, double lambda, double epsilon, double h,
               std::span<double> out, FtvpWorkspace& ws) {
  detail::check_ftvp_inputs(phi, psi, lambda);
  check_h(h);
  check_out(out, phi.size());
  prepare_log(phi, alpha, beta, gamma, epsilon, ws);
  detail::ftvp_scaled(phi, psi, ws.A, ws.B, ws.G, lambda, true, h, out, ws);
}

std::vector<double> ftvp2_log(std::span<const double> phi, std::span<const double> psi,
                              std::span<const double> alpha, std::span<const double> beta,
                              std::span<const double> gamma, double lambda, double epsilon,
                              double h) {
  FtvpWorkspace ws;
  std::vector<double> out(phi.size());
  ftvp2_log(phi, psi, alpha, beta, gamma, lambda, epsilon, h, out, ws);
  return out;
}

RegionParts ftvp1_regions(std::span<const double> phi, std::span<const double> psi,
                          double lambda) {
  detail::check_ftvp_inputs(phi, psi, lambda);
  detail::FtvpBuffers<double> b;
  detail::ftvp_sweep<double, false, false>(phi.size(), phi.data(), psi.data(), lambda * lambda,
                                           {}, b);
  return RegionParts{b.J};
}

RegionParts ftvp2_regions(std::span<const double> phi, std::span<const double> psi,
                          double lambda, double h) {
  detail::check_ftvp_inputs(phi, psi, lambda);
  check_h(h);
  detail::FtvpBuffers<double> b;
  detail::ftvp_sweep<double, false, true>(phi.size(), phi.data(), psi.data(), lambda * lambda,
                                          {}, b);
  RegionParts r{b.Jh};
  for (auto& part : r.parts)
    for (double& v : part) v *= h;
  return r;
}

std::vector<double> contract_mode(std::span<const double> a, std::span<const double> b,
                                  double lambda, BoundModes) {
  return ftvp1(a, b, lambda);
}

}  // namespace mmot
