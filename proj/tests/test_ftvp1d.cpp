#include <doctest.h>

#include <cmath>
#include <vector>

#include "mmot/ftvp1d.hpp"
#include "mmot/oracle.hpp"
#include "support/brute.hpp"

using namespace mmot;
using brute::Vec;

namespace {

DenseTensor kernel_for(std::size_t n, double lambda) {
  const Grid1D g = Grid1D::make(n, 1.0);
  return dense_kernel(g, kernel_params(1.0, -1.0 / std::log(lambda)), 3);
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::ParseError;
}

}  // namespace

TEST_CASE("ftvp1 small cases") {
  const Vec one_phi{0.7}, one_psi{3.0};
  const auto r1 = ftvp1(one_phi, one_psi, 0.4);
  REQUIRE(r1.size() == 1);
  CHECK(r1[0] == doctest::Approx(2.1));

  const Vec phi{1, 2, 3, 4, 5}, psi{0.5, 1, 1, 2, 0.25};
  for (double o : ftvp1(phi, psi, 1.0)) CHECK(o == doctest::Approx(15.0 * 4.75));

  const Vec a{1, 2, 3}, b{1, 1, 1};
  const std::vector<Vec> v{a, b};
  const auto want = dense_contract(kernel_for(3, 0.5), v, 2);
  CHECK(brute::max_rel_err(ftvp1(a, b, 0.5), want) <= 1e-14);
}

TEST_CASE("ftvp2 small cases") {
  const Vec x{0.7}, y{3.0};
  CHECK(ftvp2(x, y, 0.4, 0.1)[0] == 0.0);

  const Vec ones{1, 1};
  const auto r = ftvp2(ones, ones, 1.0, 1.0);
  CHECK(r[0] == doctest::Approx(6.0));
  CHECK(r[1] == doctest::Approx(6.0));

  const Vec a = brute::random_vec(4, 1), b = brute::random_vec(4, 2);
  const Grid1D g = Grid1D::make(4, 0.3);
  const double eps = 0.2;
  const DenseTensor c = dense_cost(g, 3);
  DenseTensor ck = kernel_from_cost(c, eps);
  for (std::size_t e = 0; e < ck.size(); ++e) ck.entries()[e] *= c.entries()[e];
  const std::vector<Vec> v{a, b};
  const double lam = kernel_params(g.h, eps).lambda();
  CHECK(brute::max_rel_err(ftvp2(a, b, lam, g.h), dense_contract(ck, v, 2)) <= 1e-13);
}

TEST_CASE("ftvp oracle equivalence against the triple loop") {
  for (double lambda : {0.1, 0.5, 0.9, 1.0})
    for (std::size_t n = 1; n <= 14; ++n)
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Vec x = brute::random_vec(n, seed * 31 + n), y = brute::random_vec(n, seed * 37 + n + 1);
        CHECK(brute::max_rel_err(ftvp1(x, y, lambda), brute::contract3(x, y, lambda)) <= 1e-12);
        CHECK(brute::max_rel_err(ftvp2(x, y, lambda, 0.3), brute::contract3(x, y, lambda, true, 0.3)) <=
              1e-12);
      }
}

TEST_CASE("ftvp_log") {
  SUBCASE("zero potentials reduce to ftvp1") {
    const Vec x = brute::random_vec(9, 4), y = brute::random_vec(9, 5), z(9, 0.0);
    const auto a = ftvp_log(x, y, z, z, z, 0.6, 0.05);
    const auto b = ftvp1(x, y, 0.6);
    CHECK(brute::max_rel_err(a, b) <= 1e-14);
  }
  SUBCASE("single entry") {
    const Vec x{2.0}, y{0.5}, al{0.01}, be{-0.02}, ga{0.03};
    const auto r = ftvp_log(x, y, al, be, ga, 0.3, 0.01);
    CHECK(r[0] == doctest::Approx(1.0 * std::exp(0.02 / 0.01)).epsilon(1e-14));
  }
  SUBCASE("rescaled oracle") {
    const double eps = 0.05;
    for (std::size_t n : {2u, 5u, 8u, 13u})
      for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Vec x = brute::random_vec(n, seed), y = brute::random_vec(n, seed + 50);
        const Vec al = brute::random_vec(n, seed + 1, -0.2, 0.2), be = brute::random_vec(n, seed + 2, -0.2, 0.2),
                  ga = brute::random_vec(n, seed + 3, -0.2, 0.2);
        const double lam = 0.35;
        CHECK(brute::max_rel_err(ftvp_log(x, y, al, be, ga, lam, eps),
                                 brute::contract3_log(x, y, al, be, ga, lam, eps)) <= 1e-11);
        CHECK(brute::max_rel_err(ftvp2_log(x, y, al, be, ga, lam, eps, 0.1),
                                 brute::contract3_log(x, y, al, be, ga, lam, eps, true, 0.1)) <= 1e-11);
      }
  }
  SUBCASE("overflow is reported") {
    const Vec x{1, 1, 1}, y{1, 1, 1}, big{800, 800, 800}, z(3, 0.0);
    CHECK(kind_of([&] { ftvp_log(x, y, big, z, z, 0.5, 1.0); }) == ErrorKind::NumericalOverflow);
  }
}

TEST_CASE("contract_mode") {
  const std::size_t n = 6;
  const double lam = 0.55;
  const Vec a = brute::random_vec(n, 8), b = brute::random_vec(n, 9);
  const DenseTensor k = kernel_for(n, lam);
  const std::vector<Vec> v{a, b};
  // bound (j, k): free mode is i
  CHECK(brute::max_rel_err(contract_mode(a, b, lam, BoundModes::JK), dense_contract(k, v, 0)) <= 1e-13);
  CHECK(brute::max_rel_err(contract_mode(a, b, lam, BoundModes::IK), dense_contract(k, v, 1)) <= 1e-13);
  CHECK(contract_mode(a, b, lam, BoundModes::IJ) == ftvp1(a, b, lam));
  const auto ab = contract_mode(a, b, lam, BoundModes::IJ);
  const auto ba = contract_mode(b, a, lam, BoundModes::IJ);
  CHECK(brute::max_rel_err(ab, ba) <= 1e-12);
}

TEST_CASE("argument symmetry and linearity") {
  for (std::size_t n : {1u, 2u, 3u, 10u, 57u}) {
    const Vec x = brute::random_vec(n, n), y = brute::random_vec(n, n + 1);
    CHECK(brute::max_rel_err(ftvp1(x, y, 0.7), ftvp1(y, x, 0.7)) <= 1e-12);
    CHECK(brute::max_rel_err(ftvp2(x, y, 0.7, 0.2), ftvp2(y, x, 0.7, 0.2)) <= 1e-12);
    Vec x3 = x;
    for (double& e : x3) e *= 3.5;
    Vec scaled = ftvp1(x, y, 0.7);
    for (double& e : scaled) e *= 3.5;
    CHECK(brute::max_rel_err(ftvp1(x3, y, 0.7), scaled) <= 1e-12);
  }
}

TEST_CASE("each region recursion matches its restricted loop") {
  for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 11u})
    for (double lam : {0.2, 0.8}) {
      const Vec x = brute::random_vec(n, 3 * n), y = brute::random_vec(n, 3 * n + 1);
      const RegionParts plain = ftvp1_regions(x, y, lam);
      const RegionParts weighted = ftvp2_regions(x, y, lam, 0.25);
      for (int p = 1; p <= 6; ++p) {
        const Vec want = brute::region_part3(p, x, y, lam);
        const Vec want_w = brute::region_part3(p, x, y, lam, true, 0.25);
        for (std::size_t k = 0; k < n; ++k) {
          CHECK(std::abs(plain.parts[p - 1][k] - want[k]) <= 1e-10 * std::abs(want[k]) + 1e-300);
          CHECK(std::abs(weighted.parts[p - 1][k] - want_w[k]) <= 1e-10 * std::abs(want_w[k]) + 1e-300);
        }
      }
    }
}

TEST_CASE("ftvp2 with lambda = 1 is the cost contraction") {
  const std::size_t n = 7;
  const double h = 0.125;
  const Vec x = brute::random_vec(n, 70), y = brute::random_vec(n, 71);
  const DenseTensor c = dense_cost(Grid1D::make(n, h), 3);
  const std::vector<Vec> v{x, y};
  CHECK(brute::max_rel_err(ftvp2(x, y, 1.0, h), dense_contract(c, v, 2)) <= 1e-13);
}

TEST_CASE("workspace reuse does not change results") {
  FtvpWorkspace ws;
  for (std::size_t n : {9u, 3u, 20u, 1u, 9u}) {
    const Vec x = brute::random_vec(n, n + 5), y = brute::random_vec(n, n + 6);
    Vec out(n);
    ftvp1(x, y, 0.45, out, ws);
    CHECK(out == ftvp1(x, y, 0.45));
    ftvp2(x, y, 0.45, 0.1, out, ws);
    CHECK(out == ftvp2(x, y, 0.45, 0.1));
  }
}

TEST_CASE("ftvp input errors") {
  const Vec a{1, 2, 3}, b{1, 2}, bad{1, NAN, 3};
  CHECK(kind_of([&] { ftvp1(a, b, 0.5); }) == ErrorKind::ShapeMismatch);
  CHECK(kind_of([&] { ftvp1(a, bad, 0.5); }) == ErrorKind::NonFinite);
  CHECK(kind_of([&] { ftvp1(a, a, 0.0); }) == ErrorKind::InvalidParam);
  CHECK(kind_of([&] { ftvp1(a, a, 1.5); }) == ErrorKind::InvalidParam);
  CHECK(kind_of([&] { ftvp2(a, b, 0.5, 1.0); }) == ErrorKind::ShapeMismatch);
}
