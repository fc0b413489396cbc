#include <doctest.h>

#include <cmath>
#include <vector>

#include "mmot/ftvp1d.hpp"
#include "mmot/ftvp2d.hpp"
#include "mmot/oracle.hpp"
#include "mmot/signals.hpp"
#include "support/brute.hpp"

using namespace mmot;
using brute::Vec;

namespace {

Field2D random_field(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  return Field2D(rows, cols, brute::random_vec(rows * cols, seed));
}

std::vector<Marginal1D> flat(const Marginal2D& u, const Marginal2D& v, const Marginal2D& w) {
  return {validate_marginal(u.weights()), validate_marginal(v.weights()), validate_marginal(w.weights())};
}

}  // namespace

TEST_CASE("ftvp2d_1 small cases") {
  const Field2D a(1, 1, {0.7}), b(1, 1, {3.0});
  CHECK(ftvp2d_1(a, b, 0.3, 0.4).values[0] == doctest::Approx(2.1));

  const Field2D x = random_field(3, 4, 1), y = random_field(3, 4, 2);
  double sx = 0, sy = 0;
  for (double e : x.values) sx += e;
  for (double e : y.values) sy += e;
  for (double e : ftvp2d_1(x, y, 1.0, 1.0).values) CHECK(e == doctest::Approx(sx * sy));

  const Field2D p = random_field(3, 3, 3), q = random_field(3, 3, 4);
  CHECK(brute::max_rel_err(ftvp2d_1(p, q, 0.5, 0.7).values, brute::contract2d(p.values, q.values, 3, 3, 0.5, 0.7)) <=
        1e-13);
}

TEST_CASE("ftvp2d_2 small cases") {
  const Field2D a(1, 1, {0.7}), b(1, 1, {3.0});
  CHECK(ftvp2d_2(a, b, 0.3, 0.4, 0.1, 0.2).values[0] == 0.0);

  const Vec x = brute::random_vec(6, 5), y = brute::random_vec(6, 6);
  const auto got = ftvp2d_2(Field2D(6, 1, x), Field2D(6, 1, y), 0.45, 1.0, 0.2, 0.5).values;
  CHECK(brute::max_rel_err(got, ftvp2(x, y, 0.45, 0.2)) <= 1e-13);

  const Field2D p = random_field(3, 3, 7), q = random_field(3, 3, 8);
  const double h1 = 0.5, h2 = 0.25, eps = 0.3;
  DenseTensor c = dense_cost_2d(3, 3, h1, h2);
  DenseTensor ck = kernel_from_cost(c, eps);
  for (std::size_t e = 0; e < ck.size(); ++e) ck.entries()[e] *= c.entries()[e];
  const std::vector<Vec> v{p.values, q.values};
  CHECK(brute::max_rel_err(ftvp2d_2(p, q, std::exp(-h1 / eps), std::exp(-h2 / eps), h1, h2).values,
                           dense_contract(ck, v, 2)) <= 1e-12);
}

TEST_CASE("2D products match the brute-force sums") {
  int cases = 0;
  for (double l1 : {0.3, 0.8})
    for (double l2 : {0.3, 0.8})
      for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const std::size_t rows = 1 + seed % 8, cols = 1 + (seed * 5 + 3) % 8;
        const Field2D x = random_field(rows, cols, seed * 11), y = random_field(rows, cols, seed * 11 + 1);
        const double h1 = 0.1 + 0.01 * seed, h2 = 0.07;
        CHECK(brute::max_rel_err(ftvp2d_1(x, y, l1, l2).values,
                                 brute::contract2d(x.values, y.values, rows, cols, l1, l2)) <= 1e-10);
        const Vec want = brute::contract2d(x.values, y.values, rows, cols, l1, l2, true, h1, h2);
        CHECK(brute::max_rel_err(ftvp2d_2(x, y, l1, l2, h1, h2).values, want) <= 1e-10);
        ++cases;
      }
  CHECK(cases == 100);
}

TEST_CASE("2D rescaled products match the brute-force sums") {
  const double eps = 0.08;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const std::size_t rows = 2 + seed % 4, cols = 1 + seed % 3;
    const std::size_t s = rows * cols;
    const Field2D x = random_field(rows, cols, seed), y = random_field(rows, cols, seed + 10);
    const Field2D a(rows, cols, brute::random_vec(s, seed + 20, -0.1, 0.1));
    const Field2D b(rows, cols, brute::random_vec(s, seed + 30, -0.1, 0.1));
    const Field2D g(rows, cols, brute::random_vec(s, seed + 40, -0.1, 0.1));
    const double l1 = 0.4, l2 = 0.6;
    CHECK(brute::max_rel_err(ftvp2d_log(x, y, a, b, g, l1, l2, eps).values,
                             brute::contract2d_log(x.values, y.values, a.values, b.values, g.values, rows, cols, l1,
                                                   l2, eps)) <= 1e-10);
    CHECK(brute::max_rel_err(ftvp2d_2_log(x, y, a, b, g, l1, l2, eps, 0.2, 0.3).values,
                             brute::contract2d_log(x.values, y.values, a.values, b.values, g.values, rows, cols, l1,
                                                   l2, eps, true, 0.2, 0.3)) <= 1e-10);
  }
}

TEST_CASE("swapping the axes transposes the output") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Field2D x = random_field(5, 7, seed), y = random_field(5, 7, seed + 9);
    const Field2D r1 = ftvp2d_1(x, y, 0.3, 0.8);
    const Field2D t1 = ftvp2d_1(x.transposed(), y.transposed(), 0.8, 0.3);
    CHECK(brute::max_rel_err(t1.values, r1.transposed().values) <= 1e-12);
    const Field2D r2 = ftvp2d_2(x, y, 0.3, 0.8, 0.1, 0.4);
    const Field2D t2 = ftvp2d_2(x.transposed(), y.transposed(), 0.8, 0.3, 0.4, 0.1);
    CHECK(brute::max_rel_err(t2.values, r2.transposed().values) <= 1e-12);
  }
}

TEST_CASE("rank-one inputs factor into 1D products") {
  const std::size_t rows = 9, cols = 6;
  const Vec a1 = brute::random_vec(rows, 1), a2 = brute::random_vec(cols, 2);
  const Vec b1 = brute::random_vec(rows, 3), b2 = brute::random_vec(cols, 4);
  Field2D x(rows, cols), y(rows, cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) {
      x(r, c) = a1[r] * a2[c];
      y(r, c) = b1[r] * b2[c];
    }
  const Vec f1 = ftvp1(a1, b1, 0.35), f2 = ftvp1(a2, b2, 0.65);
  Vec want(rows * cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) want[r + rows * c] = f1[r] * f2[c];
  CHECK(brute::max_rel_err(ftvp2d_1(x, y, 0.35, 0.65).values, want) <= 1e-10);
}

TEST_CASE("Field2D layout and errors") {
  Field2D f(2, 3);
  f(1, 2) = 5.0;
  CHECK(f.values[1 + 2 * 2] == 5.0);
  const Field2D t = f.transposed();
  CHECK(t.rows == 3);
  CHECK(t(2, 1) == 5.0);
  CHECK_THROWS_AS(Field2D(2, 2, Vec{1, 2, 3}), Error);
  const Field2D a(2, 3, 1.0), b(3, 2, 1.0);
  CHECK_THROWS_AS(ftvp2d_1(a, b, 0.5, 0.5), Error);
  CHECK_THROWS_AS(ftvp2d_2(a, b, 0.5, 0.5, 0.1, 0.1), Error);
}

TEST_CASE("2D solver") {
  SUBCASE("point masses") {
    Vec raw(16, 0.0);
    raw[5] = 1.0;
    const Marginal2D d = validate_marginal_2d(raw, 4, 4);
    const auto r = fast_sinkhorn_2d(d, d, d, SinkhornConfig{});
    CHECK(std::abs(r.report.distance) <= 1e-15);
  }
  SUBCASE("plans match the dense 2D solver") {
    for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{6, 6}, {4, 5}, {8, 3}}) {
      const Marginal2D u = random_marginal_2d(rows, cols, 1), v = random_marginal_2d(rows, cols, 2),
                       w = random_marginal_2d(rows, cols, 3);
      SinkhornConfig cfg;
      cfg.tol = 1e-300;
      std::vector<ScalingState> fs, ds;
      const auto f = fast_sinkhorn_2d(u, v, w, cfg, [&](std::size_t, const ScalingState& s) { fs.push_back(s); });
      const DenseTensor c = dense_cost_2d(rows, cols, u.h1(), u.h2());
      const auto m = flat(u, v, w);
      const auto d = dense_sinkhorn(m, c, cfg, [&](std::size_t, const ScalingState& s) { ds.push_back(s); });
      REQUIRE(fs.size() == ds.size());
      double worst = 0.0;
      for (std::size_t t = 0; t < fs.size(); ++t)
        for (std::size_t q = 0; q < 3; ++q)
          worst = std::max(worst, brute::max_rel_err(fs[t].scalings[q], ds[t].scalings[q]));
      CHECK(worst <= 1e-11);
      const DenseTensor k = kernel_from_cost(c, cfg.epsilon);
      CHECK(frobenius_distance(dense_plan(f.state, k), dense_plan(d.state, k)) <= 1e-12);
      CHECK(std::abs(f.report.distance - d.report.distance) <= 1e-10 * d.report.distance);
    }
  }
  SUBCASE("stabilized 2D run reproduces the dense solver") {
    const Marginal2D u = random_marginal_2d(5, 5, 4), v = random_marginal_2d(5, 5, 5),
                     w = random_marginal_2d(5, 5, 6);
    SinkhornConfig cfg;
    cfg.tol = 1e-300;
    cfg.epsilon = 0.05;
    cfg.stabilize = true;
    cfg.tau = 2.0;
    const auto f = fast_sinkhorn_2d(u, v, w, cfg);
    CHECK(f.report.trace.absorptions.back() > 0);
    SinkhornConfig plain = cfg;
    plain.stabilize = false;
    const DenseTensor c = dense_cost_2d(5, 5, u.h1(), u.h2());
    const auto d = dense_sinkhorn(flat(u, v, w), c, plain);
    CHECK(std::abs(f.report.distance - d.report.distance) <= 1e-8 * d.report.distance);
  }
  SUBCASE("shape mismatch") {
    const Marginal2D a = random_marginal_2d(3, 4, 1), b = random_marginal_2d(4, 3, 1);
    CHECK_THROWS_AS(fast_sinkhorn_2d(a, a, b, SinkhornConfig{}), Error);
  }
}
