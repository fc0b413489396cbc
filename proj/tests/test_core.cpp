#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mmot/core.hpp"
#include "support/brute.hpp"

using namespace mmot;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::ParseError;
}

}  // namespace

TEST_CASE("validate_marginal normalizes") {
  const std::vector<double> ones{1, 1, 1, 1};
  const Marginal1D m = validate_marginal(ones);
  for (double w : m.weights()) CHECK(w == 0.25);

  const std::vector<double> atom{2, 0, 0};
  const Marginal1D a = validate_marginal(atom);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == 0.0);
  CHECK(a[2] == 0.0);
}

TEST_CASE("validate_marginal rejects bad input") {
  CHECK(kind_of([] { validate_marginal(std::vector<double>{1, -1}); }) == ErrorKind::NegativeMass);
  CHECK(kind_of([] { validate_marginal(std::vector<double>{0, 0}); }) == ErrorKind::ZeroMass);
  CHECK(kind_of([] { validate_marginal(std::vector<double>{1, NAN}); }) == ErrorKind::NonFinite);
  CHECK(kind_of([] { validate_marginal(std::vector<double>{1, INFINITY}); }) == ErrorKind::NonFinite);
  CHECK_THROWS_AS(validate_marginal(std::vector<double>{}), Error);
}

TEST_CASE("validate_marginal is idempotent") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto raw = brute::random_vec(7 + seed, seed, 0.0, 3.0);
    const Marginal1D once = validate_marginal(raw);
    const Marginal1D twice = validate_marginal(once.weights());
    double sum = 0.0;
    for (std::size_t i = 0; i < once.size(); ++i) {
      CHECK(twice[i] == once[i]);
      sum += once[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("validate_marginal_2d keeps the column-major layout") {
  const std::vector<double> raw{1, 2, 3, 4, 5, 6};  // 2 rows x 3 cols
  const Marginal2D m = validate_marginal_2d(raw, 2, 3);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.at(1, 0) == doctest::Approx(2.0 / 21));
  CHECK(m.at(0, 2) == doctest::Approx(5.0 / 21));
  CHECK(m.h1() == 1.0);
  CHECK(m.h2() == 0.5);
  CHECK(kind_of([&] { validate_marginal_2d(raw, 4, 2); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("kernel_params") {
  const KernelParams p = kernel_params(0.3, 0.3);
  CHECK(p.lambda() == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(p.lambda() == std::exp(-1.0));
  CHECK(kernel_params(1e-12, 0.1).lambda() > 1.0 - 1e-10);
  CHECK(kernel_params(1.0 / 79, 0.1).lambda() == std::exp(-(1.0 / 79) / 0.1));
  CHECK(std::abs(kernel_params(1.0 / 79, 0.1).lambda() - std::exp(-10.0 / 79)) <= 2e-16 * std::exp(-10.0 / 79));
  CHECK(kind_of([] { kernel_params(0.0, 0.1); }) == ErrorKind::InvalidParam);
  CHECK(kind_of([] { kernel_params(0.1, -1.0); }) == ErrorKind::InvalidParam);
}

TEST_CASE("kernel_params is monotone") {
  double prev = 1.0;
  for (double h = 0.01; h < 1.0; h += 0.05) {
    const double l = kernel_params(h, 0.1).lambda();
    CHECK(l < prev);
    CHECK(l > 0.0);
    prev = l;
  }
  prev = 1.0;
  for (double eps = 1.0; eps > 0.01; eps *= 0.7) {
    const double l = kernel_params(0.05, eps).lambda();
    CHECK(l < prev);
    prev = l;
  }
}

TEST_CASE("coefficient table") {
  const std::array<int, 6> a{-2, 0, -2, 2, 0, 2}, b{0, -2, 2, -2, 2, 0}, c{2, 2, 0, 0, -2, -2};
  CHECK(CoefficientTable::a == a);
  CHECK(CoefficientTable::b == b);
  CHECK(CoefficientTable::c == c);
  for (std::size_t p = 0; p < 6; ++p) CHECK(a[p] + b[p] + c[p] == 0);
}

TEST_CASE("region_of agrees with the region definitions and the coefficients") {
  const std::size_t n = 5;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const int p = region_of(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j),
                                static_cast<std::int64_t>(k));
        int hits = 0;
        for (int q = 1; q <= 6; ++q) hits += brute::in_region3(q, i, j, k);
        CHECK(hits == 1);
        CHECK(brute::in_region3(p, i, j, k));
        const long e = brute::absdiff(i, j) + brute::absdiff(i, k) + brute::absdiff(j, k);
        const long lin = CoefficientTable::a[p - 1] * static_cast<long>(i) +
                         CoefficientTable::b[p - 1] * static_cast<long>(j) +
                         CoefficientTable::c[p - 1] * static_cast<long>(k);
        CHECK(lin == e);
      }
}

TEST_CASE("grid spacing") {
  CHECK(Grid1D::unit_interval(80).h == 1.0 / 79);
  CHECK(Grid1D::unit_interval(2).h == 1.0);
  CHECK(Grid1D::on_interval(100, -2, 2).h == 4.0 / 99);
  CHECK(Grid1D::unit_interval(1).n == 1);
  CHECK(kind_of([] { Grid1D::make(0, 1.0); }) == ErrorKind::InvalidParam);
  CHECK(kind_of([] { Grid1D::make(3, 0.0); }) == ErrorKind::InvalidParam);
}

TEST_CASE("sinkhorn config defaults and validation") {
  const SinkhornConfig c;
  CHECK(c.epsilon == 0.1);
  CHECK(c.tol == 1e-9);
  CHECK(c.itr_max == 100);
  CHECK(c.tau == 1e30);
  CHECK_FALSE(c.stabilize);
  CHECK(c.residual_mode == ResidualMode::Paper);
  CHECK_NOTHROW(c.validate());

  auto bad = [](auto edit) {
    SinkhornConfig x;
    edit(x);
    return kind_of([&] { x.validate(); });
  };
  CHECK(bad([](SinkhornConfig& x) { x.epsilon = 0; }) == ErrorKind::InvalidParam);
  CHECK(bad([](SinkhornConfig& x) { x.tol = 0; }) == ErrorKind::InvalidParam);
  CHECK(bad([](SinkhornConfig& x) { x.itr_max = 0; }) == ErrorKind::InvalidParam);
  CHECK(bad([](SinkhornConfig& x) { x.tau = 1.0; }) == ErrorKind::InvalidParam);
}

TEST_CASE("residual mode names") {
  CHECK(parse_residual_mode("paper") == ResidualMode::Paper);
  CHECK(parse_residual_mode("full") == ResidualMode::Full);
  CHECK(to_string(ResidualMode::Full) == "full");
  CHECK(kind_of([] { parse_residual_mode("loose"); }) == ErrorKind::InvalidParam);
}

TEST_CASE("scaling state") {
  const ScalingState s = ScalingState::uniform(3, 4);
  CHECK(s.marginal_count() == 3);
  for (const auto& v : s.scalings)
    for (double x : v) CHECK(x == 0.25);
  CHECK_FALSE(s.has_potentials());
}

TEST_CASE("absorption keeps the effective scaling") {
  ScalingState s = ScalingState::uniform(2, 5);
  s.scalings[0] = {3.0, 1e20, 0.0, 7.0, 0.0};
  s.scalings[1] = {1e-5, 2.0, 4.0, 0.5, 9.0};
  s.potentials[1] = {0.1, -0.2, 0.0, 0.3, 0.05};
  const double eps = 0.05;
  const ScalingState before = s;
  absorb_scalings(s, eps);
  CHECK(s.has_potentials());
  for (std::size_t q = 0; q < 2; ++q)
    for (std::size_t x = 0; x < 5; ++x) {
      const double old_eff = before.scalings[q][x] * std::exp(before.potentials[q][x] / eps);
      const double new_eff = s.scalings[q][x] * std::exp(s.potentials[q][x] / eps);
      if (before.scalings[q][x] == 0.0) {
        CHECK(s.scalings[q][x] == 0.0);
      } else {
        CHECK(s.scalings[q][x] == 1.0);
        CHECK(std::abs(new_eff - old_eff) <= 1e-10 * old_eff);
      }
    }
}

TEST_CASE("zero-mass potentials are interpolated") {
  const std::vector<double> s{0.0, 1.0, 0.0, 0.0, 1.0, 0.0};
  std::vector<double> a{9, 2.0, 9, 9, 5.0, 9};
  fill_zero_mass_potentials(s, a);
  CHECK(a[0] == 2.0);
  CHECK(a[2] == doctest::Approx(3.0));
  CHECK(a[3] == doctest::Approx(4.0));
  CHECK(a[5] == 5.0);
}

TEST_CASE("divide_marginal leaves zero mass at zero") {
  const std::vector<double> u{0.0, 0.5, 0.5};
  const std::vector<double> d{0.0, 2.0, 0.25};
  std::vector<double> out(3);
  divide_marginal(u, d, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.25);
  CHECK(out[2] == 2.0);
}

TEST_CASE("error kinds have names") {
  CHECK(to_string(ErrorKind::ParseError) == "ParseError");
  CHECK(to_string(ErrorKind::NumericalOverflow) == "NumericalOverflow");
  CHECK(to_string(ErrorKind::FactorialBudget) == "FactorialBudget");
}
