#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mmot/bench.hpp"

using namespace mmot;

TEST_CASE("log-log slope of synthetic timings") {
  const std::vector<double> n{64, 128, 256, 512, 1024, 2048};
  std::vector<double> lin, cub;
  for (double x : n) {
    lin.push_back(3e-7 * x);
    cub.push_back(2e-9 * x * x * x);
  }
  CHECK(std::abs(fit_loglog_slope(n, lin) - 1.0) <= 1e-9);
  CHECK(std::abs(fit_loglog_slope(n, cub) - 3.0) <= 1e-9);
  const std::vector<double> one{1.0}, same{2.0, 2.0};
  CHECK_THROWS_AS(fit_loglog_slope(one, one), Error);
  CHECK_THROWS_AS(fit_loglog_slope(same, same), Error);
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK_THROWS_AS(median({}), Error);
}

TEST_CASE("benchmark spec validation") {
  BenchmarkSpec s;
  CHECK_THROWS_AS(s.validate(), Error);
  s.sizes = {8, 4};
  CHECK_THROWS_AS(s.validate(), Error);
  s.sizes = {4, 8};
  CHECK_NOTHROW(s.validate());
  s.repeats = 0;
  CHECK_THROWS_AS(s.validate(), Error);
  s.repeats = 1;
  s.epsilon = -1;
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK(parse_family("random2d") == Family::Random2D);
  CHECK(to_string(Family::LMarginal) == "lmarginal");
  CHECK_THROWS_AS(parse_family("cubes"), Error);
}

TEST_CASE("benchmark records") {
  BenchmarkSpec s;
  s.sizes = {4, 6, 8};
  s.repeats = 2;
  s.iterations = 10;
  s.solver = SolverChoice::Both;
  const BenchReport r = run_benchmark(s);
  REQUIRE(r.records.size() == 6);
  for (const auto& rec : r.records) {
    CHECK(rec.times_s.size() == 2);
    CHECK(rec.iterations == 10);
    CHECK(rec.trace.size() == 10);
    REQUIRE(rec.plan_diff_fro.has_value());
    CHECK(*rec.plan_diff_fro <= 1e-12);
  }
  CHECK(r.records[0].solver == "fast");
  CHECK(r.records[1].solver == "dense");
  CHECK(std::abs(r.records[0].distance - r.records[1].distance) <= 1e-10 * r.records[1].distance);
  CHECK(r.slopes.size() == 2);

  std::istringstream csv(bench_csv(r));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "size,solver,mean_time_s,distance,residual,plan_diff_fro");
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 6);
  CHECK(trace_csv(r).rfind("size,solver,iteration,elapsed_s,residual\n", 0) == 0);
}

TEST_CASE("benchmark json is deterministic once timing is masked") {
  for (Family f : {Family::Random1D, Family::Ricker, Family::Random2D, Family::Images, Family::LMarginal}) {
    BenchmarkSpec s;
    s.family = f;
    s.sizes = {4, 5};
    s.repeats = 1;
    s.iterations = 5;
    s.solver = SolverChoice::Both;
    s.parallel_instances = 3;
    const std::string a = dump_json(mask_timing(bench_to_json(run_benchmark(s))));
    s.parallel_instances = 1;
    const std::string b = dump_json(mask_timing(bench_to_json(run_benchmark(s))));
    CHECK(a == b);
    CHECK(a.find("elapsed") == std::string::npos);
    CHECK(a.find("time_s") == std::string::npos);
  }
}

TEST_CASE("dense runs beyond the budget are refused up front") {
  BenchmarkSpec s;
  s.sizes = {10, 1000};
  s.solver = SolverChoice::Dense;
  try {
    run_benchmark(s);
    FAIL("expected SizeOverflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SizeOverflow);
  }
}
