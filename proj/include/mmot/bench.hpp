// Benchmark harness: timed solver runs over a list of sizes, plan
// differences between the fast and dense solvers, and log-log slope fits.

#ifndef MMOT_BENCH_HPP_
#define MMOT_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmot/core.hpp"
#include "mmot/report.hpp"

namespace mmot {

enum class Family { Random1D, Ricker, Random2D, Images, LMarginal };
enum class SolverChoice { Fast, Dense, Both };

std::string_view to_string(Family family);
Family parse_family(std::string_view text);
std::string_view to_string(SolverChoice choice);

struct BenchmarkSpec {
  Family family = Family::Random1D;
  std::vector<std::size_t> sizes;   // N; 2D families use N x N grids
  std::size_t repeats = 5;          // timed runs after one warm-up run
  double epsilon = 0.1;
  std::size_t iterations = 100;
  SolverChoice solver = SolverChoice::Fast;
  std::uint64_t seed = 0;
  std::size_t marginals = 4;        // lmarginal family only
  double delta = 1e-3;              // ricker and images families
  bool stabilize = false;
  double tau = 1e30;
  // Tolerance far below any reachable residual, so every run performs
  // exactly `iterations` iterations.
  double tol = 1e-300;
  ResidualMode residual_mode = ResidualMode::Paper;
  std::size_t parallel_instances = 1;
  std::size_t element_budget = 100'000'000;

  // Throws InvalidParam unless sizes are nonempty and strictly ascending,
  // repeats >= 1 and the solver settings are valid.
  void validate() const;
  SinkhornConfig sinkhorn_config() const;
};

struct TracePoint {
  std::size_t iteration;
  double elapsed_s;
  double residual;
};

struct ReportRecord {
  std::size_t size = 0;
  std::string solver;                  // "fast" or "dense"
  std::vector<double> times_s;         // one per timed repeat
  double mean_time_s = 0.0;
  double median_time_s = 0.0;
  double distance = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::optional<double> plan_diff_fro; // set when both solvers ran this size
  std::vector<TracePoint> trace;       // from the last timed repeat
};

struct SlopeFit {
  std::string solver;
  double slope;
};

struct BenchReport {
  BenchmarkSpec spec;
  std::vector<ReportRecord> records;   // ordered by size, then fast before dense
  std::vector<SlopeFit> slopes;        // only for solvers that ran >= 3 sizes
};

/// Least-squares slope of log(y) against log(x). Needs >= 2 points with
/// positive coordinates and at least two distinct x.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> values);

/// Runs the whole benchmark. Throws SizeOverflow before running anything if
/// a dense run would need a tensor larger than spec.element_budget.
BenchReport run_benchmark(const BenchmarkSpec& spec);

Json bench_to_json(const BenchReport& report);
/// size,solver,mean_time_s,distance,residual,plan_diff_fro
std::string bench_csv(const BenchReport& report);
/// size,solver,iteration,elapsed_s,residual
std::string trace_csv(const BenchReport& report);

}  // namespace mmot

#endif  // MMOT_BENCH_HPP_
