#include "mmot/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "mmot/ftvp2d.hpp"
#include "mmot/multimarginal.hpp"
#include "mmot/oracle.hpp"
#include "mmot/signals.hpp"
#include "mmot/solver.hpp"

namespace mmot {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Random1D: return "random1d";
    case Family::Ricker: return "ricker";
    case Family::Random2D: return "random2d";
    case Family::Images: return "images";
    case Family::LMarginal: return "lmarginal";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  for (Family f : {Family::Random1D, Family::Ricker, Family::Random2D, Family::Images,
                   Family::LMarginal})
    if (text == to_string(f)) return f;
  throw Error(ErrorKind::InvalidParam, "unknown problem family '" + std::string(text) + "'");
}

std::string_view to_string(SolverChoice choice) {
  switch (choice) {
    case SolverChoice::Fast: return "fast";
    case SolverChoice::Dense: return "dense";
    case SolverChoice::Both: return "both";
  }
  return "?";
}

void BenchmarkSpec::validate() const {
  if (sizes.empty()) throw Error(ErrorKind::InvalidParam, "no sizes given");
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    if (sizes[s] < 1) throw Error(ErrorKind::InvalidParam, "sizes must be positive");
    if (s > 0 && sizes[s] <= sizes[s - 1])
      throw Error(ErrorKind::InvalidParam, "sizes must be strictly ascending");
  }
  if (repeats < 1) throw Error(ErrorKind::InvalidParam, "repeats must be at least 1");
  if (parallel_instances < 1) throw Error(ErrorKind::InvalidParam, "parallel_instances must be at least 1");
  if (family == Family::LMarginal && (marginals < 3 || marginals > kMaxMarginals))
    throw Error(ErrorKind::InvalidParam, "lmarginal needs 3..8 marginals");
  if (family == Family::LMarginal && stabilize)
    throw Error(ErrorKind::InvalidParam, "the lmarginal family has no stabilized solver");
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidParam, "delta must be nonnegative");
  sinkhorn_config().validate();
}

SinkhornConfig BenchmarkSpec::sinkhorn_config() const {
  SinkhornConfig c;
  c.epsilon = epsilon;
  c.tol = tol;
  c.itr_max = iterations;
  c.stabilize = stabilize;
  c.tau = tau;
  c.residual_mode = residual_mode;
  return c;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::ShapeMismatch, "x and y differ in length");
  if (x.size() < 2) throw Error(ErrorKind::InvalidParam, "need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw Error(ErrorKind::InvalidParam, "log-log fit needs positive values");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::InvalidParam, "all x values are equal");
  return sxy / sxx;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidParam, "median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

namespace {

bool is_2d(Family f) { return f == Family::Random2D || f == Family::Images; }

std::size_t marginal_count(const BenchmarkSpec& spec) {
  return spec.family == Family::LMarginal ? spec.marginals : 3;
}

struct Instance {
  Grid1D grid;
  std::vector<Marginal1D> m1d;  // flattened weights for 2D families
  std::vector<Marginal2D> m2d;
};

Instance make_instance(const BenchmarkSpec& spec, std::size_t n) {
  Instance in;
  switch (spec.family) {
    case Family::Random1D:
    case Family::LMarginal:
      in.grid = Grid1D::unit_interval(n);
      for (std::size_t q = 0; q < marginal_count(spec); ++q)
        in.m1d.push_back(random_marginal(n, derive_seed(spec.seed, n, q)));
      break;
    case Family::Ricker: {
      RickerConfig rc;
      rc.n = n;
      rc.delta = spec.delta;
      in.grid = ricker_grid(rc);
      for (double tau : {0.0, 0.75, 1.5}) {
        rc.tau = tau;
        in.m1d.push_back(ricker_marginal(rc));
      }
      break;
    }
    case Family::Random2D:
    case Family::Images:
      for (std::size_t q = 0; q < 3; ++q) {
        const std::uint64_t s = derive_seed(spec.seed, n, q);
        in.m2d.push_back(spec.family == Family::Random2D
                             ? random_marginal_2d(n, n, s)
                             : image_to_marginal(synthetic_image(n, n, s), spec.delta));
      }
      for (const auto& m : in.m2d) in.m1d.push_back(validate_marginal(m.weights()));
      break;
  }
  return in;
}

DenseTensor make_cost(const BenchmarkSpec& spec, const Instance& in, std::size_t n) {
  if (is_2d(spec.family))
    return dense_cost_2d(n, n, in.m2d[0].h1(), in.m2d[0].h2(), spec.element_budget);
  return dense_cost(in.grid, marginal_count(spec), spec.element_budget);
}

void check_budget(const BenchmarkSpec& spec, std::size_t n) {
  const std::size_t sites = is_2d(spec.family) ? n * n : n;
  const std::vector<std::size_t> shape(marginal_count(spec), sites);
  checked_element_count(shape, spec.element_budget);
}

SolveResult run_fast(const BenchmarkSpec& spec, const Instance& in, const SinkhornConfig& cfg,
                     const IterationObserver& obs) {
  if (is_2d(spec.family)) return fast_sinkhorn_2d(in.m2d[0], in.m2d[1], in.m2d[2], cfg, obs);
  if (spec.family == Family::LMarginal) return fast_sinkhorn_lm(in.m1d, in.grid, cfg, obs);
  return fast_sinkhorn_3m(in.m1d[0], in.m1d[1], in.m1d[2], in.grid, cfg, obs);
}

struct Job {
  std::size_t size;
  bool dense;
  ReportRecord record;
  ScalingState state;
};

void run_job(const BenchmarkSpec& spec, Job& job) {
  const Instance in = make_instance(spec, job.size);
  const SinkhornConfig cfg = spec.sinkhorn_config();
  std::optional<DenseTensor> cost;
  if (job.dense) cost = make_cost(spec, in, job.size);

  auto once = [&]() {
    return job.dense ? dense_sinkhorn(in.m1d, *cost, cfg) : run_fast(spec, in, cfg, {});
  };
  once();  // warm-up
  ReportRecord& r = job.record;
  r.size = job.size;
  r.solver = job.dense ? "dense" : "fast";
  SolveResult last;
  for (std::size_t k = 0; k < spec.repeats; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    last = once();
    r.times_s.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  double sum = 0.0;
  for (double t : r.times_s) sum += t;
  r.mean_time_s = sum / static_cast<double>(r.times_s.size());
  r.median_time_s = median(r.times_s);
  r.distance = last.report.distance;
  r.residual = last.report.final_residual();
  r.iterations = last.report.iterations;
  const auto& tr = last.report.trace;
  for (std::size_t t = 0; t < tr.residuals.size(); ++t)
    r.trace.push_back({t + 1, tr.elapsed_s[t], tr.residuals[t]});
  job.state = std::move(last.state);
}

}  // namespace

BenchReport run_benchmark(const BenchmarkSpec& spec) {
  spec.validate();
  const bool want_fast = spec.solver != SolverChoice::Dense;
  const bool want_dense = spec.solver != SolverChoice::Fast;
  if (want_dense)
    for (std::size_t n : spec.sizes) check_budget(spec, n);

  std::vector<Job> jobs;
  for (std::size_t n : spec.sizes) {
    if (want_fast) jobs.push_back({n, false, {}, {}});
    if (want_dense) jobs.push_back({n, true, {}, {}});
  }

  if (spec.parallel_instances <= 1) {
    for (auto& job : jobs) run_job(spec, job);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
      for (std::size_t j; (j = next++) < jobs.size();) {
        try {
          run_job(spec, jobs[j]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(spec.parallel_instances, jobs.size()); ++t)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  BenchReport rep;
  rep.spec = spec;
  if (want_fast && want_dense) {
    for (std::size_t j = 0; j + 1 < jobs.size(); j += 2) {
      const std::size_t n = jobs[j].size;
      const Instance in = make_instance(spec, n);
      const DenseTensor cost = make_cost(spec, in, n);
      const double diff = frobenius_distance(dense_plan_from_cost(jobs[j].state, cost, spec.epsilon),
                                             dense_plan_from_cost(jobs[j + 1].state, cost, spec.epsilon));
      jobs[j].record.plan_diff_fro = diff;
      jobs[j + 1].record.plan_diff_fro = diff;
    }
  }
  for (auto& job : jobs) rep.records.push_back(std::move(job.record));

  for (const char* solver : {"fast", "dense"}) {
    std::vector<double> x, y;
    for (const auto& r : rep.records)
      if (r.solver == solver) {
        x.push_back(static_cast<double>(r.size));
        y.push_back(r.median_time_s);
      }
    if (x.size() >= 3) rep.slopes.push_back({solver, fit_loglog_slope(x, y)});
  }
  return rep;
}

Json bench_to_json(const BenchReport& report) {
  const BenchmarkSpec& s = report.spec;
  Json j = report_header("bench");
  j["spec"] = Json{{"family", std::string(to_string(s.family))},
                   {"sizes", s.sizes},
                   {"repeats", s.repeats},
                   {"epsilon", s.epsilon},
                   {"iterations", s.iterations},
                   {"solver", std::string(to_string(s.solver))},
                   {"seed", s.seed},
                   {"marginals", marginal_count(s)},
                   {"delta", s.delta},
                   {"stabilize", s.stabilize},
                   {"tau", s.tau},
                   {"tol", s.tol},
                   {"residual_mode", std::string(to_string(s.residual_mode))}};
  Json records = Json::array();
  for (const auto& r : report.records) {
    Json rec;
    rec["size"] = r.size;
    rec["solver"] = r.solver;
    rec["distance"] = r.distance;
    rec["residual"] = r.residual;
    rec["iterations"] = r.iterations;
    rec["plan_diff_fro"] = r.plan_diff_fro ? Json(*r.plan_diff_fro) : Json(nullptr);
    Json residuals = Json::array(), elapsed = Json::array();
    for (const auto& p : r.trace) {
      residuals.push_back(p.residual);
      elapsed.push_back(p.elapsed_s);
    }
    rec["residuals"] = residuals;
    rec["timing"] = Json{{"mean_time_s", r.mean_time_s},
                         {"median_time_s", r.median_time_s},
                         {"times_s", r.times_s},
                         {"trace_elapsed_s", elapsed}};
    records.push_back(rec);
  }
  j["records"] = records;
  Json slopes = Json::object();
  for (const auto& f : report.slopes) slopes[f.solver] = f.slope;
  j["timing"] = Json{{"slopes", slopes}};
  return j;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string bench_csv(const BenchReport& report) {
  std::string out = "size,solver,mean_time_s,distance,residual,plan_diff_fro\n";
  for (const auto& r : report.records)
    out += std::to_string(r.size) + "," + r.solver + "," + fmt(r.mean_time_s) + "," +
           fmt(r.distance) + "," + fmt(r.residual) + "," +
           (r.plan_diff_fro ? fmt(*r.plan_diff_fro) : std::string()) + "\n";
  return out;
}

std::string trace_csv(const BenchReport& report) {
  std::string out = "size,solver,iteration,elapsed_s,residual\n";
  for (const auto& r : report.records)
    for (const auto& p : r.trace)
      out += std::to_string(r.size) + "," + r.solver + "," + std::to_string(p.iteration) + "," +
             fmt(p.elapsed_s) + "," + fmt(p.residual) + "\n";
  return out;
}

}  // namespace mmot
