// mmot: solve, bench, match and gen commands.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmot/bench.hpp"
#include "mmot/ftvp2d.hpp"
#include "mmot/io.hpp"
#include "mmot/multimarginal.hpp"
#include "mmot/oracle.hpp"
#include "mmot/report.hpp"
#include "mmot/signals.hpp"
#include "mmot/solver.hpp"

namespace {

using mmot::Json;

constexpr int kExitError = 2;

struct Shared {
  double epsilon = 0.1;
  double tol = 1e-9;
  std::size_t max_iter = 100;
  bool stabilize = false;
  double tau = 1e30;
  std::uint64_t seed = 0;
  std::string output;
  bool dense = false, fast = false, both = false;
  std::string residual_mode = "paper";

  mmot::SinkhornConfig config() const {
    mmot::SinkhornConfig c;
    c.epsilon = epsilon;
    c.tol = tol;
    c.itr_max = max_iter;
    c.stabilize = stabilize;
    c.tau = tau;
    c.residual_mode = mmot::parse_residual_mode(residual_mode);
    return c;
  }

  mmot::SolverChoice choice() const {
    if (both) return mmot::SolverChoice::Both;
    if (dense) return mmot::SolverChoice::Dense;
    return mmot::SolverChoice::Fast;
  }
};

void add_solver_flags(CLI::App* cmd, Shared& s, bool with_choice) {
  cmd->add_option("--epsilon", s.epsilon, "entropic regularization")->capture_default_str();
  cmd->add_option("--tol", s.tol, "stop when the marginal residual drops below this")->capture_default_str();
  cmd->add_option("--max-iter", s.max_iter, "iteration cap")->capture_default_str();
  cmd->add_flag("--stabilize", s.stabilize, "log-domain stabilization");
  cmd->add_option("--tau", s.tau, "absorption threshold for stabilization")->capture_default_str();
  cmd->add_option("--seed", s.seed, "random seed")->capture_default_str();
  cmd->add_option("--output", s.output, "write the JSON report here");
  cmd->add_option("--residual-mode", s.residual_mode, "paper | full")->capture_default_str();
  if (with_choice) {
    auto* g = cmd->add_option_group("solver", "solver selection");
    g->add_flag("--fast", s.fast, "fast solver (default)");
    g->add_flag("--dense", s.dense, "dense brute-force solver");
    g->add_flag("--both", s.both, "run both and compare plans");
    g->require_option(0, 1);
  }
}

void emit(const Json& j, const std::string& output) {
  const std::string text = mmot::dump_json(j);
  if (output.empty()) return;
  mmot::write_text_file(output, text);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// -------------------------------------------------------------------------

struct SolveArgs {
  std::vector<std::string> marginals;
  std::vector<double> interval{0.0, 1.0};
  double h = 0.0;
};

int cmd_solve(const Shared& s, const SolveArgs& a) {
  std::vector<mmot::Marginal1D> m;
  for (const auto& path : a.marginals) m.push_back(mmot::validate_marginal(mmot::parse_csv_vector(path)));
  if (m.size() < 3) throw mmot::Error(mmot::ErrorKind::InvalidParam, "need at least three marginals");
  const std::size_t n = m[0].size();
  const mmot::Grid1D grid = a.h > 0.0 ? mmot::Grid1D::make(n, a.h)
                                      : mmot::Grid1D::on_interval(n, a.interval[0], a.interval[1]);
  const mmot::SinkhornConfig cfg = s.config();
  const mmot::SolverChoice choice = s.choice();
  const bool equal = std::all_of(m.begin(), m.end(), [&](const auto& x) { return x.size() == n; });
  if (m.size() == 3 && !equal)
    throw mmot::Error(mmot::ErrorKind::ShapeMismatch, "the three marginals must have the same length");

  Json j = mmot::report_header("solve");
  j["inputs"] = Json{{"marginals", a.marginals}, {"n", n}, {"h", grid.h}};
  Json results = Json::array();
  std::vector<mmot::SolveResult> runs;

  auto cost = [&]() {
    std::vector<std::size_t> shape;
    for (const auto& x : m) shape.push_back(x.size());
    return mmot::dense_cost(shape, grid.h);
  };
  if (choice != mmot::SolverChoice::Dense) {
    runs.push_back(m.size() == 3 ? mmot::fast_sinkhorn_3m(m[0], m[1], m[2], grid, cfg)
                                 : mmot::fast_sinkhorn_lm(m, grid, cfg));
  }
  std::optional<mmot::DenseTensor> c;
  if (choice != mmot::SolverChoice::Fast) {
    c = cost();
    mmot::SolveResult r = mmot::dense_sinkhorn(m, *c, cfg);
    if (cfg.stabilize) r.report.warnings.push_back("the dense solver runs without stabilization");
    runs.push_back(std::move(r));
  }
  for (const auto& r : runs) results.push_back(mmot::report_to_json(r.report));
  j["results"] = results;
  if (choice == mmot::SolverChoice::Both)
    j["plan_diff_fro"] = mmot::frobenius_distance(mmot::dense_plan_from_cost(runs[0].state, *c, cfg.epsilon),
                                                  mmot::dense_plan_from_cost(runs[1].state, *c, cfg.epsilon));
  emit(j, s.output);
  if (runs.size() == 1) {
    std::cout << fmt(runs[0].report.distance) << "\n";
  } else {
    for (const auto& r : runs) std::cout << r.report.solver << " " << fmt(r.report.distance) << "\n";
    std::cout << "plan_diff_fro " << fmt(j["plan_diff_fro"].get<double>()) << "\n";
  }
  return 0;
}

// -------------------------------------------------------------------------

struct BenchArgs {
  std::string family = "random1d";
  std::vector<std::size_t> sizes{64, 128, 256};
  std::size_t repeats = 5;
  std::size_t marginals = 4;
  double delta = 1e-3;
  std::string csv, trace;
  std::size_t parallel = 1;
  std::size_t budget = mmot::kDefaultElementBudget;
};

int cmd_bench(const Shared& s, const BenchArgs& a, bool tol_given) {
  mmot::BenchmarkSpec spec;
  spec.family = mmot::parse_family(a.family);
  spec.sizes = a.sizes;
  spec.repeats = a.repeats;
  spec.epsilon = s.epsilon;
  spec.iterations = s.max_iter;
  spec.solver = s.choice();
  spec.seed = s.seed;
  spec.marginals = a.marginals;
  spec.delta = a.delta;
  spec.stabilize = s.stabilize;
  spec.tau = s.tau;
  if (tol_given) spec.tol = s.tol;
  spec.residual_mode = mmot::parse_residual_mode(s.residual_mode);
  spec.parallel_instances = a.parallel;
  spec.element_budget = a.budget;

  const mmot::BenchReport rep = mmot::run_benchmark(spec);
  emit(mmot::bench_to_json(rep), s.output);
  const std::string table = mmot::bench_csv(rep);
  if (!a.csv.empty()) mmot::write_text_file(a.csv, table);
  if (!a.trace.empty()) mmot::write_text_file(a.trace, mmot::trace_csv(rep));
  std::cout << table;
  for (const auto& f : rep.slopes) std::cout << "# slope " << f.solver << " " << fmt(f.slope) << "\n";
  return 0;
}

// -------------------------------------------------------------------------

struct MatchArgs {
  std::vector<std::string> images;
  double delta = 1e-3;
  bool no_stabilize = false;
};

int cmd_match(Shared s, const MatchArgs& a, bool stabilize_given) {
  std::vector<mmot::Marginal2D> m;
  std::size_t w = 0, h = 0;
  for (const auto& path : a.images) {
    const mmot::GrayImage img = mmot::parse_pgm(path);
    if (!m.empty() && (img.width != w || img.height != h))
      throw mmot::Error(mmot::ErrorKind::ShapeMismatch,
                        path + " is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                            ", expected " + std::to_string(w) + "x" + std::to_string(h));
    w = img.width;
    h = img.height;
    m.push_back(mmot::image_to_marginal(img, a.delta));
  }
  // Small epsilon needs the log domain unless the user says otherwise.
  if (!stabilize_given) s.stabilize = s.epsilon < 0.01;
  if (a.no_stabilize) s.stabilize = false;
  const mmot::SinkhornConfig cfg = s.config();
  const mmot::SolveResult r = mmot::fast_sinkhorn_2d(m[0], m[1], m[2], cfg);
  Json j = mmot::report_header("match");
  j["inputs"] = Json{{"images", a.images}, {"width", w}, {"height", h}, {"delta", a.delta}};
  j["results"] = Json::array({mmot::report_to_json(r.report)});
  emit(j, s.output);
  std::cout << fmt(r.report.distance) << "\n";
  return 0;
}

// -------------------------------------------------------------------------

struct GenArgs {
  std::string family = "random1d";
  std::size_t n = 100;
  std::size_t m = 0;
  double tau = 0.0;
  double delta = 1e-3;
  bool ascii = false;
};

int cmd_gen(const Shared& s, const GenArgs& a) {
  if (s.output.empty()) throw mmot::Error(mmot::ErrorKind::InvalidParam, "gen needs --output");
  const std::size_t cols = a.m ? a.m : a.n;
  if (a.family == "random1d") {
    const auto w = mmot::random_marginal(a.n, s.seed);
    mmot::write_csv_vector(s.output, w.weights());
  } else if (a.family == "ricker") {
    mmot::RickerConfig rc;
    rc.n = a.n;
    rc.tau = a.tau;
    rc.delta = a.delta;
    mmot::write_csv_vector(s.output, mmot::ricker_marginal(rc).weights());
  } else if (a.family == "random2d") {
    // column-major rows x cols weights, one per line
    mmot::write_csv_vector(s.output, mmot::random_marginal_2d(a.n, cols, s.seed).weights());
  } else if (a.family == "image") {
    mmot::write_pgm(s.output, mmot::synthetic_image(a.n, cols, s.seed), !a.ascii);
  } else {
    throw mmot::Error(mmot::ErrorKind::InvalidParam, "unknown gen family '" + a.family + "'");
  }
  return 0;
}

void report_error(const std::string& kind, const std::string& message, const Json& extra = {}) {
  Json e{{"error", kind}, {"message", message}};
  if (extra.is_object())
    for (const auto& [k, v] : extra.items()) e[k] = v;
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic multi-marginal optimal transport with L1 pairwise cost"};
  app.require_subcommand(1);
  Shared shared;

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "solve from marginal CSV files");
  solve->add_option("--marginals", solve_args.marginals, "CSV files, one per marginal")->required();
  solve->add_option("--interval", solve_args.interval, "grid interval lo hi")
      ->expected(2)
      ->capture_default_str();
  solve->add_option("--spacing", solve_args.h, "grid spacing (overrides --interval)");
  add_solver_flags(solve, shared, true);

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "timed runs over a size list");
  bench->add_option("--family", bench_args.family, "random1d | ricker | random2d | images | lmarginal")
      ->capture_default_str();
  bench->add_option("--sizes", bench_args.sizes, "comma-separated sizes")->delimiter(',');
  bench->add_option("--repeats", bench_args.repeats, "timed runs per size")->capture_default_str();
  bench->add_option("--marginals-count", bench_args.marginals, "l for the lmarginal family")
      ->capture_default_str();
  bench->add_option("--delta", bench_args.delta, "mass floor for ricker and images")->capture_default_str();
  bench->add_option("--csv", bench_args.csv, "write the timing table here");
  bench->add_option("--trace", bench_args.trace, "write residual-vs-time series here");
  bench->add_option("--parallel-instances", bench_args.parallel, "independent solves run concurrently")
      ->capture_default_str();
  bench->add_option("--budget", bench_args.budget, "dense tensor element cap")->capture_default_str();
  add_solver_flags(bench, shared, true);

  MatchArgs match_args;
  auto* match = app.add_subcommand("match", "three-image matching with the 2D solver");
  match->add_option("images", match_args.images, "three PGM files")->required()->expected(3);
  match->add_option("--delta", match_args.delta, "mass floor added before normalizing")->capture_default_str();
  add_solver_flags(match, shared, false);
  match->add_flag("--no-stabilize", match_args.no_stabilize, "never stabilize");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "write a test instance");
  gen->add_option("--family", gen_args.family, "random1d | ricker | random2d | image")->capture_default_str();
  gen->add_option("--n", gen_args.n, "length, or rows for 2D")->capture_default_str();
  gen->add_option("--m", gen_args.m, "columns for 2D (default n)");
  gen->add_option("--shift", gen_args.tau, "Ricker time shift")->capture_default_str();
  gen->add_option("--delta", gen_args.delta, "Ricker mass floor")->capture_default_str();
  gen->add_flag("--ascii", gen_args.ascii, "write P2 instead of P5");
  gen->add_option("--seed", shared.seed, "random seed")->capture_default_str();
  gen->add_option("--output", shared.output, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*solve) return cmd_solve(shared, solve_args);
    if (*bench) return cmd_bench(shared, bench_args, bench->count("--tol") > 0);
    if (*match) return cmd_match(shared, match_args, match->count("--stabilize") > 0);
    if (*gen) return cmd_gen(shared, gen_args);
  } catch (const mmot::NumericalOverflowError& e) {
    report_error("NumericalOverflow", e.what(),
                 Json{{"failed_iteration", e.failed_iteration()},
                      {"last_residual", e.partial_report().final_residual()}});
    if (!shared.output.empty()) {
      Json j = mmot::report_header("error");
      j["error"] = "NumericalOverflow";
      j["failed_iteration"] = e.failed_iteration();
      j["partial"] = mmot::report_to_json(e.partial_report());
      emit(j, shared.output);
    }
    return kExitError;
  } catch (const mmot::Error& e) {
    report_error(std::string(mmot::to_string(e.kind())), e.what());
    return kExitError;
  } catch (const std::exception& e) {
    report_error("Internal", e.what());
    return kExitError;
  }
  return 0;
}
