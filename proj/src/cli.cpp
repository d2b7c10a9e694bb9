#include "isoplete/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "isoplete/bench.hpp"
#include "isoplete/io.hpp"

namespace isoplete {

namespace {

namespace fs = std::filesystem;

SolverKind parse_solver(const std::string& name) {
  if (name == "convex") return SolverKind::convex;
  if (name == "isodp") return SolverKind::isodp;
  if (name == "bilinear") return SolverKind::bilinear;
  throw CLI::ValidationError("--solver", "unknown solver '" + name + "'");
}

struct SolverFlags {
  std::optional<double> lambda;
  std::optional<int> p;
  int max_iters = 500;
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  bool random_init = false;

  void attach(CLI::App* cmd, bool with_seed = true) {
    cmd->add_option("--lambda", lambda, "regularization weight (default: solver-specific)");
    cmd->add_option("--p", p, "inner dimension of the factor pair (default: row count)");
    cmd->add_option("--max-iters", max_iters, "iteration cap")->capture_default_str();
    cmd->add_option("--rel-tol", rel_tol, "relative-change stopping threshold")
        ->capture_default_str();
    if (with_seed) {
      cmd->add_option("--seed", seed, "seed for randomized choices")->capture_default_str();
    }
    cmd->add_flag("--random-init", random_init, "random dictionary initialization");
  }

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.p = p;
    cfg.max_iters = max_iters;
    cfg.rel_tol = rel_tol;
    cfg.seed = seed;
    cfg.random_init = random_init;
    return cfg;
  }
};

void emit_json(const nlohmann::json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << std::endl;
  } else {
    write_json(path, doc);
  }
}

int run_diagnose(const std::string& matrix_path, const std::string& mask_path,
                 const std::string& route_name, const std::string& output) {
  const Eigen::MatrixXd L = load_dense_matrix(matrix_path);
  const SamplingSet omega =
      load_mask(mask_path, static_cast<int>(L.rows()), static_cast<int>(L.cols()));
  const GammaRoute route = route_name == "eigen" ? GammaRoute::eigen : GammaRoute::pinv;
  const DiagnosticsReport report = diagnose(L, omega, route);
  emit_json(diagnostics_to_json(report), output);
  return 0;
}

int run_complete(const std::string& input, int rows, int cols, const std::string& solver_str,
                 const SolverFlags& flags, const std::string& prefix) {
  const PartialMatrix partial = load_partial_matrix(input, rows, cols);
  const SolverKind solver = parse_solver(solver_str);
  const SolveResult result = run_solver(solver, partial, flags.config());
  save_dense_matrix(prefix + ".csv", result.L_hat);
  emit_json(solve_result_to_json(result, solver_name(solver)), prefix + ".json");
  return 0;
}

int run_forecast(const std::string& series_path, int length, int observed,
                 const std::string& solver_str, const SolverFlags& flags,
                 const std::string& prefix) {
  const Eigen::VectorXd series = load_series(series_path);
  if (observed <= 0) observed = static_cast<int>(series.size());
  if (length <= 0) length = static_cast<int>(series.size());
  if (observed > series.size()) {
    throw InvalidInputError("forecast: --observed exceeds the number of series values");
  }
  SeriesTask task;
  task.observed = series.head(observed);
  task.length = length;
  task.solver = parse_solver(solver_str);
  task.config = flags.config();
  const ForecastResult result = forecast(task);

  save_series(prefix + "_series.csv", result.x_hat);
  nlohmann::json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["solve"] = solve_result_to_json(result.solve, solver_name(task.solver));
  doc["diagnostics"] = diagnostics_to_json(result.report);
  emit_json(doc, prefix + ".json");
  return 0;
}

struct BenchFlags {
  std::string task = "phase";
  std::string out_dir = "bench_out";
  std::string mask_family = "both";
  std::vector<std::string> solvers = {"isodp", "convex"};
  std::uint64_t seed = 0;
  int trials = 10;
  int size = 50;
  bool full_scale = false;
  bool matrix_dump = false;
  std::string input;    // optional partial-matrix CSV for rankfit
  int rows = 0, cols = 0;
  std::string triplets;  // optional ratings CSV for holdout
  int min_count = 1;
  double holdout_fraction = 0.1;
  std::vector<int> target_ranks = {6, 7, 8, 9, 10, 11, 12};
  SolverFlags solver_flags;
};

std::vector<SolverKind> parse_solvers(const std::vector<std::string>& names) {
  std::vector<SolverKind> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(parse_solver(name));
  return out;
}

ExperimentGrid bench_grid(const BenchFlags& flags, MaskFamily family) {
  ExperimentGrid grid =
      flags.full_scale ? full_scale_grid(family, flags.seed) : desk_scale_grid(family, flags.seed);
  if (!flags.full_scale) {
    grid.trials = flags.trials;
    grid.size = flags.size;
  }
  return grid;
}

int run_bench(const BenchFlags& flags) {
  fs::create_directories(flags.out_dir);
  const auto solver_kinds = parse_solvers(flags.solvers);
  SolverConfig base = flags.solver_flags.config();
  base.seed = flags.seed;
  nlohmann::json summary;
  summary["schema_version"] = kReportSchemaVersion;
  summary["task"] = flags.task;

  std::vector<MaskFamily> families;
  if (flags.mask_family == "uniform") {
    families = {MaskFamily::uniform};
  } else if (flags.mask_family == "nonuniform") {
    families = {MaskFamily::nonuniform};
  } else {
    families = {MaskFamily::uniform, MaskFamily::nonuniform};
  }

  if (flags.task == "phase" || flags.task == "region") {
    for (MaskFamily family : families) {
      const std::string family_name = family == MaskFamily::uniform ? "uniform" : "nonuniform";
      const ExperimentGrid grid = bench_grid(flags, family);
      if (flags.task == "phase") {
        const PhaseGridReport report = run_phase_grid(grid, solver_kinds, base);
        write_text(flags.out_dir + "/phase_" + family_name + ".csv", report.to_csv());
        if (flags.matrix_dump) {
          for (std::size_t s = 0; s < solver_kinds.size(); ++s) {
            write_text(flags.out_dir + "/phase_" + family_name + "_" +
                           solver_name(solver_kinds[s]) + ".mat",
                       report.to_matrix_dump(s));
          }
        }
        for (std::size_t s = 0; s < solver_kinds.size(); ++s) {
          summary["totals"][family_name][solver_name(solver_kinds[s])] =
              report.total_successes(s);
        }
      } else {
        const IsomerismRegionReport report = run_isomerism_region(grid);
        write_text(flags.out_dir + "/region_" + family_name + ".csv", report.to_csv());
      }
    }
  } else if (flags.task == "rcn") {
    const std::vector<int> sizes = flags.full_scale ? std::vector<int>{100, 200, 500}
                                                    : std::vector<int>{40, 50, 80};
    const std::vector<double> rhos = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const auto rows = run_rcn_sweep(sizes, rhos);
    write_text(flags.out_dir + "/rcn_sweep.csv", rcn_sweep_csv(rows));
  } else if (flags.task == "rankfit") {
    PartialMatrix partial;
    if (!flags.input.empty()) {
      if (flags.rows <= 0 || flags.cols <= 0) {
        throw CLI::ValidationError("--input", "rankfit needs --rows and --cols");
      }
      partial = load_partial_matrix(flags.input, flags.rows, flags.cols);
    } else {
      // synthetic stand-in for the trajectory-matrix protocol
      const Eigen::MatrixXd L0 = phase_instance_matrix(60, 10, mix_seed(flags.seed, 0xd1a0));
      partial = PartialMatrix::observe(L0, gen_diagonal_band_mask(60, 60, 0.26));
    }
    const auto rows = run_rank_constrained_fit(partial, solver_kinds, flags.target_ranks, base);
    write_text(flags.out_dir + "/rank_fit.csv", rank_fit_csv(rows));
  } else if (flags.task == "holdout") {
    PartialMatrix ratings;
    if (!flags.triplets.empty()) {
      ratings = load_triplets(flags.triplets, flags.min_count).matrix;
    } else {
      ratings = synthetic_ratings(60, 50, 3, 0.3, flags.seed);
    }
    const auto rows = run_holdout_eval(ratings, flags.holdout_fraction, solver_kinds, flags.seed, base);
    write_text(flags.out_dir + "/holdout.csv", holdout_csv(rows));
  } else {
    throw CLI::ValidationError("--task", "unknown bench task '" + flags.task + "'");
  }

  write_json(flags.out_dir + "/summary.json", summary);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"matrix completion under deterministic sampling"};
  app.require_subcommand(1);
  // flat key=value config: keys are spelled <subcommand>.<flag>
  app.set_config("--config");
  app.allow_config_extras(CLI::config_extras_mode::error);

  // diagnose
  auto* diagnose_cmd = app.add_subcommand("diagnose", "identifiability report for (L, Omega)");
  std::string matrix_path, mask_path, route = "pinv", diag_output;
  diagnose_cmd->add_option("--matrix", matrix_path, "dense matrix CSV")->required();
  diagnose_cmd->add_option("--mask", mask_path, "sampling-set CSV (`i,j` lines)")->required();
  diagnose_cmd->add_option("--route", route, "gamma route: pinv|eigen")
      ->check(CLI::IsMember({"pinv", "eigen"}))
      ->capture_default_str();
  diagnose_cmd->add_option("--output", diag_output, "report path (default: stdout)");

  // complete
  auto* complete_cmd = app.add_subcommand("complete", "complete a partial matrix");
  std::string complete_input, complete_solver = "isodp", complete_prefix = "completed";
  int complete_rows = 0, complete_cols = 0;
  SolverFlags complete_flags;
  complete_cmd->add_option("--input", complete_input, "partial matrix CSV (`i,j,value`)")
      ->required();
  complete_cmd->add_option("--rows", complete_rows, "row count")->required();
  complete_cmd->add_option("--cols", complete_cols, "column count")->required();
  complete_cmd->add_option("--solver", complete_solver, "convex|isodp|bilinear")
      ->check(CLI::IsMember({"convex", "isodp", "bilinear"}))
      ->capture_default_str();
  complete_flags.attach(complete_cmd);
  complete_cmd->add_option("--output-prefix", complete_prefix, "writes <prefix>.csv and <prefix>.json")
      ->capture_default_str();

  // forecast
  auto* forecast_cmd = app.add_subcommand("forecast", "complete a univariate series");
  std::string forecast_series, forecast_solver = "convex", forecast_prefix = "forecast";
  int forecast_length = 0, forecast_observed = 0;
  SolverFlags forecast_flags;
  forecast_cmd->add_option("--series", forecast_series, "series CSV, one value per line")
      ->required();
  forecast_cmd->add_option("--length", forecast_length, "full series length m (default: input length)");
  forecast_cmd->add_option("--observed", forecast_observed,
                           "observed prefix length l (default: input length)");
  forecast_cmd->add_option("--solver", forecast_solver, "convex|isodp|bilinear")
      ->check(CLI::IsMember({"convex", "isodp", "bilinear"}))
      ->capture_default_str();
  forecast_flags.attach(forecast_cmd);
  forecast_cmd
      ->add_option("--output-prefix", forecast_prefix, "writes <prefix>_series.csv and <prefix>.json")
      ->capture_default_str();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "experiment protocols, CSV reports");
  BenchFlags bench_flags;
  bench_cmd->add_option("--task", bench_flags.task, "phase|region|rcn|rankfit|holdout")
      ->check(CLI::IsMember({"phase", "region", "rcn", "rankfit", "holdout"}))
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_flags.out_dir, "output directory")->capture_default_str();
  bench_cmd->add_option("--mask-family", bench_flags.mask_family, "uniform|nonuniform|both")
      ->check(CLI::IsMember({"uniform", "nonuniform", "both"}))
      ->capture_default_str();
  bench_cmd->add_option("--solvers", bench_flags.solvers, "solvers to compare")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_flags.seed, "global seed")->capture_default_str();
  bench_cmd->add_option("--trials", bench_flags.trials, "trials per grid cell")
      ->capture_default_str();
  bench_cmd->add_option("--size", bench_flags.size, "grid matrix size m = n")
      ->capture_default_str();
  bench_cmd->add_flag("--full-scale", bench_flags.full_scale,
                      "published protocol scale (much slower)");
  bench_cmd->add_flag("--matrix-dump", bench_flags.matrix_dump,
                      "also write gnuplot-style success matrices");
  bench_cmd->add_option("--input", bench_flags.input, "rankfit: partial matrix CSV");
  bench_cmd->add_option("--rows", bench_flags.rows, "rankfit: row count");
  bench_cmd->add_option("--cols", bench_flags.cols, "rankfit: column count");
  bench_cmd->add_option("--target-ranks", bench_flags.target_ranks, "rankfit: target ranks")
      ->capture_default_str();
  bench_cmd->add_option("--triplets", bench_flags.triplets, "holdout: ratings CSV");
  bench_cmd->add_option("--min-count", bench_flags.min_count,
                        "holdout: minimum ratings per user/item")
      ->capture_default_str();
  bench_cmd->add_option("--holdout-fraction", bench_flags.holdout_fraction,
                        "holdout: test fraction")
      ->capture_default_str();
  bench_flags.solver_flags.attach(bench_cmd, /*with_seed=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (diagnose_cmd->parsed()) return run_diagnose(matrix_path, mask_path, route, diag_output);
    if (complete_cmd->parsed()) {
      return run_complete(complete_input, complete_rows, complete_cols, complete_solver,
                          complete_flags, complete_prefix);
    }
    if (forecast_cmd->parsed()) {
      return run_forecast(forecast_series, forecast_length, forecast_observed, forecast_solver,
                          forecast_flags, forecast_prefix);
    }
    if (bench_cmd->parsed()) return run_bench(bench_flags);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 2;
}

}  // namespace isoplete
