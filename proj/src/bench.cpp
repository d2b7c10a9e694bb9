#include "isoplete/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <sstream>

#include "isoplete/linalg.hpp"

namespace isoplete {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

constexpr double kExactRelError = 1e-4;

}  // namespace

double psnr(const Eigen::MatrixXd& L0, const Eigen::MatrixXd& L_hat) {
  if (L0.rows() != L_hat.rows() || L0.cols() != L_hat.cols()) {
    throw InvalidInputError("psnr: dimension mismatch");
  }
  const double peak = L0.cwiseAbs().maxCoeff();
  if (peak <= 0.0) throw InvalidInputError("psnr: reference matrix is zero");
  const double err = (L0 - L_hat).squaredNorm() / static_cast<double>(L0.size());
  if (err <= 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / err));
}

double mse(const Eigen::VectorXd& values_true, const Eigen::VectorXd& values_pred) {
  if (values_true.size() != values_pred.size() || values_true.size() == 0) {
    throw InvalidInputError("mse: vectors must share a positive length");
  }
  return (values_true - values_pred).squaredNorm() / static_cast<double>(values_true.size());
}

int rank_estimate(const Eigen::MatrixXd& L) {
  if (L.size() == 0 || L.isZero(0.0)) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(L);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = 1e-4 * sv(0);
  int r = 0;
  while (r < sv.size() && sv(r) >= cutoff) ++r;
  return r;
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::convex: return "convex";
    case SolverKind::isodp: return "isodp";
    case SolverKind::bilinear: return "bilinear";
  }
  return "unknown";
}

ExperimentGrid desk_scale_grid(MaskFamily family, std::uint64_t seed) {
  ExperimentGrid grid;
  grid.rank_axis = {1, 5, 10, 20, 30, 40};
  grid.fraction_axis = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  grid.mask_family = family;
  grid.trials = 10;
  grid.seed = seed;
  grid.size = 50;
  return grid;
}

ExperimentGrid full_scale_grid(MaskFamily family, std::uint64_t seed) {
  ExperimentGrid grid;
  grid.rank_axis = {1};
  for (int r = 5; r <= 95; r += 5) grid.rank_axis.push_back(r);
  grid.fraction_axis = {0.01};
  for (int f = 5; f <= 95; f += 5) grid.fraction_axis.push_back(f / 100.0);
  grid.mask_family = family;
  grid.trials = 20;
  grid.seed = seed;
  grid.size = 100;
  return grid;
}

Eigen::MatrixXd phase_instance_matrix(int size, int r0, std::uint64_t instance_seed) {
  Rng rng(mix_seed(instance_seed, 0x11));
  Eigen::MatrixXd B(size, r0);
  Eigen::MatrixXd C(r0, size);
  for (int j = 0; j < r0; ++j) {
    for (int i = 0; i < size; ++i) B(i, j) = rng.normal();
  }
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < r0; ++i) C(i, j) = rng.normal();
  }
  return B * C;
}

SamplingSet phase_instance_mask(const ExperimentGrid& grid, double fraction,
                                std::uint64_t instance_seed) {
  if (grid.mask_family == MaskFamily::uniform) {
    return gen_uniform_mask(grid.size, grid.size, fraction, mix_seed(instance_seed, 0x22));
  }
  return gen_diagonal_band_mask(grid.size, grid.size, fraction);
}

std::uint64_t phase_instance_seed(const ExperimentGrid& grid, int r0, double fraction, int trial) {
  return mix_seed(grid.seed, static_cast<std::uint64_t>(r0),
                  static_cast<std::uint64_t>(std::llround(fraction * 1e6)),
                  static_cast<std::uint64_t>(trial));
}

long PhaseGridReport::cell_successes(std::size_t cell, std::size_t solver) const {
  const auto& outcome = cells[cell].outcomes[solver];
  return std::count_if(outcome.begin(), outcome.end(),
                       [](const TrialOutcome& t) { return t.success; });
}

long PhaseGridReport::total_successes(std::size_t solver) const {
  long total = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) total += cell_successes(c, solver);
  return total;
}

std::string PhaseGridReport::to_csv() const {
  std::ostringstream out;
  out << "r0,fraction,solver,successes,trials\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      out << cells[c].r0 << ',' << fmt_double(cells[c].fraction) << ',' << solver_name(solvers[s])
          << ',' << cell_successes(c, s) << ',' << grid.trials << '\n';
    }
  }
  return out.str();
}

std::string PhaseGridReport::to_matrix_dump(std::size_t solver) const {
  std::ostringstream out;
  std::size_t c = 0;
  for (std::size_t r = 0; r < grid.rank_axis.size(); ++r) {
    for (std::size_t f = 0; f < grid.fraction_axis.size(); ++f, ++c) {
      if (f > 0) out << ' ';
      out << static_cast<double>(cell_successes(c, solver)) / grid.trials;
    }
    out << '\n';
  }
  return out.str();
}

PhaseGridReport run_phase_grid(const ExperimentGrid& grid, const std::vector<SolverKind>& solvers,
                               const SolverConfig& base) {
  PhaseGridReport report;
  report.grid = grid;
  report.solvers = solvers;
  report.cells.resize(grid.rank_axis.size() * grid.fraction_axis.size());

  const int trials = grid.trials;
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    PhaseCell& cell = report.cells[c];
    cell.r0 = grid.rank_axis[c / grid.fraction_axis.size()];
    cell.fraction = grid.fraction_axis[c % grid.fraction_axis.size()];
    cell.outcomes.assign(solvers.size(), std::vector<TrialOutcome>(static_cast<std::size_t>(trials)));
  }

  const int jobs = static_cast<int>(report.cells.size()) * trials;
  parallel_for(jobs, [&](int job) {
    const std::size_t c = static_cast<std::size_t>(job) / static_cast<std::size_t>(trials);
    const int trial = job % trials;
    PhaseCell& cell = report.cells[c];
    const std::uint64_t seed = phase_instance_seed(grid, cell.r0, cell.fraction, trial);
    const Eigen::MatrixXd L0 = phase_instance_matrix(grid.size, cell.r0, seed);
    const SamplingSet omega = phase_instance_mask(grid, cell.fraction, seed);
    const PartialMatrix partial = PartialMatrix::observe(L0, omega);
    const double ref_norm = L0.norm();

    for (std::size_t s = 0; s < solvers.size(); ++s) {
      TrialOutcome& outcome = cell.outcomes[s][static_cast<std::size_t>(trial)];
      const SolveResult solved = run_solver(solvers[s], partial, base);
      outcome.psnr_db = psnr(L0, solved.L_hat);
      outcome.rel_error = (L0 - solved.L_hat).norm() / std::max(ref_norm, 1e-300);
      outcome.success = outcome.psnr_db >= kPsnrSuccessDb;
      outcome.exact = outcome.success && outcome.rel_error <= kExactRelError;
    }
  });
  return report;
}

std::string IsomerismRegionReport::to_csv() const {
  std::ostringstream out;
  out << "r0,fraction,isomeric,trials\n";
  for (const RegionCell& cell : cells) {
    const long hits = std::count(cell.isomeric.begin(), cell.isomeric.end(), true);
    out << cell.r0 << ',' << fmt_double(cell.fraction) << ',' << hits << ',' << grid.trials << '\n';
  }
  return out.str();
}

IsomerismRegionReport run_isomerism_region(const ExperimentGrid& grid) {
  IsomerismRegionReport report;
  report.grid = grid;
  report.cells.resize(grid.rank_axis.size() * grid.fraction_axis.size());
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    RegionCell& cell = report.cells[c];
    cell.r0 = grid.rank_axis[c / grid.fraction_axis.size()];
    cell.fraction = grid.fraction_axis[c % grid.fraction_axis.size()];
    cell.isomeric.assign(static_cast<std::size_t>(grid.trials), false);
  }

  const int jobs = static_cast<int>(report.cells.size()) * grid.trials;
  parallel_for(jobs, [&](int job) {
    const std::size_t c = static_cast<std::size_t>(job) / static_cast<std::size_t>(grid.trials);
    const int trial = job % grid.trials;
    RegionCell& cell = report.cells[c];
    const std::uint64_t seed = phase_instance_seed(grid, cell.r0, cell.fraction, trial);
    const Eigen::MatrixXd L0 = phase_instance_matrix(grid.size, cell.r0, seed);
    const SamplingSet omega = phase_instance_mask(grid, cell.fraction, seed);
    bool isomeric = false;
    try {
      isomeric = is_pair_isomeric(L0, omega);
    } catch (const PreconditionError&) {
      // a wholly missing line cannot be isomeric
    }
    cell.isomeric[static_cast<std::size_t>(trial)] = isomeric;
  });
  return report;
}

Eigen::VectorXd sine_series(int m) {
  Eigen::VectorXd x(m);
  for (int t = 0; t < m; ++t) x(t) = std::sin(2.0 * M_PI * (t + 1) / m);
  return x;
}

std::vector<RcnSweepRow> run_rcn_sweep(const std::vector<int>& sizes,
                                       const std::vector<double>& rho_list) {
  std::vector<RcnSweepRow> rows;
  for (int m : sizes) {
    for (double rho : rho_list) {
      const int l = std::max(1, static_cast<int>(std::llround(rho * m)));
      std::vector<int> y(static_cast<std::size_t>(m), 0);
      for (int t = 0; t < l; ++t) y[static_cast<std::size_t>(t)] = 1;
      const SamplingSet omega = mask_from_convolution(y);
      const Eigen::MatrixXd L0 = convolution_matrix(sine_series(m));
      rows.push_back({m, rho, gamma_pair(L0, omega)});
    }
  }
  return rows;
}

std::string rcn_sweep_csv(const std::vector<RcnSweepRow>& rows) {
  std::ostringstream out;
  out << "m,rho,gamma_pair\n";
  for (const RcnSweepRow& row : rows) {
    out << row.m << ',' << fmt_double(row.rho) << ',' << fmt_double(row.gamma) << '\n';
  }
  return out.str();
}

namespace {

struct Probe {
  int rank = 0;
  double mse = 0.0;
};

Probe probe_rank(SolverKind solver, const PartialMatrix& partial, double lambda,
                 const SolverConfig& base) {
  SolverConfig cfg = base;
  cfg.lambda = lambda;
  const SolveResult solved = run_solver(solver, partial, cfg);
  return {rank_estimate(solved.L_hat), solved.fit_mse};
}

}  // namespace

std::vector<RankFitRow> run_rank_constrained_fit(const PartialMatrix& partial,
                                                 const std::vector<SolverKind>& solvers,
                                                 const std::vector<int>& target_ranks,
                                                 const SolverConfig& base, int max_probes) {
  if (target_ranks.empty()) throw InvalidInputError("run_rank_constrained_fit: no target ranks");
  const double scale = partial.values.size() > 0 ? partial.values.cwiseAbs().maxCoeff() : 1.0;

  std::vector<RankFitRow> rows(solvers.size() * target_ranks.size());
  parallel_for(static_cast<int>(rows.size()), [&](int idx) {
    const SolverKind solver = solvers[static_cast<std::size_t>(idx) / target_ranks.size()];
    const int target = target_ranks[static_cast<std::size_t>(idx) % target_ranks.size()];

    RankFitRow row;
    row.solver = solver;
    row.target_rank = target;

    // estimated rank decreases as lambda grows; bisection on log(lambda)
    double lo = 1e-9 * std::max(scale, 1e-300);  // rank too high
    double hi = 10.0 * std::max(scale, 1e-300);  // rank too low
    int best_gap = std::numeric_limits<int>::max();
    for (int probe = 0; probe < max_probes; ++probe) {
      const double lambda = (probe == 0) ? lo : (probe == 1 ? hi : std::sqrt(lo * hi));
      const Probe result = probe_rank(solver, partial, lambda, base);
      const int gap = std::abs(result.rank - target);
      if (gap < best_gap) {
        best_gap = gap;
        row.achieved_rank = result.rank;
        row.lambda = lambda;
        row.train_mse = result.mse;
      }
      if (result.rank == target) {
        row.achieved = true;
        break;
      }
      if (probe == 0) {
        if (result.rank < target) break;  // even the smallest lambda undershoots
        continue;
      }
      if (probe == 1) {
        if (result.rank > target) break;  // even the largest lambda overshoots
        continue;
      }
      const double lambda_mid = lambda;
      if (result.rank > target) {
        lo = lambda_mid;
      } else {
        hi = lambda_mid;
      }
    }
    rows[static_cast<std::size_t>(idx)] = row;
  });
  return rows;
}

std::string rank_fit_csv(const std::vector<RankFitRow>& rows) {
  std::ostringstream out;
  out << "solver,target_rank,achieved_rank,achieved,lambda,train_mse\n";
  for (const RankFitRow& row : rows) {
    out << solver_name(row.solver) << ',' << row.target_rank << ',' << row.achieved_rank << ','
        << (row.achieved ? 1 : 0) << ',' << fmt_double(row.lambda) << ','
        << fmt_double(row.train_mse) << '\n';
  }
  return out.str();
}

std::vector<HoldoutRow> run_holdout_eval(const PartialMatrix& ratings, double holdout_fraction,
                                         const std::vector<SolverKind>& solvers,
                                         std::uint64_t seed, const SolverConfig& base) {
  const std::size_t total = ratings.omega.size();
  if (total < 2) throw InvalidInputError("run_holdout_eval: not enough ratings");
  if (holdout_fraction <= 0.0 || holdout_fraction >= 1.0) {
    throw InvalidInputError("run_holdout_eval: holdout fraction outside (0,1)");
  }

  // seeded split of the entry list
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0x5917));
  for (std::size_t k = total; k > 1; --k) {
    const std::size_t swap_with = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(k) - 1));
    std::swap(order[k - 1], order[swap_with]);
  }
  const std::size_t n_test = std::max<std::size_t>(1, static_cast<std::size_t>(holdout_fraction * total));

  std::vector<std::pair<int, int>> train_pairs, test_pairs;
  std::vector<double> train_vals, test_vals;
  for (std::size_t k = 0; k < total; ++k) {
    const auto& entry = ratings.omega.entries()[order[k]];
    const double value = ratings.values(static_cast<Eigen::Index>(order[k]));
    if (k < n_test) {
      test_pairs.push_back(entry);
      test_vals.push_back(value);
    } else {
      train_pairs.push_back(entry);
      train_vals.push_back(value);
    }
  }
  const PartialMatrix train =
      PartialMatrix::from_pairs(ratings.rows(), ratings.cols(), train_pairs, train_vals);
  const Eigen::Map<Eigen::VectorXd> test_truth(test_vals.data(),
                                               static_cast<Eigen::Index>(test_vals.size()));

  const double train_min = train.values.minCoeff();
  const double train_max = train.values.maxCoeff();
  const double train_mean = train.values.mean();

  std::vector<HoldoutRow> rows;

  Eigen::VectorXd random_pred(test_truth.size());
  Rng pred_rng(mix_seed(seed, 0xba5e));
  for (Eigen::Index k = 0; k < random_pred.size(); ++k) {
    random_pred(k) = train_min + (train_max - train_min) * pred_rng.uniform();
  }
  rows.push_back({"random", mse(test_truth, random_pred)});
  rows.push_back({"average", mse(test_truth, Eigen::VectorXd::Constant(test_truth.size(), train_mean))});

  for (SolverKind solver : solvers) {
    const SolveResult solved = run_solver(solver, train, base);
    Eigen::VectorXd pred(test_truth.size());
    for (std::size_t k = 0; k < test_pairs.size(); ++k) {
      pred(static_cast<Eigen::Index>(k)) = solved.L_hat(test_pairs[k].first, test_pairs[k].second);
    }
    rows.push_back({solver_name(solver), mse(test_truth, pred)});
  }
  return rows;
}

std::string holdout_csv(const std::vector<HoldoutRow>& rows) {
  std::ostringstream out;
  out << "method,test_mse\n";
  for (const HoldoutRow& row : rows) out << row.method << ',' << fmt_double(row.test_mse) << '\n';
  return out.str();
}

PartialMatrix synthetic_ratings(int users, int items, int rank, double observe_fraction,
                                std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x4a7e5));
  Eigen::MatrixXd B(users, rank);
  Eigen::MatrixXd C(rank, items);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < users; ++i) B(i, j) = rng.normal();
  }
  for (int j = 0; j < items; ++j) {
    for (int i = 0; i < rank; ++i) C(i, j) = rng.normal();
  }
  Eigen::MatrixXd L = 3.0 + 0.8 * (B * C).array() / std::sqrt(static_cast<double>(rank));
  L = L.cwiseMax(1.0).cwiseMin(5.0);
  const SamplingSet omega =
      gen_uniform_mask(users, items, observe_fraction, mix_seed(seed, 0x0b5e6));
  return PartialMatrix::observe(L, omega);
}

}  // namespace isoplete
