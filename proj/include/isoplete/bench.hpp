#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "isoplete/forecast.hpp"
#include "isoplete/sampling.hpp"
#include "isoplete/solvers.hpp"

namespace isoplete {

// Peak signal-to-noise ratio in dB with peak = max |entry of L0|, capped at
// 300 dB for exact recovery. Recovery counts as a success at >= 40 dB.
double psnr(const Eigen::MatrixXd& L0, const Eigen::MatrixXd& L_hat);

inline constexpr double kPsnrSuccessDb = 40.0;
inline constexpr double kPsnrCapDb = 300.0;

double mse(const Eigen::VectorXd& values_true, const Eigen::VectorXd& values_pred);

// Number of singular values sigma_i >= 1e-4 * sigma_1 (0 for the zero matrix).
int rank_estimate(const Eigen::MatrixXd& L);

std::string solver_name(SolverKind kind);

enum class MaskFamily { uniform, nonuniform };

// Phase-transition grid over (rank, observation fraction) cells; each cell
// runs `trials` seeded instances L0 = B*C with standard normal factors.
struct ExperimentGrid {
  std::vector<int> rank_axis;
  std::vector<double> fraction_axis;
  MaskFamily mask_family = MaskFamily::uniform;
  int trials = 10;
  std::uint64_t seed = 0;
  int size = 50;  // m = n
};

// Desk-scale defaults keep the whole grid tractable on a laptop.
ExperimentGrid desk_scale_grid(MaskFamily family, std::uint64_t seed);
// Full-scale configuration matching the published protocol (m = n = 100,
// 20 trials, fine axes). Hours of compute; opt-in.
ExperimentGrid full_scale_grid(MaskFamily family, std::uint64_t seed);

// Instance generation is deterministic in (grid seed, cell, trial) so that
// parallel execution and re-runs agree bit-for-bit, and so isomerism scans
// see the same instances the solvers saw.
Eigen::MatrixXd phase_instance_matrix(int size, int r0, std::uint64_t instance_seed);
SamplingSet phase_instance_mask(const ExperimentGrid& grid, double fraction,
                                std::uint64_t instance_seed);
std::uint64_t phase_instance_seed(const ExperimentGrid& grid, int r0, double fraction, int trial);

struct TrialOutcome {
  double psnr_db = 0.0;
  double rel_error = 0.0;
  bool success = false;  // PSNR >= 40
  bool exact = false;    // success and relative error <= 1e-4
};

struct PhaseCell {
  int r0 = 0;
  double fraction = 0.0;
  std::vector<std::vector<TrialOutcome>> outcomes;  // [solver][trial]
};

struct PhaseGridReport {
  ExperimentGrid grid;
  std::vector<SolverKind> solvers;
  std::vector<PhaseCell> cells;

  long cell_successes(std::size_t cell, std::size_t solver) const;
  long total_successes(std::size_t solver) const;
  // header: r0,fraction,solver,successes,trials
  std::string to_csv() const;
  // gnuplot-style success-rate matrix (rank rows x fraction columns)
  std::string to_matrix_dump(std::size_t solver) const;
};

PhaseGridReport run_phase_grid(const ExperimentGrid& grid, const std::vector<SolverKind>& solvers,
                               const SolverConfig& base = {});

struct RegionCell {
  int r0 = 0;
  double fraction = 0.0;
  std::vector<bool> isomeric;  // per trial, on the same instances as the phase grid
};

struct IsomerismRegionReport {
  ExperimentGrid grid;
  std::vector<RegionCell> cells;
  // header: r0,fraction,isomeric,trials
  std::string to_csv() const;
};

IsomerismRegionReport run_isomerism_region(const ExperimentGrid& grid);

// Relative condition number of the sine-circulant forecasting problem as a
// function of the kept fraction and the matrix size.
struct RcnSweepRow {
  int m = 0;
  double rho = 0.0;
  double gamma = 0.0;
};

std::vector<RcnSweepRow> run_rcn_sweep(const std::vector<int>& sizes,
                                       const std::vector<double>& rho_list);
std::string rcn_sweep_csv(const std::vector<RcnSweepRow>& rows);

// Sine series x_t = sin(2 pi t / m), t = 1..m; its circulant embedding has
// rank 2 and coherence 1 for every m > 2.
Eigen::VectorXd sine_series(int m);

// Rank-targeted fitting: for each solver and target rank, bisection on
// log(lambda) until the restored matrix has the requested estimated rank
// (best effort within max_probes solves), reporting the training-data MSE.
struct RankFitRow {
  SolverKind solver = SolverKind::convex;
  int target_rank = 0;
  int achieved_rank = 0;
  bool achieved = false;
  double lambda = 0.0;
  double train_mse = 0.0;
};

std::vector<RankFitRow> run_rank_constrained_fit(const PartialMatrix& partial,
                                                 const std::vector<SolverKind>& solvers,
                                                 const std::vector<int>& target_ranks,
                                                 const SolverConfig& base = {},
                                                 int max_probes = 30);
std::string rank_fit_csv(const std::vector<RankFitRow>& rows);

// Hold-out evaluation on a ratings-style partial matrix: a seeded split sets
// aside a test fraction, solvers train on the rest, and two reference
// predictors bracket them (uniform draw from the training value range, and
// the global training mean).
struct HoldoutRow {
  std::string method;
  double test_mse = 0.0;
};

std::vector<HoldoutRow> run_holdout_eval(const PartialMatrix& ratings, double holdout_fraction,
                                         const std::vector<SolverKind>& solvers,
                                         std::uint64_t seed, const SolverConfig& base = {});
std::string holdout_csv(const std::vector<HoldoutRow>& rows);

// Clipped low-rank synthetic ratings in [1,5] for protocol tests when the
// real data is unavailable.
PartialMatrix synthetic_ratings(int users, int items, int rank, double observe_fraction,
                                std::uint64_t seed);

}  // namespace isoplete
