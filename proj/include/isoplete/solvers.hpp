#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "isoplete/dictionary.hpp"
#include "isoplete/sampling.hpp"

namespace isoplete {

// Geometric lambda-decrease schedule for the spectral solvers (nuclear-norm
// and mixed-norm): stages run at a fixed lambda and warm-start the next one.
// start_lambda <= 0 picks a data-driven start; a factor outside (0,1)
// requests a single stage at the final lambda.
struct ContinuationSchedule {
  double start_lambda = 0.0;
  double factor = 0.5;
};

// Per-iteration internals of the alternating solvers, exposed so optimality
// of each subproblem can be audited from the outside.
struct IterationSnapshot {
  int iter = 0;
  double lambda = 0.0;
  double mu = 0.0;                    // proximal weight (nuclear-norm step only)
  const Eigen::MatrixXd* A_prev = nullptr;
  const Eigen::MatrixXd* X = nullptr;
  const Eigen::MatrixXd* prox_target = nullptr;  // argument handed to the SVT step
  const Eigen::MatrixXd* A_next = nullptr;
};

using IterationObserver = std::function<void(const IterationSnapshot&)>;

struct SolverConfig {
  std::optional<double> lambda;  // unset: solver-specific default; must be > 0 when set
  std::optional<int> p;          // inner dimension, default m
  int max_iters = 500;
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  bool random_init = false;      // alternating solvers: random dictionary instead of identity
  std::optional<ContinuationSchedule> continuation;  // nuclear-norm and mixed-norm solvers
  IterationObserver observer;    // alternating solvers
};

enum class StopReason { converged, max_iters };

struct SolveResult {
  Eigen::MatrixXd L_hat;
  std::optional<FactorPair> factors;
  std::vector<double> objective_trace;
  int iters = 0;
  StopReason stop_reason = StopReason::max_iters;
  double fit_mse = 0.0;  // mean squared error on the observed entries
};

// Nuclear-norm completion solved as the penalized surrogate
//   min lambda ||L||_* + 1/2 ||P_Omega(L - L0)||_F^2
// by proximal gradient (unit step SVT), with geometric lambda continuation
// and warm starts. The trace holds the per-stage penalized objective.
SolveResult solve_convex_nuclear(const PartialMatrix& partial, const SolverConfig& cfg = {});

// Penalized bilinear Frobenius program
//   min lambda/2 (||A||_F^2 + ||X||_F^2) + 1/2 ||P_Omega(AX - L0)||_F^2,
// alternating exact ridge solves per column of X and per row of A.
SolveResult solve_bilinear_frobenius(const PartialMatrix& partial, const SolverConfig& cfg = {});

// Mixed-norm dictionary pursuit
//   min lambda (||A||_* + 1/2 ||X||_F^2) + 1/2 ||P_Omega(AX - L0)||_F^2,
// alternating a ridge X-step with a proximal SVT A-step whose weight is the
// squared operator norm of the fresh X. Runs the same lambda continuation as
// the convex solver by default; each stage is the plain alternating-proximal
// loop at its own lambda, and the trace holds per-stage objectives.
SolveResult solve_isodp(const PartialMatrix& partial, const SolverConfig& cfg = {});

// (3/2) * sum of sigma_i^{2/3}: the exact lower bound of
// ||A||_* + 1/2 ||X||_F^2 over all factorizations AX = L.
double schatten23_objective(const Eigen::MatrixXd& L);

}  // namespace isoplete
