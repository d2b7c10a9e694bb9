#pragma once

#include <Eigen/Dense>

#include "isoplete/diagnostics.hpp"
#include "isoplete/solvers.hpp"

namespace isoplete {

// Circulant embedding of a series: column j is x circularly shifted downward
// by j-1 positions, i.e. entry (t,j) = x[(t-j) mod m].
Eigen::MatrixXd convolution_matrix(const Eigen::VectorXd& x);

// Inverse of the embedding by orbit averaging: x[t] is the mean of the
// circulant orbit {L[(t+j) mod m, j]}. Exact on circulant input; otherwise
// the least-squares projection onto circulants.
Eigen::VectorXd deconvolve(const Eigen::MatrixXd& L);

enum class SolverKind { convex, isodp, bilinear };

SolveResult run_solver(SolverKind kind, const PartialMatrix& partial, const SolverConfig& cfg);

struct SeriesTask {
  Eigen::VectorXd observed;  // prefix values, length l
  int length = 0;            // full series length m
  SolverKind solver = SolverKind::convex;
  SolverConfig config;
};

struct ForecastResult {
  Eigen::VectorXd x_hat;      // completed series, length m
  DiagnosticsReport report;   // diagnostics of the recovered embedded matrix
  SolveResult solve;
};

// Completes a series from its observed prefix: embeds the knowns through the
// circulant map, completes the resulting partial matrix, and de-embeds.
ForecastResult forecast(const SeriesTask& task);

}  // namespace isoplete
