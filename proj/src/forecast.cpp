#include "isoplete/forecast.hpp"

#include <vector>

namespace isoplete {

Eigen::MatrixXd convolution_matrix(const Eigen::VectorXd& x) {
  const int m = static_cast<int>(x.size());
  if (m < 1) throw InvalidInputError("convolution_matrix: empty series");
  Eigen::MatrixXd out(m, m);
  for (int j = 0; j < m; ++j) {
    for (int t = 0; t < m; ++t) out(t, j) = x(((t - j) % m + m) % m);
  }
  return out;
}

Eigen::VectorXd deconvolve(const Eigen::MatrixXd& L) {
  if (L.rows() != L.cols()) throw InvalidInputError("deconvolve: square matrix required");
  const int m = static_cast<int>(L.rows());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  for (int t = 0; t < m; ++t) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += L((t + j) % m, j);
    x(t) = acc / m;
  }
  return x;
}

SolveResult run_solver(SolverKind kind, const PartialMatrix& partial, const SolverConfig& cfg) {
  switch (kind) {
    case SolverKind::convex:
      return solve_convex_nuclear(partial, cfg);
    case SolverKind::isodp:
      return solve_isodp(partial, cfg);
    case SolverKind::bilinear:
      return solve_bilinear_frobenius(partial, cfg);
  }
  throw InvalidInputError("run_solver: unknown solver kind");
}

ForecastResult forecast(const SeriesTask& task) {
  const int m = task.length;
  const int l = static_cast<int>(task.observed.size());
  if (m < 1) throw InvalidInputError("forecast: series length below 1");
  if (l < 1 || l > m) throw InvalidInputError("forecast: observed prefix length outside [1, m]");

  std::vector<int> y(static_cast<std::size_t>(m), 0);
  for (int t = 0; t < l; ++t) y[static_cast<std::size_t>(t)] = 1;
  SamplingSet omega = mask_from_convolution(y);

  // entry (t,j) of the embedded matrix carries x[(t-j) mod m], known exactly
  // where the embedded mask is one
  const auto& pairs = omega.entries();
  Eigen::VectorXd values(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [t, j] = pairs[k];
    values(static_cast<Eigen::Index>(k)) = task.observed(((t - j) % m + m) % m);
  }
  PartialMatrix partial(std::move(omega), std::move(values));

  ForecastResult out;
  out.solve = run_solver(task.solver, partial, task.config);
  out.x_hat = deconvolve(out.solve.L_hat);
  out.report = diagnose(out.solve.L_hat, partial.omega);
  return out;
}

}  // namespace isoplete
