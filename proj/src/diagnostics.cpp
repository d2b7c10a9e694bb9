#include "isoplete/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isoplete/linalg.hpp"

namespace isoplete {

namespace {

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& M, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), M.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = M.row(rows[k]);
  return out;
}

// Shared absolute rank threshold: kDiagnosticsRankTol * sigma_1 of the full
// matrix, applied identically to every sampled submatrix.
double diag_threshold(const Eigen::MatrixXd& M) {
  return kDiagnosticsRankTol * spectral_norm(M);
}

bool subset_preserves_rank(const Eigen::MatrixXd& M, const std::vector<int>& rows,
                           int full_rank, double threshold) {
  if (static_cast<int>(rows.size()) < full_rank) return false;
  return rank_above(select_rows(M, rows), threshold) == full_rank;
}

// Enumerates k-subsets of {0..m-1} in lexicographic order; returns false as
// soon as the visitor does.
template <typename Visitor>
bool for_each_subset(int m, int k, Visitor&& visit) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (!visit(idx)) return false;
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
    if (pos < 0) return true;
    ++idx[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < k; ++i) idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
  }
}

double subset_count(int m, int k) {
  double c = 1.0;
  k = std::min(k, m - k);
  for (int i = 1; i <= k; ++i) {
    c *= static_cast<double>(m - k + i) / static_cast<double>(i);
    if (c > 1e18) return c;  // saturate, only compared against the budget
  }
  return c;
}

std::vector<int> random_subset(int m, int k, Rng& rng) {
  // partial Fisher-Yates over 0..m-1
  std::vector<int> pool(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) {
    const int swap_with = rng.uniform_int(i, m - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(swap_with)]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

double gamma_pinv_route(const Eigen::MatrixXd& M, const Eigen::MatrixXd& sampled) {
  const Eigen::MatrixXd amplification = M * pinv(sampled);
  const double norm = spectral_norm(amplification);
  return 1.0 / (norm * norm);
}

double gamma_eigen_route(const SkinnySvd& f, const std::vector<int>& omega_rows) {
  // smallest eigenvalue of U^T D U = B^T B with B the sampled rows of U
  const Eigen::MatrixXd B = select_rows(f.U, omega_rows);
  const Eigen::MatrixXd gram = B.transpose() * B;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  return eig.eigenvalues().minCoeff();
}

// Column-space side of the witness: a nonzero U0*B with P_Omega(U0*B) = 0,
// supported on the first rank-deficient column of Omega.
std::optional<Eigen::MatrixXd> witness_in_column_space(const SkinnySvd& f,
                                                       const SamplingSet& omega,
                                                       double threshold) {
  const int r = f.rank();
  for (int j = 0; j < omega.cols(); ++j) {
    const auto& rows = omega.column(j);
    Eigen::VectorXd direction;
    if (rows.empty()) {
      direction = Eigen::VectorXd::Zero(r);
      direction(0) = 1.0;  // unconstrained column: lexicographic tie-break
    } else {
      const Eigen::MatrixXd C = select_rows(f.U, rows);
      Eigen::BDCSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
      const Eigen::VectorXd& sv = svd.singularValues();
      int rank_c = 0;
      while (rank_c < sv.size() && sv(rank_c) > threshold) ++rank_c;
      if (rank_c == r) continue;  // this column preserves rank
      direction = svd.matrixV().col(r - 1);
    }
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(f.U.rows(), omega.cols());
    delta.col(j) = f.U * direction;
    const double norm = delta.norm();
    if (norm <= 0.0) continue;
    delta /= norm;
    return delta;
  }
  return std::nullopt;
}

}  // namespace

KIsomerismResult is_k_isomeric(const Eigen::MatrixXd& M, int k, const KIsomerismMode& mode) {
  const int m = static_cast<int>(M.rows());
  if (k < 1 || k > m) throw InvalidInputError("is_k_isomeric: k outside [1, m]");
  const double threshold = diag_threshold(M);
  const int full_rank = rank_above(M, threshold);

  if (mode.kind == KIsomerismMode::exact) {
    if (subset_count(m, k) > static_cast<double>(mode.subset_budget)) {
      throw BudgetExceededError(
          "is_k_isomeric: C(" + std::to_string(m) + "," + std::to_string(k) +
          ") subsets exceed the exact-mode budget; use the randomized mode");
    }
    const bool ok = for_each_subset(m, k, [&](const std::vector<int>& rows) {
      return subset_preserves_rank(M, rows, full_rank, threshold);
    });
    return {ok, true};
  }

  Rng rng(mode.seed);
  for (int t = 0; t < mode.trials; ++t) {
    const std::vector<int> rows = random_subset(m, k, rng);
    if (!subset_preserves_rank(M, rows, full_rank, threshold)) return {false, true};
  }
  return {true, false};
}

int min_isomeric_k(const Eigen::MatrixXd& M, const KIsomerismMode& mode) {
  const int m = static_cast<int>(M.rows());
  const int full_rank = rank_above(M, diag_threshold(M));
  if (full_rank == 0) throw InvalidInputError("min_isomeric_k: zero matrix");
  // k-isomerism is monotone in k, and k >= rank is necessary
  int lo = full_rank;
  int hi = m;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (is_k_isomeric(M, mid, mode).isomeric) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

bool is_omega_isomeric(const Eigen::MatrixXd& M, const SamplingSet& omega) {
  if (M.rows() != omega.rows()) {
    throw InvalidInputError("is_omega_isomeric: row count of M must match Omega");
  }
  for (int j = 0; j < omega.cols(); ++j) {
    if (omega.column(j).empty()) {
      throw PreconditionError("is_omega_isomeric: column " + std::to_string(j + 1) +
                              " of Omega is empty");
    }
  }
  const double threshold = diag_threshold(M);
  const int full_rank = rank_above(M, threshold);
  for (int j = 0; j < omega.cols(); ++j) {
    if (!subset_preserves_rank(M, omega.column(j), full_rank, threshold)) return false;
  }
  return true;
}

bool is_pair_isomeric(const Eigen::MatrixXd& L, const SamplingSet& omega) {
  for (int i = 0; i < omega.rows(); ++i) {
    if (omega.row(i).empty()) {
      throw PreconditionError("is_pair_isomeric: row " + std::to_string(i + 1) +
                              " of Omega is empty");
    }
  }
  return is_omega_isomeric(L, omega) &&
         is_omega_isomeric(L.transpose(), omega.transpose());
}

double gamma_1d(const Eigen::MatrixXd& M, const std::vector<int>& omega_rows, GammaRoute route) {
  for (int i : omega_rows) {
    if (i < 0 || i >= M.rows()) throw InvalidInputError("gamma_1d: row index out of range");
  }
  const Eigen::MatrixXd sampled = select_rows(M, omega_rows);
  if (sampled.size() == 0 || sampled.isZero(0.0)) {
    throw InvalidInputError("gamma_1d: sampled submatrix is zero");
  }
  if (route == GammaRoute::pinv) return gamma_pinv_route(M, sampled);

  const SkinnySvd f = skinny_svd(M, kDiagnosticsRankTol);
  const double threshold = diag_threshold(M);
  if (rank_above(sampled, threshold) != f.rank()) {
    throw PreconditionError("gamma_1d: eigen route requires the sampled submatrix to preserve rank");
  }
  return gamma_eigen_route(f, omega_rows);
}

Gamma2dResult gamma_2d(const Eigen::MatrixXd& M, const SamplingSet& omega, GammaRoute route) {
  if (M.rows() != omega.rows()) throw InvalidInputError("gamma_2d: row count of M must match Omega");
  const double threshold = diag_threshold(M);
  const SkinnySvd f = skinny_svd(M, kDiagnosticsRankTol);

  Gamma2dResult out;
  out.per_column.resize(omega.cols());
  for (int j = 0; j < omega.cols(); ++j) {
    const auto& rows = omega.column(j);
    if (rows.empty()) {
      throw PreconditionError("gamma_2d: column " + std::to_string(j + 1) + " of Omega is empty");
    }
    const Eigen::MatrixXd sampled = select_rows(M, rows);
    if (sampled.isZero(0.0)) {
      throw InvalidInputError("gamma_2d: sampled submatrix of column " + std::to_string(j + 1) +
                              " is zero");
    }
    if (rank_above(sampled, threshold) != f.rank()) out.rank_deficient_columns.push_back(j);
    out.per_column(j) = route == GammaRoute::pinv ? gamma_pinv_route(M, sampled)
                                                  : gamma_eigen_route(f, rows);
  }
  out.value = out.per_column.minCoeff();
  return out;
}

double gamma_pair(const Eigen::MatrixXd& L, const SamplingSet& omega, GammaRoute route) {
  const double cols_side = gamma_2d(L, omega, route).value;
  const double rows_side = gamma_2d(L.transpose(), omega.transpose(), route).value;
  return std::min(cols_side, rows_side);
}

bool sufficient_coverage_check(double mu0, int r0, double rho, double alpha) {
  if (mu0 < 1.0) throw InvalidInputError("sufficient_coverage_check: coherence below 1");
  if (r0 < 1) throw InvalidInputError("sufficient_coverage_check: rank below 1");
  if (alpha < 0.0 || alpha >= 1.0) {
    throw InvalidInputError("sufficient_coverage_check: alpha outside [0,1)");
  }
  return rho > 1.0 - (1.0 - alpha) / (mu0 * static_cast<double>(r0));
}

double min_line_fraction(const SamplingSet& omega) {
  double rho = 1.0;
  for (int i = 0; i < omega.rows(); ++i) {
    rho = std::min(rho, static_cast<double>(omega.row(i).size()) / omega.cols());
  }
  for (int j = 0; j < omega.cols(); ++j) {
    rho = std::min(rho, static_cast<double>(omega.column(j).size()) / omega.rows());
  }
  return rho;
}

std::optional<Eigen::MatrixXd> witness_nonidentifiability(const Eigen::MatrixXd& L,
                                                          const SamplingSet& omega) {
  if (L.rows() != omega.rows() || L.cols() != omega.cols()) {
    throw InvalidInputError("witness_nonidentifiability: dimension mismatch");
  }
  const SkinnySvd f = skinny_svd(L, kDiagnosticsRankTol);
  if (f.rank() == 0) return std::nullopt;  // the zero matrix has no nonzero same-space perturbation
  const double threshold = diag_threshold(L);

  if (auto delta = witness_in_column_space(f, omega, threshold)) return delta;

  // column side is isomeric; try rows of L via the transposed problem
  SkinnySvd ft;
  ft.U = f.V;
  ft.S = f.S;
  ft.V = f.U;
  if (auto delta_t = witness_in_column_space(ft, omega.transpose(), threshold)) {
    return delta_t->transpose().eval();
  }
  return std::nullopt;
}

DiagnosticsReport diagnose(const Eigen::MatrixXd& L, const SamplingSet& omega, GammaRoute route) {
  if (L.rows() != omega.rows() || L.cols() != omega.cols()) {
    throw InvalidInputError("diagnose: dimension mismatch");
  }
  if (L.isZero(0.0)) throw InvalidInputError("diagnose: zero matrix");
  for (int i = 0; i < omega.rows(); ++i) {
    if (omega.row(i).empty()) {
      throw PreconditionError("diagnose: row " + std::to_string(i + 1) + " of Omega is empty");
    }
  }
  for (int j = 0; j < omega.cols(); ++j) {
    if (omega.column(j).empty()) {
      throw PreconditionError("diagnose: column " + std::to_string(j + 1) + " of Omega is empty");
    }
  }

  DiagnosticsReport report;
  report.rank = rank_above(L, diag_threshold(L));
  report.coherence = coherence(L);
  report.omega_isomeric = is_omega_isomeric(L, omega);
  report.omegaT_isomeric = is_omega_isomeric(L.transpose(), omega.transpose());

  const Gamma2dResult cols_side = gamma_2d(L, omega, route);
  const Gamma2dResult rows_side = gamma_2d(L.transpose(), omega.transpose(), route);
  report.gamma_omega = cols_side.value;
  report.gamma_omegaT = rows_side.value;
  report.gamma_pair = std::min(cols_side.value, rows_side.value);
  report.per_column_gammas = cols_side.per_column;
  report.per_row_gammas = rows_side.per_column;
  report.rank_deficient_columns = cols_side.rank_deficient_columns;
  report.rank_deficient_rows = rows_side.rank_deficient_columns;

  if (!(report.omega_isomeric && report.omegaT_isomeric)) {
    report.witness = witness_nonidentifiability(L, omega);
  }
  return report;
}

}  // namespace isoplete
