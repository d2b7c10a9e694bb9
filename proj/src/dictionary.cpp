#include "isoplete/dictionary.hpp"

#include <cmath>
#include <string>

#include "isoplete/diagnostics.hpp"
#include "isoplete/linalg.hpp"

namespace isoplete {

namespace {

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& M, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), M.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = M.row(rows[k]);
  return out;
}

// Q = first r columns of the p x p identity; the constructions hold for any
// column-orthonormal Q, a fixed one keeps results deterministic.
Eigen::MatrixXd identity_embedding(int p, int r) {
  return Eigen::MatrixXd::Identity(p, r);
}

FactorPair factor_pair_with_powers(const Eigen::MatrixXd& L0, int p, double a_power,
                                   double x_power) {
  const SkinnySvd f = skinny_svd(L0);
  if (p < f.rank()) {
    throw InvalidInputError("exact factor pair: inner dimension below rank(L0)");
  }
  const Eigen::MatrixXd Q = identity_embedding(p, f.rank());
  FactorPair pair;
  pair.A = f.U * f.S.array().pow(a_power).matrix().asDiagonal() * Q.transpose();
  pair.X = Q * f.S.array().pow(x_power).matrix().asDiagonal() * f.V.transpose();
  return pair;
}

}  // namespace

VectorRecovery recover_vector_l2(const Eigen::MatrixXd& A, const std::vector<int>& observed_rows,
              const Eigen::VectorXd& y_b, double consistency_tol) {
  if (static_cast<Eigen::Index>(observed_rows.size()) != y_b.size()) {
    throw InvalidInputError("recover_vector_l2: one observation per sampled row required");
  }
  const Eigen::MatrixXd A_b = select_rows(A, observed_rows);
  if (A_b.size() == 0 || A_b.isZero(0.0)) {
    throw InvalidInputError("recover_vector_l2: sampled dictionary rows are zero");
  }
  VectorRecovery out;
  out.x = pinv(A_b) * y_b;
  out.y_full = A * out.x;
  out.residual = (A_b * out.x - y_b).norm();
  out.least_squares_fallback = out.residual > consistency_tol * std::max(1.0, y_b.norm());
  return out;
}

MatrixRecovery recover_matrix_frobenius(const Eigen::MatrixXd& A, const PartialMatrix& partial) {
  if (A.rows() != partial.rows()) {
    throw InvalidInputError("recover_matrix_frobenius: dictionary rows must match Omega");
  }
  const SamplingSet& omega = partial.omega;
  std::string offending;
  for (int j = 0; j < omega.cols(); ++j) {
    if (omega.column(j).empty()) offending += (offending.empty() ? "" : ",") + std::to_string(j + 1);
  }
  if (!offending.empty()) {
    throw PreconditionError("recover_matrix_frobenius: empty Omega columns " + offending);
  }

  const Eigen::MatrixXd observed = partial.zero_filled();
  MatrixRecovery out;
  out.X.resize(A.cols(), omega.cols());
  for (int j = 0; j < omega.cols(); ++j) {
    const auto& rows = omega.column(j);
    const Eigen::MatrixXd A_j = select_rows(A, rows);
    if (A_j.isZero(0.0)) {
      throw PreconditionError("recover_matrix_frobenius: zero sampled dictionary in column " +
                              std::to_string(j + 1));
    }
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) y(static_cast<Eigen::Index>(k)) = observed(rows[k], j);
    out.X.col(j) = pinv(A_j) * y;
  }
  out.L_hat = A * out.X;
  return out;
}

FactorPair exact_factor_pair_frobenius(const Eigen::MatrixXd& L0, int p) {
  return factor_pair_with_powers(L0, p, 0.5, 0.5);
}

FactorPair exact_factor_pair_schatten(const Eigen::MatrixXd& L0, int p) {
  return factor_pair_with_powers(L0, p, 2.0 / 3.0, 1.0 / 3.0);
}

CriticalPointReport verify_critical_point(const FactorPair& pair, const PartialMatrix& partial) {
  CriticalPointReport report;
  try {
    report.a_isomeric = is_omega_isomeric(pair.A, partial.omega);
    report.xT_isomeric = is_omega_isomeric(pair.X.transpose(), partial.omega.transpose());
  } catch (const PreconditionError&) {
    // empty lines: the hypotheses cannot hold
  }

  const MatrixRecovery x_side = recover_matrix_frobenius(pair.A, partial);
  report.x_residual = (pair.X - x_side.X).norm() / std::max(1.0, pair.X.norm());

  const Eigen::MatrixXd a_opt = x_side.L_hat * pinv(pair.X);
  report.a_residual = (pair.A - a_opt).norm() / std::max(1.0, pair.A.norm());
  return report;
}

}  // namespace isoplete
