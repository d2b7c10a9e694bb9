#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isoplete/sampling.hpp"

namespace isoplete {

// Dictionary/representation pair with compatible inner dimension p.
struct FactorPair {
  Eigen::MatrixXd A;  // m x p
  Eigen::MatrixXd X;  // p x n
};

struct VectorRecovery {
  Eigen::VectorXd x;       // minimal-l2 representation
  Eigen::VectorXd y_full;  // A * x
  double residual = 0.0;   // ||A_b x - y_b||
  bool least_squares_fallback = false;  // observations were inconsistent
};

// Minimal-l2 recovery of a vector in span{A} from the rows listed in
// observed_rows. Inconsistent observations degrade to least squares and are
// flagged instead of throwing.
VectorRecovery recover_vector_l2(const Eigen::MatrixXd& A, const std::vector<int>& observed_rows,
                                 const Eigen::VectorXd& y_b, double consistency_tol = 1e-8);

struct MatrixRecovery {
  Eigen::MatrixXd X;      // p x n, column-wise minimal Frobenius norm
  Eigen::MatrixXd L_hat;  // A * X
};

// Column-wise minimal-norm fit of the observed entries against a fixed
// dictionary A. Throws PreconditionError listing columns of Omega that are
// empty or sample a zero submatrix of A.
MatrixRecovery recover_matrix_frobenius(const Eigen::MatrixXd& A, const PartialMatrix& partial);

// A0 = U0 S0^{1/2} Q^T, X0 = Q S0^{1/2} V0^T with Q the identity embedding;
// ||A0||_F^2 = ||X0||_F^2 = nuclear norm of L0.
FactorPair exact_factor_pair_frobenius(const Eigen::MatrixXd& L0, int p);

// A0 = U0 S0^{2/3} Q^T, X0 = Q S0^{1/3} V0^T; the mixed objective
// ||A0||_* + ||X0||_F^2 / 2 equals (3/2) trace(S0^{2/3}).
FactorPair exact_factor_pair_schatten(const Eigen::MatrixXd& L0, int p);

struct CriticalPointReport {
  double x_residual = 0.0;  // distance of X from the X-side closed-form optimum
  double a_residual = 0.0;  // distance of A from the A-side closed-form optimum
  bool a_isomeric = false;       // dictionary is Omega-isomeric
  bool xT_isomeric = false;      // X^T is Omega^T-isomeric

  bool certified(double tol = 1e-6) const {
    return a_isomeric && xT_isomeric && x_residual < tol && a_residual < tol;
  }
};

// Checks the two closed-form fixed-point equations that characterize exact
// factor pairs: X must solve the minimal-norm fit given A, and A must equal
// the refit L_hat * X^+. Residuals are relative.
CriticalPointReport verify_critical_point(const FactorPair& pair, const PartialMatrix& partial);

}  // namespace isoplete
