#pragma once

#include <Eigen/Dense>

#include "isoplete/common.hpp"

namespace isoplete {

// Default relative cutoff for internal rank decisions.
inline constexpr double kDefaultRankTol = 1e-10;

// Relative cutoff shared by all diagnostics rank comparisons; it is applied to
// submatrices with the threshold taken from the full matrix.
inline constexpr double kDiagnosticsRankTol = 1e-9;

// Skinny SVD: only the r columns belonging to singular values above the
// cutoff are kept. r = 0 is legal and yields empty factors.
struct SkinnySvd {
  Eigen::MatrixXd U;  // m x r, column-orthonormal
  Eigen::VectorXd S;  // r, strictly positive, non-increasing
  Eigen::MatrixXd V;  // n x r, column-orthonormal

  int rank() const { return static_cast<int>(S.size()); }
  Eigen::MatrixXd reconstruct() const { return U * S.asDiagonal() * V.transpose(); }
};

// Keeps singular values sigma_i > rank_tol * sigma_1. Throws InvalidInputError
// on non-finite entries.
SkinnySvd skinny_svd(const Eigen::MatrixXd& M, double rank_tol = kDefaultRankTol);

// Moore-Penrose pseudo-inverse V * S^-1 * U^T built from skinny_svd with the
// same cutoff, so near-zero singular values are dropped rather than inverted.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& M, double rank_tol = kDefaultRankTol);

// Singular value thresholding: U * max(S - tau, 0) * V^T.
Eigen::MatrixXd svt(const Eigen::MatrixXd& M, double tau);

// mu(M) = max of (m/r)*max_i ||U_i||^2 and (n/r)*max_j ||V_j||^2.
// Throws InvalidInputError on the zero matrix.
double coherence(const Eigen::MatrixXd& M, double rank_tol = kDefaultRankTol);

// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& M);

// Sum of singular values.
double nuclear_norm(const Eigen::MatrixXd& M);

// Number of singular values strictly above an absolute threshold.
int rank_above(const Eigen::MatrixXd& M, double abs_threshold);

}  // namespace isoplete
