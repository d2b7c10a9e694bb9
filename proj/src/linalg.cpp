#include "isoplete/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace isoplete {

namespace {

Eigen::BDCSVD<Eigen::MatrixXd> thin_svd(const Eigen::MatrixXd& M) {
  return Eigen::BDCSVD<Eigen::MatrixXd>(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

}  // namespace

SkinnySvd skinny_svd(const Eigen::MatrixXd& M, double rank_tol) {
  if (!M.allFinite()) throw InvalidInputError("skinny_svd: matrix has non-finite entries");
  if (rank_tol < 0.0) throw InvalidInputError("skinny_svd: negative rank tolerance");

  const auto svd = thin_svd(M);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? rank_tol * sv(0) : 0.0;
  int r = 0;
  while (r < sv.size() && sv(r) > cutoff && sv(r) > 0.0) ++r;

  SkinnySvd out;
  out.U = svd.matrixU().leftCols(r);
  out.S = sv.head(r);
  out.V = svd.matrixV().leftCols(r);
  return out;
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& M, double rank_tol) {
  const SkinnySvd f = skinny_svd(M, rank_tol);
  if (f.rank() == 0) return Eigen::MatrixXd::Zero(M.cols(), M.rows());
  return f.V * f.S.cwiseInverse().asDiagonal() * f.U.transpose();
}

Eigen::MatrixXd svt(const Eigen::MatrixXd& M, double tau) {
  if (tau < 0.0) throw InvalidInputError("svt: negative threshold");
  const auto svd = thin_svd(M);
  const Eigen::VectorXd& sv = svd.singularValues();
  int keep = 0;
  while (keep < sv.size() && sv(keep) > tau) ++keep;
  if (keep == 0) return Eigen::MatrixXd::Zero(M.rows(), M.cols());
  const Eigen::VectorXd shrunk = sv.head(keep).array() - tau;
  return svd.matrixU().leftCols(keep) * shrunk.asDiagonal() *
         svd.matrixV().leftCols(keep).transpose();
}

double coherence(const Eigen::MatrixXd& M, double rank_tol) {
  const SkinnySvd f = skinny_svd(M, rank_tol);
  const int r = f.rank();
  if (r == 0) throw InvalidInputError("coherence: undefined for the zero matrix");
  const double m = static_cast<double>(M.rows());
  const double n = static_cast<double>(M.cols());
  const double row_term = (m / r) * f.U.rowwise().squaredNorm().maxCoeff();
  const double col_term = (n / r) * f.V.rowwise().squaredNorm().maxCoeff();
  return std::max(row_term, col_term);
}

double spectral_norm(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double nuclear_norm(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues().sum();
}

int rank_above(const Eigen::MatrixXd& M, double abs_threshold) {
  if (M.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  const Eigen::VectorXd& sv = svd.singularValues();
  int r = 0;
  while (r < sv.size() && sv(r) > abs_threshold) ++r;
  return r;
}

}  // namespace isoplete
