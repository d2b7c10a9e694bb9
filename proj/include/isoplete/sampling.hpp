#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "isoplete/common.hpp"

namespace isoplete {

// 2D sampling set Omega with row views Omega_i, column views Omega^j and a
// transpose. Indices are 0-based in memory; file formats are 1-based.
// Immutable after construction, safe to share across threads.
class SamplingSet {
 public:
  SamplingSet() = default;

  // Validates bounds and rejects duplicates; entries are kept sorted row-major.
  SamplingSet(int rows, int cols, std::vector<std::pair<int, int>> pairs);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<int, int>>& entries() const { return entries_; }

  // Column indices observed in row i (sorted ascending).
  const std::vector<int>& row(int i) const;
  // Row indices observed in column j (sorted ascending).
  const std::vector<int>& column(int j) const;

  SamplingSet transpose() const;

  bool has_empty_row() const;
  bool has_empty_column() const;

  // Dense 0/1 indicator, handy for projection-style arithmetic.
  Eigen::ArrayXXd dense_mask() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::pair<int, int>> entries_;
  std::vector<std::vector<int>> row_view_;
  std::vector<std::vector<int>> col_view_;
};

// Bernoulli mask: each cell kept independently with probability rho.
// Deterministic for a fixed seed.
SamplingSet gen_uniform_mask(int rows, int cols, double rho, std::uint64_t seed);

// Deterministic circular band around the main diagonal covering roughly
// fraction*rows*cols cells. (i,j) is kept iff the circular distance
// min(d, m*n-d) with d = |i*n - j*m| (1-based indices) is at most
// fraction*m*n/2. Every row and column is hit once fraction >= max(1/m, 1/n).
SamplingSet gen_diagonal_band_mask(int rows, int cols, double fraction);

// Support of the circulant matrix of the binary vector y; each row and column
// ends up with exactly sum(y) entries.
SamplingSet mask_from_convolution(const std::vector<int>& y);

// Observed entries of an m x n matrix: one finite value per sampling pair,
// stored in the sampling set's entry order.
struct PartialMatrix {
  SamplingSet omega;
  Eigen::VectorXd values;

  PartialMatrix() = default;
  PartialMatrix(SamplingSet omega_in, Eigen::VectorXd values_in);

  int rows() const { return omega.rows(); }
  int cols() const { return omega.cols(); }

  // P_Omega(L0): observed values in place, zeros elsewhere.
  Eigen::MatrixXd zero_filled() const;

  // Restriction of a full matrix to the sampling set.
  static PartialMatrix observe(const Eigen::MatrixXd& M, SamplingSet omega);

  // Builds from parallel pair/value lists in any order; the pairs are sorted
  // jointly with their values into the set's canonical entry order.
  static PartialMatrix from_pairs(int rows, int cols, std::vector<std::pair<int, int>> pairs,
                                  std::vector<double> values);
};

}  // namespace isoplete
