#include "isoplete/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace isoplete {

SamplingSet::SamplingSet(int rows, int cols, std::vector<std::pair<int, int>> pairs)
    : rows_(rows), cols_(cols), entries_(std::move(pairs)) {
  if (rows < 0 || cols < 0) throw InvalidInputError("SamplingSet: negative dimensions");
  std::sort(entries_.begin(), entries_.end());
  row_view_.assign(static_cast<std::size_t>(rows_), {});
  col_view_.assign(static_cast<std::size_t>(cols_), {});
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto [i, j] = entries_[k];
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
      throw InvalidInputError("SamplingSet: index (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ") out of range");
    }
    if (k > 0 && entries_[k] == entries_[k - 1]) {
      throw InvalidInputError("SamplingSet: duplicate index (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ")");
    }
    row_view_[static_cast<std::size_t>(i)].push_back(j);
    col_view_[static_cast<std::size_t>(j)].push_back(i);
  }
}

const std::vector<int>& SamplingSet::row(int i) const {
  if (i < 0 || i >= rows_) throw InvalidInputError("SamplingSet::row: index out of range");
  return row_view_[static_cast<std::size_t>(i)];
}

const std::vector<int>& SamplingSet::column(int j) const {
  if (j < 0 || j >= cols_) throw InvalidInputError("SamplingSet::column: index out of range");
  return col_view_[static_cast<std::size_t>(j)];
}

SamplingSet SamplingSet::transpose() const {
  std::vector<std::pair<int, int>> flipped;
  flipped.reserve(entries_.size());
  for (const auto& [i, j] : entries_) flipped.emplace_back(j, i);
  return SamplingSet(cols_, rows_, std::move(flipped));
}

bool SamplingSet::has_empty_row() const {
  return std::any_of(row_view_.begin(), row_view_.end(),
                     [](const auto& v) { return v.empty(); });
}

bool SamplingSet::has_empty_column() const {
  return std::any_of(col_view_.begin(), col_view_.end(),
                     [](const auto& v) { return v.empty(); });
}

Eigen::ArrayXXd SamplingSet::dense_mask() const {
  Eigen::ArrayXXd mask = Eigen::ArrayXXd::Zero(rows_, cols_);
  for (const auto& [i, j] : entries_) mask(i, j) = 1.0;
  return mask;
}

SamplingSet gen_uniform_mask(int rows, int cols, double rho, std::uint64_t seed) {
  if (rho <= 0.0 || rho > 1.0) throw InvalidInputError("gen_uniform_mask: rho outside (0,1]");
  Rng rng(seed);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(rho * rows * cols * 1.1) + 16);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (rng.uniform() < rho) pairs.emplace_back(i, j);
    }
  }
  return SamplingSet(rows, cols, std::move(pairs));
}

SamplingSet gen_diagonal_band_mask(int rows, int cols, double fraction) {
  if (fraction <= 0.0 || fraction > 1.0) {
    throw InvalidInputError("gen_diagonal_band_mask: fraction outside (0,1]");
  }
  const double total = static_cast<double>(rows) * static_cast<double>(cols);
  const double half_width = fraction * total / 2.0;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      // 1-based indices in the distance formula
      const double d = std::abs(static_cast<double>(i + 1) * cols -
                                static_cast<double>(j + 1) * rows);
      const double circ = std::min(d, total - d);
      if (circ <= half_width) pairs.emplace_back(i, j);
    }
  }
  return SamplingSet(rows, cols, std::move(pairs));
}

SamplingSet mask_from_convolution(const std::vector<int>& y) {
  const int m = static_cast<int>(y.size());
  if (m == 0) throw InvalidInputError("mask_from_convolution: empty mask vector");
  for (int v : y) {
    if (v != 0 && v != 1) throw InvalidInputError("mask_from_convolution: vector must be binary");
  }
  std::vector<std::pair<int, int>> pairs;
  for (int t = 0; t < m; ++t) {
    for (int j = 0; j < m; ++j) {
      if (y[static_cast<std::size_t>(((t - j) % m + m) % m)] == 1) pairs.emplace_back(t, j);
    }
  }
  return SamplingSet(m, m, std::move(pairs));
}

PartialMatrix::PartialMatrix(SamplingSet omega_in, Eigen::VectorXd values_in)
    : omega(std::move(omega_in)), values(std::move(values_in)) {
  if (static_cast<std::size_t>(values.size()) != omega.size()) {
    throw InvalidInputError("PartialMatrix: one value per sampling pair required");
  }
  if (!values.allFinite()) throw InvalidInputError("PartialMatrix: non-finite observed value");
}

Eigen::MatrixXd PartialMatrix::zero_filled() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows(), cols());
  const auto& pairs = omega.entries();
  for (std::size_t k = 0; k < pairs.size(); ++k) out(pairs[k].first, pairs[k].second) = values(static_cast<Eigen::Index>(k));
  return out;
}

PartialMatrix PartialMatrix::from_pairs(int rows, int cols,
                                        std::vector<std::pair<int, int>> pairs,
                                        std::vector<double> values) {
  if (pairs.size() != values.size()) {
    throw InvalidInputError("PartialMatrix::from_pairs: one value per pair required");
  }
  std::vector<std::size_t> perm(pairs.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
  std::sort(perm.begin(), perm.end(),
            [&](std::size_t a, std::size_t b) { return pairs[a] < pairs[b]; });
  std::vector<std::pair<int, int>> sorted_pairs(pairs.size());
  Eigen::VectorXd sorted_values(static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < perm.size(); ++k) {
    sorted_pairs[k] = pairs[perm[k]];
    sorted_values(static_cast<Eigen::Index>(k)) = values[perm[k]];
  }
  return PartialMatrix(SamplingSet(rows, cols, std::move(sorted_pairs)),
                       std::move(sorted_values));
}

PartialMatrix PartialMatrix::observe(const Eigen::MatrixXd& M, SamplingSet omega) {
  if (M.rows() != omega.rows() || M.cols() != omega.cols()) {
    throw InvalidInputError("PartialMatrix::observe: dimension mismatch");
  }
  Eigen::VectorXd vals(static_cast<Eigen::Index>(omega.size()));
  const auto& pairs = omega.entries();
  for (std::size_t k = 0; k < pairs.size(); ++k) vals(static_cast<Eigen::Index>(k)) = M(pairs[k].first, pairs[k].second);
  return PartialMatrix(std::move(omega), std::move(vals));
}

}  // namespace isoplete
