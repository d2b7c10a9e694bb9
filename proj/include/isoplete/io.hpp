#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "isoplete/bench.hpp"
#include "isoplete/diagnostics.hpp"
#include "isoplete/sampling.hpp"
#include "isoplete/solvers.hpp"

namespace isoplete {

inline constexpr int kReportSchemaVersion = 1;

// All file formats use 1-based indices, UTF-8, LF line endings and '.' as the
// decimal separator. Parse failures throw ParseError naming the line.

// Dense matrix: one comma-separated row per line.
Eigen::MatrixXd load_dense_matrix(const std::string& path);
void save_dense_matrix(const std::string& path, const Eigen::MatrixXd& M);

// Mask: lines `i,j`.
SamplingSet load_mask(const std::string& path, int rows, int cols);
void save_mask(const std::string& path, const SamplingSet& omega);

// Partial matrix: lines `i,j,value`; duplicates and out-of-range entries are
// rejected with their line numbers.
PartialMatrix load_partial_matrix(const std::string& path, int rows, int cols);
void save_partial_matrix(const std::string& path, const PartialMatrix& partial);

// Series: one value per line.
Eigen::VectorXd load_series(const std::string& path);
void save_series(const std::string& path, const Eigen::VectorXd& x);

struct RatingTriplet {
  long user = 0;
  long item = 0;
  double rating = 0.0;
};

struct RatingTable {
  PartialMatrix matrix;        // densely re-indexed
  std::vector<long> user_ids;  // original id per dense row
  std::vector<long> item_ids;  // original id per dense column
};

// Ratings CSV `user,item,rating`. Users and items with fewer than min_count
// ratings are dropped, iterating until the counts are stable, then ids are
// re-indexed densely in ascending order.
RatingTable load_triplets(const std::string& path, int min_count = 1);
RatingTable build_rating_table(std::vector<RatingTriplet> triplets, int min_count);

nlohmann::json diagnostics_to_json(const DiagnosticsReport& report);
nlohmann::json solve_result_to_json(const SolveResult& result, const std::string& solver);
void write_json(const std::string& path, const nlohmann::json& doc);
void write_text(const std::string& path, const std::string& text);

}  // namespace isoplete
