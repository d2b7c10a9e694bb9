#include "isoplete/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace isoplete {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& text, const std::string& path, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": not a number: '" + text + "'");
  }
}

long parse_long(const std::string& text, const std::string& path, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const long value = std::stol(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": not an integer: '" + text + "'");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  return out;
}

}  // namespace

Eigen::MatrixXd load_dense_matrix(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto fields = split_csv(lines[k]);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, path, k + 1));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path + ":" + std::to_string(k + 1) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": empty matrix file");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return M;
}

void save_dense_matrix(const std::string& path, const Eigen::MatrixXd& M) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j > 0) out << ',';
      out << fmt_double(M(i, j));
    }
    out << '\n';
  }
}

SamplingSet load_mask(const std::string& path, int rows, int cols) {
  const auto lines = read_lines(path);
  std::vector<std::pair<int, int>> pairs;
  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto fields = split_csv(lines[k]);
    if (fields.size() != 2) {
      throw ParseError(path + ":" + std::to_string(k + 1) + ": expected `i,j`");
    }
    const long i = parse_long(fields[0], path, k + 1);
    const long j = parse_long(fields[1], path, k + 1);
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw ParseError(path + ":" + std::to_string(k + 1) + ": index out of range");
    }
    const std::pair<int, int> entry{static_cast<int>(i - 1), static_cast<int>(j - 1)};
    if (!seen.insert(entry).second) {
      throw ParseError(path + ":" + std::to_string(k + 1) + ": duplicate index");
    }
    pairs.push_back(entry);
  }
  return SamplingSet(rows, cols, std::move(pairs));
}

void save_mask(const std::string& path, const SamplingSet& omega) {
  auto out = open_out(path);
  for (const auto& [i, j] : omega.entries()) out << (i + 1) << ',' << (j + 1) << '\n';
}

PartialMatrix load_partial_matrix(const std::string& path, int rows, int cols) {
  const auto lines = read_lines(path);
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> values;
  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto fields = split_csv(lines[k]);
    if (fields.size() != 3) {
      throw ParseError(path + ":" + std::to_string(k + 1) + ": expected `i,j,value`");
    }
    const long i = parse_long(fields[0], path, k + 1);
    const long j = parse_long(fields[1], path, k + 1);
    const double value = parse_double(fields[2], path, k + 1);
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw ParseError(path + ":" + std::to_string(k + 1) + ": index out of range");
    }
    const std::pair<int, int> entry{static_cast<int>(i - 1), static_cast<int>(j - 1)};
    if (!seen.insert(entry).second) {
      throw ParseError(path + ":" + std::to_string(k + 1) + ": duplicate index");
    }
    pairs.push_back(entry);
    values.push_back(value);
  }
  return PartialMatrix::from_pairs(rows, cols, std::move(pairs), std::move(values));
}

void save_partial_matrix(const std::string& path, const PartialMatrix& partial) {
  auto out = open_out(path);
  const auto& pairs = partial.omega.entries();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    out << (pairs[k].first + 1) << ',' << (pairs[k].second + 1) << ','
        << fmt_double(partial.values(static_cast<Eigen::Index>(k))) << '\n';
  }
}

Eigen::VectorXd load_series(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<double> values;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    values.push_back(parse_double(lines[k], path, k + 1));
  }
  Eigen::VectorXd x(static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) x(static_cast<Eigen::Index>(k)) = values[k];
  return x;
}

void save_series(const std::string& path, const Eigen::VectorXd& x) {
  auto out = open_out(path);
  for (Eigen::Index k = 0; k < x.size(); ++k) out << fmt_double(x(k)) << '\n';
}

RatingTable build_rating_table(std::vector<RatingTriplet> triplets, int min_count) {
  if (min_count < 1) throw InvalidInputError("build_rating_table: min_count below 1");
  // fixed-point filter: dropping a user can push an item below threshold and
  // vice versa, so iterate until stable
  bool changed = true;
  while (changed && !triplets.empty()) {
    changed = false;
    std::map<long, int> user_counts, item_counts;
    for (const auto& t : triplets) {
      ++user_counts[t.user];
      ++item_counts[t.item];
    }
    std::vector<RatingTriplet> kept;
    kept.reserve(triplets.size());
    for (const auto& t : triplets) {
      if (user_counts[t.user] >= min_count && item_counts[t.item] >= min_count) {
        kept.push_back(t);
      } else {
        changed = true;
      }
    }
    triplets = std::move(kept);
  }

  std::set<long> users, items;
  for (const auto& t : triplets) {
    users.insert(t.user);
    items.insert(t.item);
  }
  RatingTable table;
  table.user_ids.assign(users.begin(), users.end());
  table.item_ids.assign(items.begin(), items.end());
  std::map<long, int> user_index, item_index;
  for (std::size_t k = 0; k < table.user_ids.size(); ++k) user_index[table.user_ids[k]] = static_cast<int>(k);
  for (std::size_t k = 0; k < table.item_ids.size(); ++k) item_index[table.item_ids[k]] = static_cast<int>(k);

  std::vector<std::pair<int, int>> pairs;
  std::vector<double> values;
  pairs.reserve(triplets.size());
  for (const auto& t : triplets) {
    pairs.emplace_back(user_index[t.user], item_index[t.item]);
    values.push_back(t.rating);
  }
  table.matrix =
      PartialMatrix::from_pairs(static_cast<int>(table.user_ids.size()),
                                static_cast<int>(table.item_ids.size()), std::move(pairs),
                                std::move(values));
  return table;
}

RatingTable load_triplets(const std::string& path, int min_count) {
  const auto lines = read_lines(path);
  std::vector<RatingTriplet> triplets;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto fields = split_csv(lines[k]);
    if (fields.size() != 3) {
      throw ParseError(path + ":" + std::to_string(k + 1) + ": expected `user,item,rating`");
    }
    RatingTriplet t;
    t.user = parse_long(fields[0], path, k + 1);
    t.item = parse_long(fields[1], path, k + 1);
    t.rating = parse_double(fields[2], path, k + 1);
    triplets.push_back(t);
  }
  return build_rating_table(std::move(triplets), min_count);
}

nlohmann::json diagnostics_to_json(const DiagnosticsReport& report) {
  nlohmann::json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["rank"] = report.rank;
  doc["coherence"] = report.coherence;
  doc["omega_isomeric"] = report.omega_isomeric;
  doc["omegaT_isomeric"] = report.omegaT_isomeric;
  doc["gamma_omega"] = report.gamma_omega;
  doc["gamma_omegaT"] = report.gamma_omegaT;
  doc["gamma_pair"] = report.gamma_pair;
  doc["per_column_gammas"] = std::vector<double>(
      report.per_column_gammas.data(), report.per_column_gammas.data() + report.per_column_gammas.size());
  doc["per_row_gammas"] = std::vector<double>(
      report.per_row_gammas.data(), report.per_row_gammas.data() + report.per_row_gammas.size());
  doc["rank_deficient_columns"] = report.rank_deficient_columns;
  doc["rank_deficient_rows"] = report.rank_deficient_rows;
  if (report.witness) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < report.witness->rows(); ++i) {
      std::vector<double> row;
      for (Eigen::Index j = 0; j < report.witness->cols(); ++j) row.push_back((*report.witness)(i, j));
      rows.push_back(std::move(row));
    }
    doc["witness"] = rows;
  } else {
    doc["witness"] = nullptr;
  }
  return doc;
}

nlohmann::json solve_result_to_json(const SolveResult& result, const std::string& solver) {
  nlohmann::json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["solver"] = solver;
  doc["iters"] = result.iters;
  doc["stop_reason"] = result.stop_reason == StopReason::converged ? "converged" : "max_iters";
  doc["fit_mse"] = result.fit_mse;
  doc["objective_trace"] = result.objective_trace;
  doc["rank_estimate"] = rank_estimate(result.L_hat);
  return doc;
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace isoplete
