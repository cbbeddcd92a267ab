#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ocad/csv.hpp"
#include "ocad/error.hpp"
#include "ocad/ocel.hpp"
#include "ocad/util.hpp"

namespace ocad {

using FeatureName = std::string;

// Named real-valued columns over the objects of one type; dense, row-major.
struct FeatureMatrix {
  ObjectType object_type;
  std::vector<ObjectId> row_ids;
  std::vector<FeatureName> columns;
  std::vector<double> values;

  FeatureMatrix() = default;
  FeatureMatrix(ObjectType type, std::vector<ObjectId> rows,
                std::vector<FeatureName> cols)
      : object_type(std::move(type)),
        row_ids(std::move(rows)),
        columns(std::move(cols)),
        values(row_ids.size() * columns.size(), 0.0) {}

  std::size_t rows() const { return row_ids.size(); }
  std::size_t cols() const { return columns.size(); }

  double& at(std::size_t r, std::size_t c) { return values[r * columns.size() + c]; }
  double at(std::size_t r, std::size_t c) const {
    return values[r * columns.size() + c];
  }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
    return out;
  }

  std::optional<std::size_t> column_index(const FeatureName& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] == name) return c;
    }
    return std::nullopt;
  }

  // Copy restricted to the given column positions, in the given order.
  FeatureMatrix select_columns(const std::vector<std::size_t>& keep) const {
    std::vector<FeatureName> names;
    names.reserve(keep.size());
    for (std::size_t c : keep) names.push_back(columns[c]);
    FeatureMatrix out(object_type, row_ids, std::move(names));
    for (std::size_t r = 0; r < rows(); ++r) {
      for (std::size_t j = 0; j < keep.size(); ++j) out.at(r, j) = at(r, keep[j]);
    }
    return out;
  }

  // Unique names, unique row ids, finite entries.
  void validate() const {
    if (values.size() != rows() * cols()) {
      throw Error(ErrorKind::kInvalidArgument, "matrix shape mismatch");
    }
    std::unordered_set<std::string> seen;
    for (const auto& c : columns) {
      if (!seen.insert(c).second) {
        throw Error(ErrorKind::kInvalidArgument, "duplicate feature name '" + c + "'");
      }
    }
    seen.clear();
    for (const auto& r : row_ids) {
      if (!seen.insert(r).second) {
        throw Error(ErrorKind::kInvalidArgument, "duplicate row id '" + r + "'");
      }
    }
    for (double v : values) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kInvalidArgument, "non-finite feature value");
      }
    }
  }
};

// First column `object_id`, then one column per feature.
inline std::string to_csv(const FeatureMatrix& m) {
  std::vector<std::string> header{"object_id"};
  header.insert(header.end(), m.columns.begin(), m.columns.end());
  std::string out = csv_row(header);
  std::vector<std::string> fields;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    fields.clear();
    fields.push_back(m.row_ids[r]);
    for (std::size_t c = 0; c < m.cols(); ++c) fields.push_back(format_double(m.at(r, c)));
    out += csv_row(fields);
  }
  return out;
}

inline FeatureMatrix feature_matrix_from_csv(std::string_view text,
                                             ObjectType type = {}) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "object_id") {
    throw Error(ErrorKind::kMalformedDocument, "feature CSV lacks object_id header");
  }
  std::vector<FeatureName> cols(rows[0].begin() + 1, rows[0].end());
  std::vector<ObjectId> ids;
  for (std::size_t i = 1; i < rows.size(); ++i) ids.push_back(rows[i].at(0));
  FeatureMatrix m(std::move(type), std::move(ids), std::move(cols));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto& row = rows[r + 1];
    if (row.size() != m.cols() + 1) {
      throw Error(ErrorKind::kMalformedDocument, "ragged feature CSV row");
    }
    for (std::size_t c = 0; c < m.cols(); ++c) m.at(r, c) = parse_double(row[c + 1]);
  }
  return m;
}

}  // namespace ocad
