#pragma once

// Per-feature anomaly scores: the score-weighted mean of normalized feature
// values, and the report built on value indicators.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ocad/csv.hpp"
#include "ocad/detect.hpp"
#include "ocad/error.hpp"
#include "ocad/feature_matrix.hpp"
#include "ocad/features.hpp"
#include "ocad/ocel.hpp"
#include "ocad/util.hpp"

namespace ocad {

struct FeatureScoreRow {
  FeatureName feature;
  std::size_t support_count = 0;
  double fea_score = 0.0;
  // Report only: other features whose indicator column is identical to this
  // row's, folded into it.
  std::vector<FeatureName> equivalents;
};

// Rows sorted ascending by fea_score (ties by feature name).
struct FeatureScoreTable {
  std::vector<FeatureScoreRow> rows;
};

namespace detail {

inline void check_alignment(const FeatureMatrix& f, const ScoreVector& s) {
  if (f.row_ids != s.object_ids) {
    throw Error(ErrorKind::kRowMismatch,
                "feature rows and score vector list different objects or orders");
  }
}

inline void sort_table(FeatureScoreTable& t) {
  std::stable_sort(t.rows.begin(), t.rows.end(),
                   [](const FeatureScoreRow& a, const FeatureScoreRow& b) {
                     if (a.fea_score != b.fea_score) return a.fea_score < b.fea_score;
                     return a.feature < b.feature;
                   });
}

}  // namespace detail

// sum_o score(o) * norm(o)(sigma) / |O|, summed in row order. Support counts
// are taken from `raw` when given (the pre-normalization matrix, same shape),
// else from the normalized values.
inline FeatureScoreTable feature_scores(const NormalizedFeatureMatrix& fnorm,
                                        const ScoreVector& scores,
                                        const FeatureMatrix* raw = nullptr) {
  const FeatureMatrix& m = fnorm.matrix;
  detail::check_alignment(m, scores);
  if (raw && (raw->row_ids != m.row_ids || raw->columns != m.columns)) {
    throw Error(ErrorKind::kRowMismatch, "raw matrix does not match normalized matrix");
  }
  const double n = static_cast<double>(m.rows());
  FeatureScoreTable t;
  t.rows.reserve(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double acc = 0.0;
    std::size_t support = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      acc += scores.scores[r] * m.at(r, c) / n;
      const double source = raw ? raw->at(r, c) : m.at(r, c);
      if (source != 0.0) ++support;
    }
    t.rows.push_back({m.columns[c], support, acc});
  }
  detail::sort_table(t);
  return t;
}

// "lifecyclecontainsCancel Purchase Order" -> "lifecyclecontains Cancel
// Purchase Order"; indicator names "(sigma=v)" -> "(<readable sigma> = v)".
inline std::string humanize_feature(const FeatureName& name) {
  if (name.size() > 2 && name.front() == '(' && name.back() == ')') {
    const std::string inner = name.substr(1, name.size() - 2);
    const auto eq = inner.rfind('=');
    if (eq != std::string::npos) {
      return "(" + humanize_feature(inner.substr(0, eq)) + " = " + inner.substr(eq + 1) + ")";
    }
  }
  namespace fp = feature_prefix;
  if (name.rfind(fp::kProp, 0) == 0 && name.size() > 4) {
    return "prop " + humanize_feature(name.substr(4));
  }
  static const char* const kPrefixes[] = {
      fp::kContains, fp::kStartsWith, fp::kNumValue, fp::kStrValue, fp::kDfg,
      fp::kInteractions, fp::kCreation, fp::kCobirth, fp::kCodeath};
  for (const char* prefix : kPrefixes) {
    const std::string p(prefix);
    if (name.size() > p.size() && name.rfind(p, 0) == 0) {
      std::string head = p;
      if (head.back() == '_') head.pop_back();
      return head + " " + name.substr(p.size());
    }
  }
  return name;
}

// explode_values -> normalize -> feature_scores, then keeping the `top_n`
// most negative rows with humanized names. Two report-level reductions apply
// before scoring: constant columns are dropped (they carry -mean(score)
// without discriminating anything), and columns identical to an earlier
// column are folded into it as equivalents (identical columns have identical
// scores, and one planted pattern typically surfaces as several of them).
inline FeatureScoreTable anomalous_feature_report(
    const FeatureMatrix& f, const ScoreVector& scores, std::size_t top_n,
    std::size_t max_distinct = kDefaultMaxDistinct, double epsilon = kDefaultEpsilon) {
  detail::check_alignment(f, scores);
  if (top_n == 0) return {};
  const FeatureMatrix exploded = explode_values(f, max_distinct);
  std::vector<std::size_t> kept_cols;
  std::map<std::vector<double>, std::size_t> first_with_values;
  std::map<FeatureName, std::vector<FeatureName>> equivalents;
  for (std::size_t c = 0; c < exploded.cols(); ++c) {
    std::vector<double> col = exploded.column(c);
    if (population_variance(col) <= 0.0) continue;
    auto [it, inserted] = first_with_values.emplace(std::move(col), c);
    if (inserted) {
      kept_cols.push_back(c);
    } else {
      equivalents[exploded.columns[it->second]].push_back(exploded.columns[c]);
    }
  }
  if (kept_cols.empty()) return {};
  const FeatureMatrix kept = exploded.select_columns(kept_cols);
  FeatureScoreTable t = feature_scores(normalize(kept, epsilon), scores, &kept);
  if (t.rows.size() > top_n) t.rows.resize(top_n);
  for (auto& row : t.rows) {
    if (auto it = equivalents.find(row.feature); it != equivalents.end()) {
      for (const auto& e : it->second) row.equivalents.push_back(humanize_feature(e));
    }
    row.feature = humanize_feature(row.feature);
  }
  return t;
}

// Overload matching the log-first call shape; the log is not consulted
// beyond the already-extracted matrix.
inline FeatureScoreTable anomalous_feature_report(const OcelLog& /*log*/,
                                                  const FeatureMatrix& f,
                                                  const ScoreVector& scores,
                                                  std::size_t top_n) {
  return anomalous_feature_report(f, scores, top_n);
}

inline std::string feature_scores_to_csv(const FeatureScoreTable& t) {
  std::string out = csv_row({"feature", "count", "fea_score", "equivalent_features"});
  for (const auto& r : t.rows) {
    std::string eq;
    for (const auto& e : r.equivalents) eq += (eq.empty() ? "" : "; ") + e;
    out += csv_row({r.feature, std::to_string(r.support_count), format_double(r.fea_score), eq});
  }
  return out;
}

// Three aligned columns: feature (with value), count, score to two decimals.
inline std::string render_feature_table(const FeatureScoreTable& t) {
  std::vector<std::array<std::string, 3>> cells;
  cells.push_back({"Feature (with Value)", "Count", "FEA_SCORE"});
  for (const auto& r : t.rows) {
    std::string label = r.feature;
    if (!r.equivalents.empty()) {
      label += " (+" + std::to_string(r.equivalents.size()) + " equivalent)";
    }
    cells.push_back({label, std::to_string(r.support_count), format_fixed(r.fea_score, 2)});
  }
  std::array<std::size_t, 3> width{0, 0, 0};
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : cells) {
    out += row[0] + std::string(width[0] - row[0].size(), ' ');
    out += " | " + std::string(width[1] - row[1].size(), ' ') + row[1];
    out += " | " + std::string(width[2] - row[2].size(), ' ') + row[2];
    out += '\n';
  }
  return out;
}

}  // namespace ocad
