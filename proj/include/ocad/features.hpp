#pragma once

// Object-centric feature maps: extraction from a log, propagation across
// object types, min-max normalization into [-1, 1], and column filters.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ocad/error.hpp"
#include "ocad/feature_matrix.hpp"
#include "ocad/lifecycle.hpp"
#include "ocad/ocel.hpp"
#include "ocad/util.hpp"

namespace ocad {

struct ExtractionConfig {
  // Adds "cobirth"+ot and "codeath"+ot count columns next to the interaction
  // and creation counts.
  bool include_cobirth_codeath = false;
};

namespace feature_prefix {
inline constexpr const char* kNumValue = "numvalue";
inline constexpr const char* kStrValue = "strvalue";
inline constexpr const char* kContains = "lifecyclecontains";
inline constexpr const char* kStartsWith = "lifecyclestartswith";
inline constexpr const char* kStartTime = "lifecyclestarttime";
inline constexpr const char* kEndTime = "lifecycleendtime";
inline constexpr const char* kDuration = "lifecycleduration";
inline constexpr const char* kDfg = "dfg_";
inline constexpr const char* kInteractions = "interactions";
inline constexpr const char* kCreation = "creation";
inline constexpr const char* kCobirth = "cobirth";
inline constexpr const char* kCodeath = "codeath";
inline constexpr const char* kProp = "prop";
}  // namespace feature_prefix

// One row per object of `type` (ascending id), one column per feature family
// member observed with a nonzero value somewhere. Families are laid out in
// the order: numeric attributes, one-hot string attributes, activity counts,
// start-activity one-hot, start/end/duration, DFG edge counts, interaction
// counts, creation counts (then co-birth/co-death when enabled); names within
// a family are sorted.
inline FeatureMatrix extract_features(const OcelLog& log, const ObjectType& type,
                                      const ExtractionConfig& cfg = {}) {
  namespace fp = feature_prefix;
  const std::vector<std::size_t> rows = log.objects_of_type(type);
  if (rows.empty()) {
    throw Error(ErrorKind::kNoObjectsOfType, "no objects of type '" + type + "'");
  }
  const std::size_t n = rows.size();
  const auto events = log.events();
  const auto objects = log.objects();

  // name -> column values; std::map keeps each family sorted.
  using Family = std::map<std::string, std::vector<double>>;
  auto bump = [n](Family& fam, const std::string& name, std::size_t row, double v) {
    auto it = fam.find(name);
    if (it == fam.end()) it = fam.emplace(name, std::vector<double>(n, 0.0)).first;
    it->second[row] += v;
  };

  Family num_values, str_values;
  for (const AttributeName& att : common_attributes(log, type)) {
    bool any_number = false, any_text = false;
    for (std::size_t r = 0; r < n; ++r) {
      const AttributeValue& v = objects[rows[r]].attributes.at(att);
      (v.is_number() ? any_number : any_text) = true;
    }
    if (any_number && any_text) {
      throw Error(ErrorKind::kMixedAttributeType,
                  "attribute '" + att + "' of type '" + type +
                      "' is numeric for some objects and text for others");
    }
    for (std::size_t r = 0; r < n; ++r) {
      const AttributeValue& v = objects[rows[r]].attributes.at(att);
      if (v.is_number()) {
        bump(num_values, fp::kNumValue + att, r, v.number());
      } else {
        bump(str_values, std::string(fp::kStrValue) + att + "_" + v.text(), r, 1.0);
      }
    }
  }

  const std::vector<ObjectType> types = log.object_types();
  Family contains, starts_with, dfg, interactions, creation, cobirth, codeath;
  std::vector<double> start_time(n, 0.0), end_time(n, 0.0), duration(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t obj = rows[r];
    const auto& life = log.lifecycle_of(obj);
    for (std::size_t i = 0; i < life.size(); ++i) {
      const Event& e = events[life[i]];
      bump(contains, fp::kContains + e.activity, r, 1.0);
      if (i + 1 < life.size()) {
        bump(dfg,
             std::string(fp::kDfg) + e.activity + "_" + events[life[i + 1]].activity,
             r, 1.0);
      }
    }
    if (!life.empty()) {
      bump(starts_with, fp::kStartsWith + events[life.front()].activity, r, 1.0);
      start_time[r] = events[life.front()].time;
      end_time[r] = events[life.back()].time;
      duration[r] = end_time[r] - start_time[r];
    }
    const auto nbrs = detail::neighbors(log, obj);
    for (const ObjectType& other : types) {
      const InteractionCounts c = interaction_counts(log, obj, nbrs, other);
      if (c.interact) bump(interactions, fp::kInteractions + other, r, double(c.interact));
      if (c.creation) bump(creation, fp::kCreation + other, r, double(c.creation));
      if (cfg.include_cobirth_codeath) {
        if (c.cobirth) bump(cobirth, fp::kCobirth + other, r, double(c.cobirth));
        if (c.codeath) bump(codeath, fp::kCodeath + other, r, double(c.codeath));
      }
    }
  }

  std::vector<std::pair<std::string, std::vector<double>>> cols;
  auto take = [&cols](Family& fam) {
    for (auto& [name, v] : fam) cols.emplace_back(name, std::move(v));
  };
  take(num_values);
  take(str_values);
  take(contains);
  take(starts_with);
  cols.emplace_back(fp::kStartTime, std::move(start_time));
  cols.emplace_back(fp::kEndTime, std::move(end_time));
  cols.emplace_back(fp::kDuration, std::move(duration));
  take(dfg);
  take(interactions);
  take(creation);
  take(cobirth);
  take(codeath);
  std::erase_if(cols, [](const auto& col) {
    return std::all_of(col.second.begin(), col.second.end(),
                       [](double v) { return v == 0.0; });
  });

  std::vector<ObjectId> ids;
  ids.reserve(n);
  for (std::size_t obj : rows) ids.push_back(objects[obj].id);
  std::vector<FeatureName> names;
  for (const auto& col : cols) names.push_back(col.first);
  FeatureMatrix m(type, std::move(ids), std::move(names));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r = 0; r < n; ++r) m.at(r, c) = cols[c].second[r];
  }
  m.validate();
  return m;
}

enum class AggregationKind { kMean, kMedian, kMin, kMax, kSum };

inline std::string to_string(AggregationKind agg) {
  switch (agg) {
    case AggregationKind::kMean: return "mean";
    case AggregationKind::kMedian: return "median";
    case AggregationKind::kMin: return "min";
    case AggregationKind::kMax: return "max";
    case AggregationKind::kSum: return "sum";
  }
  return "mean";
}

inline AggregationKind parse_aggregation(const std::string& s) {
  if (s == "mean") return AggregationKind::kMean;
  if (s == "median") return AggregationKind::kMedian;
  if (s == "min") return AggregationKind::kMin;
  if (s == "max") return AggregationKind::kMax;
  if (s == "sum") return AggregationKind::kSum;
  throw Error(ErrorKind::kInvalidArgument, "unknown aggregation '" + s + "'");
}

// Aggregate of a multiset; 0 for the empty multiset.
inline double aggregate_values(std::vector<double> values, AggregationKind agg) {
  if (values.empty()) return 0.0;
  switch (agg) {
    case AggregationKind::kMean: {
      double s = 0.0;
      for (double v : values) s += v;
      return s / static_cast<double>(values.size());
    }
    case AggregationKind::kMedian: {
      std::sort(values.begin(), values.end());
      const std::size_t m = values.size() / 2;
      if (values.size() % 2 == 1) return values[m];
      return 0.5 * (values[m - 1] + values[m]);
    }
    case AggregationKind::kMin:
      return *std::min_element(values.begin(), values.end());
    case AggregationKind::kMax:
      return *std::max_element(values.begin(), values.end());
    case AggregationKind::kSum: {
      double s = 0.0;
      for (double v : values) s += v;
      return s;
    }
  }
  return 0.0;
}

// Appends "prop"+sigma for every neighbor column sigma: the aggregate of
// sigma over the neighbor-type objects interacting with each base row.
inline FeatureMatrix propagate_features(const OcelLog& log, const FeatureMatrix& base,
                                        const FeatureMatrix& neighbor,
                                        AggregationKind agg) {
  if (base.object_type == neighbor.object_type) {
    throw Error(ErrorKind::kTypeMismatch,
                "cannot propagate '" + base.object_type + "' onto itself");
  }
  std::map<ObjectId, std::size_t> neighbor_row;
  for (std::size_t r = 0; r < neighbor.rows(); ++r) neighbor_row[neighbor.row_ids[r]] = r;

  std::vector<FeatureName> names = base.columns;
  for (const auto& c : neighbor.columns) names.push_back(feature_prefix::kProp + c);
  FeatureMatrix out(base.object_type, base.row_ids, std::move(names));
  const std::size_t bc = base.cols();
  std::vector<double> bucket;
  for (std::size_t r = 0; r < base.rows(); ++r) {
    for (std::size_t c = 0; c < bc; ++c) out.at(r, c) = base.at(r, c);
    std::vector<std::size_t> related;
    for (std::size_t nb : detail::neighbors(log, log.object_index(base.row_ids[r]))) {
      const Object& o = log.objects()[nb];
      if (o.type != neighbor.object_type) continue;
      auto it = neighbor_row.find(o.id);
      if (it == neighbor_row.end()) {
        throw Error(ErrorKind::kRowMismatch,
                    "object '" + o.id + "' missing from the neighbor matrix");
      }
      related.push_back(it->second);
    }
    for (std::size_t c = 0; c < neighbor.cols(); ++c) {
      bucket.clear();
      for (std::size_t nr : related) bucket.push_back(neighbor.at(nr, c));
      out.at(r, bc + c) = aggregate_values(bucket, agg);
    }
  }
  out.validate();
  return out;
}

struct NormalizedFeatureMatrix {
  FeatureMatrix matrix;
  double epsilon = 1e-9;
  std::vector<double> column_min;
  std::vector<double> column_max;
};

inline constexpr double kDefaultEpsilon = 1e-9;

// -1 + 2 (v - min) / (max - min + epsilon), column-wise.
inline NormalizedFeatureMatrix normalize(const FeatureMatrix& f,
                                         double epsilon = kDefaultEpsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "epsilon must be positive");
  }
  NormalizedFeatureMatrix out{f, epsilon, std::vector<double>(f.cols(), 0.0),
                              std::vector<double>(f.cols(), 0.0)};
  for (std::size_t c = 0; c < f.cols(); ++c) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t r = 0; r < f.rows(); ++r) {
      const double v = f.at(r, c);
      if (r == 0 || v < lo) lo = v;
      if (r == 0 || v > hi) hi = v;
    }
    out.column_min[c] = lo;
    out.column_max[c] = hi;
    const double span = hi - lo + epsilon;
    for (std::size_t r = 0; r < f.rows(); ++r) {
      out.matrix.at(r, c) = -1.0 + 2.0 * (f.at(r, c) - lo) / span;
    }
  }
  return out;
}

inline double population_variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

// Keeps columns whose population variance exceeds `min_variance`.
inline FeatureMatrix variance_filter(const FeatureMatrix& f, double min_variance) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < f.cols(); ++c) {
    if (population_variance(f.column(c)) > min_variance) keep.push_back(c);
  }
  if (keep.empty()) {
    throw Error(ErrorKind::kAllColumnsDropped,
                "no column has variance above " + format_double(min_variance));
  }
  return f.select_columns(keep);
}

// Same filter applied to a normalized matrix; bounds follow their columns.
inline NormalizedFeatureMatrix variance_filter(const NormalizedFeatureMatrix& f,
                                               double min_variance) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < f.matrix.cols(); ++c) {
    if (population_variance(f.matrix.column(c)) > min_variance) keep.push_back(c);
  }
  if (keep.empty()) {
    throw Error(ErrorKind::kAllColumnsDropped,
                "no column has variance above " + format_double(min_variance));
  }
  NormalizedFeatureMatrix out{f.matrix.select_columns(keep), f.epsilon, {}, {}};
  for (std::size_t c : keep) {
    out.column_min.push_back(f.column_min[c]);
    out.column_max.push_back(f.column_max[c]);
  }
  return out;
}

// Log restricted to events whose activity is kept. All objects survive, even
// with an emptied lifecycle.
inline OcelLog filter_activities(const OcelLog& log, const std::set<Activity>& keep) {
  if (keep.empty()) {
    throw Error(ErrorKind::kEmptyKeepSet, "activity keep set is empty");
  }
  std::vector<Event> events;
  for (const Event& e : log.events()) {
    if (keep.count(e.activity)) events.push_back(e);
  }
  std::vector<Object> objects(log.objects().begin(), log.objects().end());
  return OcelLog(std::move(events), std::move(objects));
}

inline constexpr std::size_t kDefaultMaxDistinct = 20;

inline FeatureName indicator_name(const FeatureName& feature, double value) {
  return "(" + feature + "=" + format_double(value) + ")";
}

// Replaces every column with at most `max_distinct` distinct values by one
// 0/1 indicator column per value (ascending); wider columns pass through.
inline FeatureMatrix explode_values(const FeatureMatrix& f,
                                    std::size_t max_distinct = kDefaultMaxDistinct) {
  std::vector<std::pair<FeatureName, std::vector<double>>> cols;
  for (std::size_t c = 0; c < f.cols(); ++c) {
    std::vector<double> col = f.column(c);
    std::set<double> distinct(col.begin(), col.end());
    if (distinct.size() > max_distinct) {
      cols.emplace_back(f.columns[c], std::move(col));
      continue;
    }
    for (double v : distinct) {
      std::vector<double> ind(col.size());
      for (std::size_t r = 0; r < col.size(); ++r) ind[r] = col[r] == v ? 1.0 : 0.0;
      cols.emplace_back(indicator_name(f.columns[c], v), std::move(ind));
    }
  }
  std::vector<FeatureName> names;
  for (const auto& col : cols) names.push_back(col.first);
  FeatureMatrix out(f.object_type, f.row_ids, std::move(names));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r = 0; r < f.rows(); ++r) out.at(r, c) = cols[c].second[r];
  }
  return out;
}

}  // namespace ocad
