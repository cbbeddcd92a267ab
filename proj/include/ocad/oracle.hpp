#pragma once

// Textual abstractions of feature tables and object lifecycles, and the
// built-in statistical oracle that scores individual feature values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ocad/error.hpp"
#include "ocad/feature_matrix.hpp"
#include "ocad/lifecycle.hpp"
#include "ocad/ocel.hpp"
#include "ocad/util.hpp"

namespace ocad {

struct FeatureStats {
  FeatureName feature;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t distinct = 0;
};

struct FeatureSummary {
  std::vector<FeatureStats> features;
};

// Quantile of sorted data with linear interpolation between order
// statistics at position p (n - 1).
inline double interpolated_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

inline FeatureSummary summarize_features(const FeatureMatrix& f) {
  if (f.rows() == 0) throw Error(ErrorKind::kEmptyMatrix, "cannot summarize an empty matrix");
  FeatureSummary s;
  for (std::size_t c = 0; c < f.cols(); ++c) {
    std::vector<double> v = f.column(c);
    std::sort(v.begin(), v.end());
    FeatureStats st;
    st.feature = f.columns[c];
    st.min = v.front();
    st.max = v.back();
    st.q1 = interpolated_quantile(v, 0.25);
    st.median = interpolated_quantile(v, 0.5);
    st.q3 = interpolated_quantile(v, 0.75);
    double sum = 0.0;
    for (double x : v) sum += x;
    st.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - st.mean) * (x - st.mean);
    st.stddev = std::sqrt(ss / static_cast<double>(v.size()));
    st.distinct = static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
    s.features.push_back(std::move(st));
  }
  return s;
}

inline std::string render_summary(const FeatureSummary& s, const ObjectType& type = {}) {
  std::string out;
  if (!type.empty()) out += "Feature statistics for objects of type '" + type + "':\n";
  for (const auto& st : s.features) {
    out += "- " + st.feature + ": min " + format_double(st.min) + ", 25th percentile " +
           format_double(st.q1) + ", median " + format_double(st.median) +
           ", 75th percentile " + format_double(st.q3) + ", max " +
           format_double(st.max) + ", mean " + format_double(st.mean) + ", stddev " +
           format_double(st.stddev) + ", distinct values " + std::to_string(st.distinct) +
           "\n";
  }
  return out;
}

inline constexpr double kDefaultWhisker = 1.5;
inline constexpr double kOracleEpsilon = 1e-9;

// Maps a feature value to a score: 0 inside the Tukey fences, negative and
// proportional to the distance past the nearest fence outside them.
struct OracleVerdict {
  FeatureName feature;
  double fence_lo = 0.0;
  double fence_hi = 0.0;
  double median = 0.0;
  double iqr = 0.0;
  std::string rationale;

  double score(double v) const {
    if (iqr == 0.0) return v == median ? 0.0 : -1.0;
    if (v < fence_lo) return -(fence_lo - v) / (iqr + kOracleEpsilon);
    if (v > fence_hi) return -(v - fence_hi) / (iqr + kOracleEpsilon);
    return 0.0;
  }
};

inline std::vector<OracleVerdict> statistical_oracle(const FeatureSummary& summary,
                                                     double whisker = kDefaultWhisker) {
  std::vector<OracleVerdict> out;
  for (const auto& st : summary.features) {
    OracleVerdict v;
    v.feature = st.feature;
    v.median = st.median;
    v.iqr = st.q3 - st.q1;
    v.fence_lo = st.q1 - whisker * v.iqr;
    v.fence_hi = st.q3 + whisker * v.iqr;
    if (v.iqr == 0.0) {
      v.rationale = "no spread between quartiles; any value other than " +
                    format_double(st.median) + " is unusual";
    } else {
      v.rationale = "values outside [" + format_double(v.fence_lo) + ", " +
                    format_double(v.fence_hi) + "] are unusual";
    }
    out.push_back(std::move(v));
  }
  return out;
}

// Per row and feature, the oracle score of the cell; handy for listing which
// objects carry unusual values.
inline FeatureMatrix apply_oracle(const FeatureMatrix& f,
                                  const std::vector<OracleVerdict>& verdicts) {
  FeatureMatrix out(f.object_type, f.row_ids, f.columns);
  for (std::size_t c = 0; c < f.cols(); ++c) {
    const OracleVerdict* v = nullptr;
    for (const auto& cand : verdicts) {
      if (cand.feature == f.columns[c]) v = &cand;
    }
    if (!v) throw Error(ErrorKind::kInvalidArgument, "no verdict for '" + f.columns[c] + "'");
    for (std::size_t r = 0; r < f.rows(); ++r) out.at(r, c) = v->score(f.at(r, c));
  }
  return out;
}

inline std::string verdicts_to_csv(const std::vector<OracleVerdict>& verdicts) {
  std::string out = csv_row({"feature", "fence_lo", "fence_hi", "median", "iqr", "rationale"});
  for (const auto& v : verdicts) {
    out += csv_row({v.feature, format_double(v.fence_lo), format_double(v.fence_hi),
                    format_double(v.median), format_double(v.iqr), v.rationale});
  }
  return out;
}

inline constexpr std::size_t kDefaultMaxLifecycleEvents = 50;

// Chronological rendering of one object's lifecycle followed by summary
// lines. Lifecycles longer than `max_events` keep the first half and the
// last half of the budget around an elision marker.
inline std::string abstract_lifecycle(const OcelLog& log, const ObjectId& id,
                                      std::size_t max_events = kDefaultMaxLifecycleEvents) {
  const std::size_t obj = log.object_index(id);
  const Object& object = log.objects()[obj];
  const auto& life = log.lifecycle_of(obj);
  const auto events = log.events();
  std::string out = "Lifecycle of " + object.type + " " + object.id + ":\n";

  auto render_event = [&](std::size_t e) {
    const Event& ev = events[e];
    std::string line = format_iso8601(ev.time) + " | " + ev.activity;
    std::vector<std::string> related;
    for (std::size_t o : log.objects_of_event(e)) {
      if (o == obj) continue;
      related.push_back(log.objects()[o].id + " (" + log.objects()[o].type + ")");
    }
    if (!related.empty()) {
      line += " | with ";
      for (std::size_t i = 0; i < related.size(); ++i) {
        if (i) line += ", ";
        line += related[i];
      }
    }
    for (const auto& [name, v] : ev.attributes) {
      line += " | " + name + "=" + (v.is_number() ? format_double(v.number()) : v.text());
    }
    return line + "\n";
  };

  if (life.empty()) {
    out += "no events\n";
  } else if (max_events == 0 || life.size() <= max_events) {
    for (std::size_t e : life) out += render_event(e);
  } else {
    const std::size_t head = max_events / 2;
    const std::size_t tail = max_events - head;
    for (std::size_t i = 0; i < head; ++i) out += render_event(life[i]);
    out += "... " + std::to_string(life.size() - head - tail) + " events omitted ...\n";
    for (std::size_t i = life.size() - tail; i < life.size(); ++i) out += render_event(life[i]);
  }

  const auto span = lifecycle_span(log, obj);
  out += "Summary:\n";
  out += "events: " + std::to_string(life.size()) + "\n";
  out += "duration (s): " + format_double(span ? span->end - span->start : 0.0) + "\n";
  const auto nbrs = detail::neighbors(log, obj);
  for (const ObjectType& t : log.object_types()) {
    const InteractionCounts c = interaction_counts(log, obj, nbrs, t);
    out += t + ": interacting " + std::to_string(c.interact) + ", created after " +
           std::to_string(c.creation) + ", continuing " + std::to_string(c.continuation) +
           ", co-birth " + std::to_string(c.cobirth) + ", co-death " +
           std::to_string(c.codeath) + "\n";
  }
  return out;
}

}  // namespace ocad
