#pragma once

// Object scoring (lower = more anomalous) with Isolation Forest and Local
// Outlier Factor, and the injective rank derived from a score vector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ocad/csv.hpp"
#include "ocad/error.hpp"
#include "ocad/feature_matrix.hpp"
#include "ocad/util.hpp"

namespace ocad {

enum class DetectorKind { kIsolationForest, kLof };

inline std::string to_string(DetectorKind d) {
  return d == DetectorKind::kIsolationForest ? "iforest" : "lof";
}

struct ScoreVector {
  std::vector<ObjectId> object_ids;
  std::vector<double> scores;
  DetectorKind method = DetectorKind::kIsolationForest;
  // Hyperparameters used, for the record.
  std::map<std::string, std::string> params;
  std::vector<std::string> warnings;

  std::size_t size() const { return scores.size(); }
};

struct RankVector {
  std::vector<ObjectId> object_ids;
  std::vector<std::size_t> ranks;  // aligned with object_ids; 0 = most anomalous
};

struct IsolationForestParams {
  std::size_t n_trees = 100;
  std::size_t subsample = 256;
  std::uint64_t seed = 0;
};

namespace detail {

// Average path length of an unsuccessful BST search over m points,
// 2 H(m-1) - 2 (m-1) / m, with exact harmonic numbers; c(0) = c(1) = 0.
inline std::vector<double> average_path_table(std::size_t max_m) {
  std::vector<double> c(max_m + 1, 0.0);
  double harmonic = 0.0;  // H(m-1)
  for (std::size_t m = 2; m <= max_m; ++m) {
    harmonic += 1.0 / static_cast<double>(m - 1);
    c[m] = 2.0 * harmonic - 2.0 * static_cast<double>(m - 1) / static_cast<double>(m);
  }
  return c;
}

struct IsoNode {
  // Leaves have feature == npos and carry their sample size.
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::size_t feature = npos;
  double split = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  std::size_t size = 0;
};

class IsolationTree {
 public:
  IsolationTree(const FeatureMatrix& f, std::vector<std::size_t> sample,
                std::size_t height_limit, Rng& rng) {
    build(f, sample, 0, sample.size(), 0, height_limit, rng);
  }

  // Depth of the leaf reached plus the expected remaining depth c(size).
  double path_length(const FeatureMatrix& f, std::size_t row,
                     const std::vector<double>& c) const {
    std::size_t node = 0;
    double depth = 0.0;
    while (nodes_[node].feature != IsoNode::npos) {
      const IsoNode& n = nodes_[node];
      node = f.at(row, n.feature) < n.split ? n.left : n.right;
      depth += 1.0;
    }
    return depth + c[nodes_[node].size];
  }

 private:
  std::size_t build(const FeatureMatrix& f, std::vector<std::size_t>& sample,
                    std::size_t begin, std::size_t end, std::size_t depth,
                    std::size_t height_limit, Rng& rng) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(IsoNode{});
    nodes_[id].size = end - begin;
    if (end - begin <= 1 || depth >= height_limit) return id;

    // Split on a uniformly drawn feature among those not constant in the
    // node; a node with no such feature is a leaf.
    std::vector<std::size_t> candidates;
    std::vector<std::pair<double, double>> ranges;
    for (std::size_t c = 0; c < f.cols(); ++c) {
      double lo = f.at(sample[begin], c), hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = f.at(sample[i], c);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi > lo) {
        candidates.push_back(c);
        ranges.emplace_back(lo, hi);
      }
    }
    if (candidates.empty()) return id;
    const std::size_t pick = static_cast<std::size_t>(rng.below(candidates.size()));
    const std::size_t feature = candidates[pick];
    const auto [lo, hi] = ranges[pick];
    double split = rng.uniform(lo, hi);
    if (split <= lo) split = std::nextafter(lo, hi);

    auto mid = std::partition(sample.begin() + static_cast<std::ptrdiff_t>(begin),
                              sample.begin() + static_cast<std::ptrdiff_t>(end),
                              [&](std::size_t r) { return f.at(r, feature) < split; });
    const std::size_t m = static_cast<std::size_t>(mid - sample.begin());
    nodes_[id].feature = feature;
    nodes_[id].split = split;
    const std::size_t l = build(f, sample, begin, m, depth + 1, height_limit, rng);
    const std::size_t r = build(f, sample, m, end, depth + 1, height_limit, rng);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  std::vector<IsoNode> nodes_;
};

}  // namespace detail

// Standard isolation forest. Emitted score = 0.5 - 2^(-E[h(x)] / c(psi)),
// so anomalies are negative.
inline ScoreVector isolation_forest(const FeatureMatrix& f,
                                    const IsolationForestParams& p = {}) {
  if (f.rows() < 2) throw Error(ErrorKind::kTooFewRows, "isolation forest needs >= 2 rows");
  if (f.cols() < 1) throw Error(ErrorKind::kInvalidArgument, "isolation forest needs >= 1 column");
  if (p.n_trees == 0 || p.subsample < 2) {
    throw Error(ErrorKind::kInvalidArgument, "need n_trees >= 1 and subsample >= 2");
  }
  const std::size_t n = f.rows();
  const std::size_t psi = std::min(p.subsample, n);
  const auto height_limit =
      static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(psi))));
  const std::vector<double> c = detail::average_path_table(psi);

  Rng rng(p.seed);
  std::vector<double> total(n, 0.0);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t t = 0; t < p.n_trees; ++t) {
    // Partial Fisher-Yates: first psi entries form the subsample.
    for (std::size_t i = 0; i < psi; ++i) {
      std::swap(all[i], all[i + static_cast<std::size_t>(rng.below(n - i))]);
    }
    std::vector<std::size_t> sample(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(psi));
    const detail::IsolationTree tree(f, std::move(sample), height_limit, rng);
    for (std::size_t r = 0; r < n; ++r) total[r] += tree.path_length(f, r, c);
  }

  ScoreVector out;
  out.object_ids = f.row_ids;
  out.method = DetectorKind::kIsolationForest;
  out.params = {{"n_trees", std::to_string(p.n_trees)},
                {"subsample", std::to_string(p.subsample)},
                {"seed", std::to_string(p.seed)}};
  out.scores.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double mean_path = total[r] / static_cast<double>(p.n_trees);
    out.scores[r] = 0.5 - std::exp2(-mean_path / c[psi]);
  }
  bool identical = true;
  for (std::size_t r = 1; r < n && identical; ++r) {
    for (std::size_t col = 0; col < f.cols(); ++col) {
      if (f.at(r, col) != f.at(0, col)) {
        identical = false;
        break;
      }
    }
  }
  if (identical) out.warnings.push_back("DegenerateMatrix: all rows identical");
  return out;
}

struct LofParams {
  std::size_t k = 20;
};

// Added to the mean reachability distance so coincident points get a finite
// local density; a cluster of coincident points then has LOF exactly 1.
inline constexpr double kLofReachFloor = 1e-10;

// Local Outlier Factor over Euclidean distance with brute-force neighbor
// search. The k-neighborhood includes every point tied at the k-distance.
// Emitted score = -LOF.
inline ScoreVector lof(const FeatureMatrix& f, const LofParams& p = {}) {
  const std::size_t n = f.rows();
  if (p.k == 0) throw Error(ErrorKind::kInvalidArgument, "LOF needs k >= 1");
  if (n < p.k + 1) {
    throw Error(ErrorKind::kTooFewRows,
                "LOF with k=" + std::to_string(p.k) + " needs at least " +
                    std::to_string(p.k + 1) + " rows");
  }
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < f.cols(); ++c) {
        const double d = f.at(i, c) - f.at(j, c);
        s += d * d;
      }
      dist[i * n + j] = dist[j * n + i] = std::sqrt(s);
    }
  }

  std::vector<double> kdist(n);
  std::vector<std::vector<std::size_t>> neighbors(n);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.push_back(dist[i * n + j]);
    }
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(p.k - 1), row.end());
    kdist[i] = row[p.k - 1];
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && dist[i * n + j] <= kdist[i]) neighbors[i].push_back(j);
    }
  }

  std::vector<double> lrd(n);
  for (std::size_t i = 0; i < n; ++i) {
    double reach = 0.0;
    for (std::size_t j : neighbors[i]) reach += std::max(kdist[j], dist[i * n + j]);
    lrd[i] = 1.0 / (reach / static_cast<double>(neighbors[i].size()) + kLofReachFloor);
  }

  ScoreVector out;
  out.object_ids = f.row_ids;
  out.method = DetectorKind::kLof;
  out.params = {{"k", std::to_string(p.k)}, {"distance", "euclidean"}};
  out.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double ratio = 0.0;
    for (std::size_t j : neighbors[i]) ratio += lrd[j] / lrd[i];
    out.scores[i] = -ratio / static_cast<double>(neighbors[i].size());
  }
  return out;
}

// Ascending by (score, object id): rank 0 is the most anomalous object and
// ties are broken lexicographically, so the rank is always injective.
inline RankVector rank(const ScoreVector& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s.scores[a] != s.scores[b]) return s.scores[a] < s.scores[b];
    return s.object_ids[a] < s.object_ids[b];
  });
  RankVector out;
  out.object_ids = s.object_ids;
  out.ranks.resize(s.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) out.ranks[order[pos]] = pos;
  return out;
}

// The k most anomalous objects, in rank order.
inline std::vector<ObjectId> bottom_k(const RankVector& r, std::size_t k) {
  if (k > r.ranks.size()) {
    throw Error(ErrorKind::kKTooLarge,
                "k=" + std::to_string(k) + " exceeds " + std::to_string(r.ranks.size()) +
                    " objects");
  }
  std::vector<ObjectId> by_rank(r.ranks.size());
  for (std::size_t i = 0; i < r.ranks.size(); ++i) by_rank[r.ranks[i]] = r.object_ids[i];
  by_rank.resize(k);
  return by_rank;
}

inline std::string scores_to_csv(const ScoreVector& s) {
  std::string out = csv_row({"object_id", "score"});
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += csv_row({s.object_ids[i], format_double(s.scores[i])});
  }
  return out;
}

// Rows listed in rank order.
inline std::string ranks_to_csv(const RankVector& r) {
  std::vector<std::size_t> order(r.ranks.size());
  for (std::size_t i = 0; i < r.ranks.size(); ++i) order[r.ranks[i]] = i;
  std::string out = csv_row({"object_id", "rank"});
  for (std::size_t i : order) out += csv_row({r.object_ids[i], std::to_string(r.ranks[i])});
  return out;
}

// Fixed-width listing of object ids with one or more score columns, six
// decimals, most anomalous first by the first column.
inline std::string render_score_table(const std::vector<std::string>& headers,
                                      const std::vector<ObjectId>& ids,
                                      const std::vector<std::vector<double>>& columns) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Object ID"};
  header.insert(header.end(), headers.begin(), headers.end());
  cells.push_back(header);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::string> row{ids[i]};
    for (const auto& col : columns) row.push_back(format_fixed(col[i], 6));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        out += row[c] + std::string(width[c] - row[c].size(), ' ');
      } else {
        out += "  " + std::string(width[c] - row[c].size(), ' ') + row[c];
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace ocad
