#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "ocad/aggregate.hpp"
#include "ocad/detect.hpp"
#include "ocad/features.hpp"
#include "ocad/oracle.hpp"
#include "ocad/reduce.hpp"

using namespace ocad;

namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kIo;
}

FeatureMatrix column_matrix(const std::vector<double>& col) {
  std::vector<std::vector<double>> pts;
  for (double v : col) pts.push_back({v});
  return gen::matrix_of(pts);
}

ScoreVector scores_for(const FeatureMatrix& f, std::vector<double> s) {
  ScoreVector out;
  out.object_ids = f.row_ids;
  out.scores = std::move(s);
  return out;
}

double pair_distance(const FeatureMatrix& m, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t c = 0; c < m.cols(); ++c) s += (m.at(i, c) - m.at(j, c)) * (m.at(i, c) - m.at(j, c));
  return std::sqrt(s);
}

}  // namespace

TEST(Normalize, Endpoints) {
  const double eps = 1e-9;
  const auto n = normalize(column_matrix({0.0, 10.0}), eps);
  EXPECT_EQ(n.matrix.at(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(n.matrix.at(1, 0), 1.0 - 2.0 * eps / (10.0 + eps));
  const auto c = normalize(column_matrix({3.0, 3.0, 3.0}), 0.5);
  for (double v : c.matrix.values) EXPECT_EQ(v, -1.0);
  EXPECT_EQ(kind_of([] { normalize(column_matrix({1.0}), 0.0); }), ErrorKind::kInvalidArgument);
}

TEST(Normalize, ScalarReplayAndOrder) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const FeatureMatrix f = gen::random_matrix(rng, 20, 6, trial % 2 == 0);
    const auto n = normalize(f, 1e-9);
    for (std::size_t c = 0; c < f.cols(); ++c) {
      const auto col = f.column(c);
      const double lo = *std::min_element(col.begin(), col.end());
      const double hi = *std::max_element(col.begin(), col.end());
      double min_seen = 2.0;
      for (std::size_t r = 0; r < f.rows(); ++r) {
        const double v = n.matrix.at(r, c);
        EXPECT_NEAR(v, oracle::normalized(f.at(r, c), lo, hi, 1e-9), 1e-12);
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
        min_seen = std::min(min_seen, v);
        for (std::size_t r2 = 0; r2 < f.rows(); ++r2) {
          EXPECT_EQ(f.at(r, c) < f.at(r2, c), v < n.matrix.at(r2, c));
        }
      }
      EXPECT_EQ(min_seen, -1.0);
    }
  }
}

TEST(VarianceFilter, Thresholds) {
  const FeatureMatrix f = column_matrix({0.0, 1.0});
  EXPECT_EQ(variance_filter(f, 0.2).cols(), 1u);
  EXPECT_EQ(kind_of([&] { variance_filter(f, 0.3); }), ErrorKind::kAllColumnsDropped);
  EXPECT_EQ(kind_of([] { variance_filter(column_matrix({2.0, 2.0}), 0.0); }),
            ErrorKind::kAllColumnsDropped);
}

TEST(VarianceFilter, MatchesBruteForce) {
  std::mt19937_64 rng(5);
  FeatureMatrix f = gen::random_matrix(rng, 30, 50, true);
  for (std::size_t r = 0; r < f.rows(); ++r) f.at(r, 7) = 1.0;
  const double thr = 0.9;
  std::vector<FeatureName> want;
  for (std::size_t c = 0; c < f.cols(); ++c) {
    const auto col = f.column(c);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / col.size();
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean) / col.size();
    if (var > thr) want.push_back(f.columns[c]);
  }
  EXPECT_EQ(variance_filter(f, thr).columns, want);
}

TEST(Explode, IndicatorsAndSupport) {
  FeatureMatrix f = column_matrix({0, 1, 1, 2, 1});
  f.columns[0] = "lifecyclecontainsCancel";
  const FeatureMatrix e = explode_values(f);
  ASSERT_EQ(e.cols(), 3u);
  EXPECT_EQ(e.columns[1], "(lifecyclecontainsCancel=1)");
  const auto ones = e.column(1);
  EXPECT_EQ(std::accumulate(ones.begin(), ones.end(), 0.0), 3.0);

  const FeatureMatrix bin = column_matrix({0, 1, 0, 1});
  EXPECT_EQ(explode_values(bin).column(1), bin.column(0));

  std::vector<double> wide;
  for (int i = 0; i < 30; ++i) wide.push_back(i * 0.5);
  const FeatureMatrix w = explode_values(column_matrix(wide));
  EXPECT_EQ(w.cols(), 1u);
  EXPECT_EQ(w.column(0), wide);
}

TEST(Explode, SupportMatchesGroupBy) {
  std::mt19937_64 rng(8);
  const FeatureMatrix f = gen::random_matrix(rng, 40, 5, true);
  const FeatureMatrix e = explode_values(f);
  for (std::size_t c = 0; c < f.cols(); ++c) {
    std::map<double, double> count;
    for (double v : f.column(c)) count[v] += 1.0;
    for (const auto& [v, n] : count) {
      const auto idx = e.column_index(indicator_name(f.columns[c], v));
      ASSERT_TRUE(idx);
      const auto col = e.column(*idx);
      EXPECT_EQ(std::accumulate(col.begin(), col.end(), 0.0), n);
    }
  }
}

TEST(Pca, OneDimensionalData) {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({static_cast<double>(i), 0.0, 0.0});
  const Embedding e = pca(gen::matrix_of(pts), 1);
  EXPECT_NEAR(e.components[0][0], 1.0, 1e-12);
  EXPECT_NEAR(e.components[0][1], 0.0, 1e-12);
}

TEST(Pca, IdenticalRows) {
  const Embedding e = pca(gen::matrix_of({{1, 2}, {1, 2}, {1, 2}}), 2);
  for (double v : e.coords.values) EXPECT_EQ(v, 0.0);
  for (double v : e.explained_variance) EXPECT_EQ(v, 0.0);
}

TEST(Pca, InvalidK) {
  const FeatureMatrix f = gen::matrix_of({{1, 2}, {3, 4}, {5, 7}});
  EXPECT_EQ(kind_of([&] { pca(f, 0); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([&] { pca(f, 3); }), ErrorKind::kInvalidArgument);
}

TEST(Pca, AgreesWithJacobiOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const FeatureMatrix f = gen::random_matrix(rng, 40, 8);
    const std::size_t k = 3;
    const Embedding e = pca(f, k);
    std::vector<double> mean(f.cols(), 0.0);
    for (std::size_t r = 0; r < f.rows(); ++r) {
      for (std::size_t c = 0; c < f.cols(); ++c) mean[c] += f.at(r, c) / f.rows();
    }
    std::vector<std::vector<double>> cov(f.cols(), std::vector<double>(f.cols(), 0.0));
    for (std::size_t r = 0; r < f.rows(); ++r) {
      for (std::size_t i = 0; i < f.cols(); ++i) {
        for (std::size_t j = 0; j < f.cols(); ++j) {
          cov[i][j] += (f.at(r, i) - mean[i]) * (f.at(r, j) - mean[j]) / f.rows();
        }
      }
    }
    const auto [vals, vecs] = oracle::jacobi_eigen(cov);
    // Reconstruction error of projecting onto the top-k subspace.
    auto recon_error = [&](const std::vector<std::vector<double>>& comps) {
      double err = 0.0;
      for (std::size_t r = 0; r < f.rows(); ++r) {
        std::vector<double> x(f.cols()), back(f.cols(), 0.0);
        for (std::size_t c = 0; c < f.cols(); ++c) x[c] = f.at(r, c) - mean[c];
        for (std::size_t a = 0; a < k; ++a) {
          double dot = 0.0;
          for (std::size_t c = 0; c < f.cols(); ++c) dot += x[c] * comps[a][c];
          for (std::size_t c = 0; c < f.cols(); ++c) back[c] += dot * comps[a][c];
        }
        for (std::size_t c = 0; c < f.cols(); ++c) err += (x[c] - back[c]) * (x[c] - back[c]);
      }
      return err;
    };
    const std::vector<std::vector<double>> top(vecs.begin(), vecs.begin() + k);
    const double want = recon_error(top);
    EXPECT_NEAR(recon_error(e.components), want, 1e-6 * want);
    for (std::size_t a = 0; a < k; ++a) EXPECT_NEAR(e.explained_variance[a], vals[a], 1e-9);
  }
}

TEST(Pca, ProjectionAndOrthonormality) {
  std::mt19937_64 rng(4);
  const FeatureMatrix f = gen::random_matrix(rng, 30, 5);
  const Embedding e = pca(f, 4);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      double dot = 0.0;
      for (std::size_t c = 0; c < 5; ++c) dot += e.components[a][c] * e.components[b][c];
      EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-6);
    }
    if (a > 0) EXPECT_GE(e.explained_variance[a - 1], e.explained_variance[a]);
    const auto& comp = e.components[a];
    const auto big = std::max_element(comp.begin(), comp.end(),
                                      [](double x, double y) { return std::abs(x) < std::abs(y); });
    EXPECT_GT(*big, 0.0);
  }
  double total = 0.0, explained = 0.0;
  for (std::size_t c = 0; c < f.cols(); ++c) total += population_variance(f.column(c));
  for (double v : e.explained_variance) explained += v;
  EXPECT_LE(explained, total + 1e-9);

  std::vector<double> mean(5, 0.0);
  for (std::size_t r = 0; r < f.rows(); ++r) {
    for (std::size_t c = 0; c < 5; ++c) mean[c] += f.at(r, c) / f.rows();
  }
  for (std::size_t r = 0; r < f.rows(); ++r) {
    for (std::size_t a = 0; a < 4; ++a) {
      double dot = 0.0;
      for (std::size_t c = 0; c < 5; ++c) dot += (f.at(r, c) - mean[c]) * e.components[a][c];
      EXPECT_NEAR(e.coords.at(r, a), dot, 1e-9);
    }
  }
}

TEST(Pca, RowPermutationPermutesCoords) {
  std::mt19937_64 rng(6);
  const FeatureMatrix f = gen::random_matrix(rng, 15, 4);
  std::vector<std::size_t> perm(f.rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  FeatureMatrix g(f.object_type, {}, f.columns);
  for (std::size_t i : perm) g.row_ids.push_back(f.row_ids[i]);
  g.values.resize(f.values.size());
  for (std::size_t r = 0; r < perm.size(); ++r) {
    for (std::size_t c = 0; c < f.cols(); ++c) g.at(r, c) = f.at(perm[r], c);
  }
  const Embedding a = pca(f, 2), b = pca(g, 2);
  for (std::size_t r = 0; r < perm.size(); ++r) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(b.coords.at(r, c), a.coords.at(perm[r], c), 1e-9);
  }
}

TEST(FastMap, TwoPoints) {
  const Embedding e = fastmap(gen::matrix_of({{0, 0}, {4, 0}}), 1);
  std::vector<double> xs{e.coords.at(0, 0), e.coords.at(1, 0)};
  std::sort(xs.begin(), xs.end());
  EXPECT_NEAR(xs[0], 0.0, 1e-12);
  EXPECT_NEAR(xs[1], 4.0, 1e-12);
}

TEST(FastMap, IdenticalPoints) {
  const Embedding e = fastmap(gen::matrix_of({{1, 1}, {1, 1}, {1, 1}}), 2);
  for (double v : e.coords.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(kind_of([] { fastmap(gen::matrix_of({{1, 1}}), 1); }), ErrorKind::kTooFewRows);
}

TEST(FastMap, TriangleIsExact) {
  const FeatureMatrix f = gen::matrix_of({{0, 0}, {3, 0}, {0, 4}});
  const Embedding e = fastmap(f, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(pair_distance(e.coords, i, j), pair_distance(f, i, j), 1e-9);
    }
  }
}

TEST(FastMap, ContractiveAndDeterministic) {
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const FeatureMatrix f = gen::random_matrix(rng, 60, 10);
    const Embedding a = fastmap(f, 4, 5, seed), b = fastmap(f, 4, 5, seed);
    EXPECT_EQ(a.coords.values, b.coords.values);
    for (std::size_t i = 0; i < f.rows(); ++i) {
      for (std::size_t j = i + 1; j < f.rows(); ++j) {
        EXPECT_LE(pair_distance(a.coords, i, j), pair_distance(f, i, j) + 1e-9);
      }
    }
  }
}

TEST(IsolationForest, TwoPointsScoreZero) {
  const ScoreVector s = isolation_forest(gen::matrix_of({{0.0}, {1.0}}), {50, 256, 3});
  EXPECT_NEAR(s.scores[0], 0.0, 1e-12);
  EXPECT_NEAR(s.scores[1], 0.0, 1e-12);
}

TEST(IsolationForest, IdenticalRowsWarn) {
  const ScoreVector s = isolation_forest(gen::matrix_of({{1, 2}, {1, 2}, {1, 2}, {1, 2}}), {});
  EXPECT_EQ(s.scores[0], s.scores[1]);
  EXPECT_EQ(s.scores[1], s.scores[3]);
  ASSERT_FALSE(s.warnings.empty());
  EXPECT_NE(s.warnings[0].find("DegenerateMatrix"), std::string::npos);
}

TEST(IsolationForest, AveragePathConstants) {
  const auto c = detail::average_path_table(4);
  EXPECT_EQ(c[2], 1.0);
  EXPECT_NEAR(c[3], 2.0 * 1.5 - 2.0 * 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(c[4], 2.0 * (1.0 + 0.5 + 1.0 / 3.0) - 2.0 * 3.0 / 4.0, 1e-12);
}

TEST(IsolationForest, PlantedPointInUnitSquare) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({u(rng), u(rng)});
  pts.push_back({10.0, 10.0});
  const FeatureMatrix f = gen::matrix_of(pts);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ScoreVector s = isolation_forest(f, {100, 256, seed});
    EXPECT_EQ(std::min_element(s.scores.begin(), s.scores.end()) - s.scores.begin(), 100);
  }
}

TEST(IsolationForest, DeterministicUnderSeed) {
  std::mt19937_64 rng(9);
  const FeatureMatrix f = gen::random_matrix(rng, 50, 3);
  EXPECT_EQ(isolation_forest(f, {30, 64, 7}).scores, isolation_forest(f, {30, 64, 7}).scores);
}

TEST(IsolationForest, MovingAwayNeverHelpsOnAverage) {
  std::mt19937_64 rng(13);
  auto pts = gen::gaussian_points(rng, 80, 2);
  double prev_rank = 1e9;
  for (double x : {2.0, 4.0, 8.0}) {
    pts[0] = {x, 0.0};
    const FeatureMatrix f = gen::matrix_of(pts);
    double mean_rank = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const RankVector r = rank(isolation_forest(f, {100, 256, seed}));
      mean_rank += static_cast<double>(r.ranks[0]) / 10.0;
    }
    EXPECT_LE(mean_rank, prev_rank);
    prev_rank = mean_rank;
  }
}

TEST(Lof, GridInterior) {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) pts.push_back({double(i), double(j)});
  }
  const ScoreVector s = lof(gen::matrix_of(pts), {4});
  for (int i = 1; i < 9; ++i) {
    for (int j = 1; j < 9; ++j) {
      EXPECT_GE(-s.scores[i * 10 + j], 0.8);
      EXPECT_LE(-s.scores[i * 10 + j], 1.2);
    }
  }
}

TEST(Lof, PlantedDensityOutlier) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 30; ++i) pts.push_back({g(rng), g(rng)});
  for (int i = 0; i < 30; ++i) pts.push_back({5 + g(rng), 5 + g(rng)});
  pts.push_back({2.5, 1.0});
  const ScoreVector s = lof(gen::matrix_of(pts), {5});
  const auto argmin = std::min_element(s.scores.begin(), s.scores.end()) - s.scores.begin();
  EXPECT_EQ(argmin, 60);
  for (std::size_t i = 0; i < 60; ++i) EXPECT_LT(s.scores[60], s.scores[i]);
}

TEST(Lof, CoincidentPointsScoreMinusOne) {
  const ScoreVector s = lof(gen::matrix_of({{1, 1}, {1, 1}, {1, 1}, {1, 1}}), {2});
  for (double v : s.scores) EXPECT_EQ(v, -1.0);
  EXPECT_EQ(kind_of([] { lof(gen::matrix_of({{1}, {2}}), {2}); }), ErrorKind::kTooFewRows);
}

TEST(Lof, MatchesBruteForce) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 6 + rng() % 25;
    const std::size_t k = 1 + rng() % 5;
    const FeatureMatrix f = gen::random_matrix(rng, n, 1 + rng() % 3, trial % 3 == 0);
    const auto want = oracle::lof(oracle::rows_of(f), k, kLofReachFloor);
    const ScoreVector s = lof(f, {k});
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(-s.scores[i], want[i], 1e-9);
  }
}

TEST(Lof, ArgminScaleInvariant) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    FeatureMatrix f = gen::random_matrix(rng, 25, 3);
    const auto a = lof(f, {5}).scores;
    for (double& v : f.values) v *= 7.5;
    const auto b = lof(f, {5}).scores;
    EXPECT_EQ(std::min_element(a.begin(), a.end()) - a.begin(),
              std::min_element(b.begin(), b.end()) - b.begin());
  }
}

TEST(Rank, HandExamples) {
  ScoreVector s;
  s.object_ids = {"c", "a", "b"};
  s.scores = {0.0, -2.0, -1.0};
  const RankVector r = rank(s);
  EXPECT_EQ(r.ranks, (std::vector<std::size_t>{2, 0, 1}));
  EXPECT_EQ(bottom_k(r, 3), (std::vector<ObjectId>{"a", "b", "c"}));
  EXPECT_TRUE(bottom_k(r, 0).empty());
  EXPECT_EQ(kind_of([&] { bottom_k(r, 4); }), ErrorKind::kKTooLarge);

  ScoreVector t;
  t.object_ids = {"b", "a"};
  t.scores = {-1.0, -1.0};
  EXPECT_EQ(rank(t).ranks, (std::vector<std::size_t>{1, 0}));
}

TEST(Rank, BijectiveAndOrderPreserving) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    ScoreVector s;
    const std::size_t n = 1 + rng() % 100;
    for (std::size_t i = 0; i < n; ++i) {
      s.object_ids.push_back("o" + std::to_string(rng() % 100000) + "_" + std::to_string(i));
      s.scores.push_back(static_cast<double>(rng() % 20) / 4.0);
    }
    const RankVector r = rank(s);
    std::vector<std::size_t> sorted = r.ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(sorted[i], i);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (s.scores[i] != s.scores[j]) {
          EXPECT_EQ(r.ranks[i] < r.ranks[j], s.scores[i] < s.scores[j]);
        }
      }
    }
  }
}

TEST(Aggregate, ZeroScoresAndSingleRow) {
  std::mt19937_64 rng(2);
  const FeatureMatrix f = gen::random_matrix(rng, 6, 3);
  const auto t = feature_scores(normalize(f), scores_for(f, std::vector<double>(6, 0.0)));
  for (const auto& row : t.rows) EXPECT_EQ(row.fea_score, 0.0);

  const FeatureMatrix one = column_matrix({5.0});
  NormalizedFeatureMatrix n{one, 1e-9, {5.0}, {5.0}};
  n.matrix.at(0, 0) = 0.25;
  EXPECT_EQ(feature_scores(n, scores_for(one, {-0.4})).rows[0].fea_score, -0.4 * 0.25);
}

TEST(Aggregate, MatchesDoubleLoop) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const FeatureMatrix f = gen::random_matrix(rng, 25, 10);
    std::vector<double> s(25);
    for (double& v : s) v = u(rng);
    const auto n = normalize(f);
    const auto want = oracle::fea_scores(oracle::rows_of(n.matrix), s);
    const auto t = feature_scores(n, scores_for(f, s));
    ASSERT_EQ(t.rows.size(), 10u);
    for (const auto& row : t.rows) {
      const auto c = *f.column_index(row.feature);
      EXPECT_NEAR(row.fea_score, want[c], 1e-12);
    }
    for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_LE(t.rows[i - 1].fea_score, t.rows[i].fea_score);
  }
}

TEST(Aggregate, LinearInScores) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const FeatureMatrix f = gen::random_matrix(rng, 20, 5);
  const auto n = normalize(f);
  std::vector<double> s1(20), s2(20), mix(20);
  for (std::size_t i = 0; i < 20; ++i) {
    s1[i] = u(rng);
    s2[i] = u(rng);
    mix[i] = 2.0 * s1[i] - 0.5 * s2[i];
  }
  auto by_name = [&](const std::vector<double>& s) {
    std::map<FeatureName, double> out;
    for (const auto& r : feature_scores(n, scores_for(f, s)).rows) out[r.feature] = r.fea_score;
    return out;
  };
  const auto a = by_name(s1), b = by_name(s2), m = by_name(mix);
  for (const auto& [name, v] : m) EXPECT_NEAR(v, 2.0 * a.at(name) - 0.5 * b.at(name), 1e-12);
}

TEST(Aggregate, RowMismatch) {
  std::mt19937_64 rng(1);
  const FeatureMatrix f = gen::random_matrix(rng, 4, 2);
  ScoreVector s = scores_for(f, {0, 0, 0, 0});
  std::swap(s.object_ids[0], s.object_ids[1]);
  EXPECT_EQ(kind_of([&] { feature_scores(normalize(f), s); }), ErrorKind::kRowMismatch);
}

TEST(Aggregate, PlantedIndicatorReachesTop3) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-0.1, 0.3);
  FeatureMatrix f = gen::random_matrix(rng, 40, 6, true);
  f.columns.back() = "planted";
  std::vector<double> s(40);
  for (double& v : s) v = u(rng);
  for (std::size_t r = 0; r < 40; ++r) f.at(r, 5) = 0.0;
  for (std::size_t r = 0; r < 5; ++r) {
    s[r] = -0.5 - 0.01 * static_cast<double>(r);
    f.at(r, 5) = 1.0;
  }
  const auto t = anomalous_feature_report(f, scores_for(f, s), 3);
  ASSERT_EQ(t.rows.size(), 3u);
  bool found = false;
  for (const auto& row : t.rows) {
    found |= row.feature == "(planted = 1)";
    for (const auto& e : row.equivalents) found |= e == "(planted = 1)";
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(anomalous_feature_report(f, scores_for(f, s), 0).rows.empty());
}

TEST(Aggregate, ReportFoldsIdenticalColumnsAndDropsConstant) {
  FeatureMatrix f = gen::matrix_of({{1, 1, 7}, {0, 0, 7}, {0, 0, 7}, {1, 1, 7}});
  f.columns = {"lifecyclecontainsA", "interactionsitem", "numvaluekeep"};
  const auto t = anomalous_feature_report(f, scores_for(f, {-0.3, 0.1, 0.2, -0.2}), 10);
  // Two distinct indicator vectors survive; the constant column does not.
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].feature, "(lifecyclecontains A = 1)");
  EXPECT_EQ(t.rows[0].equivalents, std::vector<FeatureName>{"(interactions item = 1)"});
  EXPECT_EQ(t.rows[0].support_count, 2u);
  const std::string text = render_feature_table(t);
  EXPECT_NE(text.find("(lifecyclecontains A = 1) (+1 equivalent) |     2 |     -0.20"),
            std::string::npos)
      << text;
}

TEST(Aggregate, PermutingRowsLeavesTableUnchanged) {
  std::mt19937_64 rng(50);
  const FeatureMatrix f = gen::random_matrix(rng, 12, 4);
  std::vector<double> s(12);
  for (double& v : s) v = static_cast<double>(rng() % 100) / 100.0 - 0.5;
  FeatureMatrix g(f.object_type, {}, f.columns);
  std::vector<double> gs;
  for (std::size_t r = f.rows(); r-- > 0;) {
    g.row_ids.push_back(f.row_ids[r]);
    gs.push_back(s[r]);
    for (std::size_t c = 0; c < f.cols(); ++c) g.values.push_back(f.at(r, c));
  }
  const auto a = feature_scores(normalize(f), scores_for(f, s));
  const auto b = feature_scores(normalize(g), scores_for(g, gs));
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].feature, b.rows[i].feature);
    EXPECT_NEAR(a.rows[i].fea_score, b.rows[i].fea_score, 1e-12);
  }
}

TEST(Render, ScoreTableLine) {
  const std::string text =
      render_score_table({"iforest", "lof"}, {"PO_23667"}, {{-0.200785}, {-40.049412}});
  EXPECT_NE(text.find("PO_23667   -0.200785  -40.049412"), std::string::npos) << text;
}

TEST(Render, FeatureTableLine) {
  FeatureScoreTable t;
  t.rows.push_back({"1 Occurrence of the activity Cancel Purchase Order", 300, -0.07, {}});
  const std::string text = render_feature_table(t);
  EXPECT_NE(text.find("1 Occurrence of the activity Cancel Purchase Order |   300 |     -0.07"),
            std::string::npos)
      << text;
  EXPECT_EQ(humanize_feature("(lifecyclecontainsCancel Purchase Order=1)"),
            "(lifecyclecontains Cancel Purchase Order = 1)");
  EXPECT_EQ(humanize_feature("dfg_A_B"), "dfg A_B");
  EXPECT_EQ(humanize_feature("propnumvalueamount"), "prop numvalue amount");
}

TEST(Summary, HandQuantiles) {
  const auto s = summarize_features(column_matrix({4, 1, 3, 2}));
  const auto& st = s.features[0];
  EXPECT_EQ(st.min, 1.0);
  EXPECT_EQ(st.q1, 1.75);
  EXPECT_EQ(st.median, 2.5);
  EXPECT_EQ(st.q3, 3.25);
  EXPECT_EQ(st.max, 4.0);
  const auto c = summarize_features(column_matrix({3, 3, 3})).features[0];
  EXPECT_EQ(c.min, 3.0);
  EXPECT_EQ(c.q1, 3.0);
  EXPECT_EQ(c.max, 3.0);
  EXPECT_EQ(c.stddev, 0.0);
  const auto z = summarize_features(column_matrix({0, 0, 0, 1})).features[0];
  EXPECT_EQ(z.mean, 0.25);
  EXPECT_EQ(z.distinct, 2u);
  EXPECT_EQ(kind_of([] { summarize_features(FeatureMatrix("t", {}, {"x"})); }), ErrorKind::kEmptyMatrix);
}

TEST(Summary, QuantilesMatchSortOracle) {
  std::mt19937_64 rng(60);
  for (int trial = 0; trial < 20; ++trial) {
    const FeatureMatrix f = gen::random_matrix(rng, 1 + rng() % 300, 3, trial % 2 == 0);
    const auto s = summarize_features(f);
    for (std::size_t c = 0; c < f.cols(); ++c) {
      const auto col = f.column(c);
      EXPECT_EQ(s.features[c].q1, oracle::quantile(col, 0.25));
      EXPECT_EQ(s.features[c].median, oracle::quantile(col, 0.5));
      EXPECT_EQ(s.features[c].q3, oracle::quantile(col, 0.75));
    }
  }
}

TEST(StatisticalOracle, Scores) {
  FeatureSummary s;
  s.features.push_back({"x", 0, 0, 2, 4, 20, 0, 0, 5});
  const auto v = statistical_oracle(s, 1.5)[0];
  EXPECT_EQ(v.fence_hi, 10.0);
  EXPECT_EQ(v.score(2.0), 0.0);
  EXPECT_NEAR(v.score(16.0), -1.5, 1e-9);
  EXPECT_EQ(v.score(10.0), 0.0);
  EXPECT_EQ(v.score(-6.0), 0.0);
  double prev = 0.0;
  for (double x = 10.5; x < 30; x += 0.5) {
    EXPECT_LT(v.score(x), prev);
    prev = v.score(x);
  }
  FeatureSummary flat;
  flat.features.push_back({"y", 1, 1, 1, 1, 1, 1, 0, 1});
  const auto w = statistical_oracle(flat)[0];
  EXPECT_EQ(w.score(1.0), 0.0);
  EXPECT_EQ(w.score(2.0), -1.0);
}
