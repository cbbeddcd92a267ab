#pragma once

// Dimensionality reduction: PCA over the covariance matrix and FastMap.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ocad/error.hpp"
#include "ocad/feature_matrix.hpp"
#include "ocad/util.hpp"

namespace ocad {

enum class ReductionMethod { kPca, kFastMap };

struct Embedding {
  ReductionMethod method = ReductionMethod::kPca;
  // Columns dim_0 .. dim_{k-1}, rows aligned with the input matrix.
  FeatureMatrix coords;
  // PCA only: k x d, orthonormal rows, and the variance along each.
  std::vector<std::vector<double>> components;
  std::vector<double> explained_variance;
  // FastMap only: pivot row positions per produced axis.
  std::vector<std::pair<std::size_t, std::size_t>> pivots;

  std::size_t dims() const { return coords.cols(); }
};

namespace detail {

inline std::vector<FeatureName> dim_names(std::size_t k) {
  std::vector<FeatureName> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back("dim_" + std::to_string(i));
  return out;
}

inline Eigen::MatrixXd to_eigen(const FeatureMatrix& f) {
  Eigen::MatrixXd m(f.rows(), f.cols());
  for (std::size_t r = 0; r < f.rows(); ++r) {
    for (std::size_t c = 0; c < f.cols(); ++c) m(r, c) = f.at(r, c);
  }
  return m;
}

}  // namespace detail

// Top-k eigenvectors of the population covariance of the mean-centered
// columns. Each component's largest-magnitude entry is made positive.
inline Embedding pca(const FeatureMatrix& f, std::size_t k) {
  if (k == 0 || k > std::min(f.rows(), f.cols())) {
    throw Error(ErrorKind::kInvalidArgument,
                "PCA needs 1 <= k <= min(rows, cols); got k=" + std::to_string(k));
  }
  Eigen::MatrixXd x = detail::to_eigen(f);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov =
      (x.transpose() * x) / static_cast<double>(f.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kInvalidArgument, "covariance eigensolver failed");
  }
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const Eigen::MatrixXd& evecs = solver.eigenvectors();
  const std::size_t d = f.cols();

  Embedding out;
  out.method = ReductionMethod::kPca;
  Eigen::MatrixXd basis(d, k);
  for (std::size_t i = 0; i < k; ++i) {
    const Eigen::Index col = static_cast<Eigen::Index>(d - 1 - i);
    Eigen::VectorXd v = evecs.col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    basis.col(static_cast<Eigen::Index>(i)) = v;
    out.components.emplace_back(v.data(), v.data() + v.size());
    out.explained_variance.push_back(std::max(evals(col), 0.0));
  }
  const Eigen::MatrixXd projected = x * basis;
  out.coords = FeatureMatrix(f.object_type, f.row_ids, detail::dim_names(k));
  for (std::size_t r = 0; r < f.rows(); ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      out.coords.at(r, i) = projected(static_cast<Eigen::Index>(r),
                                      static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

inline constexpr std::size_t kDefaultFastMapDims = 8;
inline constexpr std::size_t kDefaultPivotIters = 5;

namespace detail {

// Distances in the residual space left after projecting out the axes built
// so far; squared residuals are clamped at zero after every axis.
class ResidualDistance {
 public:
  ResidualDistance(const FeatureMatrix& f, const std::vector<std::vector<double>>& axes)
      : f_(f), axes_(axes) {}

  double squared(std::size_t i, std::size_t j, std::size_t axes_used) const {
    double d2 = 0.0;
    for (std::size_t c = 0; c < f_.cols(); ++c) {
      const double diff = f_.at(i, c) - f_.at(j, c);
      d2 += diff * diff;
    }
    for (std::size_t a = 0; a < axes_used; ++a) {
      const double diff = axes_[a][i] - axes_[a][j];
      d2 = std::max(d2 - diff * diff, 0.0);
    }
    return d2;
  }

 private:
  const FeatureMatrix& f_;
  const std::vector<std::vector<double>>& axes_;
};

}  // namespace detail

// FastMap projection onto at most k axes (k is capped at min(rows, cols)).
// Pivots per axis come from the farthest-pair heuristic: a seeded random
// start, then `pivot_iters` alternating farthest-point sweeps. Coordinates
// put pivot a at 0 and pivot b at d(a, b). A zero pivot distance ends the
// construction; remaining axes stay zero.
inline Embedding fastmap(const FeatureMatrix& f, std::size_t k,
                         std::size_t pivot_iters = kDefaultPivotIters,
                         std::uint64_t seed = 0) {
  if (f.rows() < 2) {
    throw Error(ErrorKind::kTooFewRows, "FastMap needs at least two rows");
  }
  if (k == 0 || pivot_iters == 0) {
    throw Error(ErrorKind::kInvalidArgument, "FastMap needs k >= 1 and pivot_iters >= 1");
  }
  k = std::min({k, f.rows(), std::max<std::size_t>(f.cols(), 1)});
  const std::size_t n = f.rows();
  std::vector<std::vector<double>> axes;
  detail::ResidualDistance dist(f, axes);
  Rng rng(seed);
  Embedding out;
  out.method = ReductionMethod::kFastMap;

  auto farthest = [&](std::size_t from, std::size_t used) {
    std::size_t best = from;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = dist.squared(from, i, used);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };

  bool degenerate = false;
  for (std::size_t axis = 0; axis < k; ++axis) {
    std::vector<double> x(n, 0.0);
    if (!degenerate) {
      std::size_t b = static_cast<std::size_t>(rng.below(n));
      std::size_t a = b;
      for (std::size_t it = 0; it < pivot_iters; ++it) {
        a = farthest(b, axis);
        b = farthest(a, axis);
      }
      const double dab2 = dist.squared(a, b, axis);
      if (dab2 <= 0.0) {
        degenerate = true;
      } else {
        const double dab = std::sqrt(dab2);
        for (std::size_t i = 0; i < n; ++i) {
          x[i] = (dist.squared(a, i, axis) + dab2 - dist.squared(b, i, axis)) /
                 (2.0 * dab);
        }
        out.pivots.emplace_back(a, b);
      }
    }
    axes.push_back(std::move(x));
  }

  out.coords = FeatureMatrix(f.object_type, f.row_ids, detail::dim_names(k));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t a = 0; a < k; ++a) out.coords.at(r, a) = axes[a][r];
  }
  return out;
}

}  // namespace ocad
