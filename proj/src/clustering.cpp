#include "rsirl/clustering.hpp"

#include <algorithm>
#include <random>

namespace rsirl {

namespace {

int count_distinct(const Mat& points) {
  std::vector<Eigen::Index> seen;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    bool dup = false;
    for (Eigen::Index j : seen) {
      if ((points.row(i) - points.row(j)).squaredNorm() == 0.0) {
        dup = true;
        break;
      }
    }
    if (!dup) seen.push_back(i);
  }
  return static_cast<int>(seen.size());
}

}  // namespace

KMeansResult kmeans(const Mat& points, int k, std::uint64_t seed, int max_iters) {
  const Eigen::Index n = points.rows();
  if (k < 1 || n < k) throw Error("kmeans: need at least k samples");
  k = std::min(k, count_distinct(points));

  std::mt19937_64 rng(seed);
  Mat centers(k, points.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = points.row(pick(rng));
  Vec d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    std::discrete_distribution<Eigen::Index> next(d2.data(), d2.data() + n);
    centers.row(c) = points.row(next(rng));
    d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  KMeansResult res;
  res.assignment.assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      const double d = (centers.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(&best);
      wcss += d;
      if (res.assignment[i] != best) {
        res.assignment[i] = static_cast<int>(best);
        changed = true;
      }
    }
    // wcss is measured before the centroid update, so the sequence is monotone.
    res.wcss.push_back(wcss);
    if (!changed && it > 0) break;
    Mat sums = Mat::Zero(k, points.cols());
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(res.assignment[i]) += points.row(i);
      ++counts[res.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
    }
  }
  res.centroids = std::move(centers);
  return res;
}

ActionLibrary cluster_actions(const std::vector<Mat>& raw, int k_first, int k_later, std::uint64_t seed,
                              const ControlBounds& bounds) {
  if (raw.empty()) throw Error("cluster_actions: no trajectories");
  const Eigen::Index N = raw.front().rows();
  const Eigen::Index m = raw.front().cols();
  require_dim(bounds.lower.size(), m, "cluster_actions bounds");
  Mat flat(static_cast<Eigen::Index>(raw.size()), N * m);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].rows() != N || raw[i].cols() != m) throw DimensionMismatch("cluster_actions: ragged trajectories");
    // Row-major flattening: step after step.
    for (Eigen::Index s = 0; s < N; ++s) flat.block(static_cast<Eigen::Index>(i), s * m, 1, m) = raw[i].row(s);
  }

  auto unflatten = [&](const Mat& centroids) {
    std::vector<Mat> lib;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      Mat traj(N, m);
      for (Eigen::Index s = 0; s < N; ++s) {
        traj.row(s) = centroids.block(c, s * m, 1, m).cwiseMax(bounds.lower.transpose()).cwiseMin(bounds.upper.transpose());
      }
      lib.push_back(std::move(traj));
    }
    return lib;
  };

  ActionLibrary lib;
  lib.first_stage = unflatten(kmeans(flat, k_first, seed).centroids);
  lib.later_stage = unflatten(kmeans(flat, k_later, seed + 1).centroids);
  return lib;
}

}  // namespace rsirl
