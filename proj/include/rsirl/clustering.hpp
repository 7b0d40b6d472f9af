#pragma once

#include "rsirl/cost.hpp"
#include "rsirl/scenario.hpp"

#include <cstdint>
#include <vector>

namespace rsirl {

struct KMeansResult {
  Mat centroids;                ///< one centroid per row
  std::vector<int> assignment;  ///< cluster of each input row
  std::vector<double> wcss;     ///< within-cluster sum of squares after each iteration
};

/// Lloyd iterations from a k-means++ seeding. Rows of `points` are samples.
/// When fewer than k distinct rows exist, returns only the distinct ones.
KMeansResult kmeans(const Mat& points, int k, std::uint64_t seed, int max_iters = 100);

/// Clusters flattened N x m trajectories into first- and later-stage
/// libraries, clipping centroids to the control bounds.
ActionLibrary cluster_actions(const std::vector<Mat>& raw, int k_first, int k_later, std::uint64_t seed,
                              const ControlBounds& bounds);

}  // namespace rsirl
