#pragma once

#include "rsirl/core.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace rsirl {

struct ControlBounds {
  Vec lower;
  Vec upper;

  ControlBounds() = default;
  ControlBounds(Vec lo, Vec hi);
  static ControlBounds symmetric(Eigen::Index m, double limit);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Vec& u, double tol = kGeomTol) const;
  Vec clamp(const Vec& u) const;
};

struct Demonstration {
  Vec state;
  Vec control;
};

/// Outcome costs g_j(u) = 0.5 u' H_j u + q_j' u + c_j at a fixed state.
struct QuadraticCosts {
  std::vector<Mat> hessians;
  std::vector<Vec> linear;
  Vec constant;

  Vec eval(const Vec& u) const;
  Mat jacobian(const Vec& u) const;  ///< L x m
};

/// Disutility per disturbance outcome, g(x, u) in R^L, with its control
/// Jacobian. Costs that are quadratic in u can expose that structure, which
/// the forward solver uses for exact Hessians.
struct CostOracle {
  Eigen::Index outcomes = 0;
  Eigen::Index controls = 0;
  std::function<Vec(const Vec& x, const Vec& u)> eval;
  std::function<Mat(const Vec& x, const Vec& u)> grad_u;
  std::function<QuadraticCosts(const Vec& x)> quadratic;  // optional

  static CostOracle from_quadratic(Eigen::Index outcomes, Eigen::Index controls,
                                   std::function<QuadraticCosts(const Vec& x)> make);
};

/// Feature map phi(x, u): an L x H matrix whose row j is the feature vector
/// under outcome j. Stored as one CostOracle per feature.
struct FeatureModel {
  std::vector<CostOracle> features;

  Eigen::Index outcomes() const { return features.front().outcomes; }
  Eigen::Index count() const { return static_cast<Eigen::Index>(features.size()); }
  Mat eval(const Vec& x, const Vec& u) const;

  /// g = phi c for fixed weights.
  CostOracle weighted(const Vec& weights) const;
  /// The L*H vector of all features, index j*H + h, as one oracle.
  CostOracle flattened() const;
};

}  // namespace rsirl
