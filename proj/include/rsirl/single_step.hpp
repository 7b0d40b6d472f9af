#pragma once

#include "rsirl/cost.hpp"
#include "rsirl/envelope.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rsirl {

struct SaturationSets {
  std::vector<Eigen::Index> upper;  ///< components at the upper bound
  std::vector<Eigen::Index> lower;  ///< components at the lower bound
};

inline constexpr double kSaturationTol = 1e-6;

SaturationSets saturation_sets(const Demonstration& demo, const ControlBounds& bounds,
                               double tol = kSaturationTol);

struct KktHalfspace {
  Halfspace halfspace;   ///< normal g(x*, u*), offset tau'
  Vec multiplier;        ///< the maximizing v of the LP
  Vec sigma_upper;       ///< bound multipliers, aligned with SaturationSets::upper
  Vec sigma_lower;
};

/// Bounding halfspace from one demonstration: maximize g . v over v in
/// `current` subject to the stationarity conditions of the expert's
/// minimax problem at u*. Throws InconsistentDemonstration if no v in
/// `current` makes u* stationary.
KktHalfspace kkt_halfspace(const Demonstration& demo, const CostOracle& cost, const RiskEnvelope& current,
                           const ControlBounds& bounds, double saturation_tol = kSaturationTol);

struct PruneOptions {
  /// Constrain each LP to the envelope built so far. When off, every
  /// halfspace is computed against the simplex, independently (and in
  /// parallel), and intersected afterwards.
  bool tighten = true;
  bool record_history = false;
  bool parallel = true;
  double saturation_tol = kSaturationTol;
};

struct PruneResult {
  RiskEnvelope envelope;
  std::vector<std::string> warnings;
  std::vector<RiskEnvelope> history;  ///< envelope after each demonstration
  int skipped = 0;
};

/// Sequential halfspace pruning starting from `start` (the simplex unless
/// given). Inconsistent demonstrations and emptying cuts are skipped with a
/// warning.
PruneResult prune_envelope(const std::vector<Demonstration>& demos, const CostOracle& cost,
                           const ControlBounds& bounds, const PruneOptions& options = {},
                           std::optional<RiskEnvelope> start = std::nullopt);

/// Halfspaces of every demonstration against a fixed envelope; entries are
/// empty where the demonstration is inconsistent. OpenMP over demos.
std::vector<std::optional<Halfspace>> kkt_halfspaces_parallel(const std::vector<Demonstration>& demos,
                                                              const CostOracle& cost, const RiskEnvelope& env,
                                                              const ControlBounds& bounds,
                                                              double saturation_tol = kSaturationTol);

/// Serial reference for kkt_halfspaces_parallel.
std::vector<std::optional<Halfspace>> kkt_halfspaces_serial(const std::vector<Demonstration>& demos,
                                                            const CostOracle& cost, const RiskEnvelope& env,
                                                            const ControlBounds& bounds,
                                                            double saturation_tol = kSaturationTol);

/// Largest L*H handled by exact vertex enumeration in the product space.
inline constexpr Eigen::Index kMaxProductDim = 12;

/// The starting product polytope: the simplex over z in R^{L*H}.
RiskEnvelope product_simplex(Eigen::Index outcomes, Eigen::Index features);

/// Unknown-cost halfspace in z-space (index j*H + h), normal = flattened phi.
KktHalfspace kkt_halfspace_product(const Demonstration& demo, const FeatureModel& features,
                                   const RiskEnvelope& current, const ControlBounds& bounds,
                                   double saturation_tol = kSaturationTol);

PruneResult prune_product(const std::vector<Demonstration>& demos, const FeatureModel& features,
                          const ControlBounds& bounds, const PruneOptions& options = {});

struct Recovery {
  std::vector<Vec> weights;        ///< column sums of each vertex, in the H-simplex
  std::vector<Vec> distributions;  ///< row sums of each vertex, in the L-simplex
  RiskEnvelope envelope;           ///< hull of the distributions
  std::vector<double> qualities;   ///< sigma_2 / sigma_1 of each L x H vertex
};

Recovery recover_weights_and_envelope(const RiskEnvelope& product, Eigen::Index outcomes, Eigen::Index features);

}  // namespace rsirl
