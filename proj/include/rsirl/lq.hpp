#pragma once

#include "rsirl/cost.hpp"
#include "rsirl/envelope.hpp"

#include <cstdint>
#include <vector>

namespace rsirl {

/// One-step linear system with multiplicative uncertainty,
/// x1 = A_j x + B_j u under outcome j, cost u'Ru + x1'Qx1.
struct LqSystem {
  std::vector<Mat> a;
  std::vector<Mat> b;
  Mat q;
  Mat r;
  RiskEnvelope true_envelope = RiskEnvelope::simplex(1);
  ControlBounds bounds;

  Eigen::Index states() const { return q.rows(); }
  Eigen::Index controls() const { return r.rows(); }
  Eigen::Index outcomes() const { return static_cast<Eigen::Index>(a.size()); }
};

inline constexpr double kLqControlLimit = 10.0;

/// Gaussian A, B entries, Q = S S', R = I, envelope = hull of
/// `envelope_samples` flat-Dirichlet points. Deterministic in `seed`.
LqSystem sample_lq_system(std::uint64_t seed, Eigen::Index n, Eigen::Index m, Eigen::Index outcomes,
                          int envelope_samples, double control_limit = kLqControlLimit);

/// Exact quadratic cost oracle for a state weight `q_state`.
CostOracle lq_cost(const LqSystem& sys, const Mat& q_state);
inline CostOracle lq_cost(const LqSystem& sys) { return lq_cost(sys, sys.q); }

/// Standard-normal initial states.
std::vector<Vec> sample_states(std::uint64_t seed, Eigen::Index n, int count);

/// Expert demonstrations: exact minimax controls under the true envelope.
std::vector<Demonstration> lq_expert_demos(const LqSystem& sys, const CostOracle& cost,
                                           const std::vector<Vec>& states);

/// Unknown-cost variant: feature h is u'Ru + x1' Q_h x1 with Q_h = S_h S_h'.
struct LqFeatureSystem {
  LqSystem system;
  std::vector<Mat> feature_q;
  Vec weights;  ///< true weights, uniform draws normalized to one

  FeatureModel features() const;
};

LqFeatureSystem sample_lq_feature_system(std::uint64_t seed, Eigen::Index n, Eigen::Index m,
                                         Eigen::Index outcomes, Eigen::Index feature_count,
                                         int envelope_samples, double control_limit = kLqControlLimit);

}  // namespace rsirl
