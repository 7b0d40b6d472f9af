#pragma once

#include "rsirl/envelope.hpp"
#include "rsirl/minimax.hpp"

namespace rsirl {

struct StaticPlan {
  Vec u;
  double tau = 0.0;
  Vec distribution;  ///< worst-case distribution at the optimum (sum of multiplier * vertex)
  bool certified = false;
};

/// min over the box of max over envelope vertices v_i of g(x, u) . v_i.
StaticPlan solve_static_forward(const Vec& x, const RiskEnvelope& env, const CostOracle& cost,
                                const ControlBounds& bounds, MinimaxOptions options = {});

/// Unknown-cost forward problem: the envelope lives in the L*H product space
/// and the objective is sum_{j,h} z_{jh} phi_h^{[j]}(x, u).
StaticPlan solve_product_forward(const Vec& x, const RiskEnvelope& product, const FeatureModel& features,
                                 const ControlBounds& bounds, MinimaxOptions options = {});

}  // namespace rsirl
