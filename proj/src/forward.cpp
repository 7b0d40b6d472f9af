#include "rsirl/forward.hpp"

namespace rsirl {

namespace {

bool quadratic_convex(const CostOracle& cost, const Vec& x) {
  if (!cost.quadratic) return false;
  for (const Mat& h : cost.quadratic(x).hessians) {
    if (Eigen::SelfAdjointEigenSolver<Mat>(h).eigenvalues().minCoeff() < -1e-12) return false;
  }
  return true;
}

}  // namespace

StaticPlan solve_static_forward(const Vec& x, const RiskEnvelope& env, const CostOracle& cost,
                                const ControlBounds& bounds, MinimaxOptions options) {
  require_dim(env.dim(), cost.outcomes, "static forward envelope");
  require_dim(bounds.dim(), cost.controls, "static forward bounds");
  if (quadratic_convex(cost, x)) options.convex = true;
  const PieceSet ps = pieces_from_cost(cost, x, env.vertices());
  const MinimaxResult res = solve_minimax(ps, bounds, options);
  StaticPlan plan;
  plan.u = res.u;
  plan.tau = res.value;
  plan.certified = res.certified;
  plan.distribution = Vec::Zero(env.dim());
  for (std::size_t i = 0; i < env.vertices().size(); ++i) {
    plan.distribution += res.multipliers[static_cast<Eigen::Index>(i)] * env.vertices()[i];
  }
  return plan;
}

StaticPlan solve_product_forward(const Vec& x, const RiskEnvelope& product, const FeatureModel& features,
                                 const ControlBounds& bounds, MinimaxOptions options) {
  return solve_static_forward(x, product, features.flattened(), bounds, options);
}

}  // namespace rsirl
