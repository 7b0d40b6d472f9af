#include "rsirl/single_step.hpp"

#include "rsirl/lp.hpp"

#include <algorithm>

namespace rsirl {

SaturationSets saturation_sets(const Demonstration& demo, const ControlBounds& bounds, double tol) {
  require_dim(demo.control.size(), bounds.dim(), "demonstration control");
  SaturationSets s;
  for (Eigen::Index j = 0; j < bounds.dim(); ++j) {
    if (demo.control[j] >= bounds.upper[j] - tol) s.upper.push_back(j);
    if (demo.control[j] <= bounds.lower[j] + tol) s.lower.push_back(j);
  }
  return s;
}

KktHalfspace kkt_halfspace(const Demonstration& demo, const CostOracle& cost, const RiskEnvelope& current,
                           const ControlBounds& bounds, double saturation_tol) {
  require_dim(current.dim(), cost.outcomes, "kkt envelope");
  require_dim(demo.control.size(), cost.controls, "kkt control");
  const SaturationSets sat = saturation_sets(demo, bounds, saturation_tol);
  const Vec g = cost.eval(demo.state, demo.control);
  const Mat jac = cost.grad_u(demo.state, demo.control);  // L x m

  const Eigen::Index l = cost.outcomes;
  const auto nu = static_cast<Eigen::Index>(sat.upper.size());
  const auto nl = static_cast<Eigen::Index>(sat.lower.size());
  LinearProgram lp(l + nu + nl);
  lp.objective = Vec::Zero(l + nu + nl);
  lp.objective.head(l) = g;

  Vec sum = Vec::Zero(l + nu + nl);
  sum.head(l).setOnes();
  lp.add_eq(sum, 1.0);
  for (const Halfspace& h : current.halfspaces()) {
    Vec row = Vec::Zero(l + nu + nl);
    row.head(l) = h.normal;
    lp.add_ineq(row, h.offset);
  }
  for (Eigen::Index j = 0; j < cost.controls; ++j) {
    Vec row = Vec::Zero(l + nu + nl);
    row.head(l) = jac.col(j);
    for (Eigen::Index k = 0; k < nu; ++k) {
      if (sat.upper[static_cast<std::size_t>(k)] == j) row[l + k] = 1.0;
    }
    for (Eigen::Index k = 0; k < nl; ++k) {
      if (sat.lower[static_cast<std::size_t>(k)] == j) row[l + nu + k] = -1.0;
    }
    const double scale = row.cwiseAbs().maxCoeff();
    if (scale > 0.0) row /= scale;
    lp.add_eq(row, 0.0);
  }

  const LpSolution sol = solve(lp);
  if (sol.status == LpStatus::Infeasible) {
    throw InconsistentDemonstration("no distribution in the current envelope makes the control stationary");
  }
  if (!sol.optimal()) throw NumericalFailure("kkt halfspace LP is unbounded");
  KktHalfspace out;
  out.halfspace = Halfspace{g, sol.value};
  out.multiplier = sol.primal.head(l);
  out.sigma_upper = sol.primal.segment(l, nu);
  out.sigma_lower = sol.primal.tail(nl);
  return out;
}

namespace {

bool cut_is_redundant(const RiskEnvelope& env, const Halfspace& h) {
  const double scale = std::max(1.0, h.normal.norm());
  for (const Vec& v : env.vertices()) {
    if (h.normal.dot(v) - h.offset > kGeomTol * scale) return false;
  }
  return true;
}

// Applies one cut; returns false (with a warning) when it would empty the envelope.
bool apply_cut(RiskEnvelope& env, const Halfspace& h, std::size_t index, std::vector<std::string>& warnings) {
  if (cut_is_redundant(env, h)) return true;
  try {
    env = intersect_halfspace(env, h.normal, h.offset);
    return true;
  } catch (const EmptyEnvelope&) {
    warnings.push_back("demonstration " + std::to_string(index) + ": cut empties the envelope, skipped");
    return false;
  }
}

std::optional<Halfspace> try_halfspace(const Demonstration& demo, const CostOracle& cost, const RiskEnvelope& env,
                                       const ControlBounds& bounds, double tol) {
  try {
    return kkt_halfspace(demo, cost, env, bounds, tol).halfspace;
  } catch (const InconsistentDemonstration&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<std::optional<Halfspace>> kkt_halfspaces_serial(const std::vector<Demonstration>& demos,
                                                            const CostOracle& cost, const RiskEnvelope& env,
                                                            const ControlBounds& bounds, double saturation_tol) {
  std::vector<std::optional<Halfspace>> out(demos.size());
  for (std::size_t d = 0; d < demos.size(); ++d) out[d] = try_halfspace(demos[d], cost, env, bounds, saturation_tol);
  return out;
}

std::vector<std::optional<Halfspace>> kkt_halfspaces_parallel(const std::vector<Demonstration>& demos,
                                                              const CostOracle& cost, const RiskEnvelope& env,
                                                              const ControlBounds& bounds, double saturation_tol) {
  std::vector<std::optional<Halfspace>> out(demos.size());
  const auto n = static_cast<long>(demos.size());
  std::vector<std::string> errors(demos.size());
#pragma omp parallel for schedule(dynamic)
  for (long d = 0; d < n; ++d) {
    const auto k = static_cast<std::size_t>(d);
    try {
      out[k] = try_halfspace(demos[k], cost, env, bounds, saturation_tol);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericalFailure("halfspace construction failed: " + e);
  }
  return out;
}

PruneResult prune_envelope(const std::vector<Demonstration>& demos, const CostOracle& cost,
                           const ControlBounds& bounds, const PruneOptions& options,
                           std::optional<RiskEnvelope> start) {
  PruneResult res{start ? *start : RiskEnvelope::simplex(cost.outcomes), {}, {}, 0};
  if (options.tighten) {
    for (std::size_t d = 0; d < demos.size(); ++d) {
      const auto h = try_halfspace(demos[d], cost, res.envelope, bounds, options.saturation_tol);
      if (!h) {
        res.warnings.push_back("demonstration " + std::to_string(d) + ": inconsistent with the envelope, skipped");
        ++res.skipped;
      } else if (!apply_cut(res.envelope, *h, d, res.warnings)) {
        ++res.skipped;
      }
      if (options.record_history) res.history.push_back(res.envelope);
    }
    return res;
  }
  const RiskEnvelope base = res.envelope;
  const auto cuts = options.parallel ? kkt_halfspaces_parallel(demos, cost, base, bounds, options.saturation_tol)
                                     : kkt_halfspaces_serial(demos, cost, base, bounds, options.saturation_tol);
  for (std::size_t d = 0; d < cuts.size(); ++d) {
    if (!cuts[d]) {
      res.warnings.push_back("demonstration " + std::to_string(d) + ": inconsistent with the envelope, skipped");
      ++res.skipped;
    } else if (!apply_cut(res.envelope, *cuts[d], d, res.warnings)) {
      ++res.skipped;
    }
    if (options.record_history) res.history.push_back(res.envelope);
  }
  return res;
}

RiskEnvelope product_simplex(Eigen::Index outcomes, Eigen::Index features) {
  if (outcomes * features > kMaxProductDim) {
    throw Error("product space of dimension " + std::to_string(outcomes * features) +
                " exceeds the exact-enumeration limit of " + std::to_string(kMaxProductDim));
  }
  return RiskEnvelope::simplex(outcomes * features);
}

KktHalfspace kkt_halfspace_product(const Demonstration& demo, const FeatureModel& features,
                                   const RiskEnvelope& current, const ControlBounds& bounds, double saturation_tol) {
  return kkt_halfspace(demo, features.flattened(), current, bounds, saturation_tol);
}

PruneResult prune_product(const std::vector<Demonstration>& demos, const FeatureModel& features,
                          const ControlBounds& bounds, const PruneOptions& options) {
  return prune_envelope(demos, features.flattened(), bounds, options,
                        product_simplex(features.outcomes(), features.count()));
}

Recovery recover_weights_and_envelope(const RiskEnvelope& product, Eigen::Index outcomes, Eigen::Index features) {
  require_dim(product.dim(), outcomes * features, "product envelope");
  Recovery rec{{}, {}, RiskEnvelope::simplex(outcomes), {}};
  for (const Vec& z : product.vertices()) {
    // row-major L x H
    const Mat zm = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        z.data(), outcomes, features);
    Vec w = zm.colwise().sum().transpose();
    Vec v = zm.rowwise().sum();
    rec.weights.push_back(w.cwiseMax(0.0) / w.cwiseMax(0.0).sum());
    rec.distributions.push_back(v.cwiseMax(0.0) / v.cwiseMax(0.0).sum());
    const Vec sv = Eigen::JacobiSVD<Mat>(zm).singularValues();
    rec.qualities.push_back(sv.size() > 1 && sv[0] > 0.0 ? sv[1] / sv[0] : 0.0);
  }
  rec.envelope = RiskEnvelope::from_points(outcomes, rec.distributions);
  return rec;
}

}  // namespace rsirl
