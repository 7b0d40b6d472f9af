#include "rsirl/likelihood.hpp"

#include "parallel.hpp"

#include <cmath>

namespace rsirl {

LikelihoodData LikelihoodData::build(const std::vector<TrajectorySegment>& segments,
                                     const ActionLibrary& library, const ScenarioConfig& cfg,
                                     const StageRollout& rollout) {
  LikelihoodData data;
  data.cfg = cfg;
  data.trees.resize(segments.size());
  data.observed.resize(segments.size());
  // Tree construction dominates setup, and rollouts are pure.
  detail::parallel_for(segments.size(), [&](std::size_t i) {
    data.trees[i] = ScenarioTree::build(segments[i].start_state, segments[i].prev_mode, library, cfg,
                                        rollout);
    data.observed[i] = nearest_action(segments[i].observed_action, library.first_stage);
  });
  return data;
}

namespace {

struct SegmentTerm {
  double value = 0.0;
  Vec grad_r;
  Vec grad_c;
  int degenerate = 0;
};

SegmentTerm segment_term(const SemiParametricCrm& crm, const Vec& r, const Vec& c,
                         const LikelihoodData& data, std::size_t i, const LikelihoodOptions& opt) {
  const double beta = data.cfg.beta;
  SoftBellmanOptions so;
  so.beta = beta;
  so.gradient = opt.gradient;
  so.degeneracy = opt.degeneracy;
  so.perturb_seed = 0x5eed + 104729 * i;
  const SoftBellman sb = soft_bellman(data.trees[i], crm, r, c, so);

  const Vec scaled = beta * sb.root_values;
  const int obs = data.observed[i];
  SegmentTerm t;
  t.value = -scaled[obs] + softmin_log(scaled);
  t.degenerate = sb.degenerate_lps;
  if (opt.gradient) {
    const Vec sigma = boltzmann(sb.root_values, beta);
    t.grad_r = beta * (sb.grad_r.transpose() * sigma - sb.grad_r.row(obs).transpose());
    t.grad_c = beta * (sb.grad_c.transpose() * sigma - sb.grad_c.row(obs).transpose());
  }
  return t;
}

}  // namespace

Likelihood log_likelihood(const SemiParametricCrm& crm, const Vec& r, const Vec& c,
                          const LikelihoodData& data, const LikelihoodOptions& options) {
  if (data.size() == 0) throw Error("log_likelihood: no segments");
  if (!crm.feasible(r)) throw EmptyEnvelope("log_likelihood: offsets give an empty envelope");
  // The fit keeps c on the simplex, but the likelihood itself only needs
  // nonnegative weights (finite differences step off the simplex).
  require_dim(c.size(), data.trees.front().H, "log_likelihood weights");
  if (!c.allFinite() || (c.array() < 0.0).any()) throw Error("log_likelihood: weights must be finite and nonnegative");

  const std::size_t n = data.size();
  std::vector<SegmentTerm> terms(n);
  if (options.execution == Execution::Parallel) {
    detail::parallel_for(n, [&](std::size_t i) { terms[i] = segment_term(crm, r, c, data, i, options); });
  } else {
    for (std::size_t i = 0; i < n; ++i) terms[i] = segment_term(crm, r, c, data, i, options);
  }

  Likelihood out;
  if (options.gradient) {
    out.grad_r = Vec::Zero(crm.size());
    out.grad_c = Vec::Zero(c.size());
  }
  for (const auto& t : terms) {
    out.value += t.value;
    out.degenerate_lps += t.degenerate;
    if (options.gradient) {
      out.grad_r += t.grad_r;
      out.grad_c += t.grad_c;
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  out.value *= inv;
  if (options.gradient) {
    out.grad_r *= inv;
    out.grad_c *= inv;
  }
  return out;
}

}  // namespace rsirl
