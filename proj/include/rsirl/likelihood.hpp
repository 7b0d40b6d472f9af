#pragma once

#include "rsirl/bellman.hpp"

#include <vector>

namespace rsirl {

/// One N-step demonstration: the mode in progress when planning started, the
/// mode nature then drew, and the executed control trajectory (N x m).
struct TrajectorySegment {
  Vec start_state;
  int prev_mode = 0;
  int realized_mode = 0;
  Mat observed_action;
};

/// Everything the likelihood needs that does not depend on (r, c): one
/// scenario tree per segment and the library index of each observed action.
struct LikelihoodData {
  ScenarioConfig cfg;
  std::vector<ScenarioTree> trees;
  std::vector<int> observed;

  static LikelihoodData build(const std::vector<TrajectorySegment>& segments,
                              const ActionLibrary& library, const ScenarioConfig& cfg,
                              const StageRollout& rollout);

  std::size_t size() const { return trees.size(); }
};

enum class Execution { Serial, Parallel };

struct LikelihoodOptions {
  bool gradient = true;
  Execution execution = Execution::Parallel;
  DegeneracyPolicy degeneracy = DegeneracyPolicy::Perturb;
};

struct Likelihood {
  double value = 0.0;
  Vec grad_r;
  Vec grad_c;
  int degenerate_lps = 0;
};

/// Mean over segments of log boltzmann(tau~, beta)[observed], where tau~ is
/// the soft recursion at the segment's root. Always <= 0. The weights need
/// only be nonnegative here; fit keeps them on the simplex.
///
/// Per-segment terms go into separate slots and are summed in segment order,
/// so Serial and Parallel give bit-identical results.
Likelihood log_likelihood(const SemiParametricCrm& crm, const Vec& r, const Vec& c,
                          const LikelihoodData& data, const LikelihoodOptions& options = {});

}  // namespace rsirl
