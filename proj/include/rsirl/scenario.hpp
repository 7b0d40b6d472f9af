#pragma once

#include "rsirl/simplex.hpp"

#include <functional>
#include <vector>

namespace rsirl {

/// Discrete disturbance model for prepare-react planning. Modes are 0-based.
struct ScenarioConfig {
  int L = 4;
  Pmf pmf = Pmf::uniform(4);
  int N = 15;    ///< steps per stage
  int n_d = 8;   ///< react steps after each disturbance sample
  int T = 2;     ///< branching events in the look-ahead
  double beta = 1.0;
  double dt = 0.1;

  /// Throws Error on n_d outside (0, N), T < 1, beta <= 0 or a pmf of the wrong size.
  void validate() const;
};

/// Finite open-loop trajectories (each N x m) for the first and later stages.
struct ActionLibrary {
  std::vector<Mat> first_stage;
  std::vector<Mat> later_stage;

  const std::vector<Mat>& stage(int t) const { return t == 0 ? first_stage : later_stage; }
};

/// Closest trajectory in Frobenius norm; ties go to the lowest index.
int nearest_action(const Mat& observed, const std::vector<Mat>& library);

/// Result of running one stage: the state handed to the next stage and the
/// feature sum accumulated over the N steps.
struct StageOutcome {
  Vec state;
  Vec features;
};

/// Runs one stage from `state`. The first N - n_d steps see `prev_mode`, the
/// remaining n_d steps see `next_mode`.
using StageRollout =
    std::function<StageOutcome(const Vec& state, int prev_mode, int next_mode, const Mat& action)>;

/// Game tree between the planner (library actions) and nature (modes).
///
/// Node 0 is the root. For a node at stage t, `phi[a]` is the L x H matrix
/// whose row j is the feature sum of action a when the next mode is j, and
/// `child[a * L + j]` is the stage t+1 node reached that way (-1 at the last
/// stage). Children always have larger indices than their parent.
struct ScenarioTree {
  struct Node {
    int stage = 0;
    int prev_mode = 0;
    Vec state;
    std::vector<Mat> phi;
    std::vector<int> child;
  };

  int L = 0;
  int H = 0;
  std::vector<Node> nodes;

  static ScenarioTree build(const Vec& root_state, int prev_mode, const ActionLibrary& library,
                            const ScenarioConfig& cfg, const StageRollout& rollout);

  std::size_t actions(std::size_t node) const { return nodes[node].phi.size(); }
};

}  // namespace rsirl
