#include "rsirl/scenario.hpp"

#include <string>

namespace rsirl {

void ScenarioConfig::validate() const {
  if (L < 1) throw Error("scenario: L must be positive");
  if (pmf.size() != L) throw DimensionMismatch("scenario: pmf size " + std::to_string(pmf.size()) +
                                               " does not match L = " + std::to_string(L));
  if (N < 2 || n_d <= 0 || n_d >= N) throw Error("scenario: need 0 < n_d < N");
  if (T < 1) throw Error("scenario: need T >= 1");
  if (!(beta > 0.0)) throw Error("scenario: beta must be positive");
  if (!(dt > 0.0)) throw Error("scenario: dt must be positive");
}

int nearest_action(const Mat& observed, const std::vector<Mat>& library) {
  if (library.empty()) throw Error("nearest_action: empty library");
  int best = -1;
  double best_dist = kInf;
  for (std::size_t a = 0; a < library.size(); ++a) {
    if (library[a].rows() != observed.rows() || library[a].cols() != observed.cols()) {
      throw DimensionMismatch("nearest_action: trajectory shape differs from library");
    }
    const double d = (library[a] - observed).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(a);
    }
  }
  return best;
}

ScenarioTree ScenarioTree::build(const Vec& root_state, int prev_mode, const ActionLibrary& library,
                                 const ScenarioConfig& cfg, const StageRollout& rollout) {
  cfg.validate();
  if (library.first_stage.empty() || (cfg.T > 1 && library.later_stage.empty())) {
    throw Error("scenario tree: empty action library");
  }
  if (prev_mode < 0 || prev_mode >= cfg.L) throw Error("scenario tree: mode out of range");

  ScenarioTree tree;
  tree.L = cfg.L;
  tree.nodes.push_back({0, prev_mode, root_state, {}, {}});

  // Breadth-first, so every child lands after its parent.
  for (std::size_t idx = 0; idx < tree.nodes.size(); ++idx) {
    const int stage = tree.nodes[idx].stage;
    const Vec state = tree.nodes[idx].state;
    const int prev = tree.nodes[idx].prev_mode;
    const auto& lib = library.stage(stage);
    const bool last = stage + 1 == cfg.T;

    std::vector<Mat> phi(lib.size());
    std::vector<int> child(lib.size() * cfg.L, -1);
    for (std::size_t a = 0; a < lib.size(); ++a) {
      for (int j = 0; j < cfg.L; ++j) {
        StageOutcome out = rollout(state, prev, j, lib[a]);
        if (tree.H == 0) tree.H = static_cast<int>(out.features.size());
        require_dim(out.features.size(), tree.H, "scenario tree features");
        if (phi[a].size() == 0) phi[a] = Mat::Zero(cfg.L, tree.H);
        phi[a].row(j) = out.features.transpose();
        if (!last) {
          child[a * cfg.L + j] = static_cast<int>(tree.nodes.size());
          tree.nodes.push_back({stage + 1, j, std::move(out.state), {}, {}});
        }
      }
    }
    tree.nodes[idx].phi = std::move(phi);
    tree.nodes[idx].child = std::move(child);
  }
  return tree;
}

}  // namespace rsirl
