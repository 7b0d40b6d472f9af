#pragma once
// Small random prepare-react games shared by the multi-step tests.

#include "rsirl/likelihood.hpp"

#include <cmath>
#include <random>

namespace toy {

using rsirl::Mat;
using rsirl::Vec;

struct World {
  rsirl::ScenarioConfig cfg;
  rsirl::ActionLibrary library;
  rsirl::StageRollout rollout;
  Vec root;
};

// Scalar-ish dynamics: the state drifts toward a mode-dependent target while
// the action pushes it; features are smooth and nonnegative. `scale`
// multiplies every feature.
inline World make_world(std::uint64_t seed, int L, int actions, int T, int H, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  World w;
  w.cfg.L = L;
  Vec p(L);
  for (int j = 0; j < L; ++j) p[j] = 0.5 + std::uniform_real_distribution<double>()(rng);
  w.cfg.pmf = rsirl::Pmf(p / p.sum());
  w.cfg.N = 4;
  w.cfg.n_d = 2;
  w.cfg.T = T;
  w.cfg.beta = 1.0;

  auto random_action = [&]() {
    Mat a(w.cfg.N, 2);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = gauss(rng);
    return a;
  };
  for (int a = 0; a < actions; ++a) w.library.first_stage.push_back(random_action());
  for (int a = 0; a < actions; ++a) w.library.later_stage.push_back(random_action());

  Mat drift(L, 2), targets(H, 2);
  for (Eigen::Index i = 0; i < drift.size(); ++i) drift.data()[i] = gauss(rng);
  for (Eigen::Index i = 0; i < targets.size(); ++i) targets.data()[i] = gauss(rng);
  const int N = w.cfg.N, n_d = w.cfg.n_d;
  w.rollout = [drift, targets, N, n_d, H, scale](const Vec& x0, int prev, int next, const Mat& action) {
    Vec x = x0;
    Vec phi = Vec::Zero(H);
    for (int k = 0; k < N; ++k) {
      const int mode = k < N - n_d ? prev : next;
      x = 0.8 * x + 0.3 * drift.row(mode).transpose() + 0.2 * action.row(k).transpose();
      for (int h = 0; h < H; ++h) phi[h] += std::log1p((x - targets.row(h).transpose()).squaredNorm());
    }
    return rsirl::StageOutcome{x, scale * phi};
  };
  w.root = Vec::Zero(2);
  w.root[0] = gauss(rng);
  w.root[1] = gauss(rng);
  return w;
}

inline rsirl::ScenarioTree tree_of(const World& w, int prev_mode = 0) {
  return rsirl::ScenarioTree::build(w.root, prev_mode, w.library, w.cfg, w.rollout);
}

// Segments from random start states, with observed actions drawn uniformly
// from the library (the likelihood only needs some observed action).
inline std::vector<rsirl::TrajectorySegment> random_segments(const World& w, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> mode(0, w.cfg.L - 1);
  std::uniform_int_distribution<std::size_t> act(0, w.library.first_stage.size() - 1);
  std::vector<rsirl::TrajectorySegment> out;
  for (int i = 0; i < count; ++i) {
    Vec x(2);
    x << gauss(rng), gauss(rng);
    out.push_back({x, mode(rng), mode(rng), w.library.first_stage[act(rng)]});
  }
  return out;
}

// Offsets of a random box lo <= v <= hi around p, with both bounds strictly
// inside (0, 1) so the envelope has full dimension.
inline Vec random_box_offsets(const Vec& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 0.9);
  const Eigen::Index L = p.size();
  Vec r(2 * L);
  for (Eigen::Index j = 0; j < L; ++j) {
    const double lo = p[j] * u(rng);
    const double hi = p[j] + (1.0 - p[j]) * u(rng);
    r[j] = 1.0 - hi;
    r[L + j] = lo;
  }
  return r;
}

inline Vec random_weights(int H, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  Vec c(H);
  for (int h = 0; h < H; ++h) c[h] = u(rng);
  return c / c.sum();
}

}  // namespace toy
