#include "rsirl/driving.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace rsirl {

FollowerState step_follower(const FollowerState& s, double u_a, double u_s, double dt) {
  FollowerState n = s;
  n.x += dt * s.v * std::cos(s.theta);
  n.y += dt * s.v * std::sin(s.theta);
  n.v += dt * u_a;
  n.theta += dt * (-s.v / kWheelbase * std::tan(s.delta));
  n.delta += dt * u_s;
  return n;
}

LeaderState step_leader(const LeaderState& s, double w_x, double w_y, double dt) {
  LeaderState n = s;
  n.x += dt * s.vx;
  n.vx += dt * w_x;
  n.y += dt * s.vy;
  n.vy += dt * s.ay;
  n.ay += dt * w_y;
  return n;
}

Vec joint_state(const FollowerState& f, const LeaderState& l) {
  Vec xi(10);
  xi << f.x, f.y, f.theta, f.v, f.delta, l.x, l.vx, l.y, l.vy, l.ay;
  return xi;
}

FollowerState follower_of(const Vec& xi) { return {xi[0], xi[1], xi[3], xi[2], xi[4]}; }

LeaderState leader_of(const Vec& xi) { return {xi[5], xi[6], xi[7], xi[8], xi[9]}; }

namespace {

// Overflow-safe log(1 + e^z) - log 2.
double softplus_shifted(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - std::numbers::ln2;
}

}  // namespace

Vec step_features(const Vec& xi, const FeatureParams& p) {
  const double x_rel = xi[5] - xi[0];
  const double y_rel = xi[7] - xi[1];
  const double vx_rel = xi[6] - xi[3] * std::cos(xi[2]);
  const double y_f = xi[1];
  Vec phi = Vec::Zero(kDrivingFeatures);
  if (x_rel < p.x_threshold) phi[0] = softplus_shifted(-p.r1 * (x_rel - p.x_threshold));
  if (x_rel > p.x_threshold) phi[1] = softplus_shifted(p.r2 * (x_rel - p.x_threshold));
  phi[2] = softplus_shifted(p.r3 * std::abs(vx_rel));
  phi[4] = softplus_shifted(p.r5 * std::abs(y_rel));
  if (y_f > p.road_half_width) phi[5] = softplus_shifted(p.r6 * (y_f - p.road_half_width));
  if (y_f < -p.road_half_width) phi[5] = softplus_shifted(-p.r6 * (y_f + p.road_half_width));
  return phi;
}

Vec window_features(const std::vector<Vec>& states, const Vec& u_a, const FeatureParams& p) {
  Vec phi = Vec::Zero(kDrivingFeatures);
  for (const Vec& xi : states) phi += step_features(xi, p);
  for (Eigen::Index k = 1; k < u_a.size(); ++k) {
    const double d = u_a[k] - u_a[k - 1];
    phi[3] += p.r4 * d * d;
  }
  return phi;
}

DrivingConfig DrivingConfig::defaults() {
  DrivingConfig cfg;
  cfg.scenario.L = 4;
  cfg.scenario.pmf = Pmf((Vec(4) << 0.3, 0.3, 0.3, 0.1).finished());
  cfg.scenario.N = 15;
  cfg.scenario.n_d = 8;
  cfg.scenario.T = 2;
  cfg.scenario.beta = 1.0;
  cfg.scenario.dt = 0.1;
  cfg.bounds = ControlBounds((Vec(2) << -4.0, -1.0).finished(), (Vec(2) << 4.0, 1.0).finished());
  return cfg;
}

DisturbanceLibrary make_disturbance_library(const DrivingConfig& cfg) {
  const int N = cfg.scenario.N;
  const double dt = cfg.scenario.dt;
  if (cfg.scenario.L != 4) throw Error("driving: the maneuver set has exactly 4 modes");

  // Lane swap: lateral acceleration A sin(2 pi k / N) for k = 0..N. Its
  // Euler sums vanish over a full period, so the leader ends at rest
  // laterally; A is scaled to hit the requested offset.
  Vec accel(N + 1);
  for (int k = 0; k <= N; ++k) accel[k] = std::sin(2.0 * std::numbers::pi * k / N);
  accel[N] = 0.0;
  double y = 0.0, vy = 0.0;
  for (int k = 0; k < N; ++k) {
    y += dt * vy;
    vy += dt * accel[k];
  }
  const double scale = cfg.maneuvers.lane_offset / y;

  DisturbanceLibrary lib;
  lib.pmf = cfg.scenario.pmf;
  lib.maneuvers.assign(4, Mat::Zero(N, 2));
  lib.maneuvers[1].col(0).setConstant(cfg.maneuvers.accel);
  lib.maneuvers[2].col(0).setConstant(-cfg.maneuvers.accel);
  for (int k = 0; k < N; ++k) lib.maneuvers[3](k, 1) = scale * (accel[k + 1] - accel[k]) / dt;
  return lib;
}

Vec initial_driving_state(const DrivingConfig& cfg) {
  FollowerState f;
  f.y = -cfg.maneuvers.lane_center;
  f.v = 12.0;
  LeaderState l;
  l.x = 12.0;
  l.vx = 12.0;
  l.y = -cfg.maneuvers.lane_center;
  Vec s(kDrivingStateSize);
  s << joint_state(f, l), 1.0;
  return s;
}

StageTrace run_stage(const DrivingConfig& cfg, const DisturbanceLibrary& dist, const Vec& state, int prev_mode,
                     int next_mode, const Mat& action) {
  const int N = cfg.scenario.N;
  const int n_d = cfg.scenario.n_d;
  const double dt = cfg.scenario.dt;
  require_dim(state.size(), kDrivingStateSize, "driving state");
  if (action.rows() != N || action.cols() != 2) throw DimensionMismatch("driving: action must be N x 2");

  FollowerState f = follower_of(state);
  LeaderState l = leader_of(state);
  double swap_sign = state[10];

  StageTrace tr;
  tr.relative.resize(N, 4);
  for (int k = 0; k < N; ++k) {
    // Prepare: the tail of the maneuver in progress. React: the new one.
    int mode = prev_mode;
    int step = n_d + k;
    if (k >= N - n_d) {
      mode = next_mode;
      step = k - (N - n_d);
      if (step == 0 && mode == 3) swap_sign = l.y < 0.0 ? 1.0 : -1.0;
    }
    double w_x = dist.maneuvers[mode](step, 0);
    const double w_y = swap_sign * dist.maneuvers[mode](step, 1);
    if ((w_x > 0.0 && l.vx >= cfg.maneuvers.v_max) || (w_x < 0.0 && l.vx <= cfg.maneuvers.v_min)) w_x = 0.0;

    f = step_follower(f, action(k, 0), action(k, 1), dt);
    l = step_leader(l, w_x, w_y, dt);
    tr.joints.push_back(joint_state(f, l));
    tr.relative.row(k) << l.x - f.x, l.y - f.y, l.vx - f.v * std::cos(f.theta), l.vy - f.v * std::sin(f.theta);
  }
  tr.features = window_features(tr.joints, action.col(0), cfg.features);
  tr.final_state.resize(kDrivingStateSize);
  tr.final_state << tr.joints.back(), swap_sign;
  return tr;
}

StageRollout driving_rollout(const DrivingConfig& cfg) {
  auto dist = make_disturbance_library(cfg);
  return [cfg, dist](const Vec& state, int prev, int next, const Mat& action) {
    StageTrace tr = run_stage(cfg, dist, state, prev, next, action);
    return StageOutcome{std::move(tr.final_state), std::move(tr.features)};
  };
}

ActionLibrary default_driving_library(const DrivingConfig& cfg) {
  const int N = cfg.scenario.N;
  const double dt = cfg.scenario.dt;
  // Steering doublet delta = D sin(2 pi k / N): yaw returns to zero after the
  // window and the car ends shifted sideways. D is chosen for roughly one
  // lane at the nominal 12 m/s (small-angle estimate).
  const double omega = 2.0 * std::numbers::pi / (N * dt);
  const double window = N * dt;
  const double D = cfg.maneuvers.lane_offset * kWheelbase * omega / (12.0 * 12.0 * window);

  auto ramp = [&](double target) {
    Vec u(N);
    for (int k = 0; k < N; ++k) u[k] = target * std::min(1.0, (k + 1) / 5.0);
    return u;
  };
  auto steer = [&](int dir) {
    Vec u = Vec::Zero(N);
    if (dir == 0) return u;
    // Positive delta turns toward -y, so a left (+y) shift uses -D.
    for (int k = 0; k < N; ++k) {
      const double d0 = std::sin(2.0 * std::numbers::pi * k / N);
      const double d1 = std::sin(2.0 * std::numbers::pi * (k + 1) / N);
      u[k] = -dir * D * (d1 - d0) / dt;
    }
    return u;
  };
  auto traj = [&](double accel, int dir) {
    Mat a(N, 2);
    a.col(0) = ramp(accel);
    a.col(1) = steer(dir);
    return a.cwiseMax(cfg.bounds.lower.transpose().replicate(N, 1)).cwiseMin(cfg.bounds.upper.transpose().replicate(N, 1)).eval();
  };

  ActionLibrary lib;
  for (double accel : {-3.0, -1.5, 0.0, 1.5, 3.0}) {
    for (int dir : {0, 1, -1}) lib.first_stage.push_back(traj(accel, dir));
  }
  for (double accel : {-3.0, 0.0, 3.0}) lib.later_stage.push_back(traj(accel, 0));
  lib.later_stage.push_back(traj(0.0, 1));
  lib.later_stage.push_back(traj(0.0, -1));
  return lib;
}

std::vector<TrajectorySegment> synthetic_expert_run(const DrivingConfig& cfg, const SemiParametricCrm& crm,
                                                    const Vec& r, const Vec& c, const ActionLibrary& library,
                                                    int segments, std::uint64_t seed) {
  if (!crm.feasible(r)) throw Error("synthetic expert: offsets give an empty envelope");
  const auto dist = make_disturbance_library(cfg);
  const auto rollout = driving_rollout(cfg);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> nature(cfg.scenario.pmf.probs().data(),
                                         cfg.scenario.pmf.probs().data() + cfg.scenario.L);

  Vec state = initial_driving_state(cfg);
  int prev = 0;
  std::vector<TrajectorySegment> out;
  SoftBellmanOptions so;
  so.beta = cfg.scenario.beta;
  so.gradient = false;
  for (int t = 0; t < segments; ++t) {
    const ScenarioTree tree = ScenarioTree::build(state, prev, library, cfg.scenario, rollout);
    const Vec sigma = boltzmann(soft_bellman(tree, crm, r, c, so).root_values, cfg.scenario.beta);
    std::discrete_distribution<int> policy(sigma.data(), sigma.data() + sigma.size());
    const int a = policy(rng);
    const int w = nature(rng);
    out.push_back({state, prev, w, library.first_stage[a]});
    state = run_stage(cfg, dist, state, prev, w, library.first_stage[a]).final_state;
    prev = w;
  }
  return out;
}

}  // namespace rsirl
