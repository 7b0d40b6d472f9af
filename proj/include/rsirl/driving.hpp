#pragma once

#include "rsirl/cost.hpp"
#include "rsirl/likelihood.hpp"

#include <cstdint>
#include <vector>

namespace rsirl {

/// Simple-car follower.
struct FollowerState {
  double x = 0.0;      ///< along-track position, m
  double y = 0.0;      ///< lateral position, m
  double v = 0.0;      ///< speed, m/s
  double theta = 0.0;  ///< yaw, rad
  double delta = 0.0;  ///< steering angle, rad
};

/// Leader: double integrator along-track, triple integrator laterally.
struct LeaderState {
  double x = 0.0;
  double vx = 0.0;
  double y = 0.0;
  double vy = 0.0;
  double ay = 0.0;
};

inline constexpr double kWheelbase = 3.476;
inline constexpr double kCarLength = 4.2;

/// Forward Euler steps of the follower and leader dynamics.
FollowerState step_follower(const FollowerState& s, double u_a, double u_s, double dt);
LeaderState step_leader(const LeaderState& s, double w_x, double w_y, double dt);

/// Joint state [x_f, y_f, theta_f, v_f, delta_f, x_l, v_xl, y_l, v_yl, a_yl].
Vec joint_state(const FollowerState& f, const LeaderState& l);
FollowerState follower_of(const Vec& joint);
LeaderState leader_of(const Vec& joint);

struct ManeuverParams {
  double accel = 2.0;        ///< along-track input of the accelerate/decelerate maneuvers, m/s^2
  double lane_offset = 3.0;  ///< lateral displacement of a lane swap, m
  double lane_center = 1.5;  ///< lanes sit at +/- this offset, m
  double v_min = 8.0;        ///< the leader stops pushing beyond these speeds, m/s
  double v_max = 16.0;
};

struct FeatureParams {
  double r1 = 1.0, r2 = 0.05, r3 = 0.1, r4 = 1.0, r5 = 0.1, r6 = 0.5;
  double x_threshold = 2.5;      ///< m
  double road_half_width = 2.0;  ///< m
};

inline constexpr int kDrivingFeatures = 6;

/// Per-step features at a joint state (phi4 is left at zero; it needs the
/// control history, see window_features).
Vec step_features(const Vec& joint, const FeatureParams& params);

/// phi1..phi6 accumulated over a window of states and the longitudinal
/// accelerations applied along it.
Vec window_features(const std::vector<Vec>& states, const Vec& u_a, const FeatureParams& params);

/// The leader's maneuvers: N x 2 input sequences (w_x, w_y) with the pmf.
/// Mode 0 does nothing, 1 accelerates, 2 decelerates, 3 swaps lanes (the
/// stored swap moves toward +y; it is mirrored when the leader is already
/// in the upper lane).
struct DisturbanceLibrary {
  std::vector<Mat> maneuvers;
  Pmf pmf = Pmf::uniform(4);
};

struct DrivingConfig {
  ScenarioConfig scenario;
  ManeuverParams maneuvers;
  FeatureParams features;
  ControlBounds bounds = ControlBounds(Vec::Constant(2, 0.0), Vec::Constant(2, 0.0));

  /// L = 4, pmf [0.3, 0.3, 0.3, 0.1], N = 15, n_d = 8, T = 2, dt = 0.1,
  /// |u_a| <= 4 m/s^2 and |u_s| <= 1 rad/s.
  static DrivingConfig defaults();
};

DisturbanceLibrary make_disturbance_library(const DrivingConfig& cfg);

/// Simulation state: the joint state plus the direction (+1 or -1) of the
/// lane swap most recently started.
inline constexpr int kDrivingStateSize = 11;

Vec initial_driving_state(const DrivingConfig& cfg);

/// One stage and everything observed along it.
struct StageTrace {
  Vec final_state;
  std::vector<Vec> joints;  ///< joint states after each of the N steps
  Mat relative;             ///< N x 4: x_rel, y_rel, v_xrel, v_yrel after each step
  Vec features;
};

StageTrace run_stage(const DrivingConfig& cfg, const DisturbanceLibrary& dist, const Vec& state, int prev_mode,
                     int next_mode, const Mat& action);

/// StageRollout for scenario trees over the driving game.
StageRollout driving_rollout(const DrivingConfig& cfg);

/// Hand-built expert trajectories: 15 first-stage (5 acceleration ramps x
/// {straight, shift left, shift right}) and 5 later-stage.
ActionLibrary default_driving_library(const DrivingConfig& cfg);

/// Ground-truth expert: every N steps it scores its library with the soft
/// recursion, samples an action from the Boltzmann policy and nature samples
/// the next leader maneuver from the pmf.
std::vector<TrajectorySegment> synthetic_expert_run(const DrivingConfig& cfg, const SemiParametricCrm& crm,
                                                    const Vec& r, const Vec& c, const ActionLibrary& library,
                                                    int segments, std::uint64_t seed);

}  // namespace rsirl
