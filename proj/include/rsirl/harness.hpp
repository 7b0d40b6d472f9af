#pragma once

#include "rsirl/driving.hpp"
#include "rsirl/fit.hpp"
#include "rsirl/io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rsirl {

/// Expected per-column L2 error between predicted trajectories (one per
/// action, each N x k) and the observed one, weighted by `probs`.
Vec expected_trajectory_error(const Vec& probs, const std::vector<Mat>& predicted, const Mat& observed);

/// Error metric per segment (rows) for x_rel, y_rel, v_xrel, v_yrel
/// (columns): the expectation over the model's Boltzmann policy of the L2
/// distance between the predicted and demonstrated relative trajectories,
/// both rolled out under the realized leader maneuver. `data` must hold the
/// trees of `segments` over `library`.
Mat eval_error_metric(const SemiParametricCrm& crm, const Vec& r, const Vec& c,
                      const std::vector<TrajectorySegment>& segments, const LikelihoodData& data,
                      const ActionLibrary& library, const DrivingConfig& cfg);

// ---------------------------------------------------------------- LQ

struct LqBenchmarkOptions {
  Eigen::Index n = 10;
  Eigen::Index m = 5;
  Eigen::Index L = 3;
  int envelope_samples = 6;
  int test_states = 30;
  std::vector<int> demo_counts{1, 5, 10, 15, 20};
};

struct LqBenchmarkRow {
  int demos = 0;
  double hausdorff = 0.0;  ///< to the true envelope
  double mse = 0.0;        ///< held-out action MSE
  int vertices = 0;
  bool contains_truth = false;
};

struct LqReport {
  std::uint64_t seed = 0;
  std::string config_hash;
  double hausdorff_simplex = 0.0;  ///< simplex to the true envelope, the starting gap
  std::vector<LqBenchmarkRow> rows;
  bool contained_every_step = true;
  bool nested_every_step = true;
  bool mse_nonincreasing = true;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
};

LqReport run_lq_benchmark(std::uint64_t seed, const LqBenchmarkOptions& options = {});
std::string lq_report_csv(const LqReport& report);
Json lq_report_json(const LqReport& report);

// ---------------------------------------------------------------- driving

enum class ExpertProfile { RiskAverse, AmbiguityAverse, RiskNeutral };

ExpertProfile parse_profile(const std::string& name);
std::string to_string(ExpertProfile profile);

/// Ground-truth offsets (axis-aligned normals) for a synthetic profile.
/// Risk-averse overweights the leader's deceleration, ambiguity-averse
/// allows a wide box around the pmf, risk-neutral pins the envelope to it.
Vec profile_offsets(ExpertProfile profile, const Pmf& pmf);

struct DrivingBenchmarkOptions {
  DrivingConfig cfg = DrivingConfig::defaults();
  int train_segments = 40;
  int test_segments = 40;
  /// Cluster the training controls into a fresh library (k_first/k_later
  /// centroids) instead of fitting over the expert's own trajectories.
  bool cluster_library = false;
  int k_first = 15;
  int k_later = 5;
  Vec true_weights;  ///< empty: the built-in expert weights
  /// The risk-sensitive fit starts from the baseline's weights and the pinned
  /// offsets lowered by this much (a box of this half-width around the pmf).
  double rs_start_margin = 0.0;
  FitHyperparams hyper;
};

/// The expert weights used when none are given.
Vec default_driving_weights();
/// Scenario defaults tuned for the synthetic benchmark (beta in particular).
DrivingBenchmarkOptions default_driving_options();

struct ModelFit {
  Vec r;
  Vec c;
  double train_loglik = 0.0;
  double test_loglik = 0.0;
  int iterations = 0;
  std::vector<double> trace;
  std::vector<Vec> r_trace;  ///< envelope offsets per accepted iterate
  Mat errors;  ///< test segments x 4
};

struct DrivingReport {
  std::uint64_t seed = 0;
  ExpertProfile profile = ExpertProfile::RiskAverse;
  std::string config_hash;
  Vec true_r;
  Vec true_c;
  ModelFit rs;
  ModelFit rn;
  Mat improvement;       ///< per test segment, percent, (RN - RS) / RN
  Vec mean_improvement;  ///< column means over segments with a nonzero RN error
  double wall_seconds = 0.0;
};

DrivingReport run_driving_benchmark(std::uint64_t seed, ExpertProfile profile,
                                    const DrivingBenchmarkOptions& options = default_driving_options());
Json driving_report_json(const DrivingReport& report);
std::string driving_report_csv(const DrivingReport& report);

}  // namespace rsirl
