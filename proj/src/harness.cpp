#include "rsirl/harness.hpp"

#include "rsirl/clustering.hpp"
#include "rsirl/forward.hpp"
#include "rsirl/lq.hpp"
#include "rsirl/single_step.hpp"

#include <chrono>
#include <sstream>

namespace rsirl {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Vec expected_trajectory_error(const Vec& probs, const std::vector<Mat>& predicted, const Mat& observed) {
  require_dim(static_cast<Eigen::Index>(predicted.size()), probs.size(), "expected_trajectory_error");
  Vec out = Vec::Zero(observed.cols());
  for (std::size_t a = 0; a < predicted.size(); ++a) {
    if (predicted[a].rows() != observed.rows() || predicted[a].cols() != observed.cols()) {
      throw DimensionMismatch("expected_trajectory_error: trajectory shapes differ");
    }
    out += probs[static_cast<Eigen::Index>(a)] * (predicted[a] - observed).colwise().norm().transpose();
  }
  return out;
}

Mat eval_error_metric(const SemiParametricCrm& crm, const Vec& r, const Vec& c,
                      const std::vector<TrajectorySegment>& segments, const LikelihoodData& data,
                      const ActionLibrary& library, const DrivingConfig& cfg) {
  require_dim(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(segments.size()),
              "eval_error_metric segments");
  const auto dist = make_disturbance_library(cfg);
  Mat errors(static_cast<Eigen::Index>(segments.size()), 4);
  SoftBellmanOptions so;
  so.beta = data.cfg.beta;
  so.gradient = false;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    const Vec probs = boltzmann(soft_bellman(data.trees[i], crm, r, c, so).root_values, so.beta);
    const Mat observed =
        run_stage(cfg, dist, seg.start_state, seg.prev_mode, seg.realized_mode, seg.observed_action).relative;
    std::vector<Mat> predicted;
    for (const auto& action : library.first_stage) {
      predicted.push_back(run_stage(cfg, dist, seg.start_state, seg.prev_mode, seg.realized_mode, action).relative);
    }
    errors.row(static_cast<Eigen::Index>(i)) = expected_trajectory_error(probs, predicted, observed).transpose();
  }
  return errors;
}

// ---------------------------------------------------------------- LQ

LqReport run_lq_benchmark(std::uint64_t seed, const LqBenchmarkOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opt.demo_counts.empty()) throw Error("bench-lq: no demonstration counts");
  const int max_demos = *std::max_element(opt.demo_counts.begin(), opt.demo_counts.end());

  LqReport rep;
  rep.seed = seed;
  rep.config_hash = hex64(config_hash({{"seed", seed},
                                       {"n", opt.n},
                                       {"m", opt.m},
                                       {"L", opt.L},
                                       {"envelope_samples", opt.envelope_samples},
                                       {"test_states", opt.test_states},
                                       {"demo_counts", opt.demo_counts}}));

  const LqSystem sys = sample_lq_system(seed, opt.n, opt.m, opt.L, opt.envelope_samples);
  const CostOracle cost = lq_cost(sys);
  const auto demos = lq_expert_demos(sys, cost, sample_states(seed + 100, opt.n, max_demos));
  const auto test = lq_expert_demos(sys, cost, sample_states(seed + 200, opt.n, opt.test_states));

  PruneOptions po;
  po.record_history = true;
  const PruneResult pruned = prune_envelope(demos, cost, sys.bounds, po);
  rep.warnings = pruned.warnings;
  rep.hausdorff_simplex = hausdorff(RiskEnvelope::simplex(opt.L), sys.true_envelope);

  for (std::size_t d = 0; d < pruned.history.size(); ++d) {
    const auto& env = pruned.history[d];
    if (!env.contains(sys.true_envelope, 1e-7)) rep.contained_every_step = false;
    const RiskEnvelope& prev = d == 0 ? RiskEnvelope::simplex(opt.L) : pruned.history[d - 1];
    if (!prev.contains(env, 1e-7)) rep.nested_every_step = false;
  }

  for (int count : opt.demo_counts) {
    if (count < 1) throw Error("bench-lq: demonstration counts must be positive");
    const auto& env = pruned.history[static_cast<std::size_t>(count - 1)];
    LqBenchmarkRow row;
    row.demos = count;
    row.hausdorff = hausdorff(env, sys.true_envelope);
    row.vertices = static_cast<int>(env.vertices().size());
    row.contains_truth = env.contains(sys.true_envelope, 1e-7);
    for (const auto& t : test) {
      const Vec u = solve_static_forward(t.state, env, cost, sys.bounds).u;
      row.mse += (u - t.control).squaredNorm() / static_cast<double>(opt.m);
    }
    row.mse /= static_cast<double>(test.size());
    if (!rep.rows.empty() && row.demos > rep.rows.back().demos && row.mse > rep.rows.back().mse * (1 + 1e-9) + 1e-12) {
      rep.mse_nonincreasing = false;
    }
    rep.rows.push_back(row);
  }
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

std::string lq_report_csv(const LqReport& rep) {
  std::ostringstream os;
  os.precision(10);
  os << "demos,hausdorff,hausdorff_ratio,mse,vertices,contains_truth\n";
  for (const auto& r : rep.rows) {
    os << r.demos << ',' << r.hausdorff << ',' << r.hausdorff / rep.hausdorff_simplex << ',' << r.mse << ','
       << r.vertices << ',' << (r.contains_truth ? 1 : 0) << '\n';
  }
  return os.str();
}

Json lq_report_json(const LqReport& rep) {
  Json rows = Json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"demos", r.demos},
                    {"hausdorff", r.hausdorff},
                    {"mse", r.mse},
                    {"vertices", r.vertices},
                    {"contains_truth", r.contains_truth}});
  }
  return {{"seed", rep.seed},
          {"config_hash", rep.config_hash},
          {"hausdorff_simplex", rep.hausdorff_simplex},
          {"rows", rows},
          {"contained_every_step", rep.contained_every_step},
          {"nested_every_step", rep.nested_every_step},
          {"mse_nonincreasing", rep.mse_nonincreasing},
          {"warnings", rep.warnings},
          {"wall_seconds", rep.wall_seconds}};
}

// ---------------------------------------------------------------- driving

ExpertProfile parse_profile(const std::string& name) {
  if (name == "risk-averse") return ExpertProfile::RiskAverse;
  if (name == "ambiguity-averse") return ExpertProfile::AmbiguityAverse;
  if (name == "risk-neutral") return ExpertProfile::RiskNeutral;
  throw Error("unknown profile '" + name + "' (risk-averse, ambiguity-averse, risk-neutral)");
}

std::string to_string(ExpertProfile profile) {
  switch (profile) {
    case ExpertProfile::RiskAverse: return "risk-averse";
    case ExpertProfile::AmbiguityAverse: return "ambiguity-averse";
    case ExpertProfile::RiskNeutral: return "risk-neutral";
  }
  return "unknown";
}

Vec profile_offsets(ExpertProfile profile, const Pmf& pmf) {
  const Vec& p = pmf.probs();
  const Eigen::Index L = p.size();
  if (profile == ExpertProfile::RiskNeutral) return pinned_offsets(pmf);
  // Box lo <= v <= hi, encoded as r = [1 - hi ; lo].
  Vec lo, hi;
  if (profile == ExpertProfile::RiskAverse) {
    if (L != 4) throw Error("risk-averse profile is defined for the four driving maneuvers");
    lo = 0.5 * p;
    hi = (p.array() + 0.1).min(1.0).matrix();
    // Deceleration is taken to be at least even odds, and possibly certain.
    lo[2] = std::max(p[2], 0.5);
    hi[2] = 1.0;
  } else {
    lo = 0.5 * p;
    hi = (1.5 * p.array() + 0.05).min(1.0).matrix();
  }
  Vec r(2 * L);
  r << (1.0 - hi.array()).matrix(), lo;
  return r;
}

Vec default_driving_weights() {
  Vec c(kDrivingFeatures);
  c << 0.3, 0.15, 0.15, 0.05, 0.25, 0.1;
  return c;
}

DrivingBenchmarkOptions default_driving_options() {
  DrivingBenchmarkOptions opt;
  opt.cfg.scenario.beta = 10.0;
  opt.true_weights = default_driving_weights();
  opt.hyper.max_iters = 40;
  return opt;
}

namespace {

std::vector<Mat> observed_actions(const std::vector<TrajectorySegment>& segs) {
  std::vector<Mat> out;
  for (const auto& s : segs) out.push_back(s.observed_action);
  return out;
}

Vec relaxed_start(const Pmf& pmf, double margin) {
  return (pinned_offsets(pmf).array() - margin).max(0.0).matrix();
}

}  // namespace

DrivingReport run_driving_benchmark(std::uint64_t seed, ExpertProfile profile, const DrivingBenchmarkOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const DrivingConfig& cfg = opt.cfg;
  cfg.scenario.validate();
  const auto L = static_cast<Eigen::Index>(cfg.scenario.L);
  const SemiParametricCrm crm = SemiParametricCrm::axis_aligned(L);

  DrivingReport rep;
  rep.seed = seed;
  rep.profile = profile;
  rep.true_r = profile_offsets(profile, cfg.scenario.pmf);
  rep.true_c = opt.true_weights.size() ? opt.true_weights : default_driving_weights();
  rep.config_hash = hex64(config_hash({{"seed", seed},
                                       {"profile", to_string(profile)},
                                       {"config", driving_config_to_json(cfg)},
                                       {"train", opt.train_segments},
                                       {"test", opt.test_segments},
                                       {"cluster_library", opt.cluster_library},
                                       {"k_first", opt.k_first},
                                       {"k_later", opt.k_later},
                                       {"weights", vec_to_json(rep.true_c)},
                                       {"step_r", opt.hyper.step_r},
                                       {"step_c", opt.hyper.step_c},
                                       {"iters", opt.hyper.max_iters},
                                       {"rs_start_margin", opt.rs_start_margin}}));

  const ActionLibrary expert_lib = default_driving_library(cfg);
  const auto train = synthetic_expert_run(cfg, crm, rep.true_r, rep.true_c, expert_lib, opt.train_segments, seed);
  const auto test =
      synthetic_expert_run(cfg, crm, rep.true_r, rep.true_c, expert_lib, opt.test_segments, seed + 0x9e3779b9ULL);

  const ActionLibrary lib = opt.cluster_library
                                ? cluster_actions(observed_actions(train), opt.k_first, opt.k_later, seed, cfg.bounds)
                                : expert_lib;
  const auto rollout = driving_rollout(cfg);
  const LikelihoodData train_data = LikelihoodData::build(train, lib, cfg.scenario, rollout);
  const LikelihoodData test_data = LikelihoodData::build(test, lib, cfg.scenario, rollout);

  LikelihoodOptions lo;
  lo.gradient = false;
  auto finish = [&](ModelFit& m, const FitResult& f) {
    m.r = f.r;
    m.c = f.c;
    m.train_loglik = f.value;
    m.iterations = f.iterations;
    m.trace = f.trace;
    m.r_trace = f.r_trace;
    m.test_loglik = log_likelihood(crm, m.r, m.c, test_data, lo).value;
    m.errors = eval_error_metric(crm, m.r, m.c, test, test_data, lib, cfg);
  };

  // Risk-neutral baseline: envelope pinned to the pmf, weights only.
  FitHyperparams rn_hyper = opt.hyper;
  rn_hyper.fit_r = false;
  const Vec uniform = Vec::Constant(kDrivingFeatures, 1.0 / kDrivingFeatures);
  finish(rep.rn, fit(crm, train_data, rn_hyper, pinned_offsets(cfg.scenario.pmf), uniform));

  // Risk-sensitive model, started from the baseline's weights and (with the
  // default zero margin) the baseline's pinned envelope, so it can only gain
  // training likelihood over it.
  FitHyperparams rs_hyper = opt.hyper;
  rs_hyper.fit_r = true;
  finish(rep.rs, fit(crm, train_data, rs_hyper, relaxed_start(cfg.scenario.pmf, opt.rs_start_margin), rep.rn.c));

  rep.improvement = Mat::Zero(rep.rs.errors.rows(), 4);
  rep.mean_improvement = Vec::Zero(4);
  for (Eigen::Index k = 0; k < 4; ++k) {
    int used = 0;
    for (Eigen::Index i = 0; i < rep.rs.errors.rows(); ++i) {
      const double rn = rep.rn.errors(i, k);
      if (rn <= 1e-9) continue;
      rep.improvement(i, k) = 100.0 * (rn - rep.rs.errors(i, k)) / rn;
      rep.mean_improvement[k] += rep.improvement(i, k);
      ++used;
    }
    if (used > 0) rep.mean_improvement[k] /= used;
  }
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

namespace {

Json offset_trace(const std::vector<Vec>& rs) {
  Json out = Json::array();
  for (const Vec& r : rs) out.push_back(vec_to_json(r));
  return out;
}

}  // namespace

Json driving_report_json(const DrivingReport& rep) {
  auto model = [](const ModelFit& m) {
    return Json{{"offsets", vec_to_json(m.r)},
                {"weights", vec_to_json(m.c)},
                {"train_loglik", m.train_loglik},
                {"test_loglik", m.test_loglik},
                {"iterations", m.iterations},
                {"trace", m.trace},
                {"offset_trace", offset_trace(m.r_trace)},
                {"errors", mat_to_json(m.errors)}};
  };
  return {{"seed", rep.seed},
          {"profile", to_string(rep.profile)},
          {"config_hash", rep.config_hash},
          {"true_offsets", vec_to_json(rep.true_r)},
          {"true_weights", vec_to_json(rep.true_c)},
          {"rs", model(rep.rs)},
          {"rn", model(rep.rn)},
          {"improvement_percent", mat_to_json(rep.improvement)},
          {"mean_improvement_percent",
           {{"x_rel", rep.mean_improvement[0]},
            {"y_rel", rep.mean_improvement[1]},
            {"vx_rel", rep.mean_improvement[2]},
            {"vy_rel", rep.mean_improvement[3]}}},
          {"wall_seconds", rep.wall_seconds}};
}

std::string driving_report_csv(const DrivingReport& rep) {
  std::ostringstream os;
  os.precision(10);
  os << "segment,rs_dx,rs_dy,rs_dvx,rs_dvy,rn_dx,rn_dy,rn_dvx,rn_dvy,impr_dx,impr_dy,impr_dvx,impr_dvy\n";
  for (Eigen::Index i = 0; i < rep.rs.errors.rows(); ++i) {
    os << i;
    for (const Mat* m : {&rep.rs.errors, &rep.rn.errors, &rep.improvement}) {
      for (Eigen::Index k = 0; k < 4; ++k) os << ',' << (*m)(i, k);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace rsirl
