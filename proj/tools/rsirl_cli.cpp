#include "CLI11.hpp"

#include "rsirl/forward.hpp"
#include "rsirl/harness.hpp"
#include "rsirl/lq.hpp"
#include "rsirl/single_step.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace rsirl;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFault = 1;
constexpr int kExitInconsistent = 2;

struct Common {
  std::uint64_t seed = 1;
  std::string config;
  std::string out = ".";
  std::optional<double> beta;
  std::optional<int> iters;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory");
  app->add_option("--beta", c.beta, "Boltzmann rationality");
  app->add_option("--iters", c.iters, "maximum fit iterations");
}

Json load_config(const Common& c) { return c.config.empty() ? Json::object() : read_json_file(c.config); }

DrivingConfig driving_config(const Common& c) {
  const Json j = load_config(c);
  DrivingConfig cfg = j.contains("driving") ? driving_config_from_json(j["driving"])
                                            : default_driving_options().cfg;
  if (c.beta) cfg.scenario.beta = *c.beta;
  cfg.scenario.validate();
  return cfg;
}

std::string write_out(const Common& c, const std::string& name, const Json& j) {
  fs::create_directories(c.out);
  const std::string path = (fs::path(c.out) / name).string();
  write_json_file(path, j);
  return path;
}

std::string write_text(const Common& c, const std::string& name, const std::string& text) {
  fs::create_directories(c.out);
  const std::string path = (fs::path(c.out) / name).string();
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << text;
  return path;
}

// LQ problem sizes; the system itself is regenerated from its seed.
struct LqParams {
  std::uint64_t seed = 1;
  Eigen::Index n = 10, m = 5, L = 3, H = 3;
  int samples = 6;

  Json to_json() const { return {{"seed", seed}, {"n", n}, {"m", m}, {"L", L}, {"H", H}, {"samples", samples}}; }
  static LqParams from_json(const Json& j) {
    LqParams s;
    s.seed = j.value("seed", s.seed);
    s.n = j.value("n", s.n);
    s.m = j.value("m", s.m);
    s.L = j.value("L", s.L);
    s.H = j.value("H", s.H);
    s.samples = j.value("samples", s.samples);
    return s;
  }
};

int warn_exit(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return warnings.empty() ? kExitOk : kExitInconsistent;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string kind = "driving";
  std::string profile = "risk-averse";
  std::string cost_mode = "known";
  int count = 40;
};

int simulate(const Common& c, const SimulateArgs& a) {
  if (a.kind == "lq") {
    LqParams lqp = LqParams::from_json(load_config(c).value("lq", Json::object()));
    lqp.seed = c.seed;
    std::vector<Demonstration> demos;
    Json truth;
    if (a.cost_mode == "unknown") {
      const auto sys = sample_lq_feature_system(lqp.seed, lqp.n, lqp.m, lqp.L, lqp.H, lqp.samples);
      demos = lq_expert_demos(sys.system, sys.features().weighted(sys.weights), sample_states(lqp.seed + 100, lqp.n, a.count));
      truth = {{"envelope", envelope_to_json(sys.system.true_envelope)}, {"weights", vec_to_json(sys.weights)}};
    } else {
      const auto sys = sample_lq_system(lqp.seed, lqp.n, lqp.m, lqp.L, lqp.samples);
      demos = lq_expert_demos(sys, lq_cost(sys), sample_states(lqp.seed + 100, lqp.n, a.count));
      truth = {{"envelope", envelope_to_json(sys.true_envelope)}};
    }
    const Json out{{"kind", "lq"}, {"cost_mode", a.cost_mode}, {"lq", lqp.to_json()}, {"demos", demos_to_json(demos)},
                   {"truth", truth}, {"config_hash", hex64(config_hash(lqp.to_json()))}};
    std::cout << write_out(c, "dataset.json", out) << '\n';
    return kExitOk;
  }
  if (a.kind != "driving") throw Error("simulate: --kind must be lq or driving");

  const DrivingConfig cfg = driving_config(c);
  const auto profile = parse_profile(a.profile);
  const auto crm = SemiParametricCrm::axis_aligned(cfg.scenario.L);
  const Vec r = profile_offsets(profile, cfg.scenario.pmf);
  const Vec w = default_driving_weights();
  const auto lib = default_driving_library(cfg);
  const auto segs = synthetic_expert_run(cfg, crm, r, w, lib, a.count, c.seed);
  const Json cfg_json = driving_config_to_json(cfg);
  const Json out{{"kind", "driving"},
                 {"seed", c.seed},
                 {"profile", a.profile},
                 {"config", cfg_json},
                 {"config_hash", hex64(config_hash(cfg_json))},
                 {"truth", {{"offsets", vec_to_json(r)}, {"weights", vec_to_json(w)}}},
                 {"library", library_to_json(lib)},
                 {"segments", segments_to_json(segs)}};
  std::cout << write_out(c, "dataset.json", out) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- infer-single

int infer_single(const Common& c, const std::string& data_path, const std::string& cost_mode) {
  const Json data = read_json_file(data_path);
  if (data.value("kind", "") != "lq") throw Error("infer-single: expects an LQ dataset");
  const LqParams lqp = LqParams::from_json(data["lq"]);
  const auto demos = demos_from_json(data["demos"]);

  if (cost_mode == "unknown") {
    const auto sys = sample_lq_feature_system(lqp.seed, lqp.n, lqp.m, lqp.L, lqp.H, lqp.samples);
    const auto pruned = prune_product(demos, sys.features(), sys.system.bounds);
    const auto rec = recover_weights_and_envelope(pruned.envelope, lqp.L, lqp.H);
    Json weights = Json::array();
    for (const auto& w : rec.weights) weights.push_back(vec_to_json(w));
    const Json out{{"envelope", envelope_to_json(rec.envelope)},
                   {"vertex_weights", weights},
                   {"rank_one_quality", rec.qualities},
                   {"warnings", pruned.warnings}};
    std::cout << write_out(c, "envelope.json", out) << '\n';
    return warn_exit(pruned.warnings);
  }
  if (cost_mode != "known") throw Error("infer-single: --cost-mode must be known or unknown");
  const auto sys = sample_lq_system(lqp.seed, lqp.n, lqp.m, lqp.L, lqp.samples);
  const auto pruned = prune_envelope(demos, lq_cost(sys), sys.bounds);
  const Json out{{"envelope", envelope_to_json(pruned.envelope)},
                 {"hausdorff_to_truth", hausdorff(pruned.envelope, sys.true_envelope)},
                 {"warnings", pruned.warnings}};
  std::cout << write_out(c, "envelope.json", out) << '\n';
  return warn_exit(pruned.warnings);
}

// ---------------------------------------------------------------- driving datasets

struct DrivingData {
  DrivingConfig cfg;
  ActionLibrary library;
  std::vector<TrajectorySegment> segments;
};

DrivingData load_driving(const Common& c, const std::string& path) {
  const Json data = read_json_file(path);
  if (data.value("kind", "") != "driving") throw Error("expects a driving dataset");
  DrivingData d;
  d.cfg = driving_config_from_json(data["config"]);
  if (c.beta) d.cfg.scenario.beta = *c.beta;
  d.library = library_from_json(data["library"]);
  d.segments = segments_from_json(data["segments"]);
  return d;
}

int infer_multi(const Common& c, const std::string& data_path, bool risk_neutral) {
  const auto d = load_driving(c, data_path);
  const auto crm = SemiParametricCrm::axis_aligned(d.cfg.scenario.L);
  const auto data = LikelihoodData::build(d.segments, d.library, d.cfg.scenario, driving_rollout(d.cfg));
  FitHyperparams hp = default_driving_options().hyper;
  hp.seed = c.seed;
  if (c.iters) hp.max_iters = *c.iters;
  hp.fit_r = !risk_neutral;
  const Vec c0 = Vec::Constant(kDrivingFeatures, 1.0 / kDrivingFeatures);
  const Vec pinned = pinned_offsets(d.cfg.scenario.pmf);
  const auto res = fit(crm, data, hp, pinned, c0);

  FittedModel m{crm.normals(), res.r, res.c, d.cfg.scenario.beta, driving_config_to_json(d.cfg)};
  Json out = model_to_json(m);
  out["loglik"] = res.value;
  out["trace"] = res.trace;
  out["offset_trace"] = Json::array();
  for (const auto& r : res.r_trace) out["offset_trace"].push_back(vec_to_json(r));
  out["iterations"] = res.iterations;
  out["converged"] = res.converged;
  std::cout << write_out(c, risk_neutral ? "model_rn.json" : "model.json", out) << '\n';
  return kExitOk;
}

int eval_cmd(const Common& c, const std::string& model_path, const std::string& data_path) {
  const auto d = load_driving(c, data_path);
  const FittedModel m = model_from_json(read_json_file(model_path));
  const SemiParametricCrm crm(m.normals);
  DrivingConfig cfg = d.cfg;
  cfg.scenario.beta = c.beta ? *c.beta : m.beta;
  const auto data = LikelihoodData::build(d.segments, d.library, cfg.scenario, driving_rollout(cfg));
  const Mat err = eval_error_metric(crm, m.offsets, m.weights, d.segments, data, d.library, cfg);
  std::ostringstream os;
  os.precision(10);
  os << "segment,dx_rel,dy_rel,dvx_rel,dvy_rel\n";
  for (Eigen::Index i = 0; i < err.rows(); ++i) {
    os << i << ',' << err(i, 0) << ',' << err(i, 1) << ',' << err(i, 2) << ',' << err(i, 3) << '\n';
  }
  LikelihoodOptions lo;
  lo.gradient = false;
  const double ll = log_likelihood(crm, m.offsets, m.weights, data, lo).value;
  std::cout << write_text(c, "errors.csv", os.str()) << '\n' << "loglik " << ll << '\n';
  return kExitOk;
}

Vec parse_vec(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) v.push_back(std::stod(tok));
  return Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int forward_cmd(const Common& c, const std::string& model_path, const std::string& data_path,
                const std::string& envelope_path, const std::string& state) {
  if (!envelope_path.empty()) {
    // Static LQ plan under a given envelope.
    const Json data = read_json_file(data_path);
    const LqParams lqp = LqParams::from_json(data["lq"]);
    const auto sys = sample_lq_system(lqp.seed, lqp.n, lqp.m, lqp.L, lqp.samples);
    const Json ej = read_json_file(envelope_path);
    const auto env = envelope_from_json(ej.contains("envelope") ? ej["envelope"] : ej);
    const Vec x = state.empty() ? sample_states(c.seed, lqp.n, 1).front() : parse_vec(state);
    const auto plan = solve_static_forward(x, env, lq_cost(sys), sys.bounds);
    const Json out{{"state", vec_to_json(x)}, {"control", vec_to_json(plan.u)}, {"value", plan.tau},
                   {"worst_case", vec_to_json(plan.distribution)}, {"certified", plan.certified}};
    std::cout << write_out(c, "plan.json", out) << '\n';
    return kExitOk;
  }
  // Prepare-react plan from a driving state under a fitted model.
  const FittedModel m = model_from_json(read_json_file(model_path));
  DrivingConfig cfg = m.config.is_null() ? default_driving_options().cfg : driving_config_from_json(m.config);
  cfg.scenario.beta = c.beta ? *c.beta : m.beta;
  const ActionLibrary lib = data_path.empty() ? default_driving_library(cfg)
                                              : library_from_json(read_json_file(data_path)["library"]);
  const Vec x = state.empty() ? initial_driving_state(cfg) : parse_vec(state);
  const auto tree = ScenarioTree::build(x, 0, lib, cfg.scenario, driving_rollout(cfg));
  const SemiParametricCrm crm(m.normals);
  SoftBellmanOptions so;
  so.beta = cfg.scenario.beta;
  so.gradient = false;
  const Vec tau = soft_bellman(tree, crm, m.offsets, m.weights, so).root_values;
  const Vec probs = boltzmann(tau, so.beta);
  Eigen::Index best = 0;
  tau.minCoeff(&best);
  const Json out{{"state", vec_to_json(x)}, {"values", vec_to_json(tau)}, {"policy", vec_to_json(probs)},
                 {"best_action", best}, {"trajectory", mat_to_json(lib.first_stage[static_cast<std::size_t>(best)])}};
  std::cout << write_out(c, "plan.json", out) << '\n';
  return kExitOk;
}

int bench_lq(const Common& c, const std::vector<int>& counts) {
  LqBenchmarkOptions opt;
  const Json cfg = load_config(c).value("lq", Json::object());
  const LqParams lqp = LqParams::from_json(cfg);
  opt.n = lqp.n;
  opt.m = lqp.m;
  opt.L = lqp.L;
  opt.envelope_samples = lqp.samples;
  if (!counts.empty()) opt.demo_counts = counts;
  const auto rep = run_lq_benchmark(c.seed, opt);
  write_text(c, "lq_curve.csv", lq_report_csv(rep));
  std::cout << write_out(c, "lq_report.json", lq_report_json(rep)) << '\n';
  std::cout << lq_report_csv(rep);
  return warn_exit(rep.warnings);
}

int bench_driving(const Common& c, const std::string& profile) {
  auto opt = default_driving_options();
  opt.cfg = driving_config(c);
  if (c.iters) opt.hyper.max_iters = *c.iters;
  const auto rep = run_driving_benchmark(c.seed, parse_profile(profile), opt);
  write_text(c, "driving_" + profile + ".csv", driving_report_csv(rep));
  std::cout << write_out(c, "driving_" + profile + ".json", driving_report_json(rep)) << '\n';
  std::cout << "test loglik RS " << rep.rs.test_loglik << " RN " << rep.rn.test_loglik << "\nmean improvement %"
            << " dx " << rep.mean_improvement[0] << " dy " << rep.mean_improvement[1] << " dvx "
            << rep.mean_improvement[2] << " dvy " << rep.mean_improvement[3] << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-sensitive inverse reinforcement learning"};
  app.require_subcommand(1);

  Common common;
  SimulateArgs sim;
  std::string data_path, model_path, envelope_path, state, cost_mode = "known", profile = "risk-averse";
  bool risk_neutral = false;
  std::vector<int> counts;

  auto* s = app.add_subcommand("simulate", "emit a synthetic dataset");
  add_common(s, common);
  s->add_option("--kind", sim.kind, "lq or driving")->check(CLI::IsMember({"lq", "driving"}));
  s->add_option("--profile", sim.profile, "driving expert profile");
  s->add_option("--cost-mode", sim.cost_mode, "lq: known or unknown")->check(CLI::IsMember({"known", "unknown"}));
  s->add_option("--count", sim.count, "demonstrations or segments");

  auto* is = app.add_subcommand("infer-single", "prune the envelope from static demonstrations");
  add_common(is, common);
  is->add_option("--data", data_path, "dataset from simulate --kind lq")->required();
  is->add_option("--cost-mode", cost_mode, "known or unknown")->check(CLI::IsMember({"known", "unknown"}));

  auto* im = app.add_subcommand("infer-multi", "maximum-likelihood fit on driving segments");
  add_common(im, common);
  im->add_option("--data", data_path, "dataset from simulate --kind driving")->required();
  im->add_flag("--risk-neutral", risk_neutral, "keep the envelope pinned to the pmf");

  auto* fw = app.add_subcommand("forward", "plan from a state");
  add_common(fw, common);
  fw->add_option("--model", model_path, "fitted driving model");
  fw->add_option("--data", data_path, "dataset (lq system, or driving library)");
  fw->add_option("--envelope", envelope_path, "lq: envelope file to plan under");
  fw->add_option("--state", state, "comma-separated state");

  auto* ev = app.add_subcommand("eval", "per-segment trajectory error of a fitted model");
  add_common(ev, common);
  ev->add_option("--model", model_path)->required();
  ev->add_option("--data", data_path)->required();

  auto* bl = app.add_subcommand("bench-lq", "known-cost LQ convergence curve");
  add_common(bl, common);
  bl->add_option("--counts", counts, "demonstration counts");

  auto* bd = app.add_subcommand("bench-driving", "RS vs RN on a synthetic driving expert");
  add_common(bd, common);
  bd->add_option("--profile", profile)->check(CLI::IsMember({"risk-averse", "ambiguity-averse", "risk-neutral"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitFault;
  }

  try {
    if (*s) return simulate(common, sim);
    if (*is) return infer_single(common, data_path, cost_mode);
    if (*im) return infer_multi(common, data_path, risk_neutral);
    if (*fw) {
      if (model_path.empty() && envelope_path.empty()) throw Error("forward: give --model or --envelope");
      return forward_cmd(common, model_path, data_path, envelope_path, state);
    }
    if (*ev) return eval_cmd(common, model_path, data_path);
    if (*bl) return bench_lq(common, counts);
    if (*bd) return bench_driving(common, profile);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFault;
  }
  return kExitFault;
}
