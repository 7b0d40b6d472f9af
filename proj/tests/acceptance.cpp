// Acceptance runs: one PASS/FAIL line per criterion. Pass criterion numbers
// on the command line to run a subset.

#include "oracles.hpp"
#include "toy_world.hpp"

#include "rsirl/bellman.hpp"
#include "rsirl/forward.hpp"
#include "rsirl/harness.hpp"
#include "rsirl/lq.hpp"
#include "rsirl/single_step.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

using namespace rsirl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Random envelope: hull of 1..6 random simplex points.
std::vector<Vec> random_points(Eigen::Index L, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> k(1, 6);
  std::vector<Vec> pts;
  const int n = k(rng);
  for (int i = 0; i < n; ++i) pts.push_back(sample_simplex(L, rng));
  return pts;
}

Vec gaussian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = g(rng);
  return z;
}

Outcome coherence() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tol = 1e-9;
  double worst = 0.0;
  int violations = 0;
  auto note = [&](double excess) {
    worst = std::max(worst, excess);
    if (excess > tol) ++violations;
  };
  for (int inst = 0; inst < 1000; ++inst) {
    const Eigen::Index L = 2 + inst % 3;
    const auto pts = random_points(L, rng);
    const auto env = RiskEnvelope::from_points(L, pts);
    auto rho = [&](const Vec& z) { return evaluate_crm(env, z).value; };
    const Vec z = gaussian(L, rng);
    const Vec w = gaussian(L, rng);
    const Vec bigger = z + gaussian(L, rng).cwiseAbs();
    const double a = 3.0 * (unit(rng) - 0.5);
    const double lambda = 5.0 * unit(rng);

    note(rho(z) - rho(bigger));                                  // monotone
    note(std::abs(rho(z + Vec::Constant(L, a)) - rho(z) - a));   // translation
    note(std::abs(rho(lambda * z) - lambda * rho(z)));           // positive homogeneity
    note(rho(z + w) - rho(z) - rho(w));                          // subadditive
    note(std::abs(rho(z) - oracle::vertex_max(pts, z)));         // max over the generating points
  }
  return {violations == 0, fmt("1000 instances, worst excess %.2e", worst)};
}

Outcome cvar() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int inst = 0; inst < 500; ++inst) {
    const Eigen::Index L = 2 + inst % 5;
    const Pmf p(sample_simplex(L, rng));
    const Vec z = gaussian(L, rng);
    const double alpha = 0.01 + 0.99 * unit(rng);
    const double got = evaluate_crm(cvar_envelope(p, alpha), z).value;
    worst = std::max(worst, std::abs(got - oracle::sorted_tail_cvar(p.probs(), z, alpha)));
  }
  return {worst <= 1e-9, fmt("500 distributions, worst gap %.2e", worst)};
}

Outcome lq_known_cost() {
  LqBenchmarkOptions opt;
  opt.envelope_samples = 6;
  opt.demo_counts = {1, 20};
  const auto rep = run_lq_benchmark(1, opt);
  const double ratio = rep.rows[1].hausdorff / rep.hausdorff_simplex;
  const double mse_ratio = rep.rows[0].mse > 0.0 ? rep.rows[1].mse / rep.rows[0].mse : 0.0;
  const bool ok = ratio <= 0.1 && mse_ratio <= 0.1 && rep.contained_every_step && rep.nested_every_step;
  return {ok, fmt("hausdorff ratio %.4f, mse ratio %.4f, contained %g, nested %g", ratio, mse_ratio,
                  rep.contained_every_step, rep.nested_every_step)};
}

// Scalar state, two controls, three outcomes with state-dependent targets.
CostOracle moving_targets() {
  Mat alpha(3, 2), beta(3, 2);
  alpha << -1.0, 0.0, 0.5, 1.0, 1.5, -0.5;
  beta << 1.0, 0.5, -2.0, 0.0, 0.5, 1.0;
  const Vec w = (Vec(3) << 1.0, 2.0, 0.5).finished();
  return CostOracle::from_quadratic(3, 2, [=](const Vec& x) {
    QuadraticCosts q;
    q.constant.resize(3);
    for (int j = 0; j < 3; ++j) {
      const Vec target = (alpha.row(j) + beta.row(j) * x[0]).transpose();
      q.hessians.push_back(2.0 * w[j] * Mat::Identity(2, 2));
      q.linear.push_back(-2.0 * w[j] * target);
      q.constant[j] = w[j] * target.squaredNorm();
    }
    return q;
  });
}

// Base-2 van der Corput point d of a sequence starting 0, 1, 1/2, 1/4, 3/4, ...
double dense_point(int d) {
  if (d < 2) return d;
  double t = 0.0, f = 0.5;
  for (int k = d - 1; k > 0; k /= 2, f *= 0.5) t += f * (k % 2);
  return t;
}

Outcome policy_identification() {
  std::mt19937_64 rng(1);
  std::vector<Vec> pts;
  for (int k = 0; k < 5; ++k) pts.push_back(sample_simplex(3, rng));
  const auto truth = RiskEnvelope::from_points(3, pts);
  const auto cost = moving_targets();
  const auto bounds = ControlBounds::symmetric(2, 5.0);
  std::vector<Demonstration> demos;
  for (int d = 0; d < 500; ++d) {
    const Vec x = Vec::Constant(1, -1.0 + 2.0 * dense_point(d));
    demos.push_back({x, solve_static_forward(x, truth, cost, bounds).u});
  }
  const auto pruned = prune_envelope(demos, cost, bounds);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vec x = Vec::Constant(1, -1.0 + 2.0 * k / 99.0);
    const Vec a = solve_static_forward(x, pruned.envelope, cost, bounds).u;
    const Vec b = solve_static_forward(x, truth, cost, bounds).u;
    worst = std::max(worst, (a - b).norm());
  }
  return {worst < 1e-3, fmt("max policy gap over 100 states %.2e after 500 demos", worst)};
}

Outcome unknown_cost() {
  const auto fs = sample_lq_feature_system(1, 10, 5, 3, 3, 6);
  const auto features = fs.features();
  const auto demos = lq_expert_demos(fs.system, features.weighted(fs.weights), sample_states(101, 10, 200));
  const auto pruned = prune_product(demos, features, fs.system.bounds);
  const auto rec = recover_weights_and_envelope(pruned.envelope, 3, 3);
  double worst = 0.0, quality = 0.0;
  for (std::size_t i = 0; i < rec.weights.size(); ++i) {
    worst = std::max(worst, (rec.weights[i] - fs.weights).lpNorm<Eigen::Infinity>());
    quality += rec.qualities[i];
  }
  quality /= static_cast<double>(std::max<std::size_t>(1, rec.qualities.size()));
  return {worst <= 0.1 && quality <= 0.15,
          fmt("%g vertices, worst weight error %.4f, mean rank-one quality %.4f", static_cast<double>(rec.weights.size()),
              worst, quality)};
}

Outcome gradient_check() {
  std::mt19937_64 rng(6);
  const auto crm = SemiParametricCrm::axis_aligned(2);
  const double h = 1e-5;
  double worst = 0.0;
  LikelihoodOptions with, without;
  with.degeneracy = without.degeneracy = DegeneracyPolicy::Ignore;
  without.gradient = false;
  for (int pt = 0; pt < 10; ++pt) {
    auto w = toy::make_world(600 + pt, 2, 2, 2, 3);
    w.cfg.beta = 2.0;
    const auto data = LikelihoodData::build(toy::random_segments(w, 5, 700 + pt), w.library, w.cfg, w.rollout);
    const Vec r = toy::random_box_offsets(w.cfg.pmf.probs(), rng);
    const Vec c = toy::random_weights(3, rng);
    const auto ll = log_likelihood(crm, r, c, data, with);
    Vec analytic(r.size() + c.size()), numeric(r.size() + c.size());
    analytic << ll.grad_r, ll.grad_c;
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
      Vec rp = r, rm = r, cp = c, cm = c;
      if (i < r.size()) {
        rp[i] += h;
        rm[i] -= h;
      } else {
        cp[i - r.size()] += h;
        cm[i - r.size()] -= h;
      }
      numeric[i] = (log_likelihood(crm, rp, cp, data, without).value - log_likelihood(crm, rm, cm, data, without).value) / (2 * h);
    }
    worst = std::max(worst, (analytic - numeric).norm() / std::max({analytic.norm(), numeric.norm(), 1e-12}));
  }
  return {worst <= 1e-5, fmt("10 points, worst relative error %.2e", worst)};
}

Outcome bellman() {
  std::mt19937_64 rng(7);
  double exact_gap = 0.0, soft_gap = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const int L = 1 + inst % 3;
    const int A = 1 + (inst / 3) % 3;
    const int T = 1 + (inst / 9) % 2;
    const auto w = toy::make_world(800 + inst, L, A, T, 2);
    const auto tree = toy::tree_of(w, inst % L);
    const auto crm = SemiParametricCrm::axis_aligned(L);
    const Vec r = L == 1 ? Vec::Zero(2) : toy::random_box_offsets(w.cfg.pmf.probs(), rng);
    const Vec c = toy::random_weights(2, rng);
    const Vec exact = exact_bellman(tree, crm.envelope(r), c).root();
    const Vec brute = oracle::brute_tree_values(tree, oracle::brute_vertices(L, crm.halfspaces(r)), c);
    exact_gap = std::max(exact_gap, (exact - brute).lpNorm<Eigen::Infinity>());
    SoftBellmanOptions so;
    so.beta = 1e4;
    so.gradient = false;
    soft_gap = std::max(soft_gap, (soft_bellman(tree, crm, r, c, so).root_values - exact).lpNorm<Eigen::Infinity>());
  }
  return {exact_gap <= 1e-9 && soft_gap <= 1e-3,
          fmt("50 trees, exact vs enumeration %.2e, soft (beta 1e4) vs exact %.2e", exact_gap, soft_gap)};
}

Outcome pinned_equivalence() {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (int ds = 0; ds < 20; ++ds) {
    auto w = toy::make_world(900 + ds, 2 + ds % 3, 2 + ds % 4, 1 + ds % 2, 3);
    w.cfg.beta = 0.5 + 0.25 * ds;
    const auto data = LikelihoodData::build(toy::random_segments(w, 8, 950 + ds), w.library, w.cfg, w.rollout);
    const auto crm = SemiParametricCrm::axis_aligned(w.cfg.L);
    const Vec c = toy::random_weights(3, rng);
    const double rs = log_likelihood(crm, pinned_offsets(w.cfg.pmf), c, data, {false}).value;
    worst = std::max(worst, std::abs(rs - oracle::rn_log_likelihood(data, c)));
  }
  return {worst <= 1e-9, fmt("20 datasets, worst gap %.2e", worst)};
}

Outcome driving() {
  const auto opt = default_driving_options();
  const auto ra = run_driving_benchmark(1, ExpertProfile::RiskAverse, opt);
  const auto rn = run_driving_benchmark(1, ExpertProfile::RiskNeutral, opt);
  const bool ok = ra.rs.test_loglik > ra.rn.test_loglik && ra.mean_improvement[0] > 0.0 &&
                  std::abs(rn.mean_improvement[0]) <= 3.0;
  return {ok, fmt("risk-averse: test loglik RS %.4f vs RN %.4f, x_rel improvement %.2f%%; risk-neutral: %.2f%%",
                  ra.rs.test_loglik, ra.rn.test_loglik, ra.mean_improvement[0], rn.mean_improvement[0])};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "coherence axioms", 10.0, coherence},
      {2, "cvar matches sorted tail", 5.0, cvar},
      {3, "lq known cost", 120.0, lq_known_cost},
      {4, "policy identification", 120.0, policy_identification},
      {5, "unknown cost recovery", 300.0, unknown_cost},
      {6, "likelihood gradient", 60.0, gradient_check},
      {7, "bellman recursions", 60.0, bellman},
      {8, "pinned envelope is risk-neutral", 30.0, pinned_equivalence},
      {9, "driving", 900.0, driving},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d (%s): %s; %.1fs of %.0fs%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.budget_seconds, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
