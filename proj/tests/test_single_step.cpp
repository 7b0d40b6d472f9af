#include "doctest.h"
#include "oracles.hpp"
#include "rsirl/forward.hpp"
#include "rsirl/lq.hpp"
#include "rsirl/single_step.hpp"

using namespace rsirl;

namespace {

// g_j(u) = (u - centre_j)^2 for a scalar control.
CostOracle wells(const Vec& centres) {
  return CostOracle::from_quadratic(centres.size(), 1, [centres](const Vec&) {
    QuadraticCosts q;
    for (Eigen::Index j = 0; j < centres.size(); ++j) {
      q.hessians.push_back(Mat::Constant(1, 1, 2.0));
      q.linear.push_back(Vec::Constant(1, -2.0 * centres[j]));
    }
    q.constant = centres.array().square().matrix();
    return q;
  });
}

Vec vec2(double a, double b) { return (Vec(2) << a, b).finished(); }

}  // namespace

TEST_CASE("saturation sets") {
  const auto b = ControlBounds::symmetric(3, 1.0);
  auto s = saturation_sets({Vec(), Vec::Zero(3)}, b);
  CHECK(s.upper.empty());
  CHECK(s.lower.empty());

  s = saturation_sets({Vec(), Vec::Ones(3)}, b);
  CHECK(s.upper.size() == 3);
  CHECK(s.lower.empty());

  Vec u = Vec::Zero(3);
  u[1] = -1.0 + 5e-7;
  s = saturation_sets({Vec(), u}, b, 1e-6);
  CHECK(s.upper.empty());
  REQUIRE(s.lower.size() == 1);
  CHECK(s.lower[0] == 1);
}

TEST_CASE("kkt halfspace: two wells with a neutral expert") {
  // The only v making u* = 0 stationary is (1/2, 1/2); g(0) = (1, 1).
  const auto cost = wells(vec2(1.0, -1.0));
  const auto b = ControlBounds::symmetric(1, 2.0);
  const auto h = kkt_halfspace({Vec(), Vec::Zero(1)}, cost, RiskEnvelope::simplex(2), b);

  // Grid oracle: best g . v over stationary v on a 1e-3 grid of the simplex.
  double best = -kInf;
  for (int i = 0; i <= 1000; ++i) {
    const Vec v = vec2(i / 1000.0, 1.0 - i / 1000.0);
    if (std::abs(cost.grad_u(Vec(), Vec::Zero(1)).transpose().row(0).dot(v)) < 1e-12) {
      best = std::max(best, cost.eval(Vec(), Vec::Zero(1)).dot(v));
    }
  }
  CHECK(h.halfspace.offset >= 1.0 - 1e-9);
  CHECK(h.halfspace.offset == doctest::Approx(best).epsilon(1e-9));
  CHECK(h.halfspace.normal.dot(vec2(0.5, 0.5)) <= h.halfspace.offset + 1e-9);
}

TEST_CASE("kkt halfspace: a risk-neutral expert keeps its pmf") {
  const Vec centres = (Vec(3) << -1.0, 0.5, 2.0).finished();
  const auto cost = wells(centres);
  const auto b = ControlBounds::symmetric(1, 5.0);
  const Vec p = (Vec(3) << 0.2, 0.5, 0.3).finished();
  const auto plan = solve_static_forward(Vec(), RiskEnvelope::singleton(p), cost, b);
  CHECK(plan.u[0] == doctest::Approx(p.dot(centres)).epsilon(1e-9));
  const auto h = kkt_halfspace({Vec(), plan.u}, cost, RiskEnvelope::simplex(3), b);
  CHECK(h.halfspace.normal.dot(p) <= h.halfspace.offset + 1e-9);
}

TEST_CASE("kkt halfspace: saturated control has a positive bound multiplier") {
  // Both wells sit above the box, so the worst-case expert pushes to u+ = 2.
  const auto cost = wells(vec2(3.0, 4.0));
  const auto b = ControlBounds::symmetric(1, 2.0);
  const auto plan = solve_static_forward(Vec(), RiskEnvelope::simplex(2), cost, b);
  CHECK(plan.u[0] == doctest::Approx(2.0).epsilon(1e-12));
  const auto h = kkt_halfspace({Vec(), plan.u}, cost, RiskEnvelope::simplex(2), b);
  REQUIRE(h.sigma_upper.size() == 1);
  CHECK(h.sigma_upper[0] > 0.0);
  // Worst case at u = 2 is the far well: cost 4.
  CHECK(h.halfspace.offset == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("kkt halfspace: inconsistent demonstration is reported") {
  // u* = 3 is outside the wells' convex hull, so no v makes it stationary.
  const auto cost = wells(vec2(1.0, -1.0));
  CHECK_THROWS_AS(kkt_halfspace({Vec(), Vec::Constant(1, 3.0)}, cost, RiskEnvelope::simplex(2),
                                ControlBounds::symmetric(1, 5.0)),
                  InconsistentDemonstration);
}

TEST_CASE("pruning on an LQ system: containment, nesting, tightening") {
  const auto sys = sample_lq_system(11, 6, 3, 3, 5);
  const auto cost = lq_cost(sys);
  const auto demos = lq_expert_demos(sys, cost, sample_states(12, 6, 12));

  PruneOptions opt;
  opt.record_history = true;
  const auto tight = prune_envelope(demos, cost, sys.bounds, opt);
  CHECK(tight.skipped == 0);
  REQUIRE(tight.history.size() == demos.size());
  RiskEnvelope prev = RiskEnvelope::simplex(3);
  for (const auto& env : tight.history) {
    CHECK(env.contains(sys.true_envelope, 1e-7));
    CHECK(prev.contains(env, 1e-7));
    prev = env;
  }

  opt.tighten = false;
  opt.record_history = false;
  const auto loose = prune_envelope(demos, cost, sys.bounds, opt);
  CHECK(loose.envelope.contains(tight.envelope, 1e-7));
  CHECK(loose.envelope.contains(sys.true_envelope, 1e-7));
  CHECK(hausdorff(tight.envelope, sys.true_envelope) <= hausdorff(loose.envelope, sys.true_envelope) + 1e-9);
}

TEST_CASE("parallel and serial halfspace builders agree") {
  const auto sys = sample_lq_system(21, 5, 3, 3, 4);
  const auto cost = lq_cost(sys);
  const auto demos = lq_expert_demos(sys, cost, sample_states(22, 5, 16));
  const auto env = RiskEnvelope::simplex(3);
  const auto a = kkt_halfspaces_serial(demos, cost, env, sys.bounds);
  const auto b = kkt_halfspaces_parallel(demos, cost, env, sys.bounds);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].has_value() == b[i].has_value());
    if (!a[i]) continue;
    CHECK((a[i]->normal - b[i]->normal).norm() == 0.0);
    CHECK(a[i]->offset == b[i]->offset);
  }
}

TEST_CASE("product space with one feature reduces to the known-cost pruning") {
  const auto fs = sample_lq_feature_system(31, 5, 3, 3, 1, 4);
  const auto features = fs.features();
  const auto cost = features.weighted(Vec::Ones(1));
  const auto demos = lq_expert_demos(fs.system, cost, sample_states(32, 5, 8));
  const auto known = prune_envelope(demos, cost, fs.system.bounds);
  const auto product = prune_product(demos, features, fs.system.bounds);
  CHECK(oracle::same_vertex_sets(known.envelope.vertices(), product.envelope.vertices(), 1e-7));
}

TEST_CASE("rank-one product vertices recover their factors") {
  const Vec c = (Vec(2) << 0.3, 0.7).finished();
  std::vector<Vec> pts;
  for (const Vec& v : {Vec((Vec(3) << 0.2, 0.5, 0.3).finished()), Vec((Vec(3) << 0.6, 0.1, 0.3).finished()),
                       Vec((Vec(3) << 0.1, 0.1, 0.8).finished())}) {
    Vec z(6);
    for (int j = 0; j < 3; ++j) {
      for (int h = 0; h < 2; ++h) z[j * 2 + h] = v[j] * c[h];
    }
    pts.push_back(z);
  }
  const auto product = RiskEnvelope::from_points(6, pts);
  const auto rec = recover_weights_and_envelope(product, 3, 2);
  REQUIRE(rec.weights.size() == 3);
  for (std::size_t i = 0; i < rec.weights.size(); ++i) {
    CHECK((rec.weights[i] - c).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK(rec.qualities[i] < 1e-9);
  }
  CHECK(rec.envelope.vertices().size() == 3);
}

TEST_CASE("LQ sampler and expert") {
  const auto sys = sample_lq_system(5, 10, 5, 3, 6);
  REQUIRE(sys.a.size() == 3);
  CHECK(sys.a[0].rows() == 10);
  CHECK(sys.a[0].cols() == 10);
  CHECK(sys.b[0].rows() == 10);
  CHECK(sys.b[0].cols() == 5);
  CHECK(sys.true_envelope.vertices().size() <= 6);
  CHECK(Eigen::SelfAdjointEigenSolver<Mat>(sys.q).eigenvalues().minCoeff() >= -1e-10);

  const auto again = sample_lq_system(5, 10, 5, 3, 6);
  CHECK((again.a[2] - sys.a[2]).norm() == 0.0);
  CHECK((again.q - sys.q).norm() == 0.0);

  const auto cost = lq_cost(sys);
  const auto demos = lq_expert_demos(sys, cost, sample_states(6, 10, 5));
  for (const auto& d : demos) {
    const auto plan = solve_static_forward(d.state, sys.true_envelope, cost, sys.bounds);
    CHECK((plan.u - d.control).norm() < 1e-8);
  }
}

TEST_CASE("LQ expert under a singleton envelope is the expected-cost optimum") {
  auto sys = sample_lq_system(8, 4, 2, 3, 3);
  const Vec p = (Vec(3) << 0.5, 0.3, 0.2).finished();
  sys.true_envelope = RiskEnvelope::singleton(p);
  sys.bounds = ControlBounds::symmetric(2, 1e6);
  const auto cost = lq_cost(sys);
  const Vec x = sample_states(9, 4, 1).front();
  const auto demo = lq_expert_demos(sys, cost, {x}).front();

  // Normal equations of sum_j p_j (u'Ru + |A_j x + B_j u|_Q^2).
  Mat h = sys.r;
  Vec g = Vec::Zero(2);
  for (int j = 0; j < 3; ++j) {
    h += p[j] * sys.b[j].transpose() * sys.q * sys.b[j];
    g += p[j] * sys.b[j].transpose() * sys.q * sys.a[j] * x;
  }
  const Vec u = -h.ldlt().solve(g);
  CHECK((demo.control - u).norm() < 1e-8 * std::max(1.0, u.norm()));
}
