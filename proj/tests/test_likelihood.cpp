#include "doctest.h"
#include "oracles.hpp"
#include "toy_world.hpp"

#include "rsirl/clustering.hpp"
#include "rsirl/fit.hpp"

using namespace rsirl;

namespace {

LikelihoodData toy_data(const toy::World& w, int segments, std::uint64_t seed) {
  return LikelihoodData::build(toy::random_segments(w, segments, seed), w.library, w.cfg, w.rollout);
}

}  // namespace

TEST_CASE("observed actions snap to the nearest library entry") {
  const auto w = toy::make_world(1, 2, 4, 1, 1);
  for (std::size_t a = 0; a < 4; ++a) {
    const Mat noisy = w.library.first_stage[a].array() + 1e-3;
    CHECK(nearest_action(noisy, w.library.first_stage) == static_cast<int>(a));
  }
  const std::vector<Mat> twins{Mat::Zero(2, 2), Mat::Zero(2, 2)};
  CHECK(nearest_action(Mat::Ones(2, 2), twins) == 0);
}

TEST_CASE("a one-action library has likelihood zero") {
  const auto w = toy::make_world(2, 3, 1, 2, 2);
  const auto data = toy_data(w, 4, 9);
  const auto crm = SemiParametricCrm::axis_aligned(3);
  const auto ll = log_likelihood(crm, pinned_offsets(w.cfg.pmf), Vec::Constant(2, 0.5), data);
  CHECK(std::abs(ll.value) < 1e-15);
  CHECK(ll.grad_r.norm() < 1e-12);
  CHECK(ll.grad_c.norm() < 1e-12);
}

TEST_CASE("likelihood is a log-probability") {
  std::mt19937_64 rng(3);
  const auto w = toy::make_world(3, 3, 4, 2, 2);
  const auto data = toy_data(w, 6, 4);
  const auto crm = SemiParametricCrm::axis_aligned(3);
  const auto ll = log_likelihood(crm, toy::random_box_offsets(w.cfg.pmf.probs(), rng), toy::random_weights(2, rng), data);
  CHECK(ll.value <= 0.0);
  CHECK(ll.value >= -std::log(4.0) * 50);
}

TEST_CASE("featureless costs make every action equally likely") {
  const auto w = toy::make_world(4, 2, 5, 2, 2, 0.0);
  const auto data = toy_data(w, 3, 5);
  const auto crm = SemiParametricCrm::axis_aligned(2);
  const auto ll = log_likelihood(crm, Vec::Constant(4, 0.1), Vec::Constant(2, 0.5), data, {false});
  CHECK(ll.value == doctest::Approx(-std::log(5.0)).epsilon(1e-14));
}

TEST_CASE("serial and parallel likelihoods are bit-identical") {
  std::mt19937_64 rng(6);
  const auto w = toy::make_world(6, 3, 3, 2, 3);
  const auto data = toy_data(w, 9, 7);
  const auto crm = SemiParametricCrm::axis_aligned(3);
  const Vec r = toy::random_box_offsets(w.cfg.pmf.probs(), rng);
  const Vec c = toy::random_weights(3, rng);
  LikelihoodOptions serial, parallel;
  serial.execution = Execution::Serial;
  parallel.execution = Execution::Parallel;
  const auto a = log_likelihood(crm, r, c, data, serial);
  const auto b = log_likelihood(crm, r, c, data, parallel);
  CHECK(a.value == b.value);
  CHECK((a.grad_r - b.grad_r).norm() == 0.0);
  CHECK((a.grad_c - b.grad_c).norm() == 0.0);
}

TEST_CASE("pinned envelope reproduces the risk-neutral likelihood") {
  std::mt19937_64 rng(8);
  for (int inst = 0; inst < 4; ++inst) {
    auto w = toy::make_world(40 + inst, 2 + inst % 3, 3, 1 + inst % 2, 2);
    w.cfg.beta = 0.5 + inst;
    const auto data = toy_data(w, 5, 50 + inst);
    const auto crm = SemiParametricCrm::axis_aligned(w.cfg.L);
    const Vec c = toy::random_weights(2, rng);
    const auto ll = log_likelihood(crm, pinned_offsets(w.cfg.pmf), c, data, {false});
    CHECK(ll.value == doctest::Approx(oracle::rn_log_likelihood(data, c)).epsilon(1e-12));
  }
}

TEST_CASE("likelihood gradients match central differences") {
  std::mt19937_64 rng(12);
  auto w = toy::make_world(13, 3, 3, 2, 2);
  w.cfg.beta = 1.5;
  const auto data = toy_data(w, 4, 14);
  const auto crm = SemiParametricCrm::axis_aligned(3);
  const Vec r = toy::random_box_offsets(w.cfg.pmf.probs(), rng);
  const Vec c = toy::random_weights(2, rng);
  LikelihoodOptions opt;
  opt.degeneracy = DegeneracyPolicy::Ignore;
  const auto ll = log_likelihood(crm, r, c, data, opt);
  opt.gradient = false;
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    Vec hi = r, lo = r;
    hi[i] += h;
    lo[i] -= h;
    const double fd = (log_likelihood(crm, hi, c, data, opt).value - log_likelihood(crm, lo, c, data, opt).value) / (2 * h);
    CHECK(ll.grad_r[i] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    Vec hi = c, lo = c;
    hi[i] += h;
    lo[i] -= h;
    const double fd = (log_likelihood(crm, r, hi, data, opt).value - log_likelihood(crm, r, lo, data, opt).value) / (2 * h);
    CHECK(ll.grad_c[i] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("infeasible offsets and negative weights are rejected") {
  const auto w = toy::make_world(15, 2, 2, 1, 2);
  const auto data = toy_data(w, 2, 16);
  const auto crm = SemiParametricCrm::axis_aligned(2);
  CHECK_THROWS_AS(log_likelihood(crm, Vec::Constant(4, 0.9), Vec::Constant(2, 0.5), data), EmptyEnvelope);
  CHECK_THROWS(log_likelihood(crm, Vec::Zero(4), (Vec(2) << 1.1, -0.1).finished(), data));
  CHECK_THROWS_AS(log_likelihood(crm, Vec::Zero(4), Vec::Constant(3, 0.3), data), DimensionMismatch);
}

TEST_CASE("mirror step stays on the simplex") {
  const Vec c = (Vec(3) << 0.2, 0.3, 0.5).finished();
  const Vec g = (Vec(3) << 1.0, -2.0, 0.0).finished();
  const Vec n = mirror_step(c, g, 0.5);
  CHECK(n.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(n[0] > c[0]);
  CHECK(n[1] < c[1]);
  const Vec e = c.array() * g.array().unaryExpr([](double x) { return std::exp(0.5 * x); });
  CHECK((n - e / e.sum()).norm() < 1e-15);
  CHECK(mirror_step(c, (Vec(3) << -1e4, 0.0, 0.0).finished(), 1.0)[0] >= kWeightFloor * 0.5);
}

TEST_CASE("fit recovers a generating model better than its start") {
  auto w = toy::make_world(17, 2, 4, 2, 2, 2.0);
  w.cfg.beta = 2.0;
  const auto data = toy_data(w, 12, 18);
  const auto crm = SemiParametricCrm::axis_aligned(2);
  FitHyperparams hp;
  hp.max_iters = 25;
  const Vec r0 = crm.project_offsets(pinned_offsets(w.cfg.pmf).array() - 0.05);
  const Vec c0 = Vec::Constant(2, 0.5);
  const auto res = fit(crm, data, hp, r0, c0);
  REQUIRE(!res.best_trace.empty());
  for (std::size_t i = 1; i < res.best_trace.size(); ++i) CHECK(res.best_trace[i] >= res.best_trace[i - 1]);
  CHECK(res.value >= log_likelihood(crm, r0, c0, data, {false}).value);
  CHECK(crm.feasible(res.r));
  CHECK(res.c.sum() == doctest::Approx(1.0));
  CHECK((res.c.array() >= 0.0).all());

  hp.fit_r = false;
  const auto fixed = fit(crm, data, hp, r0, c0);
  CHECK((fixed.r - r0).norm() == 0.0);
}

TEST_CASE("fit stops immediately at a stationary point") {
  // With one action the likelihood is flat.
  const auto w = toy::make_world(19, 2, 1, 1, 2);
  const auto data = toy_data(w, 3, 20);
  const auto crm = SemiParametricCrm::axis_aligned(2);
  const auto res = fit(crm, data, {}, pinned_offsets(w.cfg.pmf), Vec::Constant(2, 0.5));
  CHECK(res.converged);
  CHECK(res.iterations <= 1);
}

TEST_CASE("k-means separates well-spread clusters") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.05);
  const Mat centres = (Mat(3, 2) << 0, 0, 5, 5, -5, 5).finished();
  Mat pts(60, 2);
  for (int i = 0; i < 60; ++i) pts.row(i) = centres.row(i % 3) + Eigen::RowVector2d(noise(rng), noise(rng));
  const auto km = kmeans(pts, 3, 1);
  REQUIRE(km.centroids.rows() == 3);
  for (int i = 0; i < 60; ++i) CHECK(km.assignment[i] == km.assignment[i % 3]);
  for (std::size_t i = 1; i < km.wcss.size(); ++i) CHECK(km.wcss[i] <= km.wcss[i - 1] + 1e-12);
  for (int k = 0; k < 3; ++k) {
    double best = kInf;
    for (int j = 0; j < 3; ++j) best = std::min(best, (km.centroids.row(j) - centres.row(k)).norm());
    CHECK(best < 0.1);
  }
}

TEST_CASE("k-means with fewer distinct points than clusters") {
  const Mat pts = (Mat(4, 1) << 1, 1, 2, 2).finished();
  const auto km = kmeans(pts, 3, 2);
  CHECK(km.centroids.rows() == 2);
  CHECK(km.assignment[0] == km.assignment[1]);
  CHECK(km.assignment[0] != km.assignment[2]);
}

TEST_CASE("clustered libraries respect the control bounds") {
  std::vector<Mat> raw;
  for (int i = 0; i < 10; ++i) raw.push_back(Mat::Constant(3, 2, i % 2 ? 5.0 : -0.5));
  const auto lib = cluster_actions(raw, 2, 1, 3, ControlBounds::symmetric(2, 1.0));
  REQUIRE(lib.first_stage.size() == 2);
  REQUIRE(lib.later_stage.size() == 1);
  for (const auto& a : lib.first_stage) {
    CHECK(a.rows() == 3);
    CHECK(a.cols() == 2);
    CHECK(a.maxCoeff() <= 1.0);
    CHECK(a.minCoeff() >= -1.0);
  }
}
