#include "doctest.h"
#include "oracles.hpp"
#include "rsirl/envelope.hpp"

#include <random>

using namespace rsirl;

namespace {

std::vector<Halfspace> random_halfspaces(Eigen::Index dim, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<Halfspace> hs;
  const Vec centre = sample_simplex(dim, rng);
  for (int k = 0; k < count; ++k) {
    Vec n(dim);
    for (Eigen::Index i = 0; i < dim; ++i) n[i] = nd(rng);
    // keep `centre` strictly inside so the set is nonempty
    hs.push_back(Halfspace{n, n.dot(centre) + 0.05 + 0.2 * std::abs(nd(rng))});
  }
  return hs;
}

}  // namespace

TEST_CASE("envelope: simplex and singleton") {
  auto s = RiskEnvelope::simplex(3);
  CHECK(s.vertices().size() == 3);
  Vec p(3);
  p << 0.2, 0.3, 0.5;
  auto one = RiskEnvelope::singleton(p);
  REQUIRE(one.vertices().size() == 1);
  CHECK((one.vertices()[0] - p).norm() < 1e-12);
  CHECK(one.contains(p));
  CHECK_FALSE(one.contains(Vec(Vec::Unit(3, 0))));
  CHECK(s.contains(one));
}

TEST_CASE("envelope: double description matches brute-force enumeration") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index dim = 2 + trial % 4;
    auto hs = random_halfspaces(dim, 1 + trial % 5, rng);
    auto dd = enumerate_vertices(dim, hs);
    auto brute = oracle::brute_vertices(dim, hs);
    CHECK(oracle::same_vertex_sets(dd, brute, 1e-8));
  }
}

TEST_CASE("envelope: degenerate cuts through vertices") {
  // x0 <= x1 and x1 <= x0 pass through e2 and the midpoint of e0,e1
  Vec a(3);
  a << 1, -1, 0;
  auto env = RiskEnvelope::from_halfspaces(3, {{a, 0.0}, {-a, 0.0}});
  auto brute = oracle::brute_vertices(3, env.halfspaces());
  CHECK(oracle::same_vertex_sets(env.vertices(), brute, 1e-9));
  CHECK(env.vertices().size() == 2);
}

TEST_CASE("envelope: empty cut throws") {
  auto s = RiskEnvelope::simplex(3);
  CHECK_THROWS_AS(intersect_halfspace(s, Vec::Ones(3), 0.5), EmptyEnvelope);
}

TEST_CASE("envelope: from_points reproduces the hull") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index dim = 2 + trial % 3;
    std::vector<Vec> pts;
    const int count = 1 + trial % 6;
    for (int k = 0; k < count; ++k) pts.push_back(sample_simplex(dim, rng));
    auto env = RiskEnvelope::from_points(dim, pts);
    for (const Vec& p : pts) CHECK(env.contains(p, 1e-8));
    // every vertex is one of the input points
    for (const Vec& v : env.vertices()) {
      double best = 1.0;
      for (const Vec& p : pts) best = std::min(best, (p - v).cwiseAbs().maxCoeff());
      CHECK(best < 1e-7);
    }
  }
}

TEST_CASE("envelope: cvar matches sorted tail") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ua(0.05, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index dim = 2 + trial % 5;
    Vec p = sample_simplex(dim, rng);
    p = (p.array() + 1e-3).matrix();
    p /= p.sum();
    Pmf pmf(p);
    const double alpha = ua(rng);
    Vec z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z[i] = nd(rng);
    auto env = cvar_envelope(pmf, alpha);
    CHECK(std::abs(evaluate_crm(env, z).value - oracle::sorted_tail_cvar(pmf.probs(), z, alpha)) < 1e-9);
  }
}

TEST_CASE("envelope: hausdorff and hull distance") {
  auto s = RiskEnvelope::simplex(2);
  auto e1 = RiskEnvelope::singleton(Vec(Vec::Unit(2, 0)));
  CHECK(hausdorff(e1, s) == doctest::Approx(std::sqrt(2.0)));
  CHECK(hausdorff(s, s) < 1e-12);
  // point to segment
  std::vector<Vec> seg = {Vec::Unit(3, 0), Vec::Unit(3, 1)};
  Vec x = Vec::Unit(3, 2);
  CHECK(distance_to_hull(x, seg) == doctest::Approx(std::sqrt(1.5)));
  // point inside a triangle
  std::vector<Vec> tri = {Vec::Unit(3, 0), Vec::Unit(3, 1), Vec::Unit(3, 2)};
  CHECK(distance_to_hull(Vec::Constant(3, 1.0 / 3), tri) < 1e-12);
}
