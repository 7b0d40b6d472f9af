#include "rsirl/lq.hpp"

#include "rsirl/forward.hpp"

#include <random>

namespace rsirl {

namespace {

Mat gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = nd(rng);
  }
  return m;
}

}  // namespace

LqSystem sample_lq_system(std::uint64_t seed, Eigen::Index n, Eigen::Index m, Eigen::Index outcomes,
                          int envelope_samples, double control_limit) {
  if (n < 1 || m < 1 || outcomes < 1 || envelope_samples < 1) throw Error("lq system: dimensions must be positive");
  std::mt19937_64 rng(seed);
  LqSystem sys;
  for (Eigen::Index j = 0; j < outcomes; ++j) {
    sys.a.push_back(gaussian(n, n, rng));
    sys.b.push_back(gaussian(n, m, rng));
  }
  const Mat s = gaussian(n, n, rng);
  sys.q = s * s.transpose();
  sys.r = Mat::Identity(m, m);
  std::vector<Vec> pts;
  for (int k = 0; k < envelope_samples; ++k) pts.push_back(sample_simplex(outcomes, rng));
  sys.true_envelope = RiskEnvelope::from_points(outcomes, pts);
  sys.bounds = ControlBounds::symmetric(m, control_limit);
  return sys;
}

CostOracle lq_cost(const LqSystem& sys, const Mat& q_state) {
  const std::vector<Mat> a = sys.a, b = sys.b;
  const Mat r = sys.r;
  return CostOracle::from_quadratic(sys.outcomes(), sys.controls(), [a, b, r, q_state](const Vec& x) {
    QuadraticCosts qc;
    qc.constant.resize(static_cast<Eigen::Index>(a.size()));
    for (std::size_t j = 0; j < a.size(); ++j) {
      const Vec ax = a[j] * x;
      const Mat qb = q_state * b[j];
      qc.hessians.push_back(2.0 * (r + b[j].transpose() * qb));
      qc.linear.push_back(2.0 * qb.transpose() * ax);
      qc.constant[static_cast<Eigen::Index>(j)] = ax.dot(q_state * ax);
    }
    return qc;
  });
}

std::vector<Vec> sample_states(std::uint64_t seed, Eigen::Index n, int count) {
  std::mt19937_64 rng(seed);
  std::vector<Vec> out;
  for (int k = 0; k < count; ++k) out.push_back(gaussian(n, 1, rng));
  return out;
}

std::vector<Demonstration> lq_expert_demos(const LqSystem& sys, const CostOracle& cost,
                                           const std::vector<Vec>& states) {
  std::vector<Demonstration> demos;
  for (const Vec& x : states) {
    const StaticPlan plan = solve_static_forward(x, sys.true_envelope, cost, sys.bounds);
    if (!plan.certified) throw NumericalFailure("lq expert: forward solve not certified");
    demos.push_back(Demonstration{x, plan.u});
  }
  return demos;
}

FeatureModel LqFeatureSystem::features() const {
  FeatureModel fm;
  for (const Mat& qh : feature_q) fm.features.push_back(lq_cost(system, qh));
  return fm;
}

LqFeatureSystem sample_lq_feature_system(std::uint64_t seed, Eigen::Index n, Eigen::Index m,
                                         Eigen::Index outcomes, Eigen::Index feature_count,
                                         int envelope_samples, double control_limit) {
  LqFeatureSystem fs;
  fs.system = sample_lq_system(seed, n, m, outcomes, envelope_samples, control_limit);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index h = 0; h < feature_count; ++h) {
    const Mat s = gaussian(n, n, rng);
    fs.feature_q.push_back(s * s.transpose());
  }
  fs.weights.resize(feature_count);
  for (Eigen::Index h = 0; h < feature_count; ++h) fs.weights[h] = unit(rng);
  fs.weights /= fs.weights.sum();
  Mat q = Mat::Zero(n, n);
  for (Eigen::Index h = 0; h < feature_count; ++h) q += fs.weights[h] * fs.feature_q[static_cast<std::size_t>(h)];
  fs.system.q = q;
  return fs;
}

}  // namespace rsirl
