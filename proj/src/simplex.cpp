#include "rsirl/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace rsirl {

Pmf::Pmf(Vec probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw Error("pmf: empty");
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    if (!(probs_[i] > 0.0) || !std::isfinite(probs_[i])) {
      throw Error("pmf: every probability must be strictly positive");
    }
  }
  const double total = probs_.sum();
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error("pmf: probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

Pmf Pmf::uniform(Eigen::Index size) {
  Vec p = Vec::Constant(size, 1.0 / static_cast<double>(size));
  p[size - 1] = 1.0 - p.head(size - 1).sum();
  return Pmf(std::move(p));
}

bool in_simplex(const Vec& v, double tol) {
  if (v.size() == 0) return false;
  if (v.minCoeff() < -tol) return false;
  return std::abs(v.sum() - 1.0) <= tol;
}

Vec project_to_simplex(const Vec& y) {
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    const double candidate = (running - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  return (y.array() - theta).max(0.0).matrix();
}

Vec sample_simplex(Eigen::Index dim, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = expo(rng);
  return v / v.sum();
}

Vec simplex_vertex(Eigen::Index dim, Eigen::Index i) {
  Vec e = Vec::Zero(dim);
  e[i] = 1.0;
  return e;
}

}  // namespace rsirl
