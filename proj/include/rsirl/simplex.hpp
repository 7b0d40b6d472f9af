#pragma once

#include "rsirl/core.hpp"

#include <random>

namespace rsirl {

/// Probability mass function over L disturbance realizations.
///
/// Every entry is strictly positive and the entries sum to one (within 1e-12).
class Pmf {
 public:
  explicit Pmf(Vec probs);

  const Vec& probs() const { return probs_; }
  Eigen::Index size() const { return probs_.size(); }
  double operator[](Eigen::Index i) const { return probs_[i]; }

  static Pmf uniform(Eigen::Index size);

 private:
  Vec probs_;
};

/// True if `v` lies in the probability simplex within `tol`.
bool in_simplex(const Vec& v, double tol = kGeomTol);

/// Euclidean projection onto the probability simplex (sort-based).
Vec project_to_simplex(const Vec& y);

/// Uniform sample from the probability simplex (flat Dirichlet).
Vec sample_simplex(Eigen::Index dim, std::mt19937_64& rng);

/// Vertex e_i of the simplex.
Vec simplex_vertex(Eigen::Index dim, Eigen::Index i);

}  // namespace rsirl
