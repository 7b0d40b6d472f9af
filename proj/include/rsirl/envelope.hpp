#pragma once

#include "rsirl/core.hpp"
#include "rsirl/simplex.hpp"

#include <vector>

namespace rsirl {

/// The set {v : normal . v <= offset}.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

/// Polytopic risk envelope: the intersection of the probability simplex with
/// a finite list of halfspaces. Always carries its vertex list.
///
/// Instances are immutable; every operation returns a new envelope.
class RiskEnvelope {
 public:
  /// The whole simplex (worst-case risk).
  static RiskEnvelope simplex(Eigen::Index dim);

  /// Envelope {p} (risk neutrality).
  static RiskEnvelope singleton(const Vec& p);

  /// Intersection of the simplex with `halfspaces`. Vertices are enumerated
  /// by double description. Throws EmptyEnvelope if the set is empty.
  static RiskEnvelope from_halfspaces(Eigen::Index dim, std::vector<Halfspace> halfspaces);

  /// Same, but trusting a precomputed vertex list after checking that every
  /// vertex satisfies the constraints.
  static RiskEnvelope from_halfspaces(Eigen::Index dim, std::vector<Halfspace> halfspaces,
                                      std::vector<Vec> vertices);

  /// Convex hull of points that lie in the simplex. Facets are found by
  /// enumeration inside the affine hull of the points; lower-dimensional
  /// hulls get equality constraints as halfspace pairs.
  static RiskEnvelope from_points(Eigen::Index dim, const std::vector<Vec>& points);

  Eigen::Index dim() const { return dim_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const std::vector<Vec>& vertices() const { return vertices_; }

  /// Membership with absolute tolerance on simplex and halfspace tests.
  bool contains(const Vec& v, double tol = kGeomTol) const;

  /// True if every vertex of `other` lies in this envelope.
  bool contains(const RiskEnvelope& other, double tol = kGeomTol) const;

 private:
  RiskEnvelope(Eigen::Index dim, std::vector<Halfspace> halfspaces, std::vector<Vec> vertices)
      : dim_(dim), halfspaces_(std::move(halfspaces)), vertices_(std::move(vertices)) {}

  Eigen::Index dim_ = 0;
  std::vector<Halfspace> halfspaces_;
  std::vector<Vec> vertices_;
};

struct CrmValue {
  double value = 0.0;
  Vec maximizer;  ///< a vertex of the envelope attaining the value
};

/// rho(z) = max over the envelope of q . z.
CrmValue evaluate_crm(const RiskEnvelope& env, const Vec& z);

/// Dual envelope of CVaR at level alpha: {q in simplex : q(i) <= p(i) / alpha}.
RiskEnvelope cvar_envelope(const Pmf& p, double alpha);

/// env intersected with {v : normal . v <= offset}. Throws EmptyEnvelope
/// when nothing remains.
RiskEnvelope intersect_halfspace(const RiskEnvelope& env, const Vec& normal, double offset);

/// Extreme points of the simplex cut by `halfspaces`, deduplicated within
/// kGeomTol. Throws EmptyEnvelope.
std::vector<Vec> enumerate_vertices(Eigen::Index dim, const std::vector<Halfspace>& halfspaces);

inline std::vector<Vec> enumerate_vertices(const RiskEnvelope& env) {
  return enumerate_vertices(env.dim(), env.halfspaces());
}

/// Euclidean distance from `x` to the convex hull of `points` (Wolfe's
/// minimum-norm-point algorithm).
double distance_to_hull(const Vec& x, const std::vector<Vec>& points);

/// Hausdorff distance between two envelopes, from their vertex lists.
double hausdorff(const RiskEnvelope& a, const RiskEnvelope& b);

}  // namespace rsirl
