#pragma once

#include "rsirl/envelope.hpp"

#include <cstdint>
#include <vector>

namespace rsirl {

/// What to do when a CRM evaluation LP comes back degenerate.
enum class DegeneracyPolicy {
  Ignore,   ///< take whatever vertex and multipliers the solver returned
  Perturb,  ///< re-solve dual-degenerate problems with a distorted objective
  Fault,    ///< throw NumericalFailure
};

/// Risk envelope with fixed normals a_j and learnable offsets r:
///
///   P_r = { v in simplex : a_j . v <= b_j - r_j },  b_j = max_i a_j(i).
///
/// r = 0 gives the whole simplex; r is feasible when P_r is nonempty.
class SemiParametricCrm {
 public:
  explicit SemiParametricCrm(std::vector<Vec> normals);

  /// The 2L normals +e_0..+e_{L-1}, -e_0..-e_{L-1}.
  static SemiParametricCrm axis_aligned(Eigen::Index dim);

  Eigen::Index dim() const { return dim_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(normals_.size()); }
  const std::vector<Vec>& normals() const { return normals_; }
  const Vec& baselines() const { return baselines_; }

  std::vector<Halfspace> halfspaces(const Vec& r) const;
  RiskEnvelope envelope(const Vec& r) const;

  /// P_r nonempty (checked with an LP, slack `tol`).
  bool feasible(const Vec& r, double tol = kGeomTol) const;

  /// Euclidean projection of r onto the feasible offsets.
  Vec project_to_feasible(const Vec& r) const;

  /// Constraints whose removal leaves P_r unchanged (including ones that
  /// only touch P_r at a lower-dimensional face).
  std::vector<bool> redundant(const Vec& r) const;

  /// project_to_feasible followed by the redundancy bump: each redundant
  /// offset is raised by kRedundancyBump when the envelope stays nonempty.
  Vec project_offsets(const Vec& r) const;

 private:
  Eigen::Index dim_ = 0;
  std::vector<Vec> normals_;
  Vec baselines_;
};

inline constexpr double kRedundancyBump = 0.01;

/// Offsets that pin an axis_aligned envelope to the single point p.
Vec pinned_offsets(const Pmf& p);

struct CrmEvaluation {
  double value = 0.0;
  Vec v;        ///< maximizing distribution
  Vec lambda;   ///< multipliers of the a_j rows; d value / d r = -lambda
  bool primal_degenerate = false;
  bool dual_degenerate = false;
};

/// rho^r(z) = max over P_r of v . z, with LP sensitivities.
CrmEvaluation evaluate(const SemiParametricCrm& crm, const Vec& r, const Vec& z,
                       DegeneracyPolicy policy = DegeneracyPolicy::Ignore,
                       std::uint64_t perturb_seed = 0x5eed);

}  // namespace rsirl
