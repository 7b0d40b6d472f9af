#pragma once

#include "rsirl/core.hpp"

#include <cstdint>
#include <limits>

namespace rsirl {


/// Dense linear program in "maximize" form:
///
///   maximize    objective . x
///   subject to  ineq_rows x <= ineq_rhs
///               eq_rows   x  = eq_rhs
///               lower <= x <= upper      (entries may be infinite)
struct LinearProgram {
  Vec objective;
  Mat ineq_rows;
  Vec ineq_rhs;
  Mat eq_rows;
  Vec eq_rhs;
  Vec lower;
  Vec upper;

  /// `n` variables, zero objective, bounds [0, +inf), no rows.
  explicit LinearProgram(Eigen::Index n = 0);

  Eigen::Index num_vars() const { return objective.size(); }
  Eigen::Index num_ineq() const { return ineq_rows.rows(); }
  Eigen::Index num_eq() const { return eq_rows.rows(); }

  void add_ineq(const Vec& row, double rhs);
  void add_eq(const Vec& row, double rhs);

  /// Throws DimensionMismatch if the blocks disagree in size.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vec primal;
  double value = 0.0;
  /// One nonnegative multiplier per inequality row; d(value)/d(ineq_rhs).
  Vec ineq_duals;
  /// One free multiplier per equality row; d(value)/d(eq_rhs).
  Vec eq_duals;
  /// A basic variable sits at zero: the optimal vertex has more active
  /// constraints than dimensions, so the duals need not be unique.
  bool primal_degenerate = false;
  /// A nonbasic column has zero reduced cost: another optimal vertex exists.
  bool dual_degenerate = false;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

/// Two-phase dense simplex (Dantzig pricing with a Bland fallback on
/// degenerate stalls). Primal and dual values are recomputed from an LU
/// factorization of the final basis.
LpSolution solve(const LinearProgram& lp);

/// Multiplies every objective entry by (1 + 1e-7 u), u ~ U[-1, 1] drawn from
/// a generator seeded with `seed`.
LinearProgram perturb_objective(const LinearProgram& lp, std::uint64_t seed);

inline constexpr double kObjectivePerturbation = 1e-7;

/// Optimality certificate residuals of a solution in the original variables.
struct LpCertificate {
  double primal_infeasibility = 0.0;   ///< max violation of any row or bound
  double dual_infeasibility = 0.0;     ///< max sign violation of multipliers
  double complementarity = 0.0;        ///< max |multiplier * slack|
  double duality_gap = 0.0;            ///< |primal value - dual value| / max(1, |value|)
};

LpCertificate certify(const LinearProgram& lp, const LpSolution& sol);

}  // namespace rsirl
