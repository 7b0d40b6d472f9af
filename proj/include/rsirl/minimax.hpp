#pragma once

#include "rsirl/cost.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace rsirl {

/// Smooth pieces f_0..f_{k-1} of the objective max_i f_i(u).
struct PieceSet {
  Eigen::Index count = 0;
  std::function<Vec(const Vec& u)> values;
  std::function<Mat(const Vec& u)> jacobian;                 ///< k x m
  std::function<std::vector<Mat>(const Vec& u)> hessians;    ///< k of m x m
};

/// f_i(u) = w_i . g(x, u) for each weight vector w_i (typically envelope
/// vertices). Hessians are exact for quadratic costs and central
/// differences of grad_u otherwise.
PieceSet pieces_from_cost(const CostOracle& cost, const Vec& x, const std::vector<Vec>& weights);

struct MinimaxOptions {
  int starts = 5;            ///< multi-start count (ignored when convex)
  bool convex = false;       ///< pieces known convex: a single start suffices
  std::uint64_t seed = 1;
  int max_newton = 200;      ///< per smoothing level
};

struct MinimaxResult {
  Vec u;
  double value = 0.0;
  Vec multipliers;           ///< one per piece, on the simplex
  bool certified = false;    ///< KKT conditions verified after polishing
  double kkt_residual = 0.0;
};

/// min over the box of max_i f_i(u). A log-sum-exp continuation with
/// projected Newton steps finds the neighbourhood; an active-set Newton
/// solve of the KKT system then pins the solution to machine precision.
/// Throws NumericalFailure if no start produces a finite point.
MinimaxResult solve_minimax(const PieceSet& pieces, const ControlBounds& bounds,
                            const MinimaxOptions& options = {});

}  // namespace rsirl
