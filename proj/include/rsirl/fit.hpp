#pragma once

#include "rsirl/likelihood.hpp"

#include <cstdint>
#include <vector>

namespace rsirl {

struct FitHyperparams {
  double step_r = 0.05;
  double step_c = 0.5;
  int max_iters = 100;
  double grad_tol = 1e-6;
  std::uint64_t seed = 1;
  bool fit_r = true;   ///< false keeps r at its initial value (risk-neutral baseline)
  bool fit_c = true;
  int max_halvings = 20;
};

/// Smallest weight kept by the multiplicative update.
inline constexpr double kWeightFloor = 1e-12;

struct FitResult {
  Vec r;
  Vec c;
  double value = 0.0;
  std::vector<double> trace;       ///< likelihood of each accepted iterate
  std::vector<double> best_trace;  ///< best likelihood so far, per iteration
  std::vector<Vec> r_trace;        ///< offsets of each accepted iterate
  int iterations = 0;
  bool converged = false;
};

/// One entropic mirror ascent step on the simplex: c * exp(step * grad),
/// floored at kWeightFloor and renormalized.
Vec mirror_step(const Vec& c, const Vec& grad, double step);

/// Maximum likelihood over (r, c): projected gradient ascent on r and mirror
/// ascent on c, both steps halved whenever a trial step lowers the likelihood.
FitResult fit(const SemiParametricCrm& crm, const LikelihoodData& data, const FitHyperparams& hyper,
              const Vec& init_r, const Vec& init_c, const LikelihoodOptions& options = {});

}  // namespace rsirl
