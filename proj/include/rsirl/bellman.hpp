#pragma once

#include "rsirl/scenario.hpp"
#include "rsirl/semi_parametric.hpp"

#include <cstdint>
#include <vector>

namespace rsirl {

/// Probabilities proportional to exp(-beta * value), max-shifted. beta = 0
/// gives the uniform distribution.
Vec boltzmann(const Vec& values, double beta);

/// Expectation form of softmin: E_{a ~ boltzmann(values, beta)} values[a].
double softmin_expectation(const Vec& values, double beta);

/// Derivative weights of softmin_expectation: d softmin = sum_a w[a] d values[a],
/// with w[a] = sigma[a] (1 - beta (values[a] - softmin)).
Vec softmin_weights(const Vec& values, double beta);

/// Log-sum-exp softmin, -log sum_a exp(-values[a]).
double softmin_log(const Vec& values);

struct ExactBellman {
  /// values[node][a]: risk-sensitive cost-to-go of action a at that node.
  std::vector<Vec> values;
  /// policy[node]: argmin of values[node], lowest index on ties.
  std::vector<int> policy;

  const Vec& root() const { return values.front(); }
};

/// Risk-sensitive dynamic program with min over actions and rho over modes.
/// Stage costs are c . phi.
ExactBellman exact_bellman(const ScenarioTree& tree, const RiskEnvelope& env, const Vec& c);

struct SoftBellmanOptions {
  double beta = 1.0;
  bool gradient = true;
  DegeneracyPolicy degeneracy = DegeneracyPolicy::Ignore;
  std::uint64_t perturb_seed = 0x5eed;
};

struct SoftBellman {
  Vec root_values;       ///< tau~ per first-stage action
  Mat grad_r;            ///< row a: d tau~[a] / d r
  Mat grad_c;            ///< row a: d tau~[a] / d c
  int degenerate_lps = 0;
};

/// Soft recursion: rho^r over modes and the expectation softmin over actions.
SoftBellman soft_bellman(const ScenarioTree& tree, const SemiParametricCrm& crm, const Vec& r,
                         const Vec& c, const SoftBellmanOptions& options = {});

}  // namespace rsirl
