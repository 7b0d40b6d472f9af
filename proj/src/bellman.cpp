#include "rsirl/bellman.hpp"

#include <cmath>

namespace rsirl {

Vec boltzmann(const Vec& values, double beta) {
  if (values.size() == 0) throw Error("boltzmann: no values");
  if (beta < 0.0) throw Error("boltzmann: negative inverse temperature");
  const double lo = values.minCoeff();
  Vec w = (-beta * (values.array() - lo)).exp().matrix();
  return w / w.sum();
}

double softmin_expectation(const Vec& values, double beta) {
  return boltzmann(values, beta).dot(values);
}

Vec softmin_weights(const Vec& values, double beta) {
  const Vec sigma = boltzmann(values, beta);
  const double s = sigma.dot(values);
  return (sigma.array() * (1.0 - beta * (values.array() - s))).matrix();
}

double softmin_log(const Vec& values) {
  const double lo = values.minCoeff();
  return lo - std::log((-(values.array() - lo)).exp().sum());
}

namespace {

void check_weights(const ScenarioTree& tree, const Vec& c) {
  if (tree.nodes.empty()) throw Error("bellman: empty tree");
  require_dim(c.size(), tree.H, "bellman weights");
}

}  // namespace

ExactBellman exact_bellman(const ScenarioTree& tree, const RiskEnvelope& env, const Vec& c) {
  check_weights(tree, c);
  require_dim(env.dim(), tree.L, "exact_bellman envelope");
  const std::size_t n = tree.nodes.size();
  ExactBellman out;
  out.values.resize(n);
  out.policy.resize(n);

  for (std::size_t k = n; k-- > 0;) {
    const auto& node = tree.nodes[k];
    Vec vals(static_cast<Eigen::Index>(node.phi.size()));
    for (std::size_t a = 0; a < node.phi.size(); ++a) {
      Vec z = node.phi[a] * c;
      for (int j = 0; j < tree.L; ++j) {
        const int ch = node.child[a * tree.L + j];
        if (ch >= 0) z[j] += out.values[ch][out.policy[ch]];
      }
      vals[static_cast<Eigen::Index>(a)] = evaluate_crm(env, z).value;
    }
    Eigen::Index best = 0;
    for (Eigen::Index a = 1; a < vals.size(); ++a) {
      if (vals[a] < vals[best]) best = a;
    }
    out.values[k] = std::move(vals);
    out.policy[k] = static_cast<int>(best);
  }
  return out;
}

SoftBellman soft_bellman(const ScenarioTree& tree, const SemiParametricCrm& crm, const Vec& r,
                         const Vec& c, const SoftBellmanOptions& options) {
  check_weights(tree, c);
  require_dim(crm.dim(), tree.L, "soft_bellman CRM");
  require_dim(r.size(), crm.size(), "soft_bellman offsets");
  const Eigen::Index M = crm.size();
  const Eigen::Index H = tree.H;
  const bool grad = options.gradient;

  const std::size_t n = tree.nodes.size();
  std::vector<Vec> values(n);
  std::vector<Mat> dr(n), dc(n);
  SoftBellman out;

  for (std::size_t k = n; k-- > 0;) {
    const auto& node = tree.nodes[k];
    const auto A = static_cast<Eigen::Index>(node.phi.size());
    Vec vals(A);
    if (grad) {
      dr[k].resize(A, M);
      dc[k].resize(A, H);
    }
    for (Eigen::Index a = 0; a < A; ++a) {
      const Mat& phi = node.phi[static_cast<std::size_t>(a)];
      Vec z = phi * c;
      // Tail softmin per mode and its sensitivities.
      Mat tail_r = Mat::Zero(tree.L, M);
      Mat tail_c = Mat::Zero(tree.L, H);
      for (int j = 0; j < tree.L; ++j) {
        const int ch = node.child[static_cast<std::size_t>(a) * tree.L + j];
        if (ch < 0) continue;
        const Vec& f = values[ch];
        z[j] += softmin_expectation(f, options.beta);
        if (grad) {
          const Vec w = softmin_weights(f, options.beta);
          tail_r.row(j) = w.transpose() * dr[ch];
          tail_c.row(j) = w.transpose() * dc[ch];
        }
      }
      const CrmEvaluation ev = evaluate(crm, r, z, options.degeneracy,
                                        options.perturb_seed + 7919 * k + static_cast<std::uint64_t>(a));
      if (ev.primal_degenerate || ev.dual_degenerate) ++out.degenerate_lps;
      vals[a] = ev.value;
      if (grad) {
        dr[k].row(a) = ev.v.transpose() * tail_r - ev.lambda.transpose();
        dc[k].row(a) = ev.v.transpose() * (phi + tail_c);
      }
    }
    values[k] = std::move(vals);
    // Children are no longer needed once the parent is done.
    for (int ch : node.child) {
      if (ch >= 0) {
        dr[ch].resize(0, 0);
        dc[ch].resize(0, 0);
      }
    }
  }

  out.root_values = values.front();
  if (grad) {
    out.grad_r = std::move(dr.front());
    out.grad_c = std::move(dc.front());
  }
  return out;
}

}  // namespace rsirl
