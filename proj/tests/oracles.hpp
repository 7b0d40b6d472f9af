#pragma once
// Independent reference computations used only by the tests.

#include "rsirl/envelope.hpp"
#include "rsirl/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

using rsirl::Mat;
using rsirl::Vec;

// Vertices of {v in simplex : A v <= b} by trying every choice of dim-1
// tight constraints together with sum(v) = 1.
inline std::vector<Vec> brute_vertices(Eigen::Index dim, const std::vector<rsirl::Halfspace>& hs) {
  std::vector<Vec> normals;
  std::vector<double> offsets;
  for (Eigen::Index i = 0; i < dim; ++i) {
    normals.push_back(-rsirl::simplex_vertex(dim, i));
    offsets.push_back(0.0);
  }
  for (const auto& h : hs) {
    normals.push_back(h.normal);
    offsets.push_back(h.offset);
  }
  const int m = static_cast<int>(normals.size());
  const int k = static_cast<int>(dim) - 1;
  std::vector<Vec> out;
  std::vector<bool> mask(static_cast<std::size_t>(m), false);
  std::fill(mask.begin(), mask.begin() + k, true);
  do {
    Mat a(dim, dim);
    Vec b(dim);
    a.row(0).setOnes();
    b[0] = 1.0;
    int r = 1;
    for (int j = 0; j < m; ++j) {
      if (!mask[static_cast<std::size_t>(j)]) continue;
      a.row(r) = normals[static_cast<std::size_t>(j)].transpose();
      b[r] = offsets[static_cast<std::size_t>(j)];
      ++r;
    }
    Eigen::FullPivLU<Mat> lu(a);
    if (!lu.isInvertible()) continue;
    Vec v = lu.solve(b);
    bool ok = v.minCoeff() >= -1e-9;
    for (int j = 0; ok && j < m; ++j) {
      ok = normals[static_cast<std::size_t>(j)].dot(v) <= offsets[static_cast<std::size_t>(j)] + 1e-9;
    }
    if (!ok) continue;
    bool dup = false;
    for (const Vec& w : out) dup = dup || (w - v).cwiseAbs().maxCoeff() < 1e-8;
    if (!dup) out.push_back(v);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

// CVaR_alpha of z under p: average of the worst alpha-tail.
inline double sorted_tail_cvar(const Vec& p, const Vec& z, double alpha) {
  std::vector<int> order(static_cast<std::size_t>(z.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return z[a] > z[b]; });
  double mass = 0.0, acc = 0.0;
  for (int i : order) {
    const double take = std::min(p[i], alpha - mass);
    if (take <= 0.0) break;
    acc += take * z[i];
    mass += take;
  }
  return acc / alpha;
}

inline bool same_vertex_sets(const std::vector<Vec>& a, const std::vector<Vec>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (const Vec& v : a) {
    bool hit = false;
    for (const Vec& w : b) hit = hit || (v - w).cwiseAbs().maxCoeff() <= tol;
    if (!hit) return false;
  }
  return true;
}

// max over the listed vertices of v . z
inline double vertex_max(const std::vector<Vec>& vertices, const Vec& z) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& v : vertices) best = std::max(best, v.dot(z));
  return best;
}

// First-stage values by exhaustive search: for each root action, every
// assignment of actions to the nodes below it is scored with the nested
// risk objective, and the cheapest assignment wins.
inline Vec brute_tree_values(const rsirl::ScenarioTree& tree, const std::vector<Vec>& vertices, const Vec& c) {
  const int L = tree.L;
  const auto& root = tree.nodes.front();
  Vec out(static_cast<Eigen::Index>(root.phi.size()));
  for (std::size_t a = 0; a < root.phi.size(); ++a) {
    // Nodes below the root reached through action a.
    std::vector<int> below;
    for (int j = 0; j < L; ++j) {
      if (root.child[a * L + j] >= 0) below.push_back(root.child[a * L + j]);
    }
    for (std::size_t i = 0; i < below.size(); ++i) {
      const auto& node = tree.nodes[static_cast<std::size_t>(below[i])];
      for (int ch : node.child) {
        if (ch >= 0) below.push_back(ch);
      }
    }
    std::vector<int> choice(tree.nodes.size(), 0);
    std::function<double(int)> value = [&](int k) {
      const auto& node = tree.nodes[static_cast<std::size_t>(k)];
      const int act = k == 0 ? static_cast<int>(a) : choice[static_cast<std::size_t>(k)];
      Vec z = node.phi[static_cast<std::size_t>(act)] * c;
      for (int j = 0; j < L; ++j) {
        const int ch = node.child[static_cast<std::size_t>(act) * L + j];
        if (ch >= 0) z[j] += value(ch);
      }
      return vertex_max(vertices, z);
    };
    double best = std::numeric_limits<double>::infinity();
    while (true) {
      best = std::min(best, value(0));
      // Mixed-radix increment over the choices of every node below.
      std::size_t i = 0;
      for (; i < below.size(); ++i) {
        auto& ch = choice[static_cast<std::size_t>(below[i])];
        if (++ch < static_cast<int>(tree.actions(static_cast<std::size_t>(below[i])))) break;
        ch = 0;
      }
      if (i == below.size()) break;
    }
    out[static_cast<Eigen::Index>(a)] = best;
  }
  return out;
}

// Risk-neutral likelihood written directly: expected stage costs under p,
// expectation-form softmin over the next stage, log-softmax at the root.
inline double rn_log_likelihood(const rsirl::LikelihoodData& data, const Vec& c) {
  const Vec& p = data.cfg.pmf.probs();
  const double beta = data.cfg.beta;
  auto softmin = [beta](const Vec& f) {
    const double lo = f.minCoeff();
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double w = std::exp(-beta * (f[i] - lo));
      num += w * f[i];
      den += w;
    }
    return num / den;
  };
  double total = 0.0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto& tree = data.trees[s];
    std::function<Vec(int)> q = [&](int k) {
      const auto& node = tree.nodes[static_cast<std::size_t>(k)];
      Vec vals(static_cast<Eigen::Index>(node.phi.size()));
      for (std::size_t a = 0; a < node.phi.size(); ++a) {
        double v = 0.0;
        for (int j = 0; j < tree.L; ++j) {
          double stage = node.phi[a].row(j).dot(c);
          const int ch = node.child[a * tree.L + j];
          if (ch >= 0) stage += softmin(q(ch));
          v += p[j] * stage;
        }
        vals[static_cast<Eigen::Index>(a)] = v;
      }
      return vals;
    };
    const Vec tau = q(0);
    const double lo = tau.minCoeff();
    double z = 0.0;
    for (Eigen::Index a = 0; a < tau.size(); ++a) z += std::exp(-beta * (tau[a] - lo));
    total += -beta * (tau[data.observed[s]] - lo) - std::log(z);
  }
  return total / static_cast<double>(data.size());
}

}  // namespace oracle
