#include "rsirl/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rsirl {

PieceSet pieces_from_cost(const CostOracle& cost, const Vec& x, const std::vector<Vec>& weights) {
  if (weights.empty()) throw EmptyEnvelope("minimax: no pieces");
  Mat w(static_cast<Eigen::Index>(weights.size()), cost.outcomes);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require_dim(weights[i].size(), cost.outcomes, "piece weights");
    w.row(static_cast<Eigen::Index>(i)) = weights[i].transpose();
  }
  PieceSet ps;
  ps.count = w.rows();
  if (cost.quadratic) {
    const QuadraticCosts q = cost.quadratic(x);
    std::vector<Mat> hs;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      Mat h = Mat::Zero(cost.controls, cost.controls);
      for (Eigen::Index j = 0; j < w.cols(); ++j) h += w(i, j) * q.hessians[static_cast<std::size_t>(j)];
      hs.push_back(h);
    }
    ps.values = [w, q](const Vec& u) { return Vec(w * q.eval(u)); };
    ps.jacobian = [w, q](const Vec& u) { return Mat(w * q.jacobian(u)); };
    ps.hessians = [hs](const Vec&) { return hs; };
    return ps;
  }
  ps.values = [w, cost, x](const Vec& u) { return Vec(w * cost.eval(x, u)); };
  ps.jacobian = [w, cost, x](const Vec& u) { return Mat(w * cost.grad_u(x, u)); };
  ps.hessians = [w, cost, x](const Vec& u) {
    const Eigen::Index m = u.size();
    std::vector<Mat> hs(static_cast<std::size_t>(w.rows()), Mat(m, m));
    for (Eigen::Index k = 0; k < m; ++k) {
      const double h = 1e-5 * std::max(1.0, std::abs(u[k]));
      Vec up = u, dn = u;
      up[k] += h;
      dn[k] -= h;
      const Mat d = w * (cost.grad_u(x, up) - cost.grad_u(x, dn)) / (2.0 * h);
      for (Eigen::Index i = 0; i < w.rows(); ++i) hs[static_cast<std::size_t>(i)].col(k) = d.row(i).transpose();
    }
    for (auto& hm : hs) hm = 0.5 * (hm + hm.transpose()).eval();
    return hs;
  };
  return ps;
}

namespace {

struct Smoothed {
  double value;
  Vec grad;
  Vec weights;
  Vec f;
};

Smoothed smoothed(const PieceSet& ps, const Vec& u, double mu) {
  Smoothed s;
  s.f = ps.values(u);
  const double fmax = s.f.maxCoeff();
  s.weights = ((s.f.array() - fmax) / mu).exp().matrix();
  const double total = s.weights.sum();
  s.weights /= total;
  s.value = fmax + mu * std::log(total);
  s.grad = ps.jacobian(u).transpose() * s.weights;
  return s;
}

Mat smoothed_hessian(const PieceSet& ps, const Vec& u, const Smoothed& s, double mu) {
  const Mat jac = ps.jacobian(u);
  const auto hs = ps.hessians(u);
  Mat h = Mat::Zero(u.size(), u.size());
  for (Eigen::Index i = 0; i < ps.count; ++i) {
    if (s.weights[i] > 0.0) h += s.weights[i] * hs[static_cast<std::size_t>(i)];
  }
  h += (jac.transpose() * s.weights.asDiagonal() * jac - s.grad * s.grad.transpose()) / mu;
  return 0.5 * (h + h.transpose());
}

Vec solve_regularized(Mat h, const Vec& rhs) {
  const double scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
  double shift = 0.0;
  for (int attempt = 0; attempt < 20; ++attempt) {
    Eigen::LLT<Mat> llt(h + shift * Mat::Identity(h.rows(), h.cols()));
    if (llt.info() == Eigen::Success) return llt.solve(rhs);
    shift = shift == 0.0 ? 1e-10 * scale : shift * 10.0;
  }
  return rhs / scale;
}

// Projected Newton (Bertsekas) on the smoothed maximum at level mu.
Vec projected_newton(const PieceSet& ps, const ControlBounds& box, Vec u, double mu, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const Smoothed s = smoothed(ps, u, mu);
    const Vec pg = u - box.clamp(u - s.grad);
    const double pg_norm = pg.cwiseAbs().maxCoeff();
    if (pg_norm <= 1e-13 * (1.0 + u.cwiseAbs().maxCoeff())) break;
    const double eps = std::min(1e-6, pg_norm);

    std::vector<Eigen::Index> free;
    std::vector<bool> bound(static_cast<std::size_t>(u.size()), false);
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      const bool lo = u[k] <= box.lower[k] + eps && s.grad[k] > 0.0;
      const bool hi = u[k] >= box.upper[k] - eps && s.grad[k] < 0.0;
      if (lo || hi) {
        bound[static_cast<std::size_t>(k)] = true;
      } else {
        free.push_back(k);
      }
    }
    const Mat h = smoothed_hessian(ps, u, s, mu);
    Vec d = Vec::Zero(u.size());
    if (!free.empty()) {
      const auto nf = static_cast<Eigen::Index>(free.size());
      Mat hff(nf, nf);
      Vec gf(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        gf[a] = s.grad[free[static_cast<std::size_t>(a)]];
        for (Eigen::Index b = 0; b < nf; ++b) hff(a, b) = h(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
      }
      const Vec df = solve_regularized(hff, -gf);
      for (Eigen::Index a = 0; a < nf; ++a) d[free[static_cast<std::size_t>(a)]] = df[a];
    }
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      if (bound[static_cast<std::size_t>(k)]) d[k] = -s.grad[k] / std::max(h(k, k), 1e-12);
    }

    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vec trial = box.clamp(u + alpha * d);
      const Smoothed st = smoothed(ps, trial, mu);
      const double decrease = s.grad.dot(trial - u);
      if (st.value <= s.value + 1e-4 * decrease && st.value < s.value) {
        u = trial;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  return u;
}

struct Polish {
  bool ok = false;
  Vec u;
  double tau = 0.0;
  Vec lambda;  // full length
  double residual = 0.0;
};

// Active-set Newton on the KKT system of min tau s.t. f_i(u) <= tau, u in box.
Polish polish(const PieceSet& ps, const ControlBounds& box, const Vec& u0, const Vec& w0) {
  const Eigen::Index m = u0.size();
  const Eigen::Index k = ps.count;
  Vec u = u0;
  Vec f = ps.values(u);
  double tau = f.maxCoeff();
  const double scale = 1.0 + std::abs(tau) + ps.jacobian(u).cwiseAbs().maxCoeff();

  std::vector<bool> active(static_cast<std::size_t>(k), false);
  Vec lambda = Vec::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (w0[i] > 1e-6) {
      active[static_cast<std::size_t>(i)] = true;
      lambda[i] = w0[i];
    }
  }
  // 0 free, -1 fixed at lower, +1 fixed at upper
  std::vector<int> fixed(static_cast<std::size_t>(m), 0);
  {
    const Vec g = ps.jacobian(u).transpose() * w0;
    for (Eigen::Index c = 0; c < m; ++c) {
      const double tol = 1e-7 * (1.0 + box.upper[c] - box.lower[c]);
      if (u[c] <= box.lower[c] + tol && g[c] >= 0.0) fixed[static_cast<std::size_t>(c)] = -1;
      if (u[c] >= box.upper[c] - tol && g[c] <= 0.0) fixed[static_cast<std::size_t>(c)] = 1;
    }
  }

  Polish out;
  for (int cycle = 0; cycle < 4 * (k + m) + 10; ++cycle) {
    std::vector<Eigen::Index> fr, act;
    for (Eigen::Index c = 0; c < m; ++c) {
      const int fx = fixed[static_cast<std::size_t>(c)];
      if (fx == 0) {
        fr.push_back(c);
      } else {
        u[c] = fx < 0 ? box.lower[c] : box.upper[c];
      }
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      if (active[static_cast<std::size_t>(i)]) act.push_back(i);
    }
    if (act.empty()) return out;
    const auto nf = static_cast<Eigen::Index>(fr.size());
    const auto na = static_cast<Eigen::Index>(act.size());
    double lsum = 0.0;
    for (Eigen::Index i : act) lsum += lambda[i];
    for (Eigen::Index i : act) lambda[i] = lsum > 0.0 ? lambda[i] / lsum : 1.0 / static_cast<double>(na);

    double res_norm = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
      f = ps.values(u);
      const Mat jac = ps.jacobian(u);
      const auto hs = ps.hessians(u);
      const Eigen::Index n = nf + na + 1;
      Vec res(n);
      Mat jm = Mat::Zero(n, n);
      Vec grad = Vec::Zero(m);
      Mat hsum = Mat::Zero(m, m);
      for (Eigen::Index i : act) {
        grad += lambda[i] * jac.row(i).transpose();
        hsum += lambda[i] * hs[static_cast<std::size_t>(i)];
      }
      for (Eigen::Index a = 0; a < nf; ++a) {
        res[a] = grad[fr[static_cast<std::size_t>(a)]];
        for (Eigen::Index b = 0; b < nf; ++b) jm(a, b) = hsum(fr[static_cast<std::size_t>(a)], fr[static_cast<std::size_t>(b)]);
        for (Eigen::Index p = 0; p < na; ++p) jm(a, nf + p) = jac(act[static_cast<std::size_t>(p)], fr[static_cast<std::size_t>(a)]);
      }
      for (Eigen::Index p = 0; p < na; ++p) {
        const Eigen::Index i = act[static_cast<std::size_t>(p)];
        res[nf + p] = f[i] - tau;
        for (Eigen::Index b = 0; b < nf; ++b) jm(nf + p, b) = jac(i, fr[static_cast<std::size_t>(b)]);
        jm(nf + p, n - 1) = -1.0;
        jm(n - 1, nf + p) = 1.0;
      }
      double ls = 0.0;
      for (Eigen::Index i : act) ls += lambda[i];
      res[n - 1] = ls - 1.0;
      const double rn = res.cwiseAbs().maxCoeff();
      if (!std::isfinite(rn)) return out;
      if (rn <= 1e-14 * scale || (it > 5 && rn >= res_norm)) {
        res_norm = std::min(rn, res_norm);
        break;
      }
      res_norm = rn;
      const Vec step = jm.fullPivLu().solve(-res);
      if (!step.allFinite()) return out;
      for (Eigen::Index a = 0; a < nf; ++a) u[fr[static_cast<std::size_t>(a)]] += step[a];
      for (Eigen::Index p = 0; p < na; ++p) lambda[act[static_cast<std::size_t>(p)]] += step[nf + p];
      tau += step[n - 1];
    }
    if (res_norm > 1e-9 * scale) return out;

    // Verify and repair the active sets, one change per cycle.
    f = ps.values(u);
    const Vec g = ps.jacobian(u).transpose() * lambda;
    const double tol = 1e-10 * scale;
    Eigen::Index worst = -1;
    double worst_val = 0.0;
    for (Eigen::Index a = 0; a < nf; ++a) {
      const Eigen::Index c = fr[static_cast<std::size_t>(a)];
      const double over = std::max(u[c] - box.upper[c], box.lower[c] - u[c]);
      if (over > 1e-12 * (1.0 + std::abs(u[c])) && over > worst_val) {
        worst = c;
        worst_val = over;
      }
    }
    if (worst >= 0) {
      fixed[static_cast<std::size_t>(worst)] = u[worst] > box.upper[worst] ? 1 : -1;
      continue;
    }
    worst_val = -1e-12;
    for (Eigen::Index i : act) {
      if (lambda[i] < worst_val) {
        worst = i;
        worst_val = lambda[i];
      }
    }
    if (worst >= 0) {
      active[static_cast<std::size_t>(worst)] = false;
      lambda[worst] = 0.0;
      continue;
    }
    worst_val = tol;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (!active[static_cast<std::size_t>(i)] && f[i] - tau > worst_val) {
        worst = i;
        worst_val = f[i] - tau;
      }
    }
    if (worst >= 0) {
      active[static_cast<std::size_t>(worst)] = true;
      lambda[worst] = 0.0;
      continue;
    }
    worst_val = tol;
    for (Eigen::Index c = 0; c < m; ++c) {
      const int fx = fixed[static_cast<std::size_t>(c)];
      const double wrong = fx < 0 ? -g[c] : (fx > 0 ? g[c] : 0.0);
      if (wrong > worst_val) {
        worst = c;
        worst_val = wrong;
      }
    }
    if (worst >= 0) {
      fixed[static_cast<std::size_t>(worst)] = 0;
      continue;
    }
    for (Eigen::Index i = 0; i < k; ++i) lambda[i] = std::max(lambda[i], 0.0);
    lambda /= lambda.sum();
    out.ok = true;
    out.u = u;
    out.tau = f.maxCoeff();
    out.lambda = lambda;
    out.residual = res_norm;
    return out;
  }
  return out;
}

}  // namespace

MinimaxResult solve_minimax(const PieceSet& pieces, const ControlBounds& bounds,
                            const MinimaxOptions& options) {
  if (pieces.count < 1) throw EmptyEnvelope("minimax: no pieces");
  const Eigen::Index m = bounds.dim();
  const int starts = options.convex ? 1 : std::max(1, options.starts);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  MinimaxResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    Vec u(m);
    for (Eigen::Index c = 0; c < m; ++c) {
      const double lo = bounds.lower[c], hi = bounds.upper[c];
      if (s == 0) {
        u[c] = std::clamp(0.0, lo, hi);
      } else {
        u[c] = lo + (hi - lo) * unit(rng);
      }
    }
    const Vec f0 = pieces.values(u);
    if (!f0.allFinite()) continue;
    const double fscale = 1.0 + f0.cwiseAbs().maxCoeff();
    for (double rel = 1e-1; rel >= 1e-8; rel *= 0.1) u = projected_newton(pieces, bounds, u, rel * fscale, options.max_newton);
    const Smoothed sm = smoothed(pieces, u, 1e-8 * fscale);

    MinimaxResult cand;
    const Polish pol = polish(pieces, bounds, u, sm.weights);
    if (pol.ok) {
      cand.u = pol.u;
      cand.value = pol.tau;
      cand.multipliers = pol.lambda;
      cand.certified = true;
      cand.kkt_residual = pol.residual;
    } else {
      cand.u = u;
      cand.value = sm.f.maxCoeff();
      cand.multipliers = sm.weights;
      cand.certified = false;
      cand.kkt_residual = (u - bounds.clamp(u - sm.grad)).cwiseAbs().maxCoeff();
    }
    const double margin = 1e-12 * (1.0 + std::abs(cand.value));
    const bool better = cand.value < best.value - margin ||
                        (std::abs(cand.value - best.value) <= margin && cand.certified && !best.certified);
    if (better) best = cand;
  }
  if (!std::isfinite(best.value)) throw NumericalFailure("minimax: no start gave a finite objective");
  return best;
}

}  // namespace rsirl
