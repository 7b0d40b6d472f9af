#include "rsirl/fit.hpp"

#include <cmath>

namespace rsirl {

Vec mirror_step(const Vec& c, const Vec& grad, double step) {
  require_dim(grad.size(), c.size(), "mirror_step");
  const Vec e = step * grad;
  const double shift = e.maxCoeff();
  Vec out = (c.array() * (e.array() - shift).exp()).matrix();
  out = out.cwiseMax(kWeightFloor);
  return out / out.sum();
}

namespace {

void require_finite(const Likelihood& l) {
  const bool ok = std::isfinite(l.value) && (l.grad_r.size() == 0 || l.grad_r.allFinite()) &&
                  (l.grad_c.size() == 0 || l.grad_c.allFinite());
  if (!ok) throw NumericalFailure("fit: non-finite likelihood or gradient");
}

}  // namespace

FitResult fit(const SemiParametricCrm& crm, const LikelihoodData& data, const FitHyperparams& hyper,
              const Vec& init_r, const Vec& init_c, const LikelihoodOptions& options) {
  if (hyper.step_r <= 0.0 || hyper.step_c <= 0.0 || hyper.max_iters < 1) {
    throw Error("fit: steps must be positive and max_iters at least 1");
  }
  LikelihoodOptions opt = options;
  opt.gradient = true;

  FitResult res;
  res.r = hyper.fit_r ? crm.project_offsets(init_r) : init_r;
  res.c = project_to_simplex(init_c).cwiseMax(kWeightFloor);
  res.c /= res.c.sum();

  Likelihood cur = log_likelihood(crm, res.r, res.c, data, opt);
  require_finite(cur);
  res.value = cur.value;
  res.trace.push_back(cur.value);
  res.best_trace.push_back(cur.value);
  res.r_trace.push_back(res.r);

  double sr = hyper.step_r;
  double sc = hyper.step_c;
  for (int it = 0; it < hyper.max_iters; ++it) {
    // Gradient mapping norm: how far a unit step would move after projection.
    double stat = 0.0;
    if (hyper.fit_r) stat += (crm.project_to_feasible(res.r + cur.grad_r) - res.r).squaredNorm();
    if (hyper.fit_c) {
      const Vec centered = cur.grad_c.array() - res.c.dot(cur.grad_c);
      stat += res.c.cwiseProduct(centered).squaredNorm();
    }
    if (std::sqrt(stat) < hyper.grad_tol) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    for (int h = 0; h <= hyper.max_halvings && !accepted; ++h) {
      const Vec r_try = hyper.fit_r ? crm.project_offsets(res.r + sr * cur.grad_r) : res.r;
      const Vec c_try = hyper.fit_c ? mirror_step(res.c, cur.grad_c, sc) : res.c;
      Likelihood trial = log_likelihood(crm, r_try, c_try, data, opt);
      require_finite(trial);
      if (trial.value >= cur.value) {
        res.r = r_try;
        res.c = c_try;
        cur = std::move(trial);
        accepted = true;
      } else {
        sr *= 0.5;
        sc *= 0.5;
      }
    }
    ++res.iterations;
    if (!accepted) {
      res.converged = true;
      break;
    }
    res.value = cur.value;
    res.trace.push_back(cur.value);
    res.best_trace.push_back(std::max(res.best_trace.back(), cur.value));
    res.r_trace.push_back(res.r);
  }
  return res;
}

}  // namespace rsirl
