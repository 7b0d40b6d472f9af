#include "rsirl/cost.hpp"

namespace rsirl {

ControlBounds::ControlBounds(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
  require_dim(upper.size(), lower.size(), "control bounds");
  if ((upper - lower).minCoeff() < 0.0) throw Error("control bounds: lower exceeds upper");
}

ControlBounds ControlBounds::symmetric(Eigen::Index m, double limit) {
  return ControlBounds(Vec::Constant(m, -limit), Vec::Constant(m, limit));
}

bool ControlBounds::contains(const Vec& u, double tol) const {
  if (u.size() != dim()) return false;
  return (u - upper).maxCoeff() <= tol && (lower - u).maxCoeff() <= tol;
}

Vec ControlBounds::clamp(const Vec& u) const { return u.cwiseMax(lower).cwiseMin(upper); }

Vec QuadraticCosts::eval(const Vec& u) const {
  Vec g(constant.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    g[j] = 0.5 * u.dot(hessians[k] * u) + linear[k].dot(u) + constant[j];
  }
  return g;
}

Mat QuadraticCosts::jacobian(const Vec& u) const {
  Mat jac(constant.size(), u.size());
  for (Eigen::Index j = 0; j < jac.rows(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    jac.row(j) = (hessians[k] * u + linear[k]).transpose();
  }
  return jac;
}

CostOracle CostOracle::from_quadratic(Eigen::Index outcomes, Eigen::Index controls,
                                      std::function<QuadraticCosts(const Vec& x)> make) {
  CostOracle c;
  c.outcomes = outcomes;
  c.controls = controls;
  c.eval = [make](const Vec& x, const Vec& u) { return make(x).eval(u); };
  c.grad_u = [make](const Vec& x, const Vec& u) { return make(x).jacobian(u); };
  c.quadratic = make;
  return c;
}

Mat FeatureModel::eval(const Vec& x, const Vec& u) const {
  Mat phi(outcomes(), count());
  for (Eigen::Index h = 0; h < count(); ++h) phi.col(h) = features[static_cast<std::size_t>(h)].eval(x, u);
  return phi;
}

namespace {

bool all_quadratic(const std::vector<CostOracle>& fs) {
  for (const auto& f : fs) {
    if (!f.quadratic) return false;
  }
  return true;
}

}  // namespace

CostOracle FeatureModel::weighted(const Vec& weights) const {
  require_dim(weights.size(), count(), "feature weights");
  CostOracle c;
  c.outcomes = outcomes();
  c.controls = features.front().controls;
  const auto fs = features;
  c.eval = [fs, weights](const Vec& x, const Vec& u) {
    Vec g = Vec::Zero(fs.front().outcomes);
    for (std::size_t h = 0; h < fs.size(); ++h) g += weights[static_cast<Eigen::Index>(h)] * fs[h].eval(x, u);
    return g;
  };
  c.grad_u = [fs, weights](const Vec& x, const Vec& u) {
    Mat jac = Mat::Zero(fs.front().outcomes, fs.front().controls);
    for (std::size_t h = 0; h < fs.size(); ++h) jac += weights[static_cast<Eigen::Index>(h)] * fs[h].grad_u(x, u);
    return jac;
  };
  if (all_quadratic(fs)) {
    c.quadratic = [fs, weights](const Vec& x) {
      QuadraticCosts out;
      for (std::size_t h = 0; h < fs.size(); ++h) {
        const double w = weights[static_cast<Eigen::Index>(h)];
        QuadraticCosts q = fs[h].quadratic(x);
        if (h == 0) {
          out.constant = w * q.constant;
          for (std::size_t j = 0; j < q.hessians.size(); ++j) {
            out.hessians.push_back(w * q.hessians[j]);
            out.linear.push_back(w * q.linear[j]);
          }
        } else {
          out.constant += w * q.constant;
          for (std::size_t j = 0; j < q.hessians.size(); ++j) {
            out.hessians[j] += w * q.hessians[j];
            out.linear[j] += w * q.linear[j];
          }
        }
      }
      return out;
    };
  }
  return c;
}

CostOracle FeatureModel::flattened() const {
  const Eigen::Index l = outcomes();
  const Eigen::Index h = count();
  CostOracle c;
  c.outcomes = l * h;
  c.controls = features.front().controls;
  const auto fs = features;
  c.eval = [fs, l, h](const Vec& x, const Vec& u) {
    Vec g(l * h);
    for (Eigen::Index k = 0; k < h; ++k) {
      const Vec col = fs[static_cast<std::size_t>(k)].eval(x, u);
      for (Eigen::Index j = 0; j < l; ++j) g[j * h + k] = col[j];
    }
    return g;
  };
  c.grad_u = [fs, l, h](const Vec& x, const Vec& u) {
    Mat jac(l * h, fs.front().controls);
    for (Eigen::Index k = 0; k < h; ++k) {
      const Mat part = fs[static_cast<std::size_t>(k)].grad_u(x, u);
      for (Eigen::Index j = 0; j < l; ++j) jac.row(j * h + k) = part.row(j);
    }
    return jac;
  };
  if (all_quadratic(fs)) {
    c.quadratic = [fs, l, h](const Vec& x) {
      QuadraticCosts out;
      out.constant.resize(l * h);
      out.hessians.resize(static_cast<std::size_t>(l * h));
      out.linear.resize(static_cast<std::size_t>(l * h));
      for (Eigen::Index k = 0; k < h; ++k) {
        QuadraticCosts q = fs[static_cast<std::size_t>(k)].quadratic(x);
        for (Eigen::Index j = 0; j < l; ++j) {
          const auto idx = static_cast<std::size_t>(j * h + k);
          out.hessians[idx] = q.hessians[static_cast<std::size_t>(j)];
          out.linear[idx] = q.linear[static_cast<std::size_t>(j)];
          out.constant[j * h + k] = q.constant[j];
        }
      }
      return out;
    };
  }
  return c;
}

}  // namespace rsirl
