#include "rsirl/semi_parametric.hpp"

#include "rsirl/lp.hpp"

#include <algorithm>
#include <sstream>

namespace rsirl {

namespace {

LinearProgram envelope_lp(const SemiParametricCrm& crm, const Vec& r, const Vec& objective,
                          Eigen::Index skip = -1) {
  LinearProgram lp(crm.dim());
  lp.objective = objective;
  lp.add_eq(Vec::Ones(crm.dim()), 1.0);
  for (Eigen::Index j = 0; j < crm.size(); ++j) {
    if (j == skip) continue;
    lp.add_ineq(crm.normals()[static_cast<std::size_t>(j)], crm.baselines()[j] - r[j]);
  }
  return lp;
}

std::string dump(const Vec& r, const Vec& z) {
  std::ostringstream os;
  os.precision(17);
  os << "r = [" << r.transpose() << "], z = [" << z.transpose() << "]";
  return os.str();
}

}  // namespace

SemiParametricCrm::SemiParametricCrm(std::vector<Vec> normals) : normals_(std::move(normals)) {
  if (normals_.empty()) throw Error("semi-parametric CRM needs at least one normal");
  dim_ = normals_.front().size();
  baselines_.resize(static_cast<Eigen::Index>(normals_.size()));
  for (std::size_t j = 0; j < normals_.size(); ++j) {
    require_dim(normals_[j].size(), dim_, "semi-parametric normal");
    baselines_[static_cast<Eigen::Index>(j)] = normals_[j].maxCoeff();
  }
}

SemiParametricCrm SemiParametricCrm::axis_aligned(Eigen::Index dim) {
  std::vector<Vec> normals;
  for (Eigen::Index i = 0; i < dim; ++i) normals.push_back(simplex_vertex(dim, i));
  for (Eigen::Index i = 0; i < dim; ++i) normals.push_back(-simplex_vertex(dim, i));
  return SemiParametricCrm(std::move(normals));
}

std::vector<Halfspace> SemiParametricCrm::halfspaces(const Vec& r) const {
  require_dim(r.size(), size(), "offsets");
  std::vector<Halfspace> hs;
  for (Eigen::Index j = 0; j < size(); ++j) {
    hs.push_back(Halfspace{normals_[static_cast<std::size_t>(j)], baselines_[j] - r[j]});
  }
  return hs;
}

RiskEnvelope SemiParametricCrm::envelope(const Vec& r) const {
  return RiskEnvelope::from_halfspaces(dim_, halfspaces(r));
}

bool SemiParametricCrm::feasible(const Vec& r, double tol) const {
  require_dim(r.size(), size(), "offsets");
  // max -s subject to a_j v - s <= b_j - r_j, v in simplex, s >= 0
  LinearProgram lp(dim_ + 1);
  lp.objective = Vec::Zero(dim_ + 1);
  lp.objective[dim_] = -1.0;
  Vec sum = Vec::Ones(dim_ + 1);
  sum[dim_] = 0.0;
  lp.add_eq(sum, 1.0);
  for (Eigen::Index j = 0; j < size(); ++j) {
    Vec row(dim_ + 1);
    row.head(dim_) = normals_[static_cast<std::size_t>(j)];
    row[dim_] = -1.0;
    lp.add_ineq(row, baselines_[j] - r[j]);
  }
  const LpSolution sol = solve(lp);
  return sol.optimal() && -sol.value <= tol;
}

Vec SemiParametricCrm::project_to_feasible(const Vec& r0) const {
  require_dim(r0.size(), size(), "offsets");
  // Minimizing over r for fixed v leaves sum_j max(0, r0_j - b_j + a_j v)^2,
  // which is convex and smooth in v; solve it over the simplex with FISTA.
  Mat a(size(), dim_);
  for (Eigen::Index j = 0; j < size(); ++j) a.row(j) = normals_[static_cast<std::size_t>(j)].transpose();
  const Vec shift = r0 - baselines_;
  auto excess = [&](const Vec& v) { return (shift + a * v).cwiseMax(0.0); };
  auto objective = [&](const Vec& v) { return excess(v).squaredNorm(); };

  const double lip = 2.0 * std::max(1e-12, (a.transpose() * a).eigenvalues().real().maxCoeff());
  Vec v = Vec::Constant(dim_, 1.0 / static_cast<double>(dim_));
  Vec y = v;
  double t = 1.0;
  double best = objective(v);
  Vec best_v = v;
  for (int it = 0; it < 20000 && best > 0.0; ++it) {
    const Vec grad = 2.0 * a.transpose() * excess(y);
    const Vec next = project_to_simplex(y - grad / lip);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - v);
    const double step = (next - v).cwiseAbs().maxCoeff();
    v = next;
    t = t_next;
    const double f = objective(v);
    if (f < best) {
      best = f;
      best_v = v;
    }
    if (step < 1e-15) break;
  }
  return r0.cwiseMin(baselines_ - a * best_v);
}

std::vector<bool> SemiParametricCrm::redundant(const Vec& r) const {
  require_dim(r.size(), size(), "offsets");
  std::vector<bool> out(static_cast<std::size_t>(size()), false);
  for (Eigen::Index j = 0; j < size(); ++j) {
    const Vec& aj = normals_[static_cast<std::size_t>(j)];
    const LpSolution sol = solve(envelope_lp(*this, r, aj, j));
    if (!sol.optimal()) continue;
    out[static_cast<std::size_t>(j)] = sol.value <= baselines_[j] - r[j] + kGeomTol;
  }
  return out;
}

Vec SemiParametricCrm::project_offsets(const Vec& r0) const {
  Vec r = project_to_feasible(r0);
  for (Eigen::Index j = 0; j < size(); ++j) {
    if (!redundant(r)[static_cast<std::size_t>(j)]) continue;
    Vec bumped = r;
    bumped[j] += kRedundancyBump;
    if (feasible(bumped)) r = bumped;
  }
  return r;
}

Vec pinned_offsets(const Pmf& p) {
  const Eigen::Index dim = p.size();
  Vec r(2 * dim);
  r.head(dim) = (1.0 - p.probs().array()).matrix();
  r.tail(dim) = p.probs();
  return r;
}

CrmEvaluation evaluate(const SemiParametricCrm& crm, const Vec& r, const Vec& z,
                       DegeneracyPolicy policy, std::uint64_t perturb_seed) {
  require_dim(z.size(), crm.dim(), "evaluate");
  require_dim(r.size(), crm.size(), "evaluate offsets");
  const LinearProgram lp = envelope_lp(crm, r, z);
  LpSolution sol = solve(lp);
  if (!sol.optimal()) {
    throw Error("semi-parametric CRM: envelope is empty for offsets (" + dump(r, z) + ")");
  }
  if (sol.dual_degenerate && policy == DegeneracyPolicy::Perturb) {
    const LpSolution alt = solve(perturb_objective(lp, perturb_seed));
    if (alt.optimal()) {
      const bool primal = sol.primal_degenerate;
      sol = alt;
      sol.value = z.dot(sol.primal);
      sol.dual_degenerate = false;
      sol.primal_degenerate = sol.primal_degenerate || primal;
    }
  }
  if (policy == DegeneracyPolicy::Fault && (sol.primal_degenerate || sol.dual_degenerate)) {
    throw NumericalFailure(std::string("degenerate CRM evaluation (") +
                           (sol.primal_degenerate ? "primal" : "dual") + "): " + dump(r, z));
  }
  CrmEvaluation out;
  out.value = sol.value;
  out.v = sol.primal;
  out.lambda = sol.ineq_duals;
  out.primal_degenerate = sol.primal_degenerate;
  out.dual_degenerate = sol.dual_degenerate;
  return out;
}

}  // namespace rsirl
