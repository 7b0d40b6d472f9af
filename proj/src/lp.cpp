#include "rsirl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace rsirl {

LinearProgram::LinearProgram(Eigen::Index n)
    : objective(Vec::Zero(n)),
      ineq_rows(0, n),
      ineq_rhs(0),
      eq_rows(0, n),
      eq_rhs(0),
      lower(Vec::Zero(n)),
      upper(Vec::Constant(n, kInf)) {}

void LinearProgram::add_ineq(const Vec& row, double rhs) {
  require_dim(row.size(), num_vars(), "LinearProgram::add_ineq");
  const Eigen::Index r = ineq_rows.rows();
  ineq_rows.conservativeResize(r + 1, num_vars());
  ineq_rows.row(r) = row.transpose();
  ineq_rhs.conservativeResize(r + 1);
  ineq_rhs[r] = rhs;
}

void LinearProgram::add_eq(const Vec& row, double rhs) {
  require_dim(row.size(), num_vars(), "LinearProgram::add_eq");
  const Eigen::Index r = eq_rows.rows();
  eq_rows.conservativeResize(r + 1, num_vars());
  eq_rows.row(r) = row.transpose();
  eq_rhs.conservativeResize(r + 1);
  eq_rhs[r] = rhs;
}

void LinearProgram::validate() const {
  const Eigen::Index n = num_vars();
  require_dim(ineq_rows.cols(), n, "LinearProgram ineq_rows");
  require_dim(ineq_rhs.size(), ineq_rows.rows(), "LinearProgram ineq_rhs");
  require_dim(eq_rows.cols(), n, "LinearProgram eq_rows");
  require_dim(eq_rhs.size(), eq_rows.rows(), "LinearProgram eq_rhs");
  require_dim(lower.size(), n, "LinearProgram lower");
  require_dim(upper.size(), n, "LinearProgram upper");
  for (Eigen::Index k = 0; k < n; ++k) {
    if (lower[k] > upper[k]) throw Error("LinearProgram: lower bound exceeds upper bound");
  }
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

// How an original variable is expressed through nonnegative columns:
// x = offset + sign * y[pos]  (or y[pos] - y[neg] for free variables).
struct VarMap {
  int pos = -1;
  int neg = -1;
  double offset = 0.0;
  double sign = 1.0;
};

class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) { build_standard_form(); }

  LpSolution run();

 private:
  void build_standard_form();
  void refactor();
  void pivot(int row, int col);
  // Returns false if unbounded.
  bool iterate(const Vec& cost, bool phase_one);
  void compute_reduced_costs(const Vec& cost);

  const LinearProgram& lp_;
  std::vector<VarMap> map_;
  int m_ = 0;          // rows of the standard form
  int ncols_ = 0;      // structural + slack columns
  int nart_ = 0;       // artificial columns
  Mat a_;              // m x (ncols + nart), original standard-form matrix
  Vec b_;              // m
  Vec cost_;           // ncols + nart (phase two)
  std::vector<int> twin_;       // split free variables: column -> partner
  std::vector<int> basis_;      // row -> column
  std::vector<char> is_basic_;
  Mat t_;              // tableau B^-1 [A | b]
  Vec d_;              // reduced costs for the active phase
  double scale_ = 1.0;
  double cost_scale_ = 1.0;
  int iterations_ = 0;
  int since_refactor_ = 0;
};

void Simplex::build_standard_form() {
  lp_.validate();
  const Eigen::Index n = lp_.num_vars();
  map_.resize(n);
  int cols = 0;
  std::vector<std::pair<int, double>> bound_rows;  // (column, width)
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lo = lp_.lower[k];
    const double hi = lp_.upper[k];
    VarMap& vm = map_[k];
    if (std::isfinite(lo)) {
      vm.pos = cols++;
      vm.offset = lo;
      vm.sign = 1.0;
      if (std::isfinite(hi)) bound_rows.emplace_back(vm.pos, hi - lo);
    } else if (std::isfinite(hi)) {
      vm.pos = cols++;
      vm.offset = hi;
      vm.sign = -1.0;
    } else {
      vm.pos = cols++;
      vm.neg = cols++;
    }
  }
  const int nstruct = cols;
  const int mi = static_cast<int>(lp_.num_ineq());
  const int mb = static_cast<int>(bound_rows.size());
  const int me = static_cast<int>(lp_.num_eq());
  m_ = mi + mb + me;
  ncols_ = nstruct + mi + mb;

  // x = x0 + D y  on the structural columns.
  Mat d = Mat::Zero(n, nstruct);
  Vec x0 = Vec::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const VarMap& vm = map_[k];
    if (vm.neg >= 0) {
      d(k, vm.pos) = 1.0;
      d(k, vm.neg) = -1.0;
    } else {
      d(k, vm.pos) = vm.sign;
      x0[k] = vm.offset;
    }
  }

  Mat a_std = Mat::Zero(m_, ncols_);
  b_.resize(m_);
  if (mi > 0) {
    a_std.block(0, 0, mi, nstruct) = lp_.ineq_rows * d;
    b_.head(mi) = lp_.ineq_rhs - lp_.ineq_rows * x0;
  }
  for (int i = 0; i < mi + mb; ++i) a_std(i, nstruct + i) = 1.0;
  for (int j = 0; j < mb; ++j) {
    a_std(mi + j, bound_rows[j].first) = 1.0;
    b_[mi + j] = bound_rows[j].second;
  }
  if (me > 0) {
    a_std.block(mi + mb, 0, me, nstruct) = lp_.eq_rows * d;
    b_.tail(me) = lp_.eq_rhs - lp_.eq_rows * x0;
  }

  // Slack columns start basic where the right-hand side allows it.
  basis_.assign(m_, -1);
  std::vector<int> art_rows;
  for (int i = 0; i < m_; ++i) {
    if (i < mi + mb && b_[i] >= 0.0) {
      basis_[i] = nstruct + i;
    } else {
      art_rows.push_back(i);
    }
  }
  nart_ = static_cast<int>(art_rows.size());
  a_ = Mat::Zero(m_, ncols_ + nart_);
  a_.leftCols(ncols_) = a_std;
  for (int k = 0; k < nart_; ++k) {
    const int i = art_rows[k];
    a_(i, ncols_ + k) = b_[i] >= 0.0 ? 1.0 : -1.0;
    basis_[i] = ncols_ + k;
  }

  cost_ = Vec::Zero(ncols_ + nart_);
  cost_.head(nstruct) = d.transpose() * lp_.objective;

  twin_.assign(ncols_ + nart_, -1);
  for (const VarMap& vm : map_) {
    if (vm.neg >= 0) {
      twin_[vm.pos] = vm.neg;
      twin_[vm.neg] = vm.pos;
    }
  }

  scale_ = 1.0;
  if (m_ > 0) {
    scale_ = std::max(scale_, b_.cwiseAbs().maxCoeff());
    scale_ = std::max(scale_, a_.cwiseAbs().maxCoeff());
  }
  cost_scale_ = std::max(1.0, cost_.size() > 0 ? cost_.cwiseAbs().maxCoeff() : 0.0);

  is_basic_.assign(ncols_ + nart_, 0);
  for (int c : basis_) is_basic_[c] = 1;
  refactor();
}

void Simplex::refactor() {
  const int ntot = ncols_ + nart_;
  t_.resize(m_, ntot + 1);
  if (m_ == 0) return;
  Mat basis_matrix(m_, m_);
  for (int i = 0; i < m_; ++i) basis_matrix.col(i) = a_.col(basis_[i]);
  Eigen::PartialPivLU<Mat> lu(basis_matrix);
  Mat rhs(m_, ntot + 1);
  rhs.leftCols(ntot) = a_;
  rhs.col(ntot) = b_;
  t_ = lu.solve(rhs);
  // Basic columns are exact unit vectors by construction.
  for (int i = 0; i < m_; ++i) {
    t_.col(basis_[i]).setZero();
    t_(i, basis_[i]) = 1.0;
  }
  since_refactor_ = 0;
}

void Simplex::compute_reduced_costs(const Vec& cost) {
  const int ntot = ncols_ + nart_;
  Vec cb(m_);
  for (int i = 0; i < m_; ++i) cb[i] = cost[basis_[i]];
  d_ = cost - (cb.transpose() * t_.leftCols(ntot)).transpose();
  for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
}

void Simplex::pivot(int row, int col) {
  const int width = static_cast<int>(t_.cols());
  const double p = t_(row, col);
  t_.row(row) /= p;
  for (int i = 0; i < m_; ++i) {
    if (i == row) continue;
    const double f = t_(i, col);
    if (f != 0.0) t_.row(i) -= f * t_.row(row);
  }
  const double dj = d_[col];
  if (dj != 0.0) d_ -= dj * t_.row(row).head(width - 1).transpose();
  t_.col(col).setZero();
  t_(row, col) = 1.0;
  d_[col] = 0.0;
  is_basic_[basis_[row]] = 0;
  basis_[row] = col;
  is_basic_[col] = 1;
  ++iterations_;
  ++since_refactor_;
}

bool Simplex::iterate(const Vec& cost, bool phase_one) {
  const int ntot = ncols_ + nart_;
  const int rhs = ntot;
  const double opt_tol = 1e-11 * (phase_one ? 1.0 : cost_scale_);
  const double piv_tol = 1e-11;
  const int max_iter = 200 * (m_ + ntot) + 1000;
  int degenerate_run = 0;
  compute_reduced_costs(cost);
  for (int guard = 0;; ++guard) {
    if (guard > max_iter) throw NumericalFailure("simplex: iteration limit reached");
    if (since_refactor_ >= 64) {
      refactor();
      compute_reduced_costs(cost);
    }
    const bool bland = degenerate_run > 24;
    int enter = -1;
    double best = opt_tol;
    for (int j = 0; j < ntot; ++j) {
      if (is_basic_[j]) continue;
      if (!phase_one && j >= ncols_) continue;
      if (d_[j] > best) {
        enter = j;
        if (bland) break;
        best = d_[j];
      }
    }
    if (enter < 0) {
      // Confirm optimality against a fresh factorization.
      if (since_refactor_ > 0) {
        refactor();
        compute_reduced_costs(cost);
        continue;
      }
      return true;
    }
    int leave = -1;
    double best_ratio = kInf;
    for (int i = 0; i < m_; ++i) {
      const double a = t_(i, enter);
      if (a <= piv_tol) continue;
      const double ratio = std::max(t_(i, rhs), 0.0) / a;
      if (ratio < best_ratio - 1e-14 ||
          (ratio <= best_ratio + 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
        if (ratio < best_ratio) best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) return false;
    degenerate_run = best_ratio <= 1e-13 ? degenerate_run + 1 : 0;
    pivot(leave, enter);
  }
}

LpSolution Simplex::run() {
  const int ntot = ncols_ + nart_;
  const int rhs = ntot;
  LpSolution sol;
  const Eigen::Index n = lp_.num_vars();
  sol.ineq_duals = Vec::Zero(lp_.num_ineq());
  sol.eq_duals = Vec::Zero(lp_.num_eq());
  sol.primal = Vec::Zero(n);

  if (nart_ > 0) {
    Vec phase_one = Vec::Zero(ntot);
    phase_one.tail(nart_).setConstant(-1.0);
    iterate(phase_one, true);
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= ncols_) infeas += std::abs(t_(i, rhs));
    }
    if (infeas > 1e-9 * scale_) {
      sol.status = LpStatus::Infeasible;
      sol.iterations = iterations_;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < ncols_) continue;
      int col = -1;
      double mag = 1e-9;
      for (int j = 0; j < ncols_; ++j) {
        if (is_basic_[j]) continue;
        if (std::abs(t_(i, j)) > mag) {
          mag = std::abs(t_(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        t_(i, rhs) = 0.0;
        d_ = Vec::Zero(ntot);
        pivot(i, col);
      }
    }
    refactor();
  }

  if (!iterate(cost_, false)) {
    sol.status = LpStatus::Unbounded;
    sol.iterations = iterations_;
    return sol;
  }
  refactor();

  // Recover primal values and multipliers from the final basis.
  Vec y = Vec::Zero(ntot);
  Vec pi = Vec::Zero(m_);
  if (m_ > 0) {
    Mat basis_matrix(m_, m_);
    Vec cb(m_);
    for (int i = 0; i < m_; ++i) {
      basis_matrix.col(i) = a_.col(basis_[i]);
      cb[i] = cost_[basis_[i]];
    }
    Eigen::PartialPivLU<Mat> lu(basis_matrix);
    const Vec xb = lu.solve(b_);
    for (int i = 0; i < m_; ++i) y[basis_[i]] = std::max(xb[i], 0.0);
    pi = lu.transpose().solve(cb);
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const VarMap& vm = map_[k];
    if (vm.neg >= 0) {
      sol.primal[k] = y[vm.pos] - y[vm.neg];
    } else {
      sol.primal[k] = vm.offset + vm.sign * y[vm.pos];
    }
  }
  const int mi = static_cast<int>(lp_.num_ineq());
  const int me = static_cast<int>(lp_.num_eq());
  for (int i = 0; i < mi; ++i) sol.ineq_duals[i] = std::max(pi[i], 0.0);
  for (int i = 0; i < me; ++i) sol.eq_duals[i] = pi[m_ - me + i];
  sol.value = lp_.objective.dot(sol.primal);

  const double zero_tol = 1e-9 * scale_;
  for (int i = 0; i < m_; ++i) {
    if (basis_[i] >= ncols_ || y[basis_[i]] <= zero_tol) sol.primal_degenerate = true;
  }
  const Vec reduced = cost_ - a_.transpose() * pi;
  const double dual_tol = 1e-9 * cost_scale_;
  for (int j = 0; j < ncols_; ++j) {
    if (is_basic_[j]) continue;
    if (twin_[j] >= 0 && is_basic_[twin_[j]]) continue;
    if (std::abs(reduced[j]) <= dual_tol) sol.dual_degenerate = true;
  }
  sol.status = LpStatus::Optimal;
  sol.iterations = iterations_;
  return sol;
}

}  // namespace

LpSolution solve(const LinearProgram& lp) {
  for (Eigen::Index k = 0; k < lp.objective.size(); ++k) {
    if (!std::isfinite(lp.objective[k])) throw NumericalFailure("solve: non-finite objective");
  }
  if (!lp.ineq_rows.allFinite() || !lp.eq_rows.allFinite() || !lp.ineq_rhs.allFinite() ||
      !lp.eq_rhs.allFinite()) {
    throw NumericalFailure("solve: non-finite constraint data");
  }
  Simplex simplex(lp);
  return simplex.run();
}

LinearProgram perturb_objective(const LinearProgram& lp, std::uint64_t seed) {
  LinearProgram out = lp;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (Eigen::Index k = 0; k < out.objective.size(); ++k) {
    out.objective[k] *= 1.0 + kObjectivePerturbation * unit(rng);
  }
  return out;
}

LpCertificate certify(const LinearProgram& lp, const LpSolution& sol) {
  LpCertificate cert;
  const Vec& x = sol.primal;
  double dual_value = 0.0;
  Vec reduced = lp.objective;
  if (lp.num_ineq() > 0) {
    const Vec slack = lp.ineq_rhs - lp.ineq_rows * x;
    cert.primal_infeasibility = std::max(cert.primal_infeasibility, (-slack).maxCoeff());
    cert.dual_infeasibility = std::max(cert.dual_infeasibility, (-sol.ineq_duals).maxCoeff());
    cert.complementarity =
        std::max(cert.complementarity, sol.ineq_duals.cwiseProduct(slack).cwiseAbs().maxCoeff());
    dual_value += lp.ineq_rhs.dot(sol.ineq_duals);
    reduced -= lp.ineq_rows.transpose() * sol.ineq_duals;
  }
  if (lp.num_eq() > 0) {
    const Vec resid = lp.eq_rows * x - lp.eq_rhs;
    cert.primal_infeasibility = std::max(cert.primal_infeasibility, resid.cwiseAbs().maxCoeff());
    dual_value += lp.eq_rhs.dot(sol.eq_duals);
    reduced -= lp.eq_rows.transpose() * sol.eq_duals;
  }
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    cert.primal_infeasibility = std::max(cert.primal_infeasibility, lp.lower[k] - x[k]);
    cert.primal_infeasibility = std::max(cert.primal_infeasibility, x[k] - lp.upper[k]);
    const double r = reduced[k];
    if (r > 0.0) {
      if (std::isfinite(lp.upper[k])) {
        dual_value += r * lp.upper[k];
        cert.complementarity = std::max(cert.complementarity, r * (lp.upper[k] - x[k]));
      } else {
        cert.dual_infeasibility = std::max(cert.dual_infeasibility, r);
      }
    } else if (r < 0.0) {
      if (std::isfinite(lp.lower[k])) {
        dual_value += r * lp.lower[k];
        cert.complementarity = std::max(cert.complementarity, -r * (x[k] - lp.lower[k]));
      } else {
        cert.dual_infeasibility = std::max(cert.dual_infeasibility, -r);
      }
    }
  }
  cert.duality_gap = std::abs(sol.value - dual_value) / std::max(1.0, std::abs(sol.value));
  return cert;
}

}  // namespace rsirl
