#include "rsirl/envelope.hpp"

#include "rsirl/lp.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <iterator>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace rsirl {

namespace {

// Constraint n . v <= b with unit-norm n.
struct Row {
  Vec n;
  double b = 0.0;
};

// Row-index set as a bitset; constraints are appended, so it only grows.
class IndexSet {
 public:
  void set(int i) {
    const auto w = static_cast<std::size_t>(i) / 64;
    if (words_.size() <= w) words_.resize(w + 1, 0);
    words_[w] |= std::uint64_t{1} << (i % 64);
  }
  int count() const {
    int c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
  }
  static int common_count(const IndexSet& a, const IndexSet& b) {
    const std::size_t n = std::min(a.words_.size(), b.words_.size());
    int c = 0;
    for (std::size_t k = 0; k < n; ++k) c += std::popcount(a.words_[k] & b.words_[k]);
    return c;
  }
  static IndexSet intersect(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    const std::size_t n = std::min(a.words_.size(), b.words_.size());
    out.words_.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.words_[k] = a.words_[k] & b.words_[k];
    return out;
  }
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w != 0) {
        const int bit = std::countr_zero(w);
        f(static_cast<int>(k * 64) + bit);
        w &= w - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> words_;
};

struct VertexRec {
  Vec p;
  IndexSet active;
};

bool same_point(const Vec& a, const Vec& b, double tol = kGeomTol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

// Incremental vertex enumeration over the simplex by double description.
// Adjacency of two vertices is decided algebraically: they span an edge iff
// the constraints active at both (plus the sum-to-one row) have rank dim-1.
class DoubleDescription {
 public:
  explicit DoubleDescription(Eigen::Index dim) : dim_(dim) {
    add_simplex_rows();
    for (Eigen::Index i = 0; i < dim; ++i) {
      VertexRec v;
      v.p = simplex_vertex(dim, i);
      for (Eigen::Index j = 0; j < dim; ++j) {
        if (j != i) v.active.set(static_cast<int>(j));
      }
      verts_.push_back(std::move(v));
    }
  }

  // Starts from a known vertex list of the set cut out by `halfspaces`.
  DoubleDescription(Eigen::Index dim, const std::vector<Halfspace>& halfspaces,
                    const std::vector<Vec>& vertices)
      : dim_(dim) {
    add_simplex_rows();
    for (const Halfspace& h : halfspaces) {
      const double norm = h.normal.norm();
      if (norm < 1e-14) continue;
      rows_.push_back(Row{h.normal / norm, h.offset / norm});
    }
    for (const Vec& p : vertices) verts_.push_back(VertexRec{p, active_set(p)});
  }

  void add(const Halfspace& h) {
    require_dim(h.normal.size(), dim_, "halfspace normal");
    const double norm = h.normal.norm();
    if (norm < 1e-14) {
      if (h.offset >= -kGeomTol) return;
      throw EmptyEnvelope("halfspace with zero normal and negative offset");
    }
    Row row{h.normal / norm, h.offset / norm};
    const int idx = static_cast<int>(rows_.size());

    std::vector<std::size_t> outside, inside, on;
    std::vector<double> slack(verts_.size());
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      slack[i] = row.n.dot(verts_[i].p) - row.b;
      if (slack[i] > kGeomTol) {
        outside.push_back(i);
      } else if (slack[i] < -kGeomTol) {
        inside.push_back(i);
      } else {
        on.push_back(i);
      }
    }
    if (inside.empty() && on.empty()) throw EmptyEnvelope("cut removes every vertex");
    rows_.push_back(row);
    for (std::size_t i : on) verts_[i].active.set(idx);
    if (outside.empty()) return;

    std::vector<VertexRec> fresh;
    for (const auto& [o, i] : candidate_edges(outside, inside)) {
      const VertexRec& vo = verts_[o];
      const VertexRec& vi = verts_[i];
      IndexSet common = IndexSet::intersect(vo.active, vi.active);
      if (rank_with_sum(common) != dim_ - 1) continue;
      const double t = slack[i] / (slack[i] - slack[o]);
      Vec p = vi.p + t * (vo.p - vi.p);
      common.set(idx);
      p = refine(p, common);
      fresh.push_back(VertexRec{std::move(p), std::move(common)});
    }

    std::vector<VertexRec> next;
    next.reserve(inside.size() + on.size() + fresh.size());
    for (std::size_t i : inside) next.push_back(std::move(verts_[i]));
    const std::size_t kept_inside = next.size();
    for (std::size_t i : on) next.push_back(std::move(verts_[i]));
    for (VertexRec& v : fresh) {
      // fresh vertices may sit on further constraints by coincidence
      v.active = active_set(v.p);
      next.push_back(std::move(v));
    }
    dedup(next, kept_inside);
    verts_ = std::move(next);
  }

  std::vector<Vec> vertices() const {
    std::vector<Vec> out;
    out.reserve(verts_.size());
    for (const VertexRec& v : verts_) out.push_back(v.p);
    return out;
  }

 private:
  void add_simplex_rows() {
    for (Eigen::Index i = 0; i < dim_; ++i) rows_.push_back(Row{-simplex_vertex(dim_, i), 0.0});
  }

  // Pairs (outside, inside) sharing at least dim-2 active constraints, the
  // necessary condition for an edge. Found by hashing every (dim-2)-subset
  // of each outside vertex's active set; heavily degenerate vertices fall
  // back to a direct scan.
  std::vector<std::pair<std::size_t, std::size_t>> candidate_edges(const std::vector<std::size_t>& outside,
                                                                   const std::vector<std::size_t>& inside) const {
    const auto need = static_cast<std::size_t>(std::max<Eigen::Index>(dim_ - 2, 0));
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (outside.empty() || inside.empty()) return out;
    if (need == 0) {
      for (std::size_t o : outside) {
        for (std::size_t i : inside) out.emplace_back(o, i);
      }
      return out;
    }
    constexpr std::size_t kMaxSubsets = 4096;
    auto for_subsets = [&](const std::vector<int>& act, auto&& f) {
      // all subsets of size `need`, in lexicographic order
      std::vector<std::size_t> pick(need);
      for (std::size_t k = 0; k < need; ++k) pick[k] = k;
      std::vector<int> key(need);
      while (true) {
        for (std::size_t k = 0; k < need; ++k) key[k] = act[pick[k]];
        f(key);
        std::size_t pos = need;
        while (pos > 0 && pick[pos - 1] == act.size() - need + pos - 1) --pos;
        if (pos == 0) break;
        ++pick[pos - 1];
        for (std::size_t k = pos; k < need; ++k) pick[k] = pick[k - 1] + 1;
      }
    };
    auto subset_count = [&](std::size_t n) {
      if (n < need) return std::size_t{0};
      double c = 1.0;
      for (std::size_t k = 0; k < need; ++k) c = c * static_cast<double>(n - k) / static_cast<double>(k + 1);
      return c > 1e9 ? std::size_t{1000000000} : static_cast<std::size_t>(c + 0.5);
    };
    auto indices = [](const IndexSet& s) {
      std::vector<int> v;
      s.for_each([&](int r) { v.push_back(r); });
      return v;
    };
    struct KeyHash {
      std::size_t operator()(const std::vector<int>& k) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (int x : k) h = (h ^ static_cast<std::uint64_t>(x)) * 1099511628211ULL;
        return static_cast<std::size_t>(h);
      }
    };
    std::unordered_map<std::vector<int>, std::vector<std::size_t>, KeyHash> table;
    std::vector<std::size_t> heavy;
    for (std::size_t o : outside) {
      const std::vector<int> act = indices(verts_[o].active);
      const std::size_t n = subset_count(act.size());
      if (n == 0) continue;
      if (n > kMaxSubsets) {
        heavy.push_back(o);
        continue;
      }
      for_subsets(act, [&](const std::vector<int>& key) { table[key].push_back(o); });
    }
    std::unordered_set<std::uint64_t> seen;
    auto emit = [&](std::size_t o, std::size_t i) {
      if (seen.insert((static_cast<std::uint64_t>(o) << 32) | static_cast<std::uint64_t>(i)).second) out.emplace_back(o, i);
    };
    for (std::size_t i : inside) {
      const std::vector<int> act = indices(verts_[i].active);
      const std::size_t n = subset_count(act.size());
      if (n == 0) continue;
      if (n > kMaxSubsets) {
        for (std::size_t o : outside) {
          if (IndexSet::common_count(verts_[o].active, verts_[i].active) >= static_cast<int>(need)) emit(o, i);
        }
        continue;
      }
      for_subsets(act, [&](const std::vector<int>& key) {
        auto it = table.find(key);
        if (it == table.end()) return;
        for (std::size_t o : it->second) emit(o, i);
      });
      for (std::size_t o : heavy) {
        if (IndexSet::common_count(verts_[o].active, verts_[i].active) >= static_cast<int>(need)) emit(o, i);
      }
    }
    return out;
  }

  // Removes near-duplicates among next[from..]; the inside vertices before
  // `from` are distinct already and lie strictly off the new plane.
  static void dedup(std::vector<VertexRec>& next, std::size_t from) {
    if (next.size() - from < 2) return;
    const Eigen::Index dim = next[from].p.size();
    Vec w(dim);
    for (Eigen::Index i = 0; i < dim; ++i) w[i] = 1.0 + 0.618033988749895 * static_cast<double>(i);
    const double window = kGeomTol * w.cwiseAbs().sum();
    std::vector<std::pair<double, std::size_t>> keys;
    for (std::size_t k = from; k < next.size(); ++k) keys.emplace_back(w.dot(next[k].p), k);
    std::sort(keys.begin(), keys.end());
    std::vector<bool> drop(next.size(), false);
    for (std::size_t a = 0; a < keys.size(); ++a) {
      if (drop[keys[a].second]) continue;
      for (std::size_t b = a + 1; b < keys.size() && keys[b].first - keys[a].first <= window; ++b) {
        if (!drop[keys[b].second] && same_point(next[keys[a].second].p, next[keys[b].second].p)) {
          drop[keys[b].second] = true;
        }
      }
    }
    std::size_t out = from;
    for (std::size_t k = from; k < next.size(); ++k) {
      if (!drop[k]) {
        if (out != k) next[out] = std::move(next[k]);
        ++out;
      }
    }
    next.resize(out);
  }

  IndexSet active_set(const Vec& p) const {
    IndexSet act;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (std::abs(rows_[r].n.dot(p) - rows_[r].b) <= kGeomTol) act.set(static_cast<int>(r));
    }
    return act;
  }

  Eigen::Index rank_with_sum(const IndexSet& idx) const {
    Mat m(idx.count() + 1, dim_);
    m.row(0).setConstant(1.0 / std::sqrt(static_cast<double>(dim_)));
    Eigen::Index k = 1;
    idx.for_each([&](int r) { m.row(k++) = rows_[static_cast<std::size_t>(r)].n.transpose(); });
    Eigen::FullPivLU<Mat> lu(m);
    lu.setThreshold(1e-9);
    return lu.rank();
  }

  // Re-solve the active system to keep round-off from accumulating.
  Vec refine(const Vec& p, const IndexSet& active) const {
    const Eigen::Index rows = active.count() + 1;
    Mat m(rows, dim_);
    Vec rhs(rows);
    m.row(0).setOnes();
    rhs[0] = 1.0;
    Eigen::Index k = 1;
    active.for_each([&](int r) {
      m.row(k) = rows_[static_cast<std::size_t>(r)].n.transpose();
      rhs[k++] = rows_[static_cast<std::size_t>(r)].b;
    });
    Eigen::ColPivHouseholderQR<Mat> qr(m);
    qr.setThreshold(1e-10);
    if (qr.rank() < dim_) return p;
    Vec q = qr.solve(rhs);
    if ((m * q - rhs).cwiseAbs().maxCoeff() > 1e-10) return p;
    return q;
  }

  Eigen::Index dim_;
  std::vector<Row> rows_;
  std::vector<VertexRec> verts_;
};

bool satisfies(const Vec& v, const std::vector<Halfspace>& hs, double tol) {
  if (!in_simplex(v, tol)) return false;
  for (const Halfspace& h : hs) {
    const double scale = std::max(1.0, h.normal.norm());
    if (h.normal.dot(v) - h.offset > tol * scale) return false;
  }
  return true;
}

// Orthonormal basis of {w : w . 1 = 0, w orthogonal to span(basis)}.
Mat complement_in_sum_zero(Eigen::Index dim, const Mat& basis) {
  const Eigen::Index k = basis.cols();
  Mat m(dim, k + 1);
  m.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(dim)));
  if (k > 0) m.rightCols(k) = basis;
  Eigen::HouseholderQR<Mat> qr(m);
  const Mat q = qr.householderQ() * Mat::Identity(dim, dim);
  return q.rightCols(dim - k - 1);
}

// Is `points[i]` a convex combination of the other points?
bool is_redundant_point(const std::vector<Vec>& points, std::size_t i) {
  const std::size_t n = points.size();
  if (n < 2) return false;
  const Eigen::Index dim = points[i].size();
  LinearProgram lp(static_cast<Eigen::Index>(n - 1));
  Vec ones = Vec::Ones(static_cast<Eigen::Index>(n - 1));
  lp.add_eq(ones, 1.0);
  for (Eigen::Index d = 0; d < dim; ++d) {
    Vec row(static_cast<Eigen::Index>(n - 1));
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      row[c++] = points[j][d];
    }
    lp.add_eq(row, points[i][d]);
  }
  return solve(lp).optimal();
}

// Indices of the extreme points, given affine coordinates (k x n).
std::vector<std::size_t> extreme_indices(const Mat& coords, const std::vector<Vec>& points) {
  const Eigen::Index k = coords.rows();
  const auto n = static_cast<std::size_t>(coords.cols());
  std::vector<std::size_t> out;
  if (k == 1) {
    Eigen::Index lo = 0, hi = 0;
    coords.row(0).minCoeff(&lo);
    coords.row(0).maxCoeff(&hi);
    out.push_back(static_cast<std::size_t>(lo));
    if (hi != lo) out.push_back(static_cast<std::size_t>(hi));
    return out;
  }
  if (k == 2) {
    // Andrew's monotone chain, dropping collinear points.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
      return coords(0, ia) < coords(0, ib) || (coords(0, ia) == coords(0, ib) && coords(1, ia) < coords(1, ib));
    });
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
      const auto io = static_cast<Eigen::Index>(o), ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
      return (coords(0, ia) - coords(0, io)) * (coords(1, ib) - coords(1, io)) -
             (coords(1, ia) - coords(1, io)) * (coords(0, ib) - coords(0, io));
    };
    std::vector<std::size_t> hull(2 * n);
    std::size_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (h >= 2 && cross(hull[h - 2], hull[h - 1], order[i]) <= 1e-14) --h;
      hull[h++] = order[i];
    }
    for (std::size_t i = n - 1, t = h + 1; i-- > 0;) {
      while (h >= t && cross(hull[h - 2], hull[h - 1], order[i]) <= 1e-14) --h;
      hull[h++] = order[i];
    }
    hull.resize(h > 1 ? h - 1 : h);
    return hull;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_redundant_point(points, i)) out.push_back(i);
  }
  return out;
}

}  // namespace

RiskEnvelope RiskEnvelope::simplex(Eigen::Index dim) {
  if (dim < 1) throw Error("simplex: dimension must be positive");
  std::vector<Vec> verts;
  for (Eigen::Index i = 0; i < dim; ++i) verts.push_back(simplex_vertex(dim, i));
  return RiskEnvelope(dim, {}, std::move(verts));
}

RiskEnvelope RiskEnvelope::singleton(const Vec& p) {
  if (!in_simplex(p)) throw Error("singleton: point is not in the simplex");
  return from_points(p.size(), {p});
}

RiskEnvelope RiskEnvelope::from_halfspaces(Eigen::Index dim, std::vector<Halfspace> halfspaces) {
  auto verts = enumerate_vertices(dim, halfspaces);
  return RiskEnvelope(dim, std::move(halfspaces), std::move(verts));
}

RiskEnvelope RiskEnvelope::from_halfspaces(Eigen::Index dim, std::vector<Halfspace> halfspaces,
                                           std::vector<Vec> vertices) {
  if (vertices.empty()) return from_halfspaces(dim, std::move(halfspaces));
  for (const Vec& v : vertices) {
    require_dim(v.size(), dim, "envelope vertex");
    if (!satisfies(v, halfspaces, kGeomTol)) {
      throw Error("envelope: cached vertex violates the halfspace description");
    }
  }
  return RiskEnvelope(dim, std::move(halfspaces), std::move(vertices));
}

RiskEnvelope RiskEnvelope::from_points(Eigen::Index dim, const std::vector<Vec>& points) {
  if (points.empty()) throw EmptyEnvelope("from_points: no points");
  std::vector<Vec> pts;
  for (const Vec& p : points) {
    require_dim(p.size(), dim, "from_points");
    if (!in_simplex(p)) throw Error("from_points: point outside the simplex");
    bool dup = false;
    for (const Vec& q : pts) dup = dup || same_point(p, q);
    if (!dup) pts.push_back(p);
  }
  auto npts = static_cast<Eigen::Index>(pts.size());
  Vec centroid = Vec::Zero(dim);
  for (const Vec& p : pts) centroid += p;
  centroid /= static_cast<double>(npts);
  Mat diffs(dim, npts);
  for (Eigen::Index i = 0; i < npts; ++i) diffs.col(i) = pts[i] - centroid;

  Eigen::Index k = 0;
  Mat basis(dim, 0);
  if (npts > 1) {
    Eigen::JacobiSVD<Mat> svd(diffs, Eigen::ComputeThinU);
    const Vec& sv = svd.singularValues();
    const double cut = 1e-10 * std::max(1.0, sv[0]);
    while (k < sv.size() && sv[k] > cut) ++k;
    basis = svd.matrixU().leftCols(k);
  }

  // Keep extreme points only.
  if (k >= 1) {
    const std::vector<std::size_t> keep = extreme_indices(basis.transpose() * diffs, pts);
    std::vector<Vec> ext;
    for (std::size_t i : keep) ext.push_back(pts[i]);
    pts = std::move(ext);
    npts = static_cast<Eigen::Index>(pts.size());
    diffs.resize(dim, npts);
    for (Eigen::Index i = 0; i < npts; ++i) diffs.col(i) = pts[static_cast<std::size_t>(i)] - centroid;
  }

  std::vector<Halfspace> hs;
  const Mat comp = complement_in_sum_zero(dim, basis);
  for (Eigen::Index c = 0; c < comp.cols(); ++c) {
    const Vec w = comp.col(c);
    const double off = w.dot(centroid);
    hs.push_back(Halfspace{w, off});
    hs.push_back(Halfspace{-w, -off});
  }

  if (k == 1) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Vec& p : pts) {
      const double y = basis.col(0).dot(p - centroid);
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    const Vec u = basis.col(0);
    hs.push_back(Halfspace{u, hi + u.dot(centroid)});
    hs.push_back(Halfspace{-u, -lo - u.dot(centroid)});
  } else if (k >= 2) {
    Mat coords = basis.transpose() * diffs;  // k x npts
    std::vector<int> pick(static_cast<std::size_t>(k));
    std::vector<Vec> normals;
    std::vector<double> offsets;
    // Enumerate k-subsets of the extreme points.
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
    while (true) {
      Mat span(k - 1, k);
      for (Eigen::Index r = 1; r < k; ++r) {
        span.row(r - 1) = (coords.col(idx[static_cast<std::size_t>(r)]) - coords.col(idx[0])).transpose();
      }
      Eigen::FullPivLU<Mat> lu(span);
      lu.setThreshold(1e-10);
      if (lu.rank() == k - 1) {
        Vec nrm = lu.kernel().col(0);
        nrm.normalize();
        double beta = nrm.dot(coords.col(idx[0]));
        bool le = true, ge = true;
        for (Eigen::Index j = 0; j < npts; ++j) {
          const double s = nrm.dot(coords.col(j)) - beta;
          if (s > kGeomTol) le = false;
          if (s < -kGeomTol) ge = false;
        }
        if (ge && !le) {
          nrm = -nrm;
          beta = -beta;
          le = true;
        }
        if (le) {
          bool dup = false;
          for (std::size_t f = 0; f < normals.size(); ++f) {
            if (same_point(normals[f], nrm, 1e-9) && std::abs(offsets[f] - beta) <= 1e-9) dup = true;
          }
          if (!dup) {
            normals.push_back(nrm);
            offsets.push_back(beta);
          }
        }
      }
      // next combination
      Eigen::Index pos = k - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == npts - k + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (Eigen::Index r = pos + 1; r < k; ++r) {
        idx[static_cast<std::size_t>(r)] = idx[static_cast<std::size_t>(r - 1)] + 1;
      }
    }
    for (std::size_t f = 0; f < normals.size(); ++f) {
      const Vec nl = basis * normals[f];
      hs.push_back(Halfspace{nl, offsets[f] + nl.dot(centroid)});
    }
  }
  return from_halfspaces(dim, std::move(hs));
}

bool RiskEnvelope::contains(const Vec& v, double tol) const {
  if (v.size() != dim_) return false;
  return satisfies(v, halfspaces_, tol);
}

bool RiskEnvelope::contains(const RiskEnvelope& other, double tol) const {
  if (other.dim() != dim_) return false;
  for (const Vec& v : other.vertices()) {
    if (!contains(v, tol)) return false;
  }
  return true;
}

CrmValue evaluate_crm(const RiskEnvelope& env, const Vec& z) {
  require_dim(z.size(), env.dim(), "evaluate_crm");
  const auto& verts = env.vertices();
  if (verts.empty()) throw EmptyEnvelope("evaluate_crm: empty envelope");
  CrmValue out;
  out.value = -std::numeric_limits<double>::infinity();
  for (const Vec& v : verts) {
    const double val = v.dot(z);
    if (val > out.value) {
      out.value = val;
      out.maximizer = v;
    }
  }
  return out;
}

RiskEnvelope cvar_envelope(const Pmf& p, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("cvar_envelope: alpha must lie in (0, 1]");
  const Eigen::Index dim = p.size();
  std::vector<Halfspace> hs;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double bound = p[i] / alpha;
    if (bound >= 1.0) continue;  // implied by the simplex
    hs.push_back(Halfspace{simplex_vertex(dim, i), bound});
  }
  return RiskEnvelope::from_halfspaces(dim, std::move(hs));
}

RiskEnvelope intersect_halfspace(const RiskEnvelope& env, const Vec& normal, double offset) {
  require_dim(normal.size(), env.dim(), "intersect_halfspace");
  DoubleDescription dd(env.dim(), env.halfspaces(), env.vertices());
  dd.add(Halfspace{normal, offset});
  std::vector<Halfspace> hs = env.halfspaces();
  hs.push_back(Halfspace{normal, offset});
  return RiskEnvelope::from_halfspaces(env.dim(), std::move(hs), dd.vertices());
}

std::vector<Vec> enumerate_vertices(Eigen::Index dim, const std::vector<Halfspace>& halfspaces) {
  DoubleDescription dd(dim);
  for (const Halfspace& h : halfspaces) dd.add(h);
  return dd.vertices();
}

double distance_to_hull(const Vec& x, const std::vector<Vec>& points) {
  if (points.empty()) throw EmptyEnvelope("distance_to_hull: no points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Mat q(x.size(), n);
  for (Eigen::Index j = 0; j < n; ++j) q.col(j) = points[static_cast<std::size_t>(j)] - x;
  const double scale = std::max(1e-300, q.colwise().squaredNorm().maxCoeff());

  // Wolfe's minimum-norm point in conv(q).
  std::vector<Eigen::Index> corral;
  Vec w;  // weights on the corral
  Eigen::Index start = 0;
  q.colwise().squaredNorm().minCoeff(&start);
  corral.push_back(start);
  w = Vec::Ones(1);
  Vec y = q.col(start);

  for (int major = 0; major < 1000; ++major) {
    Eigen::Index best = 0;
    (y.transpose() * q).minCoeff(&best);
    if (y.squaredNorm() - y.dot(q.col(best)) <= 1e-14 * scale) break;
    if (std::find(corral.begin(), corral.end(), best) != corral.end()) break;
    corral.push_back(best);
    w.conservativeResize(w.size() + 1);
    w[w.size() - 1] = 0.0;

    for (int minor = 0; minor < 1000; ++minor) {
      const auto k = static_cast<Eigen::Index>(corral.size());
      Mat qc(x.size(), k);
      for (Eigen::Index j = 0; j < k; ++j) qc.col(j) = q.col(corral[static_cast<std::size_t>(j)]);
      // Affine minimizer: [QtQ 1; 1t 0] [a; mu] = [0; 1].
      Mat kkt = Mat::Zero(k + 1, k + 1);
      kkt.topLeftCorner(k, k) = qc.transpose() * qc;
      kkt.block(0, k, k, 1).setOnes();
      kkt.block(k, 0, 1, k).setOnes();
      Vec rhs = Vec::Zero(k + 1);
      rhs[k] = 1.0;
      const Vec sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      const Vec a = sol.head(k);
      if (a.minCoeff() > 1e-14) {
        w = a;
        break;
      }
      double theta = 1.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (a[j] <= 1e-14) theta = std::min(theta, w[j] / (w[j] - a[j]));
      }
      w = w + theta * (a - w);
      std::vector<Eigen::Index> keep_idx;
      Vec keep_w(k);
      Eigen::Index c = 0;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (w[j] > 1e-14) {
          keep_idx.push_back(corral[static_cast<std::size_t>(j)]);
          keep_w[c++] = w[j];
        }
      }
      corral = keep_idx;
      w = keep_w.head(c) / keep_w.head(c).sum();
    }
    y = Vec::Zero(x.size());
    for (std::size_t j = 0; j < corral.size(); ++j) y += w[static_cast<Eigen::Index>(j)] * q.col(corral[j]);
  }
  return y.norm();
}

double hausdorff(const RiskEnvelope& a, const RiskEnvelope& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("hausdorff: envelopes differ in dimension");
  double d = 0.0;
  for (const Vec& v : a.vertices()) d = std::max(d, distance_to_hull(v, b.vertices()));
  for (const Vec& v : b.vertices()) d = std::max(d, distance_to_hull(v, a.vertices()));
  return d;
}

}  // namespace rsirl
