#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "qcf/core.hpp"
#include "qcf/graph.hpp"
#include "qcf/space.hpp"

namespace qcf {

// Ordered injective point sequence with consecutive steps <= mesh_h: the
// discrete stand-in for a Jordan arc.  Single-point arcs are legal ("closed,
// possibly trivial, subarc").
class DiscreteArc {
 public:
  DiscreteArc(const MetricSpace& s, std::vector<PointId> pts) : space_(&s), pts_(std::move(pts)) {
    validate();
  }

  const MetricSpace& space() const { return *space_; }
  std::size_t size() const { return pts_.size(); }
  PointId operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<PointId>& points() const { return pts_; }
  PointId front() const { return pts_.front(); }
  PointId back() const { return pts_.back(); }

  DiscreteArc reversed() const {
    std::vector<PointId> r(pts_.rbegin(), pts_.rend());
    return DiscreteArc(*space_, std::move(r));
  }

  // Contiguous subsequence between positions min(i,j) and max(i,j), inclusive.
  DiscreteArc subarc(std::size_t i, std::size_t j) const {
    if (i >= pts_.size() || j >= pts_.size())
      throw InvalidInput("subarc index out of range (" + std::to_string(i) + "," + std::to_string(j) +
                         ") for arc of size " + std::to_string(pts_.size()));
    if (i > j) std::swap(i, j);
    return DiscreteArc(*space_, std::vector<PointId>(pts_.begin() + static_cast<std::ptrdiff_t>(i),
                                                     pts_.begin() + static_cast<std::ptrdiff_t>(j) + 1));
  }

  PointMask mask() const {
    PointMask m(space_->size());
    for (PointId p : pts_) m.set(p);
    return m;
  }

 private:
  void validate() const {
    if (pts_.empty()) throw InvalidInput("arc must contain at least one point");
    double step_tol = space_->mesh() * (1 + kRelTol);
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (pts_[i] >= space_->size()) throw InvalidInput("arc point id out of range");
      if (i && space_->dist(pts_[i - 1], pts_[i]) > step_tol)
        throw InvalidInput("arc step " + std::to_string(i - 1) + "->" + std::to_string(i) + " exceeds mesh_h (" +
                           fmt_double(space_->dist(pts_[i - 1], pts_[i])) + " > " + fmt_double(space_->mesh()) +
                           ")");
    }
    std::unordered_set<PointId> seen(pts_.begin(), pts_.end());
    if (seen.size() != pts_.size()) throw InvalidInput("arc is not injective");
  }

  const MetricSpace* space_;
  std::vector<PointId> pts_;
};

// Cyclic ordered injective sequence, wraparound step <= mesh_h, length >= 3.
class DiscreteCircle {
 public:
  DiscreteCircle(const MetricSpace& s, std::vector<PointId> pts) : space_(&s), pts_(std::move(pts)) {
    validate();
  }

  const MetricSpace& space() const { return *space_; }
  std::size_t size() const { return pts_.size(); }
  PointId operator[](std::size_t i) const { return pts_[i % pts_.size()]; }
  const std::vector<PointId>& points() const { return pts_; }

  std::optional<std::size_t> position_of(PointId p) const {
    for (std::size_t i = 0; i < pts_.size(); ++i)
      if (pts_[i] == p) return i;
    return std::nullopt;
  }

  // Arc along increasing cyclic position from i to j (inclusive).
  DiscreteArc cw_subarc(std::size_t i, std::size_t j) const {
    std::size_t m = pts_.size();
    i %= m;
    j %= m;
    std::vector<PointId> out;
    for (std::size_t t = i;; t = (t + 1) % m) {
      out.push_back(pts_[t]);
      if (t == j) break;
    }
    return DiscreteArc(*space_, std::move(out));
  }

  DiscreteCircle rotated(std::size_t start) const {
    std::size_t m = pts_.size();
    std::vector<PointId> out;
    out.reserve(m);
    for (std::size_t t = 0; t < m; ++t) out.push_back(pts_[(start + t) % m]);
    return DiscreteCircle(*space_, std::move(out));
  }

  PointMask mask() const {
    PointMask m(space_->size());
    for (PointId p : pts_) m.set(p);
    return m;
  }

 private:
  void validate() const {
    if (pts_.size() < 3) throw InvalidInput("circle must contain at least 3 points");
    double step_tol = space_->mesh() * (1 + kRelTol);
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (pts_[i] >= space_->size()) throw InvalidInput("circle point id out of range");
      PointId a = pts_[i], b = pts_[(i + 1) % pts_.size()];
      if (space_->dist(a, b) > step_tol)
        throw InvalidInput("circle step at position " + std::to_string(i) + " exceeds mesh_h");
    }
    std::unordered_set<PointId> seen(pts_.begin(), pts_.end());
    if (seen.size() != pts_.size()) throw InvalidInput("circle is not injective");
  }

  const MetricSpace* space_;
  std::vector<PointId> pts_;
};

// Measured constants attached to every produced arc/circle.
struct ConstructionReport {
  double lambda = 1.0;                    // >= 1 whenever an admissible pair exists
  std::optional<double> locality;         // nullopt = global
  std::optional<double> follows_iota;     // nullopt = not-applicable
  std::optional<double> separation_eta;   // nullopt = not-applicable
  std::string notes;
};

inline double diam(const DiscreteArc& a) {
  const auto& s = a.space();
  double best = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) best = std::max(best, s.dist(a[i], a[j]));
  return best;
}

// lambda = max over index pairs (i,j) with mesh_h <= d and (locality absent or
// d <= locality) of diam(subarc(i,j)) / d.  Pairs below mesh_h are excluded
// (resolution floor).  O(m^2) streaming, O(m) memory.
inline ConstructionReport measure_lambda(const DiscreteArc& a, std::optional<double> locality = std::nullopt) {
  if (a.size() < 2) throw InvalidInput("measure_lambda requires an arc with >= 2 points");
  const auto& s = a.space();
  const double mesh = s.mesh();
  std::size_t m = a.size();
  std::vector<double> D(m, 0.0);  // D[i] = diam(subarc(i, j-1)) during sweep over j
  std::vector<double> M(m, 0.0);
  double best = 0;
  bool any = false;
  for (std::size_t j = 1; j < m; ++j) {
    M[j] = 0.0;
    for (std::size_t i = j; i-- > 0;) {
      double dij = s.dist(a[i], a[j]);
      M[i] = std::max(i + 1 <= j ? M[i + 1] : 0.0, dij);
      if (i == j - 1) D[i] = 0.0;
      D[i] = std::max(D[i], M[i]);
      if (geq(dij, mesh) && (!locality || leq(dij, *locality))) {
        any = true;
        best = std::max(best, D[i] / dij);
      }
    }
  }
  ConstructionReport rep;
  rep.locality = locality;
  if (!any) {
    rep.lambda = 1.0;
    rep.notes = "no admissible pair at this locality/resolution";
  } else {
    rep.lambda = best;
  }
  return rep;
}

// lambda = max over point pairs (d >= mesh_h) of
// min(diam(cw-subarc), diam(ccw-subarc)) / d.
inline ConstructionReport measure_circle_lambda(const DiscreteCircle& c) {
  const auto& s = c.space();
  const double mesh = s.mesh();
  std::size_t m = c.size();
  if (m > 6000)
    throw InvalidInput("circle too large to measure (" + std::to_string(m) + " points)");
  // F[u*m+v] = diam of the subarc from position u forward to position v.
  std::vector<double> F(m * m, 0.0);
  std::vector<double> D(2 * m, 0.0), M(2 * m, 0.0);
  for (std::size_t j = 1; j < 2 * m; ++j) {
    std::size_t lo = j >= m - 1 ? j - (m - 1) : 0;
    M[j] = 0.0;
    for (std::size_t i = j; i-- > lo;) {
      double dij = s.dist(c[i % m], c[j % m]);
      M[i] = std::max(i + 1 <= j ? M[i + 1] : 0.0, dij);
      if (i == j - 1) D[i] = 0.0;
      D[i] = std::max(D[i], M[i]);
      if (i % m != j % m) F[(i % m) * m + (j % m)] = D[i];
    }
  }
  double best = 0;
  bool any = false;
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t v = u + 1; v < m; ++v) {
      double d = s.dist(c[u], c[v]);
      if (!geq(d, mesh)) continue;
      any = true;
      best = std::max(best, std::min(F[u * m + v], F[v * m + u]) / d);
    }
  ConstructionReport rep;
  if (!any) {
    rep.lambda = 1.0;
    rep.notes = "no admissible pair at this resolution";
  } else {
    rep.lambda = best;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// iota-follows checking.  The correspondence p is restricted to monotone
// endpoint-respecting index maps.  For a monotone p, p(t) lies in
// [p(x), p(y)] whenever x <= t <= y, so the subarc-neighborhood condition for
// all index pairs collapses to the per-point displacement d(B_t, A_{p(t)}).
// ---------------------------------------------------------------------------

struct FollowWitness {
  std::size_t x, y;        // index pair in B (x == y: the collapsed pair)
  PointId offending;       // the point of B[x..y] outside the iota-neighborhood
};

struct FollowResult {
  bool ok = false;
  double max_displacement = std::numeric_limits<double>::infinity();
  std::optional<FollowWitness> witness;
};

// Threshold feasibility: greedy minimal monotone assignment.  O(|A|*|B|).
inline FollowResult check_follows(const DiscreteArc& b, const DiscreteArc& a, double iota) {
  const auto& s = b.space();
  std::size_t nb = b.size(), na = a.size();
  double bound = iota * (1 + kRelTol);
  FollowResult res;
  if (s.dist(b[0], a[0]) > bound) {
    res.witness = FollowWitness{0, 0, b[0]};
    return res;
  }
  double maxdisp = s.dist(b[0], a[0]);
  std::size_t mn = 0;  // minimal feasible A-index for current B prefix
  for (std::size_t i = 1; i < nb; ++i) {
    std::size_t j = mn;
    while (j < na && s.dist(b[i], a[j]) > bound) ++j;
    if (j == na) {
      res.witness = FollowWitness{i, i, b[i]};
      return res;
    }
    mn = j;
    // displacement of the realized map is measured against the greedy choice
    maxdisp = std::max(maxdisp, s.dist(b[i], a[j]));
  }
  if (s.dist(b[nb - 1], a[na - 1]) > bound) {
    res.witness = FollowWitness{nb - 1, nb - 1, b[nb - 1]};
    return res;
  }
  maxdisp = std::max(maxdisp, s.dist(b[nb - 1], a[na - 1]));
  res.ok = true;
  res.max_displacement = maxdisp;
  return res;
}

// Minimal max displacement over monotone endpoint-respecting maps B -> A
// (dynamic programming over the index lattice).
inline double min_follow_iota(const DiscreteArc& b, const DiscreteArc& a) {
  const auto& s = b.space();
  std::size_t nb = b.size(), na = a.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(na, inf), cur(na, inf);
  prev[0] = s.dist(b[0], a[0]);
  for (std::size_t j = 1; j < na; ++j) prev[j] = inf;
  for (std::size_t i = 1; i < nb; ++i) {
    double pmin = inf;
    for (std::size_t j = 0; j < na; ++j) {
      pmin = std::min(pmin, prev[j]);
      cur[j] = std::max(s.dist(b[i], a[j]), pmin);
    }
    std::swap(prev, cur);
  }
  return prev[na - 1];
}

// ---------------------------------------------------------------------------
// Relative separation (eq. (2) of the splitting proposition) and absolute
// arc-to-arc distance.
// ---------------------------------------------------------------------------

struct Absolute {};
using SeparationMode = std::variant<Absolute, std::pair<PointId, PointId>>;

// Absolute: min over z in J, z' in J2 of d(z, z').
// Relative to (a, b): min over non-endpoint z of d(z, other arc) / d(z,{a,b}).
// Points with d(z,{a,b}) < anchor_floor are skipped (resolution flag).
inline double arc_separation(const DiscreteArc& j1, const DiscreteArc& j2, const SeparationMode& mode,
                             double anchor_floor = 0.0) {
  const auto& s = j1.space();
  if (std::holds_alternative<Absolute>(mode)) {
    double best = std::numeric_limits<double>::infinity();
    for (PointId z : j1.points())
      for (PointId z2 : j2.points()) best = std::min(best, s.dist(z, z2));
    return best;
  }
  auto [a, b] = std::get<std::pair<PointId, PointId>>(mode);
  bool seen = false;
  double best = std::numeric_limits<double>::infinity();
  auto scan = [&](const DiscreteArc& own, const DiscreteArc& other) {
    for (PointId z : own.points()) {
      if (z == a || z == b) continue;
      seen = true;
      double danchor = std::min(s.dist(z, a), s.dist(z, b));
      if (danchor < anchor_floor) continue;
      double dother = dist_point_to_set(s, z, other.points());
      best = std::min(best, dother / danchor);
    }
  };
  scan(j1, j2);
  scan(j2, j1);
  if (!seen) throw InvalidInput("arc_separation: arcs consist only of endpoints");
  if (best == std::numeric_limits<double>::infinity())
    throw InvalidInput("arc_separation: no point above the anchor floor");
  return best;
}

// Cyclic sequence J followed by the reversed interior of J2.  Pre: shared
// endpoints, disjoint interiors.
inline DiscreteCircle concatenate_to_circle(const DiscreteArc& j1, const DiscreteArc& j2raw) {
  const auto& s = j1.space();
  PointId a = j1.front(), b = j1.back();
  const bool same_orient = j2raw.front() == a && j2raw.back() == b;
  const bool rev_orient = j2raw.front() == b && j2raw.back() == a;
  if (!same_orient && !rev_orient)
    throw InvalidInput("concatenate_to_circle: endpoint mismatch");
  DiscreteArc j2 = same_orient ? j2raw : j2raw.reversed();
  PointMask interior1(s.size());
  for (std::size_t i = 1; i + 1 < j1.size(); ++i) interior1.set(j1[i]);
  for (std::size_t i = 1; i + 1 < j2.size(); ++i)
    if (interior1.test(j2[i]))
      throw InvalidInput("concatenate_to_circle: interiors overlap at point " + std::to_string(j2[i]));
  std::vector<PointId> cyc(j1.points());
  for (std::size_t i = j2.size() - 1; i-- > 1;) cyc.push_back(j2[i]);
  return DiscreteCircle(s, std::move(cyc));
}

}  // namespace qcf
