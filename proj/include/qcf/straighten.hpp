#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "qcf/arc.hpp"
#include "qcf/core.hpp"
#include "qcf/graph.hpp"
#include "qcf/invariants.hpp"
#include "qcf/space.hpp"

namespace qcf {

// Resolution floor policy: derived radii are floored at mult * mesh_h (CLI
// flag --mesh-floor-mult).
struct FloorPolicy {
  double mult = 4.0;
  double floor(const MetricSpace& s) const { return mult * s.mesh(); }
};

// ---------------------------------------------------------------------------
// Net families: maximal r-separated net plus per-point connected sets V_x with
// the four properties of the single-scale joining proposition.
//
// At resolution, two point sets within one mesh step of each other are treated
// as meeting ("meets" predicate d(V_x, V_y) <= mesh_h); the separation
// property (3) is stated over non-meeting pairs, which keeps the achieved
// delta >= mesh_h / r instead of collapsing on interleaved lattice points.
// ---------------------------------------------------------------------------

struct NetFamily {
  double r = 0;
  double L = 1;          // working linear-connectivity constant
  double delta = 0;      // achieved separation constant of property (3)
  std::vector<PointId> net;
  std::vector<std::vector<PointId>> v_points;
  std::vector<PointMask> v_masks;
  // meets-adjacency between net positions (resolution predicate)
  std::vector<std::vector<std::uint32_t>> meets;

  bool sets_meet(std::uint32_t i, std::uint32_t j) const {
    return std::binary_search(meets[i].begin(), meets[i].end(), j);
  }
};

// Greedy maximal r-separated net containing the anchors, deterministic by
// point-id order.
inline std::vector<PointId> maximal_separated_net(const MetricSpace& s, double r,
                                                  const std::vector<PointId>& anchors) {
  if (!geq(r, s.mesh())) throw InvalidInput("maximal_separated_net: r below mesh_h");
  for (std::size_t i = 0; i < anchors.size(); ++i)
    for (std::size_t j = i + 1; j < anchors.size(); ++j)
      if (!geq(s.dist(anchors[i], anchors[j]), r))
        throw InvalidInput("maximal_separated_net: anchors closer than r");
  std::vector<PointId> net(anchors);
  for (PointId p = 0; p < s.size(); ++p) {
    bool far = true;
    for (PointId q : net)
      if (!geq(s.dist(p, q), r)) {
        far = false;
        break;
      }
    if (far) net.push_back(p);
  }
  return net;
}

// Index ranges of an arc serving as the side pieces A1, A3.
struct SideArcs {
  const DiscreteArc* arc = nullptr;
  std::size_t i1 = 0, i2 = 0;  // A1 = arc[0..i1], A3 = arc[i2..end]
};

namespace netdetail {

// shortest path from x to the target set within a closed ball around x; the
// reachable ball component is collected by a local BFS (no O(n) scan), the
// path itself comes from the deterministic Dijkstra.  One mesh-step growth
// retry absorbs discretization.
inline std::optional<std::vector<PointId>> arc_in_ball(const MetricSpace& s, PointId x,
                                                       const std::vector<PointId>& targets, double radius) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    double rad = radius + attempt * 2 * s.mesh();
    PointMask region(s.size());
    region.set(x);
    std::vector<PointId> stack{x};
    while (!stack.empty()) {
      PointId u = stack.back();
      stack.pop_back();
      for (PointId w : s.neighbors(u)) {
        if (region.test(w) || !leq(s.dist(x, w), rad)) continue;
        region.set(w);
        stack.push_back(w);
      }
    }
    PointMask tmask(s.size());
    bool any = false;
    for (PointId t : targets)
      if (region.test(t)) {
        tmask.set(t);
        any = true;
      }
    if (!any) continue;
    if (auto p = shortest_path_in(s, region, std::vector<PointId>{x}, tmask)) return p;
  }
  return std::nullopt;
}

}  // namespace netdetail

// Builds {V_x}: arcs from x to every net point within 2r inside B(x, 2rL),
// plus (when side arcs are supplied) the closed pieces of B(x,2r) n (A1 u A3)
// with connecting arcs.  Verifies properties (1)-(4) exhaustively; the
// achieved delta is discovered by measuring the closest non-meeting pair.
inline NetFamily build_v_family(const MetricSpace& s, const std::vector<PointId>& net, double r, double L,
                                const std::optional<SideArcs>& side = std::nullopt) {
  NetFamily fam;
  fam.r = r;
  fam.L = std::max(L, 1.0);
  fam.net = net;
  const double mesh = s.mesh();
  const double reach = 2 * r * fam.L;

  fam.v_points.resize(net.size());
  fam.v_masks.assign(net.size(), PointMask(s.size()));

  for (std::size_t i = 0; i < net.size(); ++i) {
    PointId x = net[i];
    auto& mask = fam.v_masks[i];
    mask.set(x);
    // arcs to nearby net points
    for (std::size_t j = 0; j < net.size(); ++j) {
      if (j == i) continue;
      PointId y = net[j];
      if (!leq(s.dist(x, y), 2 * r)) continue;
      auto path = netdetail::arc_in_ball(s, x, {y}, reach);
      if (!path)
        throw ConstructionFailure("build_v_family: no arc from net point " + std::to_string(x) + " to " +
                                  std::to_string(y) + " inside B(x, 2rL) (resolution failure)");
      for (PointId p : *path) mask.set(p);
    }
    // side-arc pieces: maximal runs of A1/A3 indices inside B(x, 2r)
    if (side) {
      const auto& A = *side->arc;
      auto add_range = [&](std::size_t lo, std::size_t hi) {
        std::size_t t = lo;
        while (t <= hi) {
          while (t <= hi && !(s.dist(x, A[t]) < 2 * r)) ++t;
          if (t > hi) break;
          std::vector<PointId> run;
          while (t <= hi && s.dist(x, A[t]) < 2 * r) {
            run.push_back(A[t]);
            ++t;
          }
          bool connected = false;
          for (PointId p : run)
            if (mask.test(p)) connected = true;
          for (PointId p : run) mask.set(p);
          if (!connected) {
            auto conn = netdetail::arc_in_ball(s, x, run, reach);
            if (!conn)
              throw ConstructionFailure("build_v_family: cannot connect side-arc piece to net point " +
                                        std::to_string(x) + " (resolution failure)");
            for (PointId p : *conn) mask.set(p);
          }
        }
      };
      add_range(0, side->i1);
      add_range(side->i2, A.size() - 1);
    }
    fam.v_points[i] = mask.to_vector();
  }

  // property (1): d(x,y) <= 2r implies y in V_x
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = 0; j < net.size(); ++j)
      if (i != j && leq(s.dist(net[i], net[j]), 2 * r) && !fam.v_masks[i].test(net[j]))
        throw VerificationFailure("net family property (1) fails");

  // property (2): diam(V_x) <= 5Lr
  for (std::size_t i = 0; i < net.size(); ++i) {
    double d = diam_of(s, fam.v_points[i]);
    if (!leq(d, 5 * fam.L * r))
      throw ConstructionFailure("build_v_family: diam(V_x) = " + fmt_double(d) + " exceeds 5Lr = " +
                                fmt_double(5 * fam.L * r) + " (resolution failure)");
  }

  // property (4): B(x,r) n (A1 u A3) subset V_x
  if (side) {
    const auto& A = *side->arc;
    auto check_range = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t t = lo; t <= hi; ++t)
        for (std::size_t i = 0; i < net.size(); ++i)
          if (s.dist(net[i], A[t]) < r && !fam.v_masks[i].test(A[t]))
            throw VerificationFailure("net family property (4) fails");
    };
    check_range(0, side->i1);
    check_range(side->i2, A.size() - 1);
  }

  // meets-adjacency and property (3): achieved delta from the closest
  // non-meeting pair, capped by the 1/(4L) initial guess
  fam.meets.assign(net.size(), {});
  const double prune = 6 * fam.L * r + 6 * mesh;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (std::size_t j = i + 1; j < net.size(); ++j) {
      if (s.dist(net[i], net[j]) > prune) continue;
      double d = dist_set_to_set(s, fam.v_points[i], fam.v_points[j]);
      if (leq(d, mesh)) {
        fam.meets[i].push_back(static_cast<std::uint32_t>(j));
        fam.meets[j].push_back(static_cast<std::uint32_t>(i));
      } else {
        min_gap = std::min(min_gap, d);
      }
    }
    fam.meets[i].push_back(static_cast<std::uint32_t>(i));  // a set meets itself
  }
  for (auto& row : fam.meets) std::sort(row.begin(), row.end());
  // non-meeting pairs sit > mesh_h apart by the meets predicate, so the
  // achieved delta never collapses; the 1/(4L) cap may still push delta*r
  // below mesh_h, which only narrows the (*) assertion range
  fam.delta = std::min(1.0 / (4 * fam.L), (min_gap / r) * (1 - 1e-9));
  return fam;
}

// ---------------------------------------------------------------------------
// ThreePieceArc and the single-scale joining proposition.
// ---------------------------------------------------------------------------

struct ThreePieceArc {
  DiscreteArc A;
  std::size_t i1, i2;    // cuts: A1 = A[0..i1], A2 = A[i1..i2], A3 = A[i2..end]
  double eps;
  double lambda_local;   // measured eps-local lambda of A1 and A3

  static ThreePieceArc make(DiscreteArc arc, std::size_t i1, std::size_t i2, double eps) {
    if (i1 > i2 || i2 >= arc.size()) throw InvalidInput("ThreePieceArc: cut indices out of order");
    double lam = 1.0;
    if (i1 >= 1) lam = std::max(lam, measure_lambda(arc.subarc(0, i1), eps).lambda);
    if (i2 + 1 < arc.size()) lam = std::max(lam, measure_lambda(arc.subarc(i2, arc.size() - 1), eps).lambda);
    const auto& s = arc.space();
    double d13 = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t <= i1; ++t)
      for (std::size_t u = i2; u < arc.size(); ++u) d13 = std::min(d13, s.dist(arc[t], arc[u]));
    if (!geq(d13, 2 * eps))
      throw InvalidInput("ThreePieceArc: d(A1, A3) = " + fmt_double(d13) + " below 2*eps = " +
                         fmt_double(2 * eps));
    return ThreePieceArc{std::move(arc), i1, i2, eps, lam};
  }
};

struct JoinScaleResult {
  DiscreteArc J;
  ConstructionReport report;
  double r = 0, delta = 0, s_val = 0, S_val = 0, L_work = 1;
  bool r_floored = false;
  bool trivial = false;                 // A2 degenerate, J = A
  std::size_t q0_pos = 0, qlast_pos = 0;  // positions of q_0 and q_{n+1} in J
  std::vector<int> piece_of;            // per J index: -1 .. n+1 (n = chain length)
  int chain_len = 0;
  double follow_displacement = 0;
};

namespace joindetail {

// exhaustive (*) scan plus per-case bound assertion; pairs below mesh_h are
// outside the resolution floor
inline void verify_star(const JoinScaleResult& res, double iota, const MetricSpace& s) {
  const auto& J = res.J;
  const double mesh = s.mesh();
  const double dr = res.delta * res.r;
  const double L = res.L_work;
  std::size_t m = J.size();
  std::vector<double> D(m, 0.0), M(m, 0.0);
  for (std::size_t j = 1; j < m; ++j) {
    M[j] = 0.0;
    for (std::size_t i = j; i-- > 0;) {
      double dij = s.dist(J[i], J[j]);
      M[i] = std::max(i + 1 <= j ? M[i + 1] : 0.0, dij);
      if (i == j - 1) D[i] = 0.0;
      D[i] = std::max(D[i], M[i]);
      if (!geq(dij, mesh) || geq(dij, dr)) continue;
      double dm = D[i];
      if (!lt(dm, res.S_val * iota))
        throw VerificationFailure("(*) fails: d = " + fmt_double(dij) + ", diam = " + fmt_double(dm) +
                                  " >= S*iota = " + fmt_double(res.S_val * iota));
      int pi = res.piece_of[i], pj = res.piece_of[j];
      int n = res.chain_len;
      double slack = 2 * mesh;
      double bound;
      if ((pi == -1 && pj == -1) || (pi == n + 1 && pj == n + 1))
        bound = L * res.r * res.delta + slack;  // case (i)
      else if (pi >= 0 && pi <= n && pj >= 0 && pj <= n)
        bound = 10 * L * res.r + slack;  // case (ii)
      else
        bound = 11 * L * L * res.r + slack;  // cases (iii)/(iv)
      if (!leq(dm, bound))
        throw VerificationFailure("join case bound fails: pieces (" + std::to_string(pi) + "," +
                                  std::to_string(pj) + "), diam = " + fmt_double(dm) + " > " +
                                  fmt_double(bound));
    }
  }
}

}  // namespace joindetail

// The single-scale joining proposition, implemented as its proof: net +
// V-family with side arcs, greedy ball-chain across A2, arc assembly with
// first-hit truncation.  (*) holds with s = delta*r/iota, S = 11*L^2*r/iota
// (= delta/20L and 11L/20 when r is not floored).
inline JoinScaleResult single_scale_join(const ThreePieceArc& T, double iota, const WorkingConstants& wc,
                                         const FloorPolicy& floor_policy = {}) {
  const auto& A = T.A;
  const MetricSpace& s = A.space();
  const double mesh = s.mesh();
  if (!(iota > 0) || !lt(iota, T.eps))
    throw InvalidInput("single_scale_join: iota must lie in (0, eps)");

  const double L = std::max({wc.L(), T.lambda_local, 1.0});

  JoinScaleResult res{A, {}, 0, 0, 0, 0, L, false, false, 0, 0, {}, 0, 0};

  // degenerate middle: if the arc is already an eps-local quasi-arc across the
  // junction, J = A and (*) holds with nominal constants
  if (T.i1 == T.i2) {
    double lam = measure_lambda(A, T.eps).lambda;
    if (leq(lam, T.lambda_local * (1 + 1e-6)) || leq(lam, L)) {
      res.trivial = true;
      res.r = std::max(iota / (20 * L), mesh);
      res.delta = 1.0 / (4 * L);
      res.s_val = res.delta * res.r / iota;
      res.S_val = 11 * L * L * res.r / iota;
      res.q0_pos = T.i1;
      res.qlast_pos = T.i2;
      res.piece_of.assign(A.size(), 0);
      for (std::size_t t = 0; t < A.size(); ++t)
        res.piece_of[t] = t <= T.i1 ? -1 : 2;  // A1 then A3 side
      res.chain_len = 1;
      joindetail::verify_star(res, iota, s);
      res.report.lambda = lam;
      res.report.locality = T.eps;
      res.report.follows_iota = 0.0;
      res.report.notes = "trivial join: A2 degenerate, J = A";
      return res;
    }
  }

  double r = iota / (20 * L);
  if (r < mesh) {
    r = mesh;
    res.r_floored = true;
  }
  res.r = r;

  PointId a0 = A.front(), a3 = A.back();
  auto net = maximal_separated_net(s, r, {a0, a3});
  SideArcs side{&A, T.i1, T.i2};
  NetFamily fam = build_v_family(s, net, r, L, side);
  res.delta = fam.delta;
  res.s_val = fam.delta * r / iota;
  res.S_val = 11 * L * L * r / iota;

  // cover A2 by balls B(z, r), z in the net: nearest net point per arc point,
  // consecutive duplicates collapsed; y_j is the arc index that selected z_j
  std::vector<std::uint32_t> cover_z;   // net positions
  std::vector<std::size_t> cover_y;     // arc indices in [i1, i2]
  for (std::size_t t = T.i1; t <= T.i2; ++t) {
    PointId p = A[t];
    std::uint32_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < net.size(); ++i) {
      double d = s.dist(p, net[i]);
      if (d < bd - kRelTol * tol_scale(d, bd)) {
        bd = d;
        best = static_cast<std::uint32_t>(i);
      }
    }
    if (cover_z.empty() || cover_z.back() != best) {
      cover_z.push_back(best);
      cover_y.push_back(t);
    }
  }
  if (cover_z.empty()) throw ConstructionFailure("single_scale_join: empty A2 cover");

  // inverted index: point -> owning net positions
  std::vector<std::vector<std::uint32_t>> owners(s.size());
  for (std::size_t i = 0; i < net.size(); ++i)
    for (PointId p : fam.v_points[i]) owners[p].push_back(static_cast<std::uint32_t>(i));

  // which net sets meet the cover union
  std::vector<char> meets_cover(net.size(), 0);
  for (std::size_t i = 0; i < net.size(); ++i)
    for (auto z : cover_z)
      if (fam.sets_meet(static_cast<std::uint32_t>(i), z)) {
        meets_cover[i] = 1;
        break;
      }

  // q0: first point of A1 contained in some V_w meeting the cover union
  std::size_t q0_idx = A.size();
  std::uint32_t w0 = 0;
  for (std::size_t t = 0; t <= T.i1 && q0_idx == A.size(); ++t)
    for (auto w : owners[A[t]])
      if (meets_cover[w]) {
        q0_idx = t;
        w0 = w;
        break;
      }
  if (q0_idx == A.size()) throw ConstructionFailure("single_scale_join: chain cannot start from A1");

  // K-owners: V_x intersecting A3
  PointMask a3mask(s.size());
  for (std::size_t t = T.i2; t < A.size(); ++t) a3mask.set(A[t]);
  std::vector<char> k_owner(net.size(), 0);
  for (std::size_t i = 0; i < net.size(); ++i)
    if (fam.v_masks[i].intersects(a3mask)) k_owner[i] = 1;
  auto meets_K = [&](std::uint32_t w) {
    for (auto j : fam.meets[w])
      if (k_owner[j]) return true;
    return false;
  };

  // greedy chain: k_i = max{j : V_{w_{i-1}} meets V_{z_j}}
  std::vector<std::uint32_t> w_chain{w0};
  std::vector<std::size_t> k_chain;  // cover indices picked
  std::vector<char> visited(net.size(), 0);
  visited[w0] = 1;
  int n_steps = 0;
  while (!meets_K(w_chain.back())) {
    std::size_t kbest = cover_z.size();
    for (std::size_t j = cover_z.size(); j-- > 0;) {
      if (fam.sets_meet(w_chain.back(), cover_z[j])) {
        kbest = j;
        break;
      }
    }
    if (kbest == cover_z.size())
      throw ConstructionFailure("single_scale_join: greedy chain stalled (no V_{z_j} met)");
    std::uint32_t wnext = cover_z[kbest];
    if (visited[wnext])
      throw ConstructionFailure("single_scale_join: greedy chain revisits a net point (cycle guard)");
    visited[wnext] = 1;
    w_chain.push_back(wnext);
    k_chain.push_back(kbest);
    if (++n_steps > static_cast<int>(net.size()) + 1)
      throw ConstructionFailure("single_scale_join: chain exceeded net size");
  }
  int n = static_cast<int>(w_chain.size());  // pieces J_0 .. J_{n-1} then J_n into A3

  // q_{n+1}: last point of A3 contained in some V_{w_n} meeting V_{w_{n-1}}
  std::size_t qlast_idx = 0;
  std::uint32_t wn = 0;
  bool found_last = false;
  for (std::size_t t = A.size(); t-- > T.i2 && !found_last;) {
    for (auto w : owners[A[t]])
      if (fam.sets_meet(w, w_chain.back())) {
        qlast_idx = t;
        wn = w;
        found_last = true;
        break;
      }
  }
  if (!found_last) throw ConstructionFailure("single_scale_join: chain cannot terminate into A3");
  w_chain.push_back(wn);

  // assemble J = J_{-1} u J_0 u ... u J_{n+1} with first-hit truncation;
  // previously used points are excluded so J is injective by construction
  std::vector<PointId> jpts;
  std::vector<int> piece;
  PointMask used(s.size());
  PointMask tail_guard(s.size());  // the preserved A3 tail stays untouched
  for (std::size_t t = T.i2; t < A.size(); ++t) tail_guard.set(A[t]);

  for (std::size_t t = 0; t <= q0_idx; ++t) {
    jpts.push_back(A[t]);
    piece.push_back(-1);
    used.set(A[t]);
  }
  res.q0_pos = jpts.size() - 1;

  PointId cur = A[q0_idx];
  for (int i = 0; i <= n; ++i) {
    std::uint32_t wi = w_chain[static_cast<std::size_t>(i)];
    // search graph: V_{w_i} plus the entry point, minus used and tail guard
    PointMask graph = fam.v_masks[wi];
    graph.subtract(used);
    graph.subtract(tail_guard);
    graph.set(cur);
    std::optional<std::vector<PointId>> path;
    if (i < n) {
      // target: within one mesh step of V_{w_{i+1}}
      std::uint32_t wnext = w_chain[static_cast<std::size_t>(i) + 1];
      PointMask targets(s.size());
      bool any = false;
      graph.for_each([&](PointId p) {
        double d = dist_point_to_set(s, p, fam.v_points[wnext]);
        if (leq(d, mesh)) {
          targets.set(p);
          any = true;
        }
      });
      if (!any)
        throw ConstructionFailure("single_scale_join: piece " + std::to_string(i) +
                                  " has no reachable handoff to the next V set");
      path = shortest_path_in(s, graph, std::vector<PointId>{cur}, targets);
    } else {
      PointMask targets(s.size());
      targets.set(A[qlast_idx]);
      graph.set(A[qlast_idx]);
      path = shortest_path_in(s, graph, std::vector<PointId>{cur}, targets);
    }
    if (!path)
      throw ConstructionFailure("single_scale_join: piece " + std::to_string(i) +
                                " is disconnected inside its V set after exclusions");
    for (std::size_t t = 1; t < path->size(); ++t) {
      jpts.push_back((*path)[t]);
      piece.push_back(i);
      used.set((*path)[t]);
    }
    cur = path->back();
  }
  res.qlast_pos = jpts.size() - 1;
  // piece of q_{n+1} is n+1 (start of the preserved A3 tail)
  if (!piece.empty()) piece.back() = n + 1;

  for (std::size_t t = qlast_idx + 1; t < A.size(); ++t) {
    jpts.push_back(A[t]);
    piece.push_back(n + 1);
  }

  res.J = DiscreteArc(s, jpts);
  res.piece_of = std::move(piece);
  res.chain_len = n;

  // chain sanity: non-adjacent chain sets must not meet (backs case (ii))
  for (int i = 0; i + 2 <= n; ++i)
    for (int j = i + 2; j <= n; ++j)
      if (fam.sets_meet(w_chain[static_cast<std::size_t>(i)], w_chain[static_cast<std::size_t>(j)]))
        throw ConstructionFailure("single_scale_join: chain sets " + std::to_string(i) + " and " +
                                  std::to_string(j) + " meet (chain anomaly)");

  // iota-follows certificate via the proof's coarse map f
  {
    double disp = 0;
    std::vector<std::size_t> f_idx(res.J.size());
    for (std::size_t t = 0; t < res.J.size(); ++t) {
      int pc = res.piece_of[t];
      std::size_t a_idx;
      if (pc == -1)
        a_idx = t;  // prefix is A1 verbatim
      else if (pc == n + 1)
        a_idx = qlast_idx + (t - res.qlast_pos);
      else if (pc == 0)
        a_idx = q0_idx;
      else if (pc == n)
        a_idx = qlast_idx;
      else
        a_idx = cover_y[k_chain[static_cast<std::size_t>(pc) - 1]];
      f_idx[t] = a_idx;
      disp = std::max(disp, s.dist(res.J[t], A[a_idx]));
    }
    bool monotone = std::is_sorted(f_idx.begin(), f_idx.end());
    if (monotone && leq(disp, iota)) {
      res.follow_displacement = disp;
    } else {
      // fall back to the DP checker (the f map is only a certificate)
      double dp = min_follow_iota(res.J, A);
      if (!leq(dp, iota))
        throw ConstructionFailure("single_scale_join: output does not iota-follow A (displacement " +
                                  fmt_double(dp) + " > iota " + fmt_double(iota) + ")");
      res.follow_displacement = dp;
    }
  }

  joindetail::verify_star(res, iota, s);

  res.report.lambda = measure_lambda(res.J, T.eps).lambda;
  res.report.locality = T.eps;
  res.report.follows_iota = res.follow_displacement;
  res.report.notes = std::string("single-scale join: r=") + fmt_double(r) + (res.r_floored ? " (floored)" : "") +
                     ", delta=" + fmt_double(res.delta) + ", chain length " + std::to_string(n);
  return res;
}

// ---------------------------------------------------------------------------
// Multi-scale straightening: iterate the single-scale join at
// iota_k = eps * 2^{-k}, k = 1, 2, ... down to the resolution floor.  Sum of
// scales = eps, so the output eps-follows the input.
// ---------------------------------------------------------------------------

enum class StraightenMode { WholeArc, ThreePiece };

struct StraightenResult {
  DiscreteArc J;
  ConstructionReport report;
  int passes = 0;
  std::size_t q0_pos = 0, qlast_pos = 0;  // final preserved prefix/suffix ends
};

inline StraightenResult straighten(const DiscreteArc& A, double eps, StraightenMode mode,
                                   const WorkingConstants& wc, const FloorPolicy& floor_policy = {},
                                   std::size_t cut1 = 0, std::size_t cut2 = 0) {
  const MetricSpace& s = A.space();
  if (!geq(eps, 8 * s.mesh()))
    throw InvalidInput("straighten: eps below 8*mesh_h (no multi-scale room)");
  std::size_t c1, c2;
  if (mode == StraightenMode::WholeArc) {
    c1 = 0;
    c2 = A.size() - 1;
  } else {
    c1 = cut1;
    c2 = cut2;
    if (c1 > c2 || c2 >= A.size()) throw InvalidInput("straighten: bad three-piece cuts");
  }

  StraightenResult out{A, {}, 0, c1, c2};
  DiscreteArc J = A;

  for (int k = 1;; ++k) {
    double iota = eps * std::pow(0.5, k);
    if (lt(iota, floor_policy.floor(s))) break;
    auto T = ThreePieceArc::make(J, c1, c2, eps);
    auto res = single_scale_join(T, iota, wc, floor_policy);
    J = res.J;
    c1 = res.q0_pos;
    c2 = res.qlast_pos;
    ++out.passes;
  }

  out.J = J;
  out.q0_pos = c1;
  out.qlast_pos = c2;

  // follows certificate: Sum iota_k = eps
  double io = (out.passes == 0) ? 0.0 : min_follow_iota(out.J, A);
  if (!leq(io, eps))
    throw ConstructionFailure("straighten: output strayed " + fmt_double(io) + " from input (> eps " +
                              fmt_double(eps) + ")");
  auto cf = check_follows(out.J, A, std::max(io, 0.0) * (1 + 1e-9) + 1e-300);
  if (!cf.ok) throw ConstructionFailure("straighten: independent follows check failed at measured iota");

  // three-piece mode preserves the initial/final components of
  // A \ N(A2, 2*eps) point-wise
  if (mode == StraightenMode::ThreePiece) {
    std::vector<PointId> a2pts;
    for (std::size_t t = cut1; t <= cut2; ++t) a2pts.push_back(A[t]);
    std::size_t pre = 0;
    while (pre < A.size() && geq(dist_point_to_set(s, A[pre], a2pts), 2 * eps)) ++pre;
    std::size_t post = 0;
    while (post < A.size() && geq(dist_point_to_set(s, A[A.size() - 1 - post], a2pts), 2 * eps)) ++post;
    if (out.J.size() < pre || out.J.size() < post)
      throw VerificationFailure("straighten: output shorter than the preserved components");
    for (std::size_t t = 0; t < pre; ++t)
      if (out.J[t] != A[t]) throw VerificationFailure("straighten: initial component not preserved");
    for (std::size_t t = 0; t < post; ++t)
      if (out.J[out.J.size() - 1 - t] != A[A.size() - 1 - t])
        throw VerificationFailure("straighten: final component not preserved");
  }

  out.report.lambda = measure_lambda(out.J, eps).lambda;
  out.report.locality = eps;
  out.report.follows_iota = io;
  out.report.notes = "straighten: " + std::to_string(out.passes) + " pass(es), mode " +
                     (mode == StraightenMode::WholeArc ? "whole-arc" : "three-piece");
  return out;
}

}  // namespace qcf
