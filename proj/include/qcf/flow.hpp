#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "qcf/arc.hpp"
#include "qcf/core.hpp"
#include "qcf/graph.hpp"
#include "qcf/space.hpp"

namespace qcf {

// Vertex-disjoint paths in the sub-step-graph induced on a region, by
// node-split maximum flow with unit vertex capacities (the discrete Zippin /
// Menger engine).  Deterministic: arcs are added in point-id order.

struct DisjointPathsResult {
  std::vector<std::vector<PointId>> paths;
  int maxflow = 0;
  std::vector<PointId> min_cut;  // filled iff maxflow < wanted
  bool ok = false;               // maxflow >= wanted
};

namespace flowdetail {

struct Dinic {
  struct Arc {
    int to;
    int cap;
    int rev;
    bool orig;
  };
  std::vector<std::vector<Arc>> g;
  std::vector<int> level, it;

  explicit Dinic(int n) : g(n), level(n), it(n) {}

  void add(int a, int b, int cap) {
    g[a].push_back({b, cap, static_cast<int>(g[b].size()), true});
    g[b].push_back({a, 0, static_cast<int>(g[a].size()) - 1, false});
  }

  // flow carried by a forward arc == its reverse residual
  int flow_on(const Arc& a) const { return a.orig ? g[a.to][a.rev].cap : 0; }

  bool bfs(int s, int t) {
    std::fill(level.begin(), level.end(), -1);
    std::vector<int> q{s};
    level[s] = 0;
    for (std::size_t h = 0; h < q.size(); ++h) {
      int u = q[h];
      for (const auto& a : g[u])
        if (a.cap > 0 && level[a.to] < 0) {
          level[a.to] = level[u] + 1;
          q.push_back(a.to);
        }
    }
    return level[t] >= 0;
  }

  int dfs(int u, int t, int f) {
    if (u == t) return f;
    for (int& i = it[u]; i < static_cast<int>(g[u].size()); ++i) {
      Arc& a = g[u][i];
      if (a.cap > 0 && level[a.to] == level[u] + 1) {
        int d = dfs(a.to, t, std::min(f, a.cap));
        if (d > 0) {
          a.cap -= d;
          g[a.to][a.rev].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  int run(int s, int t, int limit) {
    int flow = 0;
    while (flow < limit && bfs(s, t)) {
      std::fill(it.begin(), it.end(), 0);
      int f;
      while (flow < limit && (f = dfs(s, t, limit - flow)) > 0) flow += f;
    }
    return flow;
  }
};

}  // namespace flowdetail

// n vertex-disjoint paths from A to B inside `region`, one endpoint in each
// set, interiors disjoint from A u B.  Per-vertex capacity overrides allow the
// shared-endpoint variant (capacity n at a common terminal).
inline DisjointPathsResult vertex_disjoint_paths(const MetricSpace& s, const PointMask& region,
                                                 const std::vector<PointId>& A,
                                                 const std::vector<PointId>& B, int wanted,
                                                 const std::map<PointId, int>& vertex_caps = {}) {
  DisjointPathsResult res;
  if (wanted <= 0) throw InvalidInput("vertex_disjoint_paths: wanted must be positive");

  std::vector<PointId> verts = region.to_vector();
  std::vector<std::int64_t> cidx(s.size(), -1);
  for (std::size_t i = 0; i < verts.size(); ++i) cidx[verts[i]] = static_cast<std::int64_t>(i);

  PointMask inA(s.size()), inB(s.size());
  for (PointId a : A)
    if (region.test(a)) inA.set(a);
  for (PointId b : B) {
    if (inA.test(b)) throw InvalidInput("vertex_disjoint_paths: A and B overlap at " + std::to_string(b));
    if (region.test(b)) inB.set(b);
  }

  int V = static_cast<int>(verts.size());
  int S = 2 * V, T = 2 * V + 1;
  flowdetail::Dinic din(2 * V + 2);
  auto in_node = [&](PointId p) { return 2 * static_cast<int>(cidx[p]); };
  auto out_node = [&](PointId p) { return 2 * static_cast<int>(cidx[p]) + 1; };

  for (PointId p : verts) {
    int cap = 1;
    if (auto it = vertex_caps.find(p); it != vertex_caps.end()) cap = it->second;
    din.add(in_node(p), out_node(p), cap);
  }
  // transit arcs get effectively infinite capacity: vertex arcs are the only
  // finite ones, so every min cut is a pure vertex cut (max flow value is
  // unchanged, paths saturate vertices first)
  const int kBig = 1 << 28;
  for (PointId p : verts) {
    if (inB.test(p)) continue;  // no transit out of B
    for (PointId q : s.neighbors(p)) {
      if (!region.test(q) || inA.test(q)) continue;  // no transit into A
      din.add(out_node(p), in_node(q), kBig);
    }
  }
  int srcs = 0, snks = 0;
  for (PointId p : verts)
    if (inA.test(p)) {
      int cap = 1;
      if (auto it = vertex_caps.find(p); it != vertex_caps.end()) cap = it->second;
      din.add(S, in_node(p), cap);
      srcs += cap;
    }
  for (PointId p : verts)
    if (inB.test(p)) {
      int cap = 1;
      if (auto it = vertex_caps.find(p); it != vertex_caps.end()) cap = it->second;
      din.add(out_node(p), T, cap);
      snks += cap;
    }
  if (srcs == 0 || snks == 0) {
    res.maxflow = 0;
    res.ok = false;
    return res;
  }

  res.maxflow = din.run(S, T, wanted);
  res.ok = res.maxflow >= wanted;

  if (!res.ok) {
    // min vertex cut from the final residual; crossing arcs are vertex arcs,
    // source arcs (cut vertex a) or sink arcs (cut vertex b)
    std::vector<char> reach(din.g.size(), 0);
    std::vector<int> q{S};
    reach[S] = 1;
    for (std::size_t h = 0; h < q.size(); ++h)
      for (const auto& a : din.g[q[h]])
        if (a.cap > 0 && !reach[a.to]) {
          reach[a.to] = 1;
          q.push_back(a.to);
        }
    for (PointId p : verts) {
      if (reach[in_node(p)] && !reach[out_node(p)]) res.min_cut.push_back(p);
      else if (inA.test(p) && !reach[in_node(p)]) res.min_cut.push_back(p);
      else if (inB.test(p) && reach[out_node(p)]) res.min_cut.push_back(p);
    }
  }

  // decompose flow into paths: walk flow-carrying forward arcs from each used
  // source, consuming one unit per step
  for (auto& a : din.g[S]) {
    if (!a.orig) continue;
    int used = din.flow_on(a);
    for (int t = 0; t < used; ++t) {
      std::vector<PointId> path;
      int cur = a.to;
      std::size_t guard = 0;
      bool done = false;
      while (guard++ < din.g.size() + 2) {
        if (cur % 2 == 0 && cur < 2 * V) path.push_back(verts[cur / 2]);
        bool moved = false;
        for (auto& arc : din.g[cur]) {
          if (!arc.orig || din.flow_on(arc) <= 0) continue;
          din.g[arc.to][arc.rev].cap -= 1;
          arc.cap += 1;
          cur = arc.to;
          moved = true;
          break;
        }
        if (!moved) throw ConstructionFailure("flow path decomposition stalled");
        if (cur == T) {
          done = true;
          break;
        }
      }
      if (!done) throw ConstructionFailure("flow path decomposition did not reach the sink");
      res.paths.push_back(std::move(path));
    }
  }
  return res;
}

// n vertex-disjoint paths (except at the shared endpoints x and y): vertex
// capacities n at x and y, 1 elsewhere.
inline DisjointPathsResult disjoint_paths_shared_endpoints(const MetricSpace& s, const PointMask& region,
                                                           PointId x, PointId y, int n) {
  return vertex_disjoint_paths(s, region, {x}, {y}, n, {{x, n}, {y, n}});
}

// ---------------------------------------------------------------------------
// disjoint_arcs / separated_arcs operations.
// ---------------------------------------------------------------------------

struct DisjointArcsResult {
  std::vector<DiscreteArc> arcs;
  int maxflow = 0;
  std::vector<PointId> min_cut;
  bool ok = false;
};

inline DisjointArcsResult disjoint_arcs(const MetricSpace& s, const std::vector<PointId>& A,
                                        const std::vector<PointId>& B, int n, const PointMask& region) {
  DisjointArcsResult out;
  if (n == 1) {
    // shortest path, endpoints in A/B, interior off A u B
    PointMask avail = region;
    PointMask targets(s.size());
    for (PointId b : B)
      if (region.test(b)) targets.set(b);
    std::vector<PointId> sources;
    for (PointId a : A)
      if (region.test(a)) sources.push_back(a);
    auto path = shortest_path_in(s, avail, sources, targets);
    if (!path) {
      out.ok = false;
      return out;
    }
    out.arcs.emplace_back(s, *path);
    out.maxflow = 1;
    out.ok = true;
    return out;
  }
  auto res = vertex_disjoint_paths(s, region, A, B, n);
  out.maxflow = res.maxflow;
  out.min_cut = std::move(res.min_cut);
  out.ok = res.ok;
  for (auto& p : res.paths) out.arcs.emplace_back(s, std::move(p));
  return out;
}

struct SeparatedArcsResult {
  std::vector<DiscreteArc> arcs;
  double sigma = 0;       // achieved pairwise separation (verified)
  bool fallback = false;  // plain disjoint_arcs at sigma = mesh_h
  int restarts_used = 0;
};

// Binary search over sigma in [mesh_h, scale]; at each sigma a greedy
// sequential construction (shortest A->B path, delete its open
// sigma-neighborhood, repeat) with seeded restarts over jittered path
// choices.  Falls back to plain disjoint_arcs at sigma = mesh_h.
inline SeparatedArcsResult separated_arcs(const MetricSpace& s, const std::vector<PointId>& A,
                                          const std::vector<PointId>& B, int n, const PointMask& region,
                                          double scale, Rng rng, int max_restarts = 16) {
  SeparatedArcsResult out;
  auto attempt = [&](double sigma, std::uint64_t jseed) -> std::optional<std::vector<DiscreteArc>> {
    PointMask avail = region;
    std::vector<DiscreteArc> arcs;
    for (int j = 0; j < n; ++j) {
      PointMask targets(s.size());
      bool any_t = false;
      for (PointId b : B)
        if (avail.test(b)) {
          targets.set(b);
          any_t = true;
        }
      std::vector<PointId> sources;
      for (PointId a : A)
        if (avail.test(a)) sources.push_back(a);
      if (sources.empty() || !any_t) return std::nullopt;
      ShortestPathOptions opt;
      opt.jitter_seed = jseed ? jseed + static_cast<std::uint64_t>(j) * 1315423911ULL : 0;
      auto path = shortest_path_in(s, avail, sources, targets, opt);
      if (!path) return std::nullopt;
      // delete the open sigma-neighborhood of the path
      for (PointId p = 0; p < s.size(); ++p) {
        if (!avail.test(p)) continue;
        for (PointId q : *path)
          if (s.dist(p, q) < sigma) {
            avail.reset(p);
            break;
          }
      }
      arcs.emplace_back(s, std::move(*path));
    }
    return arcs;
  };

  double lo = s.mesh(), hi = std::max(scale, lo);
  auto feasible = [&](double sigma) -> std::optional<std::vector<DiscreteArc>> {
    for (int r = 0; r < max_restarts; ++r) {
      std::uint64_t jseed = r == 0 ? 0 : rng.fork(static_cast<std::uint64_t>(r) * 7919 + std::uint64_t(sigma * 1e6)).next();
      if (auto a = attempt(sigma, jseed)) {
        out.restarts_used = std::max(out.restarts_used, r);
        return a;
      }
    }
    return std::nullopt;
  };

  std::optional<std::vector<DiscreteArc>> best;
  double best_sigma = 0;
  if (auto a = feasible(hi)) {
    best = std::move(a);
    best_sigma = hi;
  } else {
    double flo = lo, fhi = hi;
    if (auto a0 = feasible(lo)) {
      best = std::move(a0);
      best_sigma = lo;
      for (int it = 0; it < 12; ++it) {
        double mid = 0.5 * (flo + fhi);
        if (auto a = feasible(mid)) {
          best = std::move(a);
          best_sigma = mid;
          flo = mid;
        } else {
          fhi = mid;
        }
      }
    }
  }

  if (!best) {
    auto da = disjoint_arcs(s, A, B, n, region);
    if (!da.ok)
      throw ConstructionFailure("separated_arcs: no " + std::to_string(n) +
                                " disjoint arcs exist (min cut size " + std::to_string(da.maxflow) + ")");
    out.arcs = std::move(da.arcs);
    out.fallback = true;
    out.sigma = s.mesh();
    best_sigma = 0;
  } else {
    out.arcs = std::move(*best);
    out.sigma = best_sigma;
  }

  // verify and report the exact achieved pairwise separation
  if (out.arcs.size() >= 2) {
    double achieved = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.arcs.size(); ++i)
      for (std::size_t j = i + 1; j < out.arcs.size(); ++j)
        achieved = std::min(achieved, arc_separation(out.arcs[i], out.arcs[j], Absolute{}));
    if (!out.fallback && lt(achieved, best_sigma))
      throw VerificationFailure("separated_arcs: achieved separation " + fmt_double(achieved) +
                                " below searched sigma " + fmt_double(best_sigma));
    out.sigma = out.fallback ? std::max(achieved, 0.0) : achieved;
  } else if (out.arcs.size() == 1) {
    out.sigma = scale;  // vacuous pairwise condition
  }
  return out;
}

}  // namespace qcf
