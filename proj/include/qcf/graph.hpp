#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "qcf/core.hpp"
#include "qcf/space.hpp"

namespace qcf {

// Shortest paths over the step graph induced on a point subset.  Determinism:
// ties in path length (within relative tolerance) break by hop count, then by
// predecessor id, so the chosen tree is stable under rescaling all distances.

struct ShortestPathOptions {
  std::uint64_t jitter_seed = 0;  // 0 = no jitter
  double jitter_mag = 1e-6;
};

namespace detail {

struct DijkState {
  std::vector<double> dist;
  std::vector<std::uint32_t> hops;
  std::vector<PointId> pred;
  std::vector<char> settled;
};

inline bool cand_better(double d, std::uint32_t h, PointId pred, double d0, std::uint32_t h0, PointId pred0) {
  if (d0 == std::numeric_limits<double>::infinity()) return d < d0;
  if (d < d0 - kRelTol * tol_scale(d, d0)) return true;
  if (d > d0 + kRelTol * tol_scale(d, d0)) return false;
  if (h != h0) return h < h0;
  return pred < pred0;
}

}  // namespace detail

// Multi-source Dijkstra from `sources` within `allowed`; stops when the first
// target settles.  `source_only` points expand but cannot be re-entered;
// `target_only` points terminate search (no expansion out of them).  Returns
// the path (source..target) or nullopt.
inline std::optional<std::vector<PointId>> shortest_path_in(
    const MetricSpace& s, const PointMask& allowed, const std::vector<PointId>& sources,
    const PointMask& targets, const ShortestPathOptions& opt = {}) {
  const double inf = std::numeric_limits<double>::infinity();
  std::uint32_t n = s.size();
  detail::DijkState st;
  st.dist.assign(n, inf);
  st.hops.assign(n, 0);
  st.pred.assign(n, kNoPoint);
  st.settled.assign(n, 0);

  struct Item {
    double d;
    std::uint32_t h;
    PointId pred, v;
  };
  auto cmp = [](const Item& a, const Item& b) {
    // min-heap: reverse of cand_better
    return detail::cand_better(b.d, b.h, b.pred, a.d, a.h, a.pred) ||
           (!detail::cand_better(a.d, a.h, a.pred, b.d, b.h, b.pred) && a.v > b.v);
  };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);

  for (PointId src : sources) {
    if (!allowed.test(src)) continue;
    if (detail::cand_better(0.0, 0, src, st.dist[src], st.hops[src], st.pred[src])) {
      st.dist[src] = 0.0;
      st.hops[src] = 0;
      st.pred[src] = src;  // self-pred marks a source
      pq.push({0.0, 0, src, src});
    }
  }

  PointId hit = kNoPoint;
  while (!pq.empty()) {
    Item it = pq.top();
    pq.pop();
    if (st.settled[it.v]) continue;
    if (it.d != st.dist[it.v] || it.h != st.hops[it.v] || it.pred != st.pred[it.v]) continue;
    st.settled[it.v] = 1;
    if (targets.test(it.v)) {
      hit = it.v;
      break;
    }
    for (PointId w : s.neighbors(it.v)) {
      if (!allowed.test(w) || st.settled[w]) continue;
      double ew = s.dist(it.v, w);
      if (opt.jitter_seed) ew *= 1.0 + opt.jitter_mag * edge_jitter(opt.jitter_seed, it.v, w);
      double nd = it.d + ew;
      std::uint32_t nh = it.h + 1;
      if (detail::cand_better(nd, nh, it.v, st.dist[w], st.hops[w], st.pred[w])) {
        st.dist[w] = nd;
        st.hops[w] = nh;
        st.pred[w] = it.v;
        pq.push({nd, nh, it.v, w});
      }
    }
  }
  if (hit == kNoPoint) return std::nullopt;
  std::vector<PointId> path;
  for (PointId v = hit;; v = st.pred[v]) {
    path.push_back(v);
    if (st.pred[v] == v) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

inline std::optional<std::vector<PointId>> shortest_path_in(const MetricSpace& s, const PointMask& allowed,
                                                            PointId src, PointId dst,
                                                            const ShortestPathOptions& opt = {}) {
  PointMask t(s.size());
  t.set(dst);
  return shortest_path_in(s, allowed, std::vector<PointId>{src}, t, opt);
}

// Are a and b connected within the sub-step-graph induced on `allowed`?
inline bool connected_in(const MetricSpace& s, const PointMask& allowed, PointId a, PointId b) {
  if (!allowed.test(a) || !allowed.test(b)) return false;
  if (a == b) return true;
  std::vector<char> seen(s.size(), 0);
  std::vector<PointId> stack{a};
  seen[a] = 1;
  while (!stack.empty()) {
    PointId u = stack.back();
    stack.pop_back();
    for (PointId v : s.neighbors(u)) {
      if (!allowed.test(v) || seen[v]) continue;
      if (v == b) return true;
      seen[v] = 1;
      stack.push_back(v);
    }
  }
  return false;
}

// min over (p in pts) of d(p, q)
inline double dist_point_to_set(const MetricSpace& s, PointId q, const std::vector<PointId>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (PointId p : pts) best = std::min(best, s.dist(q, p));
  return best;
}

inline double dist_set_to_set(const MetricSpace& s, const std::vector<PointId>& a,
                              const std::vector<PointId>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (PointId p : a)
    for (PointId q : b) best = std::min(best, s.dist(p, q));
  return best;
}

inline double diam_of(const MetricSpace& s, const std::vector<PointId>& pts) {
  double best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, s.dist(pts[i], pts[j]));
  return best;
}

// Points of `universe` within distance < r of any point in `seeds` (open
// neighborhood N(seeds, r)).
inline PointMask open_neighborhood(const MetricSpace& s, const std::vector<PointId>& seeds, double r) {
  PointMask m(s.size());
  for (PointId p = 0; p < s.size(); ++p) {
    for (PointId q : seeds) {
      if (s.dist(p, q) < r) {
        m.set(p);
        break;
      }
    }
  }
  return m;
}

// Closed variant {p : d(p, seeds) <= r} with tolerance.
inline PointMask closed_neighborhood(const MetricSpace& s, const std::vector<PointId>& seeds, double r) {
  PointMask m(s.size());
  for (PointId p = 0; p < s.size(); ++p) {
    for (PointId q : seeds) {
      if (leq(s.dist(p, q), r)) {
        m.set(p);
        break;
      }
    }
  }
  return m;
}

}  // namespace qcf
