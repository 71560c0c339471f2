#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <queue>

#include "qcf/flow.hpp"
#include "qcf/space.hpp"

using namespace qcf;

namespace {

PointId grid_id(unsigned k, unsigned row, unsigned col) { return row * (k + 1) + col; }

// Independent second max-flow implementation: BFS augmenting paths over a
// dense capacity matrix with node splitting.  Used as an oracle only.
int oracle_maxflow(const MetricSpace& s, const PointMask& region, const std::vector<PointId>& A,
                   const std::vector<PointId>& B) {
  auto verts = region.to_vector();
  int V = static_cast<int>(verts.size());
  std::vector<int> idx(s.size(), -1);
  for (int i = 0; i < V; ++i) idx[verts[i]] = i;
  int N = 2 * V + 2, S = 2 * V, T = 2 * V + 1;
  std::vector<std::vector<int>> cap(N, std::vector<int>(N, 0));
  PointMask inA(s.size()), inB(s.size());
  for (PointId a : A)
    if (region.test(a)) inA.set(a);
  for (PointId b : B)
    if (region.test(b)) inB.set(b);
  for (PointId p : verts) {
    cap[2 * idx[p]][2 * idx[p] + 1] = 1;
    if (inA.test(p)) cap[S][2 * idx[p]] = 1;
    if (inB.test(p)) cap[2 * idx[p] + 1][T] = 1;
  }
  for (PointId p : verts) {
    if (inB.test(p)) continue;
    for (PointId q : s.neighbors(p)) {
      if (!region.test(q) || inA.test(q)) continue;
      cap[2 * idx[p] + 1][2 * idx[q]] = 1;
    }
  }
  int flow = 0;
  while (true) {
    std::vector<int> par(N, -1);
    par[S] = S;
    std::queue<int> q;
    q.push(S);
    while (!q.empty() && par[T] < 0) {
      int u = q.front();
      q.pop();
      for (int v = 0; v < N; ++v)
        if (cap[u][v] > 0 && par[v] < 0) {
          par[v] = u;
          q.push(v);
        }
    }
    if (par[T] < 0) break;
    for (int v = T; v != S; v = par[v]) {
      cap[par[v]][v] -= 1;
      cap[v][par[v]] += 1;
    }
    ++flow;
  }
  return flow;
}

// Brute-force minimum vertex cut for small cuts: smallest S (size <= kmax)
// whose removal disconnects A\S from B\S inside the region.
int brute_min_cut_upto(const MetricSpace& s, const PointMask& region, const std::vector<PointId>& A,
                       const std::vector<PointId>& B, int kmax) {
  auto verts = region.to_vector();
  auto separated = [&](const std::vector<PointId>& cut) {
    PointMask avail = region;
    for (PointId c : cut) avail.reset(c);
    PointMask targets(s.size());
    bool anyb = false;
    std::vector<PointId> srcs;
    for (PointId b : B)
      if (avail.test(b)) {
        targets.set(b);
        anyb = true;
      }
    for (PointId a : A)
      if (avail.test(a)) srcs.push_back(a);
    if (srcs.empty() || !anyb) return true;
    return !shortest_path_in(s, avail, srcs, targets).has_value();
  };
  if (separated({})) return 0;
  std::size_t n = verts.size();
  for (int k = 1; k <= kmax; ++k) {
    std::vector<std::size_t> comb(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    while (true) {
      std::vector<PointId> cut;
      for (auto c : comb) cut.push_back(verts[c]);
      if (separated(cut)) return k;
      // next combination
      int i = k - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - static_cast<std::size_t>(k - i)) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return kmax + 1;  // cut exceeds kmax
}

MetricSpace random_connected_graph(Rng& rng, unsigned n, unsigned extra_edges) {
  std::vector<GraphEdge> edges;
  for (PointId v = 1; v < n; ++v) edges.push_back({v, rng.below(v), 1.0});
  for (unsigned e = 0; e < extra_edges; ++e) {
    PointId a = rng.below(n), b = rng.below(n);
    if (a == b) continue;
    edges.push_back({std::min(a, b), std::max(a, b), 1.0});
  }
  // dedupe
  std::sort(edges.begin(), edges.end(), [](auto& x, auto& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](auto& x, auto& y) { return x.a == y.a && x.b == y.b; }),
              edges.end());
  return MetricSpace::from_graph(n, 1.0, edges);
}

}  // namespace

TEST_CASE("disjoint_arcs on the grid") {
  auto g = generate_grid_square(8);
  std::vector<PointId> left, right;
  for (unsigned r = 0; r <= 8; ++r) {
    left.push_back(grid_id(8, r, 0));
    right.push_back(grid_id(8, r, 8));
  }
  PointMask all(g.size(), true);
  auto res = disjoint_arcs(g, left, right, 3, all);
  REQUIRE(res.ok);
  REQUIRE(res.arcs.size() == 3);
  // vertex-disjointness and endpoint membership
  PointMask used(g.size());
  for (const auto& a : res.arcs) {
    CHECK(std::find(left.begin(), left.end(), a.front()) != left.end());
    CHECK(std::find(right.begin(), right.end(), a.back()) != right.end());
    for (PointId p : a.points()) {
      CHECK_FALSE(used.test(p));
      used.set(p);
    }
  }
  // n = 1 is a plain shortest path
  auto one = disjoint_arcs(g, {grid_id(8, 0, 0)}, {grid_id(8, 0, 8)}, 1, all);
  REQUIRE(one.ok);
  CHECK(one.arcs[0].size() == 9);
}

TEST_CASE("menger on a path graph") {
  std::vector<GraphEdge> edges;
  for (PointId v = 0; v + 1 < 7; ++v) edges.push_back({v, v + 1, 1.0});
  auto p = MetricSpace::from_graph(7, 1.0, edges);
  PointMask all(p.size(), true);
  auto res = disjoint_arcs(p, {0}, {6}, 2, all);
  CHECK_FALSE(res.ok);
  CHECK(res.maxflow == 1);
  REQUIRE(res.min_cut.size() == 1);
  // the returned set really separates 0 from 6
  PointMask avail = all;
  avail.reset(res.min_cut[0]);
  if (res.min_cut[0] != 0 && res.min_cut[0] != 6) {
    CHECK_FALSE(connected_in(p, avail, 0, 6));
  }
}

TEST_CASE("flow value equals oracle flow and brute cut on random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    unsigned n = 10 + rng.below(50);
    auto g = random_connected_graph(rng, n, n);
    PointMask all(g.size(), true);
    std::vector<PointId> A, B;
    unsigned na = 1 + rng.below(3), nb = 1 + rng.below(3);
    PointMask taken(g.size());
    while (A.size() < na) {
      PointId a = rng.below(n);
      if (!taken.test(a)) {
        taken.set(a);
        A.push_back(a);
      }
    }
    while (B.size() < nb) {
      PointId b = rng.below(n);
      if (!taken.test(b)) {
        taken.set(b);
        B.push_back(b);
      }
    }
    auto res = vertex_disjoint_paths(g, all, A, B, 1 << 20);
    int oracle = oracle_maxflow(g, all, A, B);
    CHECK(res.maxflow == oracle);
    if (res.maxflow <= 3) {
      int brute = brute_min_cut_upto(g, all, A, B, 3);
      CHECK(res.maxflow == brute);
    }
    // paths are vertex-disjoint
    PointMask used(g.size());
    for (const auto& path : res.paths)
      for (PointId p : path) {
        CHECK_FALSE(used.test(p));
        used.set(p);
      }
  }
}

TEST_CASE("separated_arcs") {
  auto g = generate_grid_square(16);
  std::vector<PointId> left, right;
  for (unsigned r = 0; r <= 16; ++r) {
    left.push_back(grid_id(16, r, 0));
    right.push_back(grid_id(16, r, 16));
  }
  PointMask all(g.size(), true);
  auto res = separated_arcs(g, left, right, 2, all, 1.0, Rng(0));
  REQUIRE(res.arcs.size() == 2);
  CHECK(res.sigma >= 0.25);
  // exhaustive pairwise min distance matches the reported sigma
  double verify = arc_separation(res.arcs[0], res.arcs[1], Absolute{});
  CHECK(verify == Catch::Approx(res.sigma));

  // n = 1: vacuous pairwise condition, sigma = scale
  auto one = separated_arcs(g, left, right, 1, all, 0.7, Rng(0));
  CHECK(one.arcs.size() == 1);
  CHECK(one.sigma == 0.7);

  // determinism
  auto res2 = separated_arcs(g, left, right, 2, all, 1.0, Rng(0));
  REQUIRE(res2.arcs.size() == 2);
  CHECK(res2.arcs[0].points() == res.arcs[0].points());
  CHECK(res2.arcs[1].points() == res.arcs[1].points());
}

TEST_CASE("shared endpoint disjoint paths") {
  auto g = generate_grid_square(8);
  PointMask all(g.size(), true);
  PointId x = grid_id(8, 4, 2), y = grid_id(8, 4, 6);
  auto res = disjoint_paths_shared_endpoints(g, all, x, y, 3);
  REQUIRE(res.ok);
  REQUIRE(res.paths.size() == 3);
  PointMask interior(g.size());
  for (const auto& p : res.paths) {
    CHECK(p.front() == x);
    CHECK(p.back() == y);
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
      CHECK_FALSE(interior.test(p[i]));
      interior.set(p[i]);
    }
  }
}
