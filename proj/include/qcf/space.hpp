#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "qcf/core.hpp"

namespace qcf {

using Coord = std::array<double, 2>;

struct GraphEdge {
  PointId a, b;
  double w;
};

// Finite metric space with an explicit resolution floor mesh_h.  The step
// graph (pairs at distance <= mesh_h) must be connected.  Immutable after
// construction.
class MetricSpace {
 public:
  enum class Kind { Explicit, Euclidean, Graph };

  static MetricSpace euclidean(std::vector<Coord> coords, double mesh_h) {
    MetricSpace s;
    s.kind_ = Kind::Euclidean;
    s.n_ = static_cast<std::uint32_t>(coords.size());
    s.mesh_ = mesh_h;
    s.coords_ = std::move(coords);
    s.finish_construction();
    return s;
  }

  // Row-major full matrix. Checks the metric axioms (these inputs are the
  // untrusted ones); throws InvalidInput with a witness pair/triple.
  static MetricSpace from_matrix(std::uint32_t n, double mesh_h, std::vector<double> dist,
                                 std::optional<std::vector<Coord>> coords = std::nullopt) {
    if (dist.size() != static_cast<std::size_t>(n) * n)
      throw InvalidInput("distance matrix size mismatch: expected " + std::to_string(std::size_t(n) * n) +
                         " entries, got " + std::to_string(dist.size()));
    MetricSpace s;
    s.kind_ = Kind::Explicit;
    s.n_ = n;
    s.mesh_ = mesh_h;
    s.matrix_ = std::move(dist);
    if (coords) s.coords_ = std::move(*coords);
    s.check_matrix_axioms();
    s.finish_construction();
    return s;
  }

  // Shortest-path metric over a weighted undirected graph.
  static MetricSpace from_graph(std::uint32_t n, double mesh_h, const std::vector<GraphEdge>& edges,
                                std::optional<std::vector<Coord>> coords = std::nullopt) {
    MetricSpace s;
    s.kind_ = Kind::Graph;
    s.n_ = n;
    s.mesh_ = mesh_h;
    if (coords) s.coords_ = std::move(*coords);
    s.graph_adj_.assign(n, {});
    for (const auto& e : edges) {
      if (e.a >= n || e.b >= n) throw InvalidInput("graph edge endpoint out of range");
      if (e.a == e.b) throw InvalidInput("graph self-loop at point " + std::to_string(e.a));
      if (!(e.w > 0)) throw InvalidInput("graph edge weight must be positive");
      s.graph_adj_[e.a].push_back({e.b, e.w});
      s.graph_adj_[e.b].push_back({e.a, e.w});
    }
    for (auto& adj : s.graph_adj_) {
      std::sort(adj.begin(), adj.end(), [](auto& x, auto& y) { return x.first < y.first; });
    }
    if (n <= kApspLimit) {
      s.matrix_.assign(static_cast<std::size_t>(n) * n, 0.0);
      std::vector<double> row;
      for (PointId src = 0; src < n; ++src) {
        s.graph_sssp(src, row);
        for (PointId v = 0; v < n; ++v) {
          if (row[v] == std::numeric_limits<double>::infinity())
            throw InvalidInput("graph metric is disconnected (no path " + std::to_string(src) + " -> " +
                               std::to_string(v) + ")");
          s.matrix_[static_cast<std::size_t>(src) * n + v] = row[v];
        }
      }
    }
    s.finish_construction();
    return s;
  }

  std::uint32_t size() const { return n_; }
  double mesh() const { return mesh_; }
  Kind kind() const { return kind_; }

  double dist(PointId a, PointId b) const {
    if (!matrix_.empty()) return matrix_[static_cast<std::size_t>(a) * n_ + b];
    if (kind_ == Kind::Euclidean) {
      double dx = coords_[a][0] - coords_[b][0];
      double dy = coords_[a][1] - coords_[b][1];
      return std::sqrt(dx * dx + dy * dy);
    }
    return lazy_graph_dist(a, b);
  }

  bool has_coords() const { return !coords_.empty(); }
  const std::vector<Coord>& coords() const { return coords_; }

  // Step graph: q adjacent to p iff dist(p,q) <= mesh_h (up to tolerance).
  std::span<const PointId> neighbors(PointId p) const {
    return {adj_.data() + adj_off_[p], adj_off_[p + 1] - adj_off_[p]};
  }

  double diameter() const { return diameter_; }

  // Exposed for save/load of graph metrics.
  std::vector<GraphEdge> graph_edges() const {
    std::vector<GraphEdge> out;
    for (PointId a = 0; a < n_; ++a)
      for (auto& [b, w] : graph_adj_[a])
        if (a < b) out.push_back({a, b, w});
    return out;
  }

  // Metric-axiom verification: exhaustive triangle check for n <= 300,
  // seeded random triples above.  Throws VerificationFailure with a witness.
  void verify_metric_axioms(std::size_t sample_triples = 100000) const {
    for (PointId a = 0; a < n_; ++a) {
      if (dist(a, a) != 0.0)
        throw VerificationFailure("d(" + std::to_string(a) + "," + std::to_string(a) + ") != 0");
    }
    auto check_triple = [&](PointId a, PointId b, PointId c) {
      double ab = dist(a, b), bc = dist(b, c), ac = dist(a, c);
      if (!leq(ac, ab + bc))
        throw VerificationFailure("triangle inequality fails at (" + std::to_string(a) + "," +
                                  std::to_string(b) + "," + std::to_string(c) + "): d(a,c)=" + fmt_double(ac) +
                                  " > d(a,b)+d(b,c)=" + fmt_double(ab + bc));
    };
    auto check_pair = [&](PointId a, PointId b) {
      if (dist(a, b) != dist(b, a))
        throw VerificationFailure("asymmetry at (" + std::to_string(a) + "," + std::to_string(b) + ")");
      if (a != b && !(dist(a, b) > 0))
        throw VerificationFailure("zero distance between distinct points " + std::to_string(a) + "," +
                                  std::to_string(b));
    };
    if (n_ <= 300) {
      for (PointId a = 0; a < n_; ++a)
        for (PointId b = a + 1; b < n_; ++b) check_pair(a, b);
      for (PointId a = 0; a < n_; ++a)
        for (PointId b = 0; b < n_; ++b)
          for (PointId c = 0; c < n_; ++c)
            if (a != b && b != c && a != c) check_triple(a, b, c);
    } else {
      Rng rng(0x5eed);
      for (std::size_t t = 0; t < sample_triples; ++t) {
        PointId a = rng.below(n_), b = rng.below(n_), c = rng.below(n_);
        if (a == b || b == c || a == c) continue;
        check_pair(a, b);
        check_triple(a, b, c);
      }
    }
  }

 private:
  static constexpr std::uint32_t kApspLimit = 20000;

  void check_matrix_axioms() const {
    for (PointId a = 0; a < n_; ++a) {
      if (matrix_[static_cast<std::size_t>(a) * n_ + a] != 0.0)
        throw InvalidInput("nonzero diagonal at point " + std::to_string(a));
      for (PointId b = a + 1; b < n_; ++b) {
        double ab = matrix_[static_cast<std::size_t>(a) * n_ + b];
        double ba = matrix_[static_cast<std::size_t>(b) * n_ + a];
        if (ab != ba)
          throw InvalidInput("asymmetric distances at (" + std::to_string(a) + "," + std::to_string(b) +
                             "): " + fmt_double(ab) + " vs " + fmt_double(ba));
        if (!(ab > 0))
          throw InvalidInput("non-positive distance between distinct points (" + std::to_string(a) + "," +
                             std::to_string(b) + ")");
      }
    }
    auto check_triple = [&](PointId a, PointId b, PointId c) {
      double ab = dist(a, b), bc = dist(b, c), ac = dist(a, c);
      if (!leq(ac, ab + bc))
        throw InvalidInput("triangle inequality violated at (" + std::to_string(a) + "," + std::to_string(b) +
                           "," + std::to_string(c) + "): d(a,c)=" + fmt_double(ac) + " > " +
                           fmt_double(ab + bc));
    };
    if (n_ <= 300) {
      for (PointId a = 0; a < n_; ++a)
        for (PointId b = 0; b < n_; ++b)
          for (PointId c = 0; c < n_; ++c)
            if (a != b && b != c && a != c) check_triple(a, b, c);
    } else {
      Rng rng(0x5eed);
      for (std::size_t t = 0; t < 100000; ++t) {
        PointId a = rng.below(n_), b = rng.below(n_), c = rng.below(n_);
        if (a == b || b == c || a == c) continue;
        check_triple(a, b, c);
      }
    }
  }

  void graph_sssp(PointId src, std::vector<double>& out) const {
    out.assign(n_, std::numeric_limits<double>::infinity());
    out[src] = 0.0;
    using Item = std::pair<double, PointId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0.0, src});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > out[u]) continue;
      for (auto& [v, w] : graph_adj_[u]) {
        double nd = d + w;
        if (nd < out[v]) {
          out[v] = nd;
          pq.push({nd, v});
        }
      }
    }
  }

  double lazy_graph_dist(PointId a, PointId b) const {
    std::lock_guard<std::mutex> lock(lazy_mutex_);
    auto it = lazy_rows_.find(a);
    if (it == lazy_rows_.end()) {
      std::vector<double> row;
      graph_sssp(a, row);
      it = lazy_rows_.emplace(a, std::move(row)).first;
    }
    return it->second[b];
  }

  void finish_construction() {
    if (n_ == 0) throw InvalidInput("empty space");
    if (!(mesh_ > 0)) throw InvalidInput("mesh_h must be positive");
    if (!coords_.empty() && coords_.size() != n_) throw InvalidInput("coords size mismatch");
    build_adjacency();
    check_step_graph();
    compute_diameter();
  }

  void build_adjacency() {
    double step_tol = mesh_ * (1 + kRelTol);
    std::vector<std::vector<PointId>> adj(n_);
    if (kind_ == Kind::Euclidean) {
      // uniform hash grid with cell size mesh_h
      double minx = coords_[0][0], miny = coords_[0][1];
      for (auto& c : coords_) {
        minx = std::min(minx, c[0]);
        miny = std::min(miny, c[1]);
      }
      auto cell = [&](const Coord& c) {
        return std::pair<long, long>(static_cast<long>(std::floor((c[0] - minx) / mesh_)),
                                     static_cast<long>(std::floor((c[1] - miny) / mesh_)));
      };
      std::map<std::pair<long, long>, std::vector<PointId>> grid;
      for (PointId p = 0; p < n_; ++p) grid[cell(coords_[p])].push_back(p);
      for (PointId p = 0; p < n_; ++p) {
        auto [cx, cy] = cell(coords_[p]);
        for (long dx = -1; dx <= 1; ++dx)
          for (long dy = -1; dy <= 1; ++dy) {
            auto it = grid.find({cx + dx, cy + dy});
            if (it == grid.end()) continue;
            for (PointId q : it->second)
              if (q != p && dist(p, q) <= step_tol) adj[p].push_back(q);
          }
        std::sort(adj[p].begin(), adj[p].end());
      }
    } else if (kind_ == Kind::Graph && matrix_.empty()) {
      // too big for APSP: adjacency from direct edges with weight <= mesh
      for (PointId p = 0; p < n_; ++p)
        for (auto& [q, w] : graph_adj_[p])
          if (w <= step_tol) adj[p].push_back(q);
    } else {
      for (PointId p = 0; p < n_; ++p)
        for (PointId q = 0; q < n_; ++q)
          if (q != p && dist(p, q) <= step_tol) adj[p].push_back(q);
    }
    adj_off_.assign(n_ + 1, 0);
    for (PointId p = 0; p < n_; ++p) adj_off_[p + 1] = adj_off_[p] + adj[p].size();
    adj_.resize(adj_off_[n_]);
    for (PointId p = 0; p < n_; ++p)
      std::copy(adj[p].begin(), adj[p].end(), adj_.begin() + static_cast<std::ptrdiff_t>(adj_off_[p]));
  }

  void check_step_graph() {
    if (n_ == 1) return;
    for (PointId p = 0; p < n_; ++p)
      if (neighbors(p).empty())
        throw InvalidInput("point " + std::to_string(p) + " has no neighbor within mesh_h");
    std::vector<char> seen(n_, 0);
    std::vector<PointId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      PointId u = stack.back();
      stack.pop_back();
      for (PointId v : neighbors(u))
        if (!seen[v]) {
          seen[v] = 1;
          ++reached;
          stack.push_back(v);
        }
    }
    if (reached != n_) throw InvalidInput("step graph is disconnected (" + std::to_string(reached) + " of " +
                                          std::to_string(n_) + " points reachable)");
  }

  void compute_diameter() {
    if (kind_ == Kind::Graph && matrix_.empty()) {
      // estimate from coords extent if present; else double-sweep BFS-ish bound
      double best = 0;
      std::vector<double> row;
      graph_sssp(0, row);
      PointId far = 0;
      for (PointId v = 0; v < n_; ++v)
        if (row[v] > row[far]) far = v;
      graph_sssp(far, row);
      for (PointId v = 0; v < n_; ++v) best = std::max(best, row[v]);
      diameter_ = best;
      return;
    }
    double best = 0;
    for (PointId a = 0; a < n_; ++a)
      for (PointId b = a + 1; b < n_; ++b) best = std::max(best, dist(a, b));
    diameter_ = best;
  }

  Kind kind_ = Kind::Explicit;
  std::uint32_t n_ = 0;
  double mesh_ = 0;
  double diameter_ = 0;
  std::vector<double> matrix_;  // full for Explicit, APSP cache for small Graph
  std::vector<Coord> coords_;
  std::vector<std::vector<std::pair<PointId, double>>> graph_adj_;
  std::vector<PointId> adj_;
  std::vector<std::size_t> adj_off_;
  mutable std::mutex lazy_mutex_;
  mutable std::map<PointId, std::vector<double>> lazy_rows_;

  MetricSpace() = default;

 public:
  MetricSpace(MetricSpace&& o) noexcept { *this = std::move(o); }
  MetricSpace& operator=(MetricSpace&& o) noexcept {
    kind_ = o.kind_;
    n_ = o.n_;
    mesh_ = o.mesh_;
    diameter_ = o.diameter_;
    matrix_ = std::move(o.matrix_);
    coords_ = std::move(o.coords_);
    graph_adj_ = std::move(o.graph_adj_);
    adj_ = std::move(o.adj_);
    adj_off_ = std::move(o.adj_off_);
    lazy_rows_ = std::move(o.lazy_rows_);
    return *this;
  }
  MetricSpace(const MetricSpace&) = delete;
  MetricSpace& operator=(const MetricSpace&) = delete;
};

// Open ball B(x,r) = {y : d(x,y) < r}.
struct Ball {
  PointId center;
  double r;
  bool contains(const MetricSpace& s, PointId p) const { return s.dist(center, p) < r; }
  PointMask points(const MetricSpace& s) const {
    PointMask m(s.size());
    for (PointId p = 0; p < s.size(); ++p)
      if (contains(s, p)) m.set(p);
    return m;
  }
};

// A(x,r,R) = closed-ball(R) minus open-ball(r): {y : r <= d <= R}.
struct Annulus {
  PointId center;
  double r, R;
  bool contains(const MetricSpace& s, PointId p) const {
    double d = s.dist(center, p);
    return d >= r && d <= R;
  }
  PointMask points(const MetricSpace& s) const {
    PointMask m(s.size());
    for (PointId p = 0; p < s.size(); ++p)
      if (contains(s, p)) m.set(p);
    return m;
  }
};

// Closed ball as a mask.
inline PointMask closed_ball(const MetricSpace& s, PointId center, double r) {
  PointMask m(s.size());
  for (PointId p = 0; p < s.size(); ++p)
    if (leq(s.dist(center, p), r)) m.set(p);
  return m;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

// (k+1)^2 lattice points of the unit square, ambient Euclidean metric,
// mesh_h = sqrt(2)/k (8-neighbour step graph). Index = row*(k+1)+col,
// coordinate (col/k, row/k).
inline MetricSpace generate_grid_square(unsigned k) {
  if (k < 2) throw InvalidInput("generate_grid_square: k must be >= 2");
  std::vector<Coord> coords;
  coords.reserve((k + 1) * (k + 1));
  for (unsigned r = 0; r <= k; ++r)
    for (unsigned c = 0; c <= k; ++c)
      coords.push_back({static_cast<double>(c) / k, static_cast<double>(r) / k});
  return MetricSpace::euclidean(std::move(coords), std::sqrt(2.0) / k);
}

// k points equally spaced on the unit circle, chordal metric, mesh_h = one
// chord step 2*sin(pi/k).
inline MetricSpace generate_circle(unsigned k) {
  if (k < 8) throw InvalidInput("generate_circle: k must be >= 8");
  std::vector<Coord> coords;
  coords.reserve(k);
  for (unsigned i = 0; i < k; ++i) {
    double t = 2.0 * M_PI * i / k;
    coords.push_back({std::cos(t), std::sin(t)});
  }
  return MetricSpace::euclidean(std::move(coords), 2.0 * std::sin(M_PI / k));
}

// Level-`level` Sierpinski carpet approximation: surviving cells of the
// middle-ninth deletion, points at surviving cell corners, intrinsic
// shortest-path metric over surviving cell edges, mesh_h = cell side.
inline MetricSpace generate_sierpinski_carpet(unsigned level) {
  if (level < 1 || level > 5) throw InvalidInput("generate_sierpinski_carpet: level must be in [1,5]");
  unsigned m = 1;
  for (unsigned i = 0; i < level; ++i) m *= 3;
  auto survives = [&](unsigned cx, unsigned cy) {
    for (unsigned x = cx, y = cy; x || y; x /= 3, y /= 3)
      if (x % 3 == 1 && y % 3 == 1) return false;
    return true;
  };
  double side = 1.0 / m;
  std::vector<std::int64_t> corner_id(static_cast<std::size_t>(m + 1) * (m + 1), -1);
  auto lat = [&](unsigned x, unsigned y) { return static_cast<std::size_t>(y) * (m + 1) + x; };
  std::vector<Coord> coords;
  auto corner = [&](unsigned x, unsigned y) {
    auto& id = corner_id[lat(x, y)];
    if (id < 0) {
      id = static_cast<std::int64_t>(coords.size());
      coords.push_back({x * side, y * side});
    }
    return static_cast<PointId>(id);
  };
  std::vector<GraphEdge> edges;
  std::vector<char> edge_h(static_cast<std::size_t>(m) * (m + 1), 0);  // (x, y): (x,y)-(x+1,y)
  std::vector<char> edge_v(static_cast<std::size_t>(m + 1) * m, 0);    // (x, y): (x,y)-(x,y+1)
  for (unsigned cy = 0; cy < m; ++cy)
    for (unsigned cx = 0; cx < m; ++cx) {
      if (!survives(cx, cy)) continue;
      // four sides of the cell, deduplicated via the edge marker arrays
      if (!edge_h[static_cast<std::size_t>(cy) * m + cx]) {
        edge_h[static_cast<std::size_t>(cy) * m + cx] = 1;
        edges.push_back({corner(cx, cy), corner(cx + 1, cy), side});
      }
      if (!edge_h[static_cast<std::size_t>(cy + 1) * m + cx]) {
        edge_h[static_cast<std::size_t>(cy + 1) * m + cx] = 1;
        edges.push_back({corner(cx, cy + 1), corner(cx + 1, cy + 1), side});
      }
      if (!edge_v[static_cast<std::size_t>(cx) * m + cy]) {
        edge_v[static_cast<std::size_t>(cx) * m + cy] = 1;
        edges.push_back({corner(cx, cy), corner(cx, cy + 1), side});
      }
      if (!edge_v[static_cast<std::size_t>(cx + 1) * m + cy]) {
        edge_v[static_cast<std::size_t>(cx + 1) * m + cy] = 1;
        edges.push_back({corner(cx + 1, cy), corner(cx + 1, cy + 1), side});
      }
    }
  std::uint32_t n = static_cast<std::uint32_t>(coords.size());
  return MetricSpace::from_graph(n, side, edges, std::move(coords));
}

// Number of surviving cells at this carpet level (8^level).
inline std::size_t carpet_cell_count(unsigned level) {
  std::size_t c = 1;
  for (unsigned i = 0; i < level; ++i) c *= 8;
  return c;
}

// Two k-grids sharing exactly one corner vertex, intrinsic metric.  The glue
// vertex is a metric cut point: the negative control for annular linear
// connectivity.
inline MetricSpace generate_glued_squares(unsigned k) {
  if (k < 2) throw InvalidInput("generate_glued_squares: k must be >= 2");
  std::vector<Coord> coords;
  auto id1 = [&](unsigned r, unsigned c) { return static_cast<PointId>(r * (k + 1) + c); };
  for (unsigned r = 0; r <= k; ++r)
    for (unsigned c = 0; c <= k; ++c)
      coords.push_back({static_cast<double>(c) / k, static_cast<double>(r) / k});
  PointId glue = id1(k, k);  // corner (1,1)
  std::uint32_t base2 = static_cast<std::uint32_t>(coords.size());
  std::vector<PointId> id2(static_cast<std::size_t>(k + 1) * (k + 1));
  for (unsigned r = 0; r <= k; ++r)
    for (unsigned c = 0; c <= k; ++c) {
      if (r == 0 && c == 0) {
        id2[0] = glue;
        continue;
      }
      id2[r * (k + 1) + c] = static_cast<PointId>(coords.size());
      coords.push_back({1.0 + static_cast<double>(c) / k, 1.0 + static_cast<double>(r) / k});
    }
  (void)base2;
  std::vector<GraphEdge> edges;
  double s = 1.0 / k, d = std::sqrt(2.0) / k;
  auto add_square = [&](auto id) {
    for (unsigned r = 0; r <= k; ++r)
      for (unsigned c = 0; c <= k; ++c) {
        if (c + 1 <= k) edges.push_back({id(r, c), id(r, c + 1), s});
        if (r + 1 <= k) edges.push_back({id(r, c), id(r + 1, c), s});
        if (r + 1 <= k && c + 1 <= k) edges.push_back({id(r, c), id(r + 1, c + 1), d});
        if (r + 1 <= k && c >= 1) edges.push_back({id(r, c), id(r + 1, c - 1), d});
      }
  };
  add_square(id1);
  add_square([&](unsigned r, unsigned c) { return id2[r * (k + 1) + c]; });
  std::uint32_t n = static_cast<std::uint32_t>(coords.size());
  return MetricSpace::from_graph(n, d, edges, std::move(coords));
}

// The glue vertex of generate_glued_squares(k).
inline PointId glued_squares_cut_point(unsigned k) { return static_cast<PointId>(k * (k + 1) + k); }

}  // namespace qcf
