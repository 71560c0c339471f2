#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qcf/arc.hpp"
#include "qcf/space.hpp"

using namespace qcf;

namespace {

PointId grid_id(unsigned k, unsigned row, unsigned col) { return row * (k + 1) + col; }

// Brute-force oracles, O(m^4)-ish: fine for the small arcs used here.
double brute_diam(const MetricSpace& s, const std::vector<PointId>& pts, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  double best = 0;
  for (std::size_t a = i; a <= j; ++a)
    for (std::size_t b = a + 1; b <= j; ++b) best = std::max(best, s.dist(pts[a], pts[b]));
  return best;
}

double brute_lambda(const DiscreteArc& arc, std::optional<double> locality) {
  const auto& s = arc.space();
  double best = 0;
  bool any = false;
  for (std::size_t i = 0; i < arc.size(); ++i)
    for (std::size_t j = i + 1; j < arc.size(); ++j) {
      double d = s.dist(arc[i], arc[j]);
      if (d < s.mesh() * (1 - 1e-9)) continue;
      if (locality && d > *locality * (1 + 1e-9)) continue;
      any = true;
      best = std::max(best, brute_diam(s, arc.points(), i, j) / d);
    }
  return any ? best : 1.0;
}

double brute_circle_lambda(const DiscreteCircle& c) {
  const auto& s = c.space();
  std::size_t m = c.size();
  double best = 0;
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t v = u + 1; v < m; ++v) {
      double d = s.dist(c[u], c[v]);
      if (d < s.mesh() * (1 - 1e-9)) continue;
      // cw side u..v and ccw side v..u+m over the doubled index range
      std::vector<PointId> side1, side2;
      for (std::size_t t = u; t <= v; ++t) side1.push_back(c[t]);
      for (std::size_t t = v; t <= u + m; ++t) side2.push_back(c[t]);
      double d1 = 0, d2 = 0;
      for (std::size_t a = 0; a < side1.size(); ++a)
        for (std::size_t b = a + 1; b < side1.size(); ++b) d1 = std::max(d1, s.dist(side1[a], side1[b]));
      for (std::size_t a = 0; a < side2.size(); ++a)
        for (std::size_t b = a + 1; b < side2.size(); ++b) d2 = std::max(d2, s.dist(side2[a], side2[b]));
      best = std::max(best, std::min(d1, d2) / d);
    }
  return best;
}

// seeded random self-avoiding walk arc
DiscreteArc random_walk_arc(const MetricSpace& s, Rng& rng, std::size_t len) {
  while (true) {
    std::vector<PointId> pts{rng.below(s.size())};
    PointMask used(s.size());
    used.set(pts[0]);
    while (pts.size() < len) {
      auto nb = s.neighbors(pts.back());
      std::vector<PointId> free;
      for (PointId q : nb)
        if (!used.test(q)) free.push_back(q);
      if (free.empty()) break;
      PointId nxt = free[rng.below(static_cast<std::uint32_t>(free.size()))];
      pts.push_back(nxt);
      used.set(nxt);
    }
    if (pts.size() >= std::max<std::size_t>(len / 2, 2)) return DiscreteArc(s, std::move(pts));
  }
}

}  // namespace

TEST_CASE("subarc basics") {
  auto s = generate_grid_square(8);
  std::vector<PointId> row;
  for (unsigned c = 0; c <= 8; ++c) row.push_back(grid_id(8, 0, c));
  DiscreteArc a(s, row);

  CHECK(a.subarc(3, 3).size() == 1);  // possibly trivial
  CHECK(a.subarc(0, a.size() - 1).points() == a.points());
  CHECK(a.subarc(5, 2).points() == a.subarc(2, 5).points());
  CHECK_THROWS_AS(a.subarc(0, 99), InvalidInput);
}

TEST_CASE("diam") {
  auto s = generate_grid_square(8);
  DiscreteArc single(s, {0});
  CHECK(diam(single) == 0.0);

  std::vector<PointId> row;
  for (unsigned c = 0; c <= 8; ++c) row.push_back(grid_id(8, 0, c));
  CHECK(diam(DiscreteArc(s, row)) == Catch::Approx(1.0));

  // L-shape along two unit sides: (0,0)->(1,0)->(1,1); endpoints realize sqrt(2)
  std::vector<PointId> ell;
  for (unsigned c = 0; c <= 8; ++c) ell.push_back(grid_id(8, 0, c));
  for (unsigned r = 1; r <= 8; ++r) ell.push_back(grid_id(8, r, 8));
  CHECK(diam(DiscreteArc(s, ell)) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("measure_lambda against brute oracle") {
  auto s = generate_grid_square(8);

  // straight segment: geodesic, lambda = 1
  std::vector<PointId> seg;
  for (unsigned c = 0; c <= 8; ++c) seg.push_back(grid_id(8, 0, c));
  auto rep = measure_lambda(DiscreteArc(s, seg));
  CHECK(rep.lambda == Catch::Approx(1.0));

  // U-shape: three sides of the unit square
  std::vector<PointId> u;
  for (unsigned r = 0; r <= 8; ++r) u.push_back(grid_id(8, 8 - r, 0));
  for (unsigned c = 1; c <= 8; ++c) u.push_back(grid_id(8, 0, c));
  for (unsigned r = 1; r <= 8; ++r) u.push_back(grid_id(8, r, 8));
  DiscreteArc ua(s, u);
  double oracle = brute_lambda(ua, std::nullopt);
  auto urep = measure_lambda(ua);
  CHECK(urep.lambda == Catch::Approx(oracle).epsilon(1e-12));
  // the endpoint pair alone contributes sqrt(2)/1
  CHECK(urep.lambda >= std::sqrt(2.0) - 1e-12);

  // half circle on generate_circle(64): diameter-based constant is 1
  auto c = generate_circle(64);
  std::vector<PointId> half;
  for (PointId i = 0; i <= 32; ++i) half.push_back(i);
  DiscreteArc ha(c, half);
  double horacle = brute_lambda(ha, std::nullopt);
  auto hrep = measure_lambda(ha);
  CHECK(hrep.lambda == Catch::Approx(horacle).epsilon(1e-12));
  CHECK(hrep.lambda == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("measure_lambda locality monotone and diam bound") {
  auto s = generate_grid_square(12);
  Rng rng(42);
  for (int trial = 0; trial < 8; ++trial) {
    auto arc = random_walk_arc(s, rng, 40);
    if (arc.size() < 3) continue;
    auto g = measure_lambda(arc);
    auto l1 = measure_lambda(arc, 0.2);
    auto l2 = measure_lambda(arc, 0.5);
    CHECK(l1.lambda <= l2.lambda + 1e-12);
    CHECK(l2.lambda <= g.lambda + 1e-12);
    double de = s.dist(arc.front(), arc.back());
    if (de >= s.mesh()) CHECK(g.lambda >= diam(arc) / de - 1e-12);
    // cross-check against the brute oracle
    CHECK(g.lambda == Catch::Approx(brute_lambda(arc, std::nullopt)).epsilon(1e-12));
    CHECK(l2.lambda == Catch::Approx(brute_lambda(arc, 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("measure_circle_lambda") {
  auto c64s = generate_circle(64);
  std::vector<PointId> all(64);
  for (PointId i = 0; i < 64; ++i) all[i] = i;
  DiscreteCircle c64(c64s, all);
  double oracle = brute_circle_lambda(c64);
  auto rep = measure_circle_lambda(c64);
  CHECK(rep.lambda == Catch::Approx(oracle).epsilon(1e-12));

  // boundary cycle of the unit grid square: lambda <= 2
  auto s = generate_grid_square(8);
  std::vector<PointId> bd;
  for (unsigned c = 0; c < 8; ++c) bd.push_back(grid_id(8, 0, c));
  for (unsigned r = 0; r < 8; ++r) bd.push_back(grid_id(8, r, 8));
  for (unsigned c = 8; c > 0; --c) bd.push_back(grid_id(8, 8, c));
  for (unsigned r = 8; r > 0; --r) bd.push_back(grid_id(8, r, 0));
  DiscreteCircle bdc(s, bd);
  auto brep = measure_circle_lambda(bdc);
  CHECK(brep.lambda == Catch::Approx(brute_circle_lambda(bdc)).epsilon(1e-12));
  CHECK(brep.lambda <= 2.0);

  // 3-point circle: finite check over 3 pairs
  std::vector<double> eq = {0, 1, 1, 1, 0, 1, 1, 1, 0};
  auto tri_s = MetricSpace::from_matrix(3, 1.0, eq);
  DiscreteCircle tri(tri_s, {0, 1, 2});
  CHECK(measure_circle_lambda(tri).lambda == Catch::Approx(brute_circle_lambda(tri)).epsilon(1e-12));
}

TEST_CASE("check_follows") {
  auto s = generate_grid_square(8);
  std::vector<PointId> seg;
  for (unsigned c = 0; c <= 8; ++c) seg.push_back(grid_id(8, 0, c));
  DiscreteArc a(s, seg);

  auto self = check_follows(a, a, 1e-6);
  CHECK(self.ok);
  CHECK(self.max_displacement == 0.0);
  CHECK(min_follow_iota(a, a) == 0.0);

  // push one interior point off the row by 2 steps: displaced by 2/8 = 0.25
  std::vector<PointId> pushed = seg;
  pushed[4] = grid_id(8, 2, 4);
  // keep steps valid: replace with a detour row0->row1->row2->row1->row0
  pushed = {grid_id(8,0,0), grid_id(8,0,1), grid_id(8,0,2), grid_id(8,1,3), grid_id(8,2,4),
            grid_id(8,1,5), grid_id(8,0,6), grid_id(8,0,7), grid_id(8,0,8)};
  DiscreteArc b(s, pushed);
  double iota = 0.125;  // the detour reaches displacement 2/8
  auto res = check_follows(b, a, iota);
  CHECK_FALSE(res.ok);
  REQUIRE(res.witness.has_value());
  // witness really is farther than iota from every admissible subarc point
  CHECK(s.dist(res.witness->offending, a[res.witness->x]) > iota);

  auto res2 = check_follows(b, a, 0.26);
  CHECK(res2.ok);
  CHECK(min_follow_iota(b, a) == Catch::Approx(0.25).epsilon(1e-9));

  // check_follows true implies one-sided Hausdorff distance <= iota
  for (PointId z : b.points()) {
    CHECK(dist_point_to_set(s, z, a.points()) <= 0.26 * (1 + 1e-9));
  }
}

TEST_CASE("arc_separation") {
  auto s = generate_grid_square(8);
  std::vector<PointId> bottom, top;
  for (unsigned c = 0; c <= 8; ++c) bottom.push_back(grid_id(8, 0, c));
  for (unsigned c = 0; c <= 8; ++c) top.push_back(grid_id(8, 8, c));
  DiscreteArc jb(s, bottom), jt(s, top);
  CHECK(arc_separation(jb, jt, Absolute{}) == Catch::Approx(1.0));
  CHECK(arc_separation(jb, jb, Absolute{}) == 0.0);

  // relative mode needs non-endpoint interior points
  DiscreteArc two(s, {grid_id(8, 0, 0), grid_id(8, 0, 1)});
  CHECK_THROWS_AS(arc_separation(two, two, std::pair<PointId, PointId>{two.front(), two.back()}),
                  InvalidInput);

  // relative separation of a genuine split pair around shared endpoints
  std::vector<PointId> up = {grid_id(8, 0, 0), grid_id(8, 1, 1), grid_id(8, 1, 2), grid_id(8, 1, 3),
                             grid_id(8, 0, 4)};
  std::vector<PointId> dn = {grid_id(8, 0, 0), grid_id(8, 0, 1), grid_id(8, 0, 2), grid_id(8, 0, 3),
                             grid_id(8, 0, 4)};
  DiscreteArc ju(s, up), jd(s, dn);
  double eta = arc_separation(ju, jd, std::pair<PointId, PointId>{ju.front(), ju.back()});
  CHECK(eta > 0.0);
}

TEST_CASE("concatenate_to_circle") {
  auto cs = generate_circle(64);
  std::vector<PointId> half1, half2;
  for (PointId i = 0; i <= 32; ++i) half1.push_back(i);
  half2.push_back(0);
  for (PointId i = 63; i >= 32; --i) half2.push_back(i);
  DiscreteArc top(cs, half1), bottom(cs, half2);
  auto circ = concatenate_to_circle(top, bottom);
  CHECK(circ.size() == 64);

  // cutting at the shared endpoints returns the original point sets
  auto p0 = circ.position_of(0), p32 = circ.position_of(32);
  REQUIRE(p0.has_value());
  REQUIRE(p32.has_value());
  auto side1 = circ.cw_subarc(*p0, *p32);
  auto side2 = circ.cw_subarc(*p32, *p0);
  auto sorted = [](std::vector<PointId> v) { std::sort(v.begin(), v.end()); return v; };
  auto h1 = sorted(half1), h2 = sorted(half2);
  bool match_direct = sorted(side1.points()) == h1 && sorted(side2.points()) == h2;
  bool match_swapped = sorted(side1.points()) == h2 && sorted(side2.points()) == h1;
  CHECK((match_direct || match_swapped));

  // interior overlap detected
  std::vector<PointId> bad;
  bad.push_back(0);
  for (PointId i = 63; i >= 30; --i) bad.push_back(i);
  // bad ends at 30, not at 32: endpoint mismatch
  CHECK_THROWS_AS(concatenate_to_circle(top, DiscreteArc(cs, bad)), InvalidInput);
}
