#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "qcf/arc.hpp"
#include "qcf/core.hpp"
#include "qcf/graph.hpp"
#include "qcf/space.hpp"

namespace qcf {

// Estimators for the hypotheses: doubling constant N, linear connectivity L,
// annular linear connectivity L.  Samplers with exact small-case oracles --
// working constants, not certified global ones.

struct DoublingSample {
  PointId center;
  double r;
  int greedy;
  std::optional<int> exact;
};

struct DoublingReport {
  int N = 1;                         // max greedy cover size over samples
  std::optional<int> N_exact;        // max exact cover size (n <= 200 only)
  std::vector<DoublingSample> samples;
};

// Greedy minimal-ish cover of B(x,r) by balls of radius r/2 centered at points
// of S; repeatedly picks the center covering most uncovered points.  An upper
// bound on the true N.  For n <= 200 an exact branch-and-bound minimum is also
// computed.
inline DoublingReport doubling_constant(const MetricSpace& s, const std::vector<double>& radii,
                                        const std::vector<PointId>& centers) {
  if (radii.empty()) throw InvalidInput("doubling_constant: empty radii set");
  for (double r : radii)
    if (!geq(r, 2 * s.mesh()))
      throw InvalidInput("doubling_constant: radius " + fmt_double(r) + " below 2*mesh_h");
  DoublingReport rep;
  for (PointId x : centers) {
    for (double r : radii) {
      std::vector<PointId> target;
      for (PointId p = 0; p < s.size(); ++p)
        if (s.dist(x, p) < r) target.push_back(p);
      if (target.empty()) continue;
      // candidate centers: anything that can cover a target point
      std::vector<PointId> cands;
      std::vector<std::vector<std::uint32_t>> covers;  // indices into target
      for (PointId y = 0; y < s.size(); ++y) {
        if (s.dist(x, y) >= 1.5 * r + s.mesh()) continue;
        std::vector<std::uint32_t> c;
        for (std::uint32_t t = 0; t < target.size(); ++t)
          if (s.dist(y, target[t]) < r / 2) c.push_back(t);
        if (!c.empty()) {
          cands.push_back(y);
          covers.push_back(std::move(c));
        }
      }
      // greedy
      std::vector<char> covered(target.size(), 0);
      std::size_t ncov = 0;
      int used = 0;
      while (ncov < target.size()) {
        std::size_t best_i = covers.size();
        std::size_t best_gain = 0;
        for (std::size_t i = 0; i < covers.size(); ++i) {
          std::size_t gain = 0;
          for (auto t : covers[i])
            if (!covered[t]) ++gain;
          if (gain > best_gain) {
            best_gain = gain;
            best_i = i;
          }
        }
        if (best_i == covers.size())
          throw VerificationFailure("doubling cover stalled (uncoverable point)");
        for (auto t : covers[best_i])
          if (!covered[t]) {
            covered[t] = 1;
            ++ncov;
          }
        ++used;
      }
      // cover validity: every target point within r/2 of a chosen center is
      // what the loop guarantees; re-check count
      if (ncov != target.size()) throw VerificationFailure("doubling greedy cover invalid");
      DoublingSample sample{x, r, used, std::nullopt};
      if (s.size() <= 200) {
        // exact minimum via branch and bound over the uncovered point with the
        // fewest candidates
        std::vector<std::vector<std::uint32_t>> covering_of(target.size());
        for (std::size_t i = 0; i < covers.size(); ++i)
          for (auto t : covers[i]) covering_of[t].push_back(static_cast<std::uint32_t>(i));
        int best = used;
        long budget = 10000000;
        std::vector<char> cov2(target.size(), 0);
        auto count_uncovered = [&]() {
          std::size_t c = 0;
          for (auto v : cov2)
            if (!v) ++c;
          return c;
        };
        std::function<void(int)> rec = [&](int usedn) {
          if (budget-- <= 0) return;
          if (usedn >= best) return;
          std::uint32_t pick = static_cast<std::uint32_t>(target.size());
          std::size_t fewest = SIZE_MAX;
          for (std::uint32_t t = 0; t < target.size(); ++t)
            if (!cov2[t] && covering_of[t].size() < fewest) {
              fewest = covering_of[t].size();
              pick = t;
            }
          if (pick == target.size()) {
            best = usedn;
            return;
          }
          for (auto ci : covering_of[pick]) {
            std::vector<std::uint32_t> newly;
            for (auto t : covers[ci])
              if (!cov2[t]) {
                cov2[t] = 1;
                newly.push_back(t);
              }
            rec(usedn + 1);
            for (auto t : newly) cov2[t] = 0;
          }
        };
        (void)count_uncovered;
        rec(0);
        if (budget <= 0)
          sample.exact = std::nullopt;  // budget exhausted: report greedy only
        else
          sample.exact = best;
        if (sample.exact) rep.N_exact = std::max(rep.N_exact.value_or(1), *sample.exact);
      }
      rep.N = std::max(rep.N, used);
      rep.samples.push_back(std::move(sample));
    }
  }
  if (rep.samples.empty()) throw InvalidInput("doubling_constant: no nonempty sampled ball");
  return rep;
}

// ---------------------------------------------------------------------------

struct LcWitness {
  PointId x, y;
  double contribution;           // (diam(witness) - 2*mesh)/d, floored at 1
  double witness_diam;
  std::vector<PointId> arc;
};

struct LcReport {
  double L = 1.0;
  std::vector<LcWitness> witnesses;
};

// Smallest D in a geometric grid (ratio 2^(1/4)) such that x and y connect
// within {z : max(d(z,x), d(z,y)) <= D}; contribution uses the additive
// 2*mesh_h slack before division.
inline LcReport linear_connectivity(const MetricSpace& s, const std::vector<std::pair<PointId, PointId>>& pairs) {
  LcReport rep;
  const double ratio = std::pow(2.0, 0.25);
  for (auto [x, y] : pairs) {
    double d = s.dist(x, y);
    if (!geq(d, s.mesh())) throw InvalidInput("linear_connectivity: pair below mesh_h");
    double cap = std::max(s.diameter(), d) * ratio;
    std::optional<std::vector<PointId>> path;
    for (double D = d; D <= cap * (1 + kRelTol); D *= ratio) {
      PointMask region(s.size());
      for (PointId z = 0; z < s.size(); ++z)
        if (leq(std::max(s.dist(z, x), s.dist(z, y)), D)) region.set(z);
      path = shortest_path_in(s, region, x, y);
      if (path) break;
    }
    if (!path) throw ConstructionFailure("linear_connectivity: pair never connects (disconnected space?)");
    double wd = diam_of(s, *path);
    double contrib = std::max(1.0, (wd - 2 * s.mesh()) / d);
    rep.L = std::max(rep.L, contrib);
    rep.witnesses.push_back({x, y, contrib, wd, std::move(*path)});
  }
  return rep;
}

// ---------------------------------------------------------------------------

struct AlcSampleSpec {
  PointId p;
  double r;
  PointId x, y;  // in A(p, r, 2r)
};

struct AlcWitness {
  AlcSampleSpec sample;
  double Lprime;                 // smallest grid value that connects
  std::vector<PointId> arc;      // witness inside A(p, r/L', 2L'r)
};

struct AlcFailure {
  PointId p;
  double r;
  PointId x, y;
};

struct AlcReport {
  double L = 1.0;
  std::vector<AlcWitness> witnesses;
  std::vector<AlcFailure> failures;  // "local cut point at scale r near p"
  bool ok() const { return failures.empty(); }
};

// Smallest L' (geometric grid, ratio 2^(1/4)) such that x and y connect within
// the sub-step-graph induced on A(p, r/L', 2L'r).
inline AlcReport annular_linear_connectivity(const MetricSpace& s, const std::vector<AlcSampleSpec>& samples) {
  AlcReport rep;
  const double ratio = std::pow(2.0, 0.25);
  for (const auto& sm : samples) {
    if (!geq(sm.r, 4 * s.mesh())) throw InvalidInput("annular_linear_connectivity: r below 4*mesh_h");
    {
      double dx = s.dist(sm.p, sm.x), dy = s.dist(sm.p, sm.y);
      if (!geq(dx, sm.r) || !leq(dx, 2 * sm.r) || !geq(dy, sm.r) || !leq(dy, 2 * sm.r))
        throw InvalidInput("annular_linear_connectivity: test pair not in A(p,r,2r)");
    }
    bool done = false;
    for (double Lp = 1.0;; Lp *= ratio) {
      double rin = sm.r / Lp, rout = 2 * Lp * sm.r;
      PointMask region(s.size());
      for (PointId z = 0; z < s.size(); ++z) {
        double d = s.dist(z, sm.p);
        if (geq(d, rin) && leq(d, rout)) region.set(z);
      }
      auto path = shortest_path_in(s, region, sm.x, sm.y);
      if (path) {
        // witness arc lies inside the reported annulus by construction
        for (PointId z : *path) {
          double d = s.dist(z, sm.p);
          if (!geq(d, rin) || !leq(d, rout))
            throw VerificationFailure("ALC witness left its annulus");
        }
        rep.L = std::max(rep.L, Lp);
        rep.witnesses.push_back({sm, Lp, std::move(*path)});
        done = true;
        break;
      }
      if (rin <= s.mesh() / 4 && rout >= s.diameter()) break;  // annulus maximal, still split
    }
    if (!done) rep.failures.push_back({sm.p, sm.r, sm.x, sm.y});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sampling drivers.
// ---------------------------------------------------------------------------

struct WorkingConstants {
  double L_lc = 1.0;
  double L_alc = 1.0;
  int N = 1;
  double L() const { return std::max(L_lc, L_alc); }
};

struct InvariantsReport {
  DoublingReport doubling;
  LcReport lc;
  AlcReport alc;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  WorkingConstants working() const {
    return {lc.L, alc.L, doubling.N};
  }
};

// Deterministic seeded sampling.  ALC centers are probed both randomly and
// along shortest paths between sampled pairs, so metric cut points that every
// connecting path crosses are found deterministically.
inline InvariantsReport estimate_invariants(const MetricSpace& s, std::size_t samples, std::uint64_t seed) {
  InvariantsReport rep;
  rep.samples = samples;
  rep.seed = seed;
  Rng rng(seed ^ 0xA11CE5);
  const std::uint32_t n = s.size();
  const double mesh = s.mesh();
  const double diam = s.diameter();

  // doubling
  {
    std::vector<PointId> centers;
    std::size_t nc = std::min<std::size_t>(std::max<std::size_t>(samples / 4, 1), 24);
    for (std::size_t i = 0; i < nc; ++i) centers.push_back(rng.below(n));
    std::vector<double> radii;
    for (double r = 2 * mesh; r <= diam / 2 || radii.empty(); r *= 2) radii.push_back(r);
    rep.doubling = doubling_constant(s, radii, centers);
  }

  // linear connectivity pairs
  {
    std::vector<std::pair<PointId, PointId>> pairs;
    std::size_t np = std::max<std::size_t>(samples, 4);
    std::size_t guard = 0;
    while (pairs.size() < np && guard++ < np * 50) {
      PointId x = rng.below(n), y = rng.below(n);
      if (x == y || !geq(s.dist(x, y), mesh)) continue;
      pairs.emplace_back(x, y);
    }
    rep.lc = linear_connectivity(s, pairs);
  }

  // annular linear connectivity
  {
    std::vector<AlcSampleSpec> specs;
    auto try_make_spec = [&](PointId p, double r) -> std::optional<AlcSampleSpec> {
      std::vector<PointId> ann;
      for (PointId z = 0; z < n; ++z) {
        double d = s.dist(z, p);
        if (geq(d, r) && leq(d, 2 * r)) ann.push_back(z);
      }
      if (ann.size() < 2) return std::nullopt;
      // farthest pair heuristic: most demanding test pair, deterministic
      PointId x = ann[0];
      for (PointId z : ann)
        if (s.dist(z, ann[0]) > s.dist(x, ann[0])) x = z;
      PointId y = x;
      double best = -1;
      for (PointId z : ann)
        if (s.dist(z, x) > best) {
          best = s.dist(z, x);
          y = z;
        }
      if (x == y) return std::nullopt;
      return AlcSampleSpec{p, r, x, y};
    };
    std::size_t na = std::max<std::size_t>(samples / 2, 4);
    std::size_t guard = 0;
    while (specs.size() < na && guard++ < na * 50) {
      PointId p = rng.below(n);
      double t = rng.unit();
      double rmax = std::max(4 * mesh, diam / 3);
      double r = 4 * mesh * std::pow(rmax / (4 * mesh), t);
      if (auto spec = try_make_spec(p, r)) specs.push_back(*spec);
    }
    // deterministic probes along sampled shortest paths: a cut point lies on
    // every connecting path, so it gets probed directly
    PointMask all(n, true);
    std::size_t nprobe = std::max<std::size_t>(samples / 4, 2);
    std::size_t probed = 0, attempts = 0;
    while (probed < nprobe && attempts++ < nprobe * 100) {
      PointId x = rng.below(n), y = rng.below(n);
      if (x == y || s.dist(x, y) < std::min(8 * mesh, s.diameter() / 2)) continue;
      ++probed;
      auto path = shortest_path_in(s, all, x, y);
      if (!path) continue;
      // probe every interior path vertex: a metric cut point lies on every
      // connecting path, so it cannot be skipped
      std::size_t stride = path->size() > 66 ? path->size() / 64 : 1;
      for (std::size_t t = 1; t + 1 < path->size(); t += stride) {
        PointId p = (*path)[t];
        for (double r = 4 * mesh; r <= s.dist(x, y) / 2; r *= 2) {
          if (auto spec = try_make_spec(p, r)) specs.push_back(*spec);
        }
      }
    }
    rep.alc = annular_linear_connectivity(s, specs);
  }
  return rep;
}

// Modest-sample working constants for the construction pipelines.
inline WorkingConstants estimate_working_constants(const MetricSpace& s, std::uint64_t seed) {
  return estimate_invariants(s, 12, seed).working();
}

}  // namespace qcf
