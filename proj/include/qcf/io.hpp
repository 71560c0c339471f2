#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcf/arc.hpp"
#include "qcf/core.hpp"
#include "qcf/invariants.hpp"
#include "qcf/space.hpp"

namespace qcf {

// Space schema:
//   { "n": int, "mesh_h": float, "coords": [[x,y],...] | null,
//     "metric": "explicit", "dist": [row-major floats]       }
//   { ..., "metric": "graph", "edges": [[a,b,w],...] }
// Floats are written with 17 significant digits (exact double round-trip);
// output is byte-stable for fixed inputs.

namespace jsonio {

inline void write_coords(std::ostringstream& os, const MetricSpace& s) {
  if (!s.has_coords()) {
    os << "null";
    return;
  }
  os << "[";
  for (PointId p = 0; p < s.size(); ++p) {
    if (p) os << ",";
    os << "[" << fmt_double(s.coords()[p][0]) << "," << fmt_double(s.coords()[p][1]) << "]";
  }
  os << "]";
}

}  // namespace jsonio

inline std::string save_space(const MetricSpace& s) {
  std::ostringstream os;
  os << "{\"n\":" << s.size() << ",\"mesh_h\":" << fmt_double(s.mesh()) << ",\"coords\":";
  jsonio::write_coords(os, s);
  if (s.kind() == MetricSpace::Kind::Graph) {
    os << ",\"metric\":\"graph\",\"edges\":[";
    auto edges = s.graph_edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (i) os << ",";
      os << "[" << edges[i].a << "," << edges[i].b << "," << fmt_double(edges[i].w) << "]";
    }
    os << "]}";
  } else {
    os << ",\"metric\":\"explicit\",\"dist\":[";
    for (PointId a = 0; a < s.size(); ++a)
      for (PointId b = 0; b < s.size(); ++b) {
        if (a || b) os << ",";
        os << fmt_double(s.dist(a, b));
      }
    os << "]}";
  }
  return os.str();
}

inline MetricSpace load_space(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("space document is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("mesh_h") || !j.contains("metric"))
    throw InvalidInput("space document missing required keys (n, mesh_h, metric)");
  std::uint32_t n = j.at("n").get<std::uint32_t>();
  double mesh = j.at("mesh_h").get<double>();
  std::optional<std::vector<Coord>> coords;
  if (j.contains("coords") && !j.at("coords").is_null()) {
    std::vector<Coord> cc;
    for (const auto& e : j.at("coords")) cc.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    coords = std::move(cc);
  }
  std::string metric = j.at("metric").get<std::string>();
  if (metric == "explicit") {
    if (!j.contains("dist")) throw InvalidInput("explicit metric requires a dist array");
    std::vector<double> dist = j.at("dist").get<std::vector<double>>();
    return MetricSpace::from_matrix(n, mesh, std::move(dist), std::move(coords));
  }
  if (metric == "graph") {
    if (!j.contains("edges")) throw InvalidInput("graph metric requires an edges array");
    std::vector<GraphEdge> edges;
    for (const auto& e : j.at("edges"))
      edges.push_back({e.at(0).get<PointId>(), e.at(1).get<PointId>(), e.at(2).get<double>()});
    return MetricSpace::from_graph(n, mesh, edges, std::move(coords));
  }
  throw InvalidInput("unknown metric kind: " + metric);
}

// Arcs/circles: { "space_ref": id, "points": [int,...], "cyclic": bool }
inline std::string save_arc(const std::vector<PointId>& pts, bool cyclic, const std::string& space_ref) {
  std::ostringstream os;
  os << "{\"space_ref\":\"" << space_ref << "\",\"points\":[";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) os << ",";
    os << pts[i];
  }
  os << "],\"cyclic\":" << (cyclic ? "true" : "false") << "}";
  return os.str();
}

inline std::string save_arc(const DiscreteArc& a, const std::string& space_ref) {
  return save_arc(a.points(), false, space_ref);
}
inline std::string save_arc(const DiscreteCircle& c, const std::string& space_ref) {
  return save_arc(c.points(), true, space_ref);
}

struct LoadedArc {
  std::vector<PointId> points;
  bool cyclic = false;
  std::string space_ref;
};

inline LoadedArc load_arc(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("arc document is not valid JSON: ") + e.what());
  }
  if (!j.contains("points")) throw InvalidInput("arc document missing points");
  LoadedArc out;
  out.points = j.at("points").get<std::vector<PointId>>();
  out.cyclic = j.value("cyclic", false);
  out.space_ref = j.value("space_ref", std::string{});
  return out;
}

// Reports serialize as flat JSON objects.
inline std::string save_report(const ConstructionReport& r) {
  std::ostringstream os;
  os << "{\"lambda_measured\":" << fmt_double(r.lambda);
  os << ",\"locality_eps\":";
  if (r.locality) os << fmt_double(*r.locality);
  else os << "\"global\"";
  os << ",\"follows_iota\":";
  if (r.follows_iota) os << fmt_double(*r.follows_iota);
  else os << "\"not-applicable\"";
  os << ",\"separation_eta\":";
  if (r.separation_eta) os << fmt_double(*r.separation_eta);
  else os << "\"not-applicable\"";
  os << ",\"notes\":" << nlohmann::json(r.notes).dump() << "}";
  return os.str();
}

inline std::string save_invariants_report(const InvariantsReport& r) {
  std::ostringstream os;
  os << "{\"N\":" << r.doubling.N;
  if (r.doubling.N_exact) os << ",\"N_exact\":" << *r.doubling.N_exact;
  os << ",\"L_lc\":" << fmt_double(r.lc.L) << ",\"L_alc\":" << fmt_double(r.alc.L);
  os << ",\"alc_ok\":" << (r.alc.ok() ? "true" : "false");
  os << ",\"witnesses\":[";
  bool first = true;
  for (const auto& w : r.lc.witnesses) {
    if (!first) os << ",";
    first = false;
    os << "{\"kind\":\"lc\",\"x\":" << w.x << ",\"y\":" << w.y
       << ",\"contribution\":" << fmt_double(w.contribution)
       << ",\"witness_diam\":" << fmt_double(w.witness_diam) << "}";
  }
  for (const auto& w : r.alc.witnesses) {
    if (!first) os << ",";
    first = false;
    os << "{\"kind\":\"alc\",\"p\":" << w.sample.p << ",\"r\":" << fmt_double(w.sample.r)
       << ",\"x\":" << w.sample.x << ",\"y\":" << w.sample.y << ",\"L\":" << fmt_double(w.Lprime) << "}";
  }
  os << "],\"failures\":[";
  for (std::size_t i = 0; i < r.alc.failures.size(); ++i) {
    const auto& f = r.alc.failures[i];
    if (i) os << ",";
    os << "{\"p\":" << f.p << ",\"r\":" << fmt_double(f.r) << ",\"x\":" << f.x << ",\"y\":" << f.y
       << ",\"note\":\"local cut point at scale r near p\"}";
  }
  os << "],\"samples\":" << r.samples << ",\"seed\":" << r.seed << "}";
  return os.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write file: " + path);
  out << content;
}

}  // namespace qcf
