#pragma once

// JSON reading and writing of polytopes, problems and decompositions.

#include "pyraquad/decomposition.hpp"
#include "pyraquad/error.hpp"
#include "pyraquad/geometry.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace pyraquad {

using Json = nlohmann::json;

/// Explicit form `{dim, vertices, faces: [{id, verts, facets}], top}` or a
/// builder: `{"simplex": d}`, `{"cube": d}`, `{"double_pyramid": true}`,
/// `{"product": [A, B]}`. Face ids may be arbitrary; they are renumbered.
/// Faces without a `facets` list get facets by vertex-set inclusion.
/// A string is taken as the path of a JSON file (relative to `base_dir`).
inline Polytope polytope_from_json(const Json& j, const std::filesystem::path& base_dir = {});

inline Polytope load_polytope(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open polytope file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  return polytope_from_json(j, path.parent_path());
}

inline Polytope polytope_from_json(const Json& j, const std::filesystem::path& base_dir) {
  try {
    if (j.is_string()) {
      std::filesystem::path p = j.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      return load_polytope(p);
    }
    if (!j.is_object()) fail(ErrorKind::ParseError, "polytope must be a JSON object");
    if (j.contains("simplex")) return simplex(j.at("simplex").get<int>());
    if (j.contains("cube")) return cube(j.at("cube").get<int>());
    if (j.contains("double_pyramid")) return double_pyramid();
    if (j.contains("product")) {
      const Json& parts = j.at("product");
      if (!parts.is_array() || parts.size() != 2) fail(ErrorKind::ParseError, "product needs two polytopes");
      return cartesian_product(polytope_from_json(parts[0], base_dir), polytope_from_json(parts[1], base_dir));
    }
    const Json& verts = j.at("vertices");
    const int nv = static_cast<int>(verts.size());
    const int d = j.contains("dim") ? j.at("dim").get<int>() : static_cast<int>(verts.at(0).size());
    Matrix pts(d, nv);
    for (int i = 0; i < nv; ++i) {
      if (static_cast<int>(verts[i].size()) != d)
        fail(ErrorKind::ParseError, "vertex " + std::to_string(i) + " does not have " + std::to_string(d) + " coordinates");
      for (int c = 0; c < d; ++c) pts(c, i) = verts[i][c].get<double>();
    }
    const Json& faces = j.at("faces");
    bool explicit_facets = true;
    for (const Json& f : faces)
      if (!f.contains("facets")) explicit_facets = false;
    if (!explicit_facets) {
      std::vector<std::vector<int>> sets;
      for (const Json& f : faces) sets.push_back(f.at("verts").get<std::vector<int>>());
      return Polytope::from_vertex_sets(pts, std::move(sets));
    }
    std::map<int, int> renumber;
    for (std::size_t i = 0; i < faces.size(); ++i) {
      const int id = faces[i].contains("id") ? faces[i].at("id").get<int>() : static_cast<int>(i);
      if (!renumber.emplace(id, static_cast<int>(i)).second)
        fail(ErrorKind::ParseError, "duplicate face id " + std::to_string(id));
    }
    auto lookup = [&](int id) {
      auto it = renumber.find(id);
      if (it == renumber.end()) fail(ErrorKind::ParseError, "unknown face id " + std::to_string(id));
      return it->second;
    };
    std::vector<Face> out(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) {
      Face& f = out[i];
      f.id = static_cast<int>(i);
      f.vertex_ids = faces[i].at("verts").get<std::vector<int>>();
      std::sort(f.vertex_ids.begin(), f.vertex_ids.end());
      f.dim = faces[i].contains("dim") ? faces[i].at("dim").get<int>()
                                       : Polytope::affine_rank(pts, f.vertex_ids);
      for (int g : faces[i].at("facets").get<std::vector<int>>()) f.facet_ids.push_back(lookup(g));
    }
    return Polytope(std::move(pts), std::move(out), lookup(j.at("top").get<int>()));
  } catch (const Json::exception& e) {
    fail(ErrorKind::ParseError, std::string("malformed polytope JSON: ") + e.what());
  }
}

inline Json polytope_to_json(const Polytope& p) {
  Json j;
  j["dim"] = p.ambient_dim();
  Json verts = Json::array();
  for (int i = 0; i < p.num_vertices(); ++i) {
    Json v = Json::array();
    for (int c = 0; c < p.ambient_dim(); ++c) v.push_back(p.vertices()(c, i));
    verts.push_back(v);
  }
  j["vertices"] = verts;
  Json faces = Json::array();
  for (const Face& f : p.faces())
    faces.push_back({{"id", f.id}, {"verts", f.vertex_ids}, {"facets", f.facet_ids}});
  j["faces"] = faces;
  j["top"] = p.top_id();
  return j;
}

/// Shared pairs as "i:j,i:j,...".
inline std::vector<std::pair<int, int>> parse_shared_pairs(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) fail(ErrorKind::ParseError, "shared pair '" + item + "' is not of the form i:j");
    try {
      out.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    } catch (const std::exception&) {
      fail(ErrorKind::ParseError, "shared pair '" + item + "' is not of the form i:j");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline Json piece_to_json(const HullPiece& p) {
  Json j;
  j["apex"] = p.apex_ids;
  j["base"] = p.base_ids;
  if (p.base_x) {
    j["base_x"] = p.base_x_ids;
    j["base_y"] = p.base_y_ids;
  }
  j["delta"] = p.descriptor.delta;
  j["s"] = p.s();
  j["r"] = p.r();
  j["multiplicity"] = p.multiplicity;
  j["measure"] = p.measure();
  return j;
}

inline Json pieces_to_json(const std::vector<HullPiece>& pieces) {
  Json arr = Json::array();
  double total = 0.0;
  for (const auto& p : pieces) {
    arr.push_back(piece_to_json(p));
    total += p.measure();
  }
  return {{"count", pieces.size()}, {"total_measure", total}, {"pieces", arr}};
}

}  // namespace pyraquad
