#pragma once

// Pyramidal decomposition of a polytope with respect to a set of singular
// vertices, merging of lattice paths into convex hulls, triangulations, and
// the closed-form decompositions of products of two simplices / two cubes.

#include "pyraquad/error.hpp"
#include "pyraquad/geometry.hpp"
#include "pyraquad/quad1d.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace pyraquad {

/// Picks the apex among the singular vertices of a face (`candidates`,
/// sorted ascending). Must depend on the face only.
using ApexRule = std::function<int(const Polytope&, const Face&, const std::vector<int>& candidates)>;

inline int lowest_vertex_id(const Polytope&, const Face&, const std::vector<int>& candidates) {
  return candidates.front();
}

struct LatticeNode {
  int face_id = -1;
  int level = 0;
  int apex = -1;               // vertex id, -1 for leaves and dead ends
  std::vector<int> children;   // node indices
  bool leaf = false;
};

/// DAG of the faces visited by the recursive pyramid splitting. Faces reached
/// from several parents are shared nodes.
struct PyramidalLattice {
  Polytope poly;
  std::vector<int> singular;   // sorted vertex ids
  std::vector<LatticeNode> nodes;
  int root = 0;
  std::vector<int> leaves;     // node indices, in discovery order

  int num_levels() const {
    int top = 0;
    for (const auto& n : nodes) top = std::max(top, n.level);
    return top + 1;
  }
};

namespace detail {

struct LatticeBuilder {
  const Polytope& poly;
  const std::vector<bool>& marked;
  const ApexRule& rule;
  bool stop_at_vertices;
  std::optional<AffineFrame> singular_frame;
  double scale = 1.0;
  PyramidalLattice& lat;
  std::map<int, int> memo;

  int visit(int face_id) {
    if (auto it = memo.find(face_id); it != memo.end()) return it->second;
    const Face& f = poly.face(face_id);
    std::vector<int> candidates;
    for (int v : f.vertex_ids)
      if (marked[v]) candidates.push_back(v);
    const int index = static_cast<int>(lat.nodes.size());
    memo[face_id] = index;
    LatticeNode node;
    node.face_id = face_id;
    node.level = poly.dim() - f.dim;
    const bool is_leaf = candidates.empty() || (stop_at_vertices && f.dim == 0);
    if (is_leaf) {
      node.leaf = true;
      lat.nodes.push_back(node);
      lat.leaves.push_back(index);
      if (singular_frame && candidates.empty()) {
        const double dist = dist_face_to_aff(poly, f, *singular_frame);
        if (dist <= kRankTolerance * scale)
          fail(ErrorKind::AssumptionPSViolated,
               "face " + std::to_string(face_id) + " has no singular vertex but touches the singular plane");
      }
      return index;
    }
    node.apex = rule(poly, f, candidates);
    if (!std::binary_search(candidates.begin(), candidates.end(), node.apex))
      fail(ErrorKind::InvalidArgument, "apex rule returned a non-singular vertex");
    lat.nodes.push_back(node);
    std::vector<int> children;
    for (int g : f.facet_ids) {
      const Face& fg = poly.face(g);
      if (std::binary_search(fg.vertex_ids.begin(), fg.vertex_ids.end(), lat.nodes[index].apex)) continue;
      children.push_back(visit(g));
    }
    lat.nodes[index].children = std::move(children);
    return index;
  }
};

inline double coordinate_scale(const Polytope& p) {
  double s = 0.0;
  for (int i = 0; i < p.num_vertices(); ++i)
    for (int j = i + 1; j < p.num_vertices(); ++j)
      s = std::max(s, (p.vertices().col(i) - p.vertices().col(j)).norm());
  return s > 0.0 ? s : 1.0;
}

}  // namespace detail

/// Recursive pyramid splitting from the top face: a face with singular
/// vertices is split into pyramids over its facets that avoid the chosen
/// apex; faces without singular vertices are leaves.
inline PyramidalLattice pyra_decomp(const Polytope& poly, std::vector<int> singular_vertex_ids,
                                    const ApexRule& rule = lowest_vertex_id) {
  std::sort(singular_vertex_ids.begin(), singular_vertex_ids.end());
  singular_vertex_ids.erase(std::unique(singular_vertex_ids.begin(), singular_vertex_ids.end()),
                            singular_vertex_ids.end());
  if (singular_vertex_ids.empty()) fail(ErrorKind::InvalidArgument, "singular vertex set is empty");
  std::vector<bool> marked(poly.num_vertices(), false);
  for (int v : singular_vertex_ids) {
    if (v < 0 || v >= poly.num_vertices()) fail(ErrorKind::InvalidArgument, "singular vertex id out of range");
    marked[v] = true;
  }
  Matrix spts(poly.ambient_dim(), static_cast<Eigen::Index>(singular_vertex_ids.size()));
  for (std::size_t i = 0; i < singular_vertex_ids.size(); ++i)
    spts.col(static_cast<Eigen::Index>(i)) = poly.vertex(singular_vertex_ids[i]);
  const int sdim = Polytope::affine_rank(poly.vertices(), singular_vertex_ids);
  // A frame needs affinely independent points; pick them greedily.
  std::vector<int> basis_ids{0};
  {
    Matrix diff(spts.rows(), spts.cols() - 1);
    for (Eigen::Index k = 1; k < spts.cols(); ++k) diff.col(k - 1) = spts.col(k) - spts.col(0);
    for (int c : greedy_independent_columns(diff)) basis_ids.push_back(c + 1);
  }
  Matrix frame_pts(spts.rows(), static_cast<Eigen::Index>(basis_ids.size()));
  for (std::size_t i = 0; i < basis_ids.size(); ++i)
    frame_pts.col(static_cast<Eigen::Index>(i)) = spts.col(basis_ids[i]);

  PyramidalLattice lat;
  lat.poly = poly;
  lat.singular = singular_vertex_ids;
  detail::LatticeBuilder builder{poly, marked, rule, false, affine_frame_of_points(frame_pts, sdim),
                                 detail::coordinate_scale(poly), lat, {}};
  lat.root = builder.visit(poly.top_id());
  return lat;
}

struct DecompPath {
  std::vector<int> apex_ids;  // v_{sigma_0}, ..., v_{sigma_l}
  int leaf_face = -1;
};

/// Every (path, leaf) pair of the lattice; each one is an iterated pyramid.
inline std::vector<std::pair<DecompPath, Face>> enumerate_pieces(const PyramidalLattice& lat) {
  std::vector<std::pair<DecompPath, Face>> out;
  std::vector<int> apices;
  std::function<void(int)> walk = [&](int node) {
    const LatticeNode& n = lat.nodes[node];
    if (n.leaf) {
      out.push_back({DecompPath{apices, n.face_id}, lat.poly.face(n.face_id)});
      return;
    }
    apices.push_back(n.apex);
    for (int c : n.children) walk(c);
    apices.pop_back();
  };
  walk(lat.root);
  return out;
}

/// Simplices (vertex id lists) of the triangulation obtained by splitting
/// every face at an apex until 0-faces remain.
inline std::vector<std::vector<int>> triangulate(const Polytope& poly, const ApexRule& rule = lowest_vertex_id) {
  if (poly.dim() == 0) return {{poly.top().vertex_ids.front()}};
  std::vector<bool> marked(poly.num_vertices(), true);
  PyramidalLattice lat;
  lat.poly = poly;
  for (int v = 0; v < poly.num_vertices(); ++v) lat.singular.push_back(v);
  detail::LatticeBuilder builder{poly, marked, rule, true, std::nullopt, 1.0, lat, {}};
  lat.root = builder.visit(poly.top_id());
  std::vector<std::vector<int>> out;
  for (auto& [path, leaf] : enumerate_pieces(lat)) {
    std::vector<int> s = path.apex_ids;
    s.push_back(leaf.vertex_ids.front());
    out.push_back(std::move(s));
  }
  return out;
}

/// j-dimensional measure of a face (1 for a vertex).
inline double face_volume(const Polytope& poly, const Face& face) {
  if (face.dim == 0) return 1.0;
  if (poly.is_simplex_face(face)) return simplex_volume(poly.face_points(face));
  const Polytope sub = subpolytope(poly, face.id);
  double vol = 0.0;
  for (const auto& s : triangulate(sub)) {
    Matrix pts(sub.ambient_dim(), static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = sub.vertex(s[i]);
    const double v = simplex_volume(pts);
    if (!(v > 0.0)) fail(ErrorKind::DegenerateFace, "degenerate simplex in face triangulation");
    vol += v;
  }
  return vol;
}

inline double volume(const Polytope& poly) { return face_volume(poly, poly.top()); }

// ---------------------------------------------------------------------------
// Convex-hull pieces

/// conv(A, B) with A on the singular plane and B a face free of singular
/// vertices. For products, B = F_x x F_y and the factors are kept.
struct HullPiece {
  Polytope apex;
  std::vector<int> apex_ids;     // ids of apex vertices in the decomposed polytope
  Polytope base;
  int base_face = -1;            // id in the decomposed polytope, -1 if not available
  std::vector<int> base_ids;
  std::optional<Polytope> base_x;
  std::optional<Polytope> base_y;
  std::vector<int> base_x_ids;   // vertex ids in P_x
  std::vector<int> base_y_ids;   // vertex ids in P_y
  HullDescriptor descriptor;
  double apex_volume = 1.0;
  double base_volume = 1.0;
  int multiplicity = 1;          // lattice paths merged into this piece

  int s() const { return descriptor.s; }
  int r() const { return descriptor.r; }

  /// Volume of conv(A, B): delta vol(A) vol(B) Beta(s+1, r+1).
  double measure() const {
    return descriptor.delta * apex_volume * base_volume * beta_fn(s() + 1.0, r() + 1.0);
  }
};

namespace detail {

inline double apex_region_volume(const Polytope& apex) {
  if (apex.dim() == 0) return 1.0;
  if (apex.is_simplex_face(apex.top())) return simplex_volume(apex.vertices());
  if (auto shape = face_parallelotope(apex, apex.top())) return abs_det_r(shape->generators);
  return face_volume(apex, apex.top());
}

inline HullPiece make_piece(Polytope apex, std::vector<int> apex_ids, Polytope base, int base_face,
                            std::vector<int> base_ids) {
  HullPiece piece;
  piece.descriptor = hull_descriptor(apex, base);
  piece.descriptor.face_b = base_face;
  piece.apex_volume = apex_region_volume(apex);
  piece.base_volume = face_volume(base, base.top());
  piece.apex = std::move(apex);
  piece.apex_ids = std::move(apex_ids);
  piece.base = std::move(base);
  piece.base_face = base_face;
  piece.base_ids = std::move(base_ids);
  return piece;
}

inline Matrix points_of(const Polytope& p, const std::vector<int>& ids) {
  Matrix pts(p.ambient_dim(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = p.vertex(ids[i]);
  return pts;
}

/// Vertex ids reordered to follow the vertex order of `region`.
inline std::vector<int> match_ids(const Matrix& region, const Matrix& pts, const std::vector<int>& ids) {
  std::vector<int> out;
  for (Eigen::Index c = 0; c < region.cols(); ++c) {
    Eigen::Index best = 0;
    double dist = (pts.col(0) - region.col(c)).norm();
    for (Eigen::Index i = 1; i < pts.cols(); ++i) {
      const double di = (pts.col(i) - region.col(c)).norm();
      if (di < dist) {
        dist = di;
        best = i;
      }
    }
    out.push_back(ids[best]);
  }
  return out;
}

}  // namespace detail

/// One hull piece per leaf when the apex simplices of all paths to the leaf
/// tile a simplex or a parallelotope (checked by volume); otherwise one piece
/// per path.
inline std::vector<HullPiece> merge_paths(const PyramidalLattice& lat) {
  const Polytope& poly = lat.poly;
  std::vector<std::pair<DecompPath, Face>> all = enumerate_pieces(lat);
  std::map<int, std::vector<DecompPath>> by_leaf;
  std::vector<int> leaf_order;
  for (auto& [path, leaf] : all) {
    if (!by_leaf.count(leaf.id)) leaf_order.push_back(leaf.id);
    by_leaf[leaf.id].push_back(path);
  }
  std::vector<HullPiece> pieces;
  for (int leaf_id : leaf_order) {
    const auto& paths = by_leaf[leaf_id];
    const Face& leaf = poly.face(leaf_id);
    Polytope base = subpolytope(poly, leaf_id);
    auto per_path = [&]() {
      for (const auto& path : paths) {
        pieces.push_back(detail::make_piece(simplex_from_points(detail::points_of(poly, path.apex_ids)),
                                            path.apex_ids, base, leaf_id, leaf.vertex_ids));
      }
    };
    if (paths.size() == 1) {
      per_path();
      continue;
    }
    std::set<int> union_ids;
    double tiled = 0.0;
    for (const auto& path : paths) {
      union_ids.insert(path.apex_ids.begin(), path.apex_ids.end());
      tiled += simplex_volume(detail::points_of(poly, path.apex_ids));
    }
    const int dim = static_cast<int>(paths.front().apex_ids.size()) - 1;
    std::vector<int> ids(union_ids.begin(), union_ids.end());
    const Matrix pts = detail::points_of(poly, ids);
    std::optional<Polytope> region;
    double hull_volume = 0.0;
    if (static_cast<int>(ids.size()) == dim + 1) {
      region = simplex_from_points(pts);
      hull_volume = simplex_volume(pts);
    } else if (auto shape = detect_parallelotope(pts, dim, 0)) {
      region = parallelotope(shape->origin, shape->generators);
      hull_volume = abs_det_r(shape->generators);
    }
    if (!region || std::abs(hull_volume - tiled) > 1e-9 * tiled) {
      per_path();
      continue;
    }
    std::vector<int> region_ids = detail::match_ids(region->vertices(), pts, ids);
    HullPiece piece = detail::make_piece(std::move(*region), std::move(region_ids), base, leaf_id, leaf.vertex_ids);
    piece.multiplicity = static_cast<int>(paths.size());
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

/// Drops pieces whose measure is negligible against the total.
inline std::vector<HullPiece> drop_degenerate(std::vector<HullPiece> pieces) {
  double total = 0.0;
  for (const auto& p : pieces) total += p.measure();
  std::vector<HullPiece> kept;
  for (auto& p : pieces)
    if (p.measure() >= 1e-14 * total) kept.push_back(std::move(p));
  return kept;
}

// ---------------------------------------------------------------------------
// Products of two polytopes

namespace detail {

inline void check_shared(const Polytope& px, const Polytope& py, const std::vector<std::pair<int, int>>& shared) {
  if (px.ambient_dim() != py.ambient_dim())
    fail(ErrorKind::DimensionMismatch, "polytopes live in different ambient dimensions");
  if (shared.empty()) fail(ErrorKind::BadConformity, "polytopes share no vertex");
  std::vector<int> ix;
  std::vector<int> iy;
  double scale = std::max(coordinate_scale(px), coordinate_scale(py));
  for (auto [i, j] : shared) {
    if (i < 0 || i >= px.num_vertices() || j < 0 || j >= py.num_vertices())
      fail(ErrorKind::BadConformity, "shared vertex index out of range");
    if ((px.vertex(i) - py.vertex(j)).norm() > 1e-10 * scale)
      fail(ErrorKind::BadConformity,
           "shared vertices " + std::to_string(i) + ":" + std::to_string(j) + " have different coordinates");
    ix.push_back(i);
    iy.push_back(j);
  }
  std::sort(ix.begin(), ix.end());
  std::sort(iy.begin(), iy.end());
  if (std::adjacent_find(ix.begin(), ix.end()) != ix.end() || std::adjacent_find(iy.begin(), iy.end()) != iy.end())
    fail(ErrorKind::BadConformity, "a vertex is listed twice in the shared pairs");
  if (!px.find_face(ix) || !py.find_face(iy))
    fail(ErrorKind::BadConformity, "shared vertices do not form a common face");
}

inline void attach_factors(HullPiece& piece, const Polytope& px, const Polytope& py) {
  const int nfy = static_cast<int>(py.faces().size());
  const int fx = piece.base_face / nfy;
  const int fy = piece.base_face % nfy;
  piece.base_x = subpolytope(px, fx);
  piece.base_y = subpolytope(py, fy);
  piece.base_x_ids = px.face(fx).vertex_ids;
  piece.base_y_ids = py.face(fy).vertex_ids;
}

}  // namespace detail

/// Decomposition of P_x x P_y with singular vertices (v, v) over the shared
/// vertex pairs (index in P_x, index in P_y).
inline std::vector<HullPiece> product_decomp(const Polytope& px, const Polytope& py,
                                             const std::vector<std::pair<int, int>>& shared,
                                             const ApexRule& rule = lowest_vertex_id) {
  detail::check_shared(px, py, shared);
  const Polytope prod = cartesian_product(px, py);
  std::vector<int> singular;
  for (auto [i, j] : shared) singular.push_back(i * py.num_vertices() + j);
  const PyramidalLattice lat = pyra_decomp(prod, singular, rule);
  std::vector<HullPiece> pieces = merge_paths(lat);
  for (auto& p : pieces) detail::attach_factors(p, px, py);
  return drop_degenerate(std::move(pieces));
}

/// Lattice of P_x x P_y for inspection (DOT export, path counts).
inline PyramidalLattice product_lattice(const Polytope& px, const Polytope& py,
                                        const std::vector<std::pair<int, int>>& shared,
                                        const ApexRule& rule = lowest_vertex_id) {
  detail::check_shared(px, py, shared);
  std::vector<int> singular;
  for (auto [i, j] : shared) singular.push_back(i * py.num_vertices() + j);
  return pyra_decomp(cartesian_product(px, py), singular, rule);
}

/// Closed-form decomposition of S x T for simplices sharing vertices 0..k:
/// one pyramid over S_I x T_I' per subset I of {0..k}, empty products dropped.
inline std::vector<HullPiece> two_simplices_decomp(int n, int m, int k, const Polytope& sx, const Polytope& sy) {
  if (sx.num_vertices() != n + 1 || sx.dim() != n || sy.num_vertices() != m + 1 || sy.dim() != m)
    fail(ErrorKind::InvalidArgument, "inputs must be simplices of the stated dimensions");
  if (k < 0 || k > std::min(n, m)) fail(ErrorKind::InvalidArgument, "k must satisfy 0 <= k <= min(n, m)");
  std::vector<std::pair<int, int>> shared;
  for (int i = 0; i <= k; ++i) shared.emplace_back(i, i);
  detail::check_shared(sx, sy, shared);

  const int ny = m + 1;
  const int d = sx.ambient_dim();
  Matrix apex_pts(2 * d, k + 1);
  std::vector<int> apex_ids;
  for (int i = 0; i <= k; ++i) {
    apex_pts.col(i) << sx.vertex(i), sx.vertex(i);
    apex_ids.push_back(i * ny + i);
  }
  const Polytope apex = simplex_from_points(apex_pts);

  std::vector<HullPiece> pieces;
  for (unsigned mask = 0; mask < (1u << (k + 1)); ++mask) {
    std::vector<int> keep_x;
    std::vector<int> keep_y;
    for (int i = 0; i <= n; ++i)
      if (i > k || !(mask & (1u << i))) keep_x.push_back(i);
    for (int i = 0; i <= m; ++i)
      if (i > k || (mask & (1u << i))) keep_y.push_back(i);
    if (keep_x.empty() || keep_y.empty()) continue;
    const int fx = *sx.find_face(keep_x);
    const int fy = *sy.find_face(keep_y);
    Polytope bx = subpolytope(sx, fx);
    Polytope by = subpolytope(sy, fy);
    std::vector<int> base_ids;
    for (int i : keep_x)
      for (int j : keep_y) base_ids.push_back(i * ny + j);
    HullPiece piece = detail::make_piece(apex, apex_ids, cartesian_product(bx, by),
                                         fx * static_cast<int>(sy.faces().size()) + fy, base_ids);
    piece.base_x = std::move(bx);
    piece.base_y = std::move(by);
    piece.base_x_ids = keep_x;
    piece.base_y_ids = keep_y;
    pieces.push_back(std::move(piece));
  }
  return drop_degenerate(std::move(pieces));
}

/// S_x = [0, e_1, ..., e_n] and S_y = [0, e_1, ..., e_k, -e_(k+1), ..., -e_m]
/// in R^max(n,m); they share exactly the vertices 0..k.
inline std::pair<Polytope, Polytope> simplex_pair(int n, int m, int k) {
  if (n < 1 || m < 1 || k < 0 || k > std::min(n, m))
    fail(ErrorKind::InvalidArgument, "simplex pair needs n, m >= 1 and 0 <= k <= min(n, m)");
  const int d = std::max(n, m);
  Matrix px = Matrix::Zero(d, n + 1);
  Matrix py = Matrix::Zero(d, m + 1);
  for (int i = 1; i <= n; ++i) px(i - 1, i) = 1.0;
  for (int i = 1; i <= m; ++i) py(i - 1, i) = i <= k ? 1.0 : -1.0;
  return {simplex_from_points(px), simplex_from_points(py)};
}

/// Number of nonempty pyramids for two simplices of dimensions n, m sharing
/// vertices 0..k.
inline int two_simplices_count(int n, int m, int k) {
  int sigma = 0;
  if (n == k && m == k) sigma = 2;
  else if ((n > k && m == k) || (n == k && m > k)) sigma = 1;
  return (1 << (k + 1)) - sigma;
}

/// C_x = [0,1]^d and C_y = [0,1]^k x [-1,0]^(d-k), sharing [0,1]^k x {0}.
inline Polytope cube_pair_x(int d) { return cube(d); }

inline Polytope cube_pair_y(int d, int k) {
  Matrix a = Matrix::Identity(d, d);
  for (int i = k; i < d; ++i) a(i, i) = -1.0;
  return affine_image(cube(d), a, Vector::Zero(d));
}

/// Shared vertex pairs of the cube pair: codes with no bit set beyond k.
inline std::vector<std::pair<int, int>> cube_pair_shared(int d, int k) {
  std::vector<std::pair<int, int>> shared;
  for (int code = 0; code < (1 << d); ++code)
    if ((code >> k) == 0) shared.emplace_back(code, code);
  return shared;
}

inline int two_cubes_count(int d, int k) {
  if (k == 0) return 2 * d;
  int p = 1;
  for (int i = 0; i < k - 1; ++i) p *= 3;
  return (6 * d - 4 * k) * p;
}

/// Closed-form decomposition of C_x x C_y into conv(A_F, F). In each
/// coordinate pair (x_i, y_i) a leaf factor is one of the faces below of
/// the squares S = [0,1]^2 (i < k) or T = [0,1] x [-1,0] (i >= k); A_F is
/// the cube spanned by the diagonal segments in the coordinates where the
/// leaf has an edge E or vertex V factor.
inline std::vector<HullPiece> two_cubes_decomp(int d, int k) {
  if (d < 1 || k < 0 || k > d) fail(ErrorKind::InvalidArgument, "two_cubes_decomp needs 0 <= k <= d, d >= 1");
  enum Factor { S, E2, E3, V2, V3, T, G2, G3 };
  const Polytope cx = cube_pair_x(d);
  const Polytope cy = cube_pair_y(d, k);
  const int ny = cy.num_vertices();
  const int nfy = static_cast<int>(cy.faces().size());

  // Per-coordinate state: -1 free, otherwise the fixed code bit.
  auto x_state = [](Factor f) {
    switch (f) {
      case E2: case V2: case G2: return 1;
      case V3: return 0;
      default: return -1;
    }
  };
  auto y_state = [](Factor f) {
    switch (f) {
      case E3: case V3: case G3: return 1;  // y = 1 on S, y = -1 on T
      case V2: return 0;
      default: return -1;
    }
  };
  auto face_of = [&](const Polytope& c, const std::vector<int>& state) {
    std::vector<int> ids;
    for (int code = 0; code < (1 << d); ++code) {
      bool ok = true;
      for (int i = 0; i < d && ok; ++i)
        if (state[i] >= 0 && ((code >> i) & 1) != state[i]) ok = false;
      if (ok) ids.push_back(code);
    }
    return *c.find_face(ids);
  };

  std::vector<std::vector<Factor>> leaves;
  std::vector<Factor> current(d);
  std::function<void(int, int, int)> rec = [&](int i, int nv, int ng) {
    if (i == d) {
      if (nv + ng == 1) leaves.push_back(current);
      return;
    }
    const std::vector<Factor> options =
        i < k ? std::vector<Factor>{S, E2, E3, V2, V3} : std::vector<Factor>{T, G2, G3};
    for (Factor f : options) {
      const int nv2 = nv + (f == V2 || f == V3);
      const int ng2 = ng + (f == G2 || f == G3);
      if (nv2 + ng2 > 1) continue;
      current[i] = f;
      rec(i + 1, nv2, ng2);
    }
  };
  rec(0, 0, 0);

  std::vector<HullPiece> pieces;
  for (const auto& leaf : leaves) {
    std::vector<int> xs(d);
    std::vector<int> ys(d);
    std::vector<int> sigma;
    for (int i = 0; i < d; ++i) {
      xs[i] = x_state(leaf[i]);
      ys[i] = y_state(leaf[i]);
      if (leaf[i] == E2 || leaf[i] == E3 || leaf[i] == V2 || leaf[i] == V3) sigma.push_back(i);
    }
    const int fx = face_of(cx, xs);
    const int fy = face_of(cy, ys);
    const int ell = static_cast<int>(sigma.size());
    Polytope apex;
    std::vector<int> apex_ids;
    if (ell == 0) {
      apex = simplex_from_points(Matrix::Zero(2 * d, 1));
      apex_ids.push_back(0);
    } else {
      Matrix gens = Matrix::Zero(2 * d, ell);
      for (int j = 0; j < ell; ++j) {
        gens(sigma[j], j) = 1.0;
        gens(d + sigma[j], j) = 1.0;
      }
      apex = parallelotope(Vector::Zero(2 * d), gens);
      for (int code = 0; code < (1 << ell); ++code) {
        int c = 0;
        for (int j = 0; j < ell; ++j)
          if (code & (1 << j)) c |= 1 << sigma[j];
        apex_ids.push_back(c * ny + c);
      }
    }
    Polytope bx = subpolytope(cx, fx);
    Polytope by = subpolytope(cy, fy);
    std::vector<int> base_ids;
    for (int i : cx.face(fx).vertex_ids)
      for (int j : cy.face(fy).vertex_ids) base_ids.push_back(i * ny + j);
    std::sort(base_ids.begin(), base_ids.end());
    HullPiece piece = detail::make_piece(std::move(apex), std::move(apex_ids), cartesian_product(bx, by),
                                         fx * nfy + fy, std::move(base_ids));
    piece.base_x_ids = cx.face(fx).vertex_ids;
    piece.base_y_ids = cy.face(fy).vertex_ids;
    piece.base_x = std::move(bx);
    piece.base_y = std::move(by);
    int paths = 1;
    for (int j = 2; j <= ell; ++j) paths *= j;
    piece.multiplicity = paths;
    pieces.push_back(std::move(piece));
  }
  return drop_degenerate(std::move(pieces));
}

// ---------------------------------------------------------------------------
// Membership

/// Coordinates of z in conv(A, F_x x F_y) for a piece whose apex and base
/// factors are simplices: z = sum c_i a_i + (sum e_i x_i, sum f_j y_j) with
/// sum c + sum e = 1 and sum e = sum f. Returns c, e, f stacked, or nothing
/// if the system is singular.
inline std::optional<Vector> hull_coordinates(const HullPiece& piece, const Vector& z) {
  if (!piece.base_x || !piece.base_y) fail(ErrorKind::InvalidArgument, "piece has no product base");
  const Polytope& a = piece.apex;
  const Polytope& bx = *piece.base_x;
  const Polytope& by = *piece.base_y;
  if (!a.is_simplex_face(a.top()) || !bx.is_simplex_face(bx.top()) || !by.is_simplex_face(by.top()))
    fail(ErrorKind::InvalidArgument, "membership coordinates need simplicial apex and base factors");
  const int d = bx.ambient_dim();
  const int na = a.num_vertices();
  const int nx = bx.num_vertices();
  const int ny = by.num_vertices();
  const int n = na + nx + ny;
  Matrix m = Matrix::Zero(2 * d + 2, n);
  Vector rhs(2 * d + 2);
  rhs << z, 1.0, 0.0;
  m.block(0, 0, 2 * d, na) = a.vertices();
  m.block(0, na, d, nx) = bx.vertices();
  m.block(d, na + nx, d, ny) = by.vertices();
  m.block(2 * d, 0, 1, na + nx).setOnes();
  m.block(2 * d + 1, na, 1, nx).setOnes();
  m.block(2 * d + 1, na + nx, 1, ny).setConstant(-1.0);
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  if (qr.rank() < n) return std::nullopt;
  Vector c = qr.solve(rhs);
  if ((m * c - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm())) return std::nullopt;
  return c;
}

/// z lies in the piece up to `tol` on every coordinate.
inline bool contains(const HullPiece& piece, const Vector& z, double tol = 1e-9) {
  const auto c = hull_coordinates(piece, z);
  if (!c) return false;
  return c->minCoeff() >= -tol;
}

// ---------------------------------------------------------------------------
// Export

/// Graphviz rendering of the lattice; node labels list the face vertices
/// with the chosen apex first.
inline std::string to_dot(const PyramidalLattice& lat) {
  std::ostringstream os;
  os << "digraph pyramidal_lattice {\n";
  for (std::size_t i = 0; i < lat.nodes.size(); ++i) {
    const auto& n = lat.nodes[i];
    std::vector<int> ids = lat.poly.face(n.face_id).vertex_ids;
    if (n.apex >= 0) {
      std::stable_partition(ids.begin(), ids.end(), [&](int v) { return v == n.apex; });
    }
    os << "  n" << i << " [label=\"[";
    for (std::size_t j = 0; j < ids.size(); ++j) os << (j ? " " : "") << ids[j];
    os << "]\"" << (n.leaf ? ", shape=box" : "") << "];\n";
  }
  for (std::size_t i = 0; i < lat.nodes.size(); ++i)
    for (int c : lat.nodes[i].children) os << "  n" << i << " -> n" << c << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace pyraquad
