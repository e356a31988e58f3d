#pragma once

// Polytopes given by vertices plus an explicit face lattice, affine frames
// of faces, distances to affine hulls and the Jacobian factor of convex
// hulls of two faces.

#include "pyraquad/error.hpp"
#include "pyraquad/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pyraquad {

struct Face {
  int id = -1;
  std::vector<int> vertex_ids;  // sorted, ascending
  int dim = 0;
  std::vector<int> facet_ids;
};

/// A bounded convex polytope: vertex coordinates (one column per vertex) and
/// the complete face lattice, including all 0-faces. Face ids equal their
/// position in `faces()`. Immutable once constructed.
class Polytope {
 public:
  Polytope() = default;

  /// Validating constructor. `faces[i].id` must equal i.
  Polytope(Matrix vertices, std::vector<Face> faces, int top)
      : vertices_(std::move(vertices)), faces_(std::move(faces)), top_(top) {
    validate();
  }

  /// Builds the lattice from face vertex sets alone: dimensions come from
  /// affine ranks, facet lists from inclusion. Missing 0-faces are added.
  static Polytope from_vertex_sets(Matrix vertices, std::vector<std::vector<int>> sets) {
    const int nv = static_cast<int>(vertices.cols());
    std::set<std::vector<int>> unique;
    for (auto s : sets) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      if (s.empty()) fail(ErrorKind::ValidationError, "empty face vertex set");
      unique.insert(std::move(s));
    }
    for (int v = 0; v < nv; ++v) unique.insert({v});
    std::vector<std::vector<int>> ordered(unique.begin(), unique.end());
    std::vector<int> dims(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      for (int v : ordered[i])
        if (v < 0 || v >= nv) fail(ErrorKind::ValidationError, "face vertex id out of range");
      dims[i] = affine_rank(vertices, ordered[i]);
    }
    std::vector<std::size_t> order(ordered.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dims[a] < dims[b];
    });
    std::vector<Face> faces(ordered.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      faces[pos].id = static_cast<int>(pos);
      faces[pos].vertex_ids = ordered[order[pos]];
      faces[pos].dim = dims[order[pos]];
    }
    int top = -1;
    for (auto& f : faces) {
      if (static_cast<int>(f.vertex_ids.size()) == nv) top = f.id;
      for (const auto& g : faces) {
        if (g.dim == f.dim - 1 &&
            std::includes(f.vertex_ids.begin(), f.vertex_ids.end(), g.vertex_ids.begin(),
                          g.vertex_ids.end()))
          f.facet_ids.push_back(g.id);
      }
    }
    if (top < 0) fail(ErrorKind::ValidationError, "no face contains every vertex");
    return Polytope(std::move(vertices), std::move(faces), top);
  }

  int ambient_dim() const { return static_cast<int>(vertices_.rows()); }
  int num_vertices() const { return static_cast<int>(vertices_.cols()); }
  int dim() const { return faces_.at(top_).dim; }
  const Matrix& vertices() const { return vertices_; }
  Vector vertex(int i) const { return vertices_.col(i); }
  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(int id) const { return faces_.at(id); }
  const Face& top() const { return faces_.at(top_); }
  int top_id() const { return top_; }

  std::optional<int> find_face(const std::vector<int>& sorted_vertex_ids) const {
    auto it = index_.find(sorted_vertex_ids);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Columns are the vertices of `f` in its vertex order.
  Matrix face_points(const Face& f) const {
    Matrix pts(vertices_.rows(), static_cast<Eigen::Index>(f.vertex_ids.size()));
    for (std::size_t i = 0; i < f.vertex_ids.size(); ++i)
      pts.col(static_cast<Eigen::Index>(i)) = vertices_.col(f.vertex_ids[i]);
    return pts;
  }

  bool is_simplex_face(const Face& f) const {
    return static_cast<int>(f.vertex_ids.size()) == f.dim + 1;
  }

  static int affine_rank(const Matrix& vertices, const std::vector<int>& ids) {
    if (ids.size() <= 1) return 0;
    Matrix diff(vertices.rows(), static_cast<Eigen::Index>(ids.size() - 1));
    for (std::size_t i = 1; i < ids.size(); ++i)
      diff.col(static_cast<Eigen::Index>(i - 1)) = vertices.col(ids[i]) - vertices.col(ids[0]);
    return numerical_rank(diff);
  }

 private:
  void validate() {
    const int nv = num_vertices();
    if (top_ < 0 || top_ >= static_cast<int>(faces_.size()))
      fail(ErrorKind::ValidationError, "top face id out of range");
    std::vector<bool> has_vertex_face(nv, false);
    for (std::size_t i = 0; i < faces_.size(); ++i) {
      Face& f = faces_[i];
      if (f.id != static_cast<int>(i)) fail(ErrorKind::ValidationError, "face ids must be 0..n-1");
      std::sort(f.vertex_ids.begin(), f.vertex_ids.end());
      if (f.vertex_ids.empty()) fail(ErrorKind::ValidationError, "face without vertices");
      for (int v : f.vertex_ids)
        if (v < 0 || v >= nv) fail(ErrorKind::ValidationError, "face vertex id out of range");
      if (affine_rank(vertices_, f.vertex_ids) != f.dim)
        fail(ErrorKind::ValidationError,
             "face " + std::to_string(f.id) + " dimension does not match the affine rank of its vertices");
      if (f.dim == 0) has_vertex_face[f.vertex_ids.front()] = true;
      if (!index_.emplace(f.vertex_ids, f.id).second)
        fail(ErrorKind::ValidationError, "duplicate face vertex set");
    }
    for (const Face& f : faces_) {
      if (f.dim >= 1 && f.facet_ids.empty())
        fail(ErrorKind::ValidationError, "face " + std::to_string(f.id) + " lists no facets");
      for (int g : f.facet_ids) {
        if (g < 0 || g >= static_cast<int>(faces_.size()))
          fail(ErrorKind::ValidationError, "facet id out of range");
        const Face& fg = faces_[g];
        if (fg.dim != f.dim - 1)
          fail(ErrorKind::ValidationError, "facet dimension must be one less than its face");
        if (!std::includes(f.vertex_ids.begin(), f.vertex_ids.end(), fg.vertex_ids.begin(),
                           fg.vertex_ids.end()))
          fail(ErrorKind::ValidationError, "facet vertices are not a subset of the face");
      }
    }
    for (int v = 0; v < nv; ++v)
      if (!has_vertex_face[v]) fail(ErrorKind::ValidationError, "missing 0-face for a vertex");
    if (static_cast<int>(faces_[top_].vertex_ids.size()) != nv)
      fail(ErrorKind::ValidationError, "top face must contain every vertex");
  }

  Matrix vertices_;
  std::vector<Face> faces_;
  int top_ = -1;
  std::map<std::vector<int>, int> index_;
};

// ---------------------------------------------------------------------------
// Builders

/// Simplex on the given points (columns), with the full lattice of all
/// nonempty vertex subsets.
inline Polytope simplex_from_points(const Matrix& pts) {
  const int n = static_cast<int>(pts.cols());
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  if (Polytope::affine_rank(pts, all) != n - 1)
    fail(ErrorKind::DegenerateFace, "simplex vertices are affinely dependent");
  std::vector<std::vector<int>> sets;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    sets.push_back(std::move(s));
  }
  return Polytope::from_vertex_sets(pts, std::move(sets));
}

/// Standard simplex [0, e_1, ..., e_d] in R^d.
inline Polytope simplex(int d) {
  Matrix pts = Matrix::Zero(d, d + 1);
  for (int i = 0; i < d; ++i) pts(i, i + 1) = 1.0;
  return simplex_from_points(pts);
}

/// Image of the unit d-cube under x -> origin + generators * x. Vertex ids
/// are binary codes: bit i of the id is coordinate i.
inline Polytope parallelotope(const Vector& origin, const Matrix& generators) {
  const int d = static_cast<int>(generators.cols());
  const int nv = 1 << d;
  Matrix pts(origin.size(), nv);
  for (int code = 0; code < nv; ++code) {
    Vector p = origin;
    for (int i = 0; i < d; ++i)
      if (code & (1 << i)) p += generators.col(i);
    pts.col(code) = p;
  }
  // Faces: each coordinate is fixed to 0, fixed to 1 or free.
  std::vector<std::vector<int>> sets;
  int total = 1;
  for (int i = 0; i < d; ++i) total *= 3;
  for (int t = 0; t < total; ++t) {
    std::vector<int> state(d);
    int rest = t;
    for (int i = 0; i < d; ++i) {
      state[i] = rest % 3;
      rest /= 3;
    }
    std::vector<int> s;
    for (int code = 0; code < nv; ++code) {
      bool ok = true;
      for (int i = 0; i < d && ok; ++i) {
        const int bit = (code >> i) & 1;
        if (state[i] == 0 && bit != 0) ok = false;
        if (state[i] == 1 && bit != 1) ok = false;
      }
      if (ok) s.push_back(code);
    }
    sets.push_back(std::move(s));
  }
  return Polytope::from_vertex_sets(pts, std::move(sets));
}

/// Unit cube [0,1]^d.
inline Polytope cube(int d) {
  return parallelotope(Vector::Zero(d), Matrix::Identity(d, d));
}

/// Same lattice, vertices mapped by x -> a x + b.
inline Polytope affine_image(const Polytope& p, const Matrix& a, const Vector& b) {
  Matrix pts = a * p.vertices();
  pts.colwise() += b;
  return Polytope(std::move(pts), p.faces(), p.top_id());
}

/// Convex polygon from vertices listed in cyclic order.
inline Polytope convex_polygon(const Matrix& pts) {
  const int n = static_cast<int>(pts.cols());
  std::vector<std::vector<int>> sets;
  for (int i = 0; i < n; ++i) sets.push_back({i, (i + 1) % n});
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  sets.push_back(all);
  return Polytope::from_vertex_sets(pts, std::move(sets));
}

/// Octahedron with the square v0..v3 in the plane y = 0 and apices v4, v5.
inline Polytope double_pyramid() {
  Matrix pts(3, 6);
  pts.col(0) << -1, 0, 0;
  pts.col(1) << 0, 0, 1;
  pts.col(2) << 1, 0, 0;
  pts.col(3) << 0, 0, -1;
  pts.col(4) << 0, 1, 0;
  pts.col(5) << 0, -1, 0;
  std::vector<std::vector<int>> sets;
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    sets.push_back({i, j});
    for (int apex : {4, 5}) {
      sets.push_back({i, apex});
      sets.push_back({i, j, apex});
    }
  }
  sets.push_back({0, 1, 2, 3, 4, 5});
  return Polytope::from_vertex_sets(pts, std::move(sets));
}

/// Cartesian product in R^(dx+dy). Vertex (i, j) gets id i*ny + j and face
/// (fx, fy) gets id fx*nfy + fy, so factors can be recovered arithmetically.
inline Polytope cartesian_product(const Polytope& px, const Polytope& py) {
  const int dx = px.ambient_dim();
  const int dy = py.ambient_dim();
  const int nvx = px.num_vertices();
  const int nvy = py.num_vertices();
  const int nfx = static_cast<int>(px.faces().size());
  const int nfy = static_cast<int>(py.faces().size());
  Matrix pts(dx + dy, nvx * nvy);
  for (int i = 0; i < nvx; ++i)
    for (int j = 0; j < nvy; ++j) {
      pts.col(i * nvy + j) << px.vertices().col(i), py.vertices().col(j);
    }
  std::vector<Face> faces(static_cast<std::size_t>(nfx) * nfy);
  for (int fx = 0; fx < nfx; ++fx) {
    for (int fy = 0; fy < nfy; ++fy) {
      const Face& a = px.face(fx);
      const Face& b = py.face(fy);
      Face& f = faces[static_cast<std::size_t>(fx) * nfy + fy];
      f.id = fx * nfy + fy;
      f.dim = a.dim + b.dim;
      for (int i : a.vertex_ids)
        for (int j : b.vertex_ids) f.vertex_ids.push_back(i * nvy + j);
      std::sort(f.vertex_ids.begin(), f.vertex_ids.end());
      for (int g : a.facet_ids) f.facet_ids.push_back(g * nfy + fy);
      for (int g : b.facet_ids) f.facet_ids.push_back(fx * nfy + g);
    }
  }
  return Polytope(std::move(pts), std::move(faces), px.top_id() * nfy + py.top_id());
}

/// The face as a polytope of its own. Local vertex i is face.vertex_ids[i].
inline Polytope subpolytope(const Polytope& p, int face_id) {
  const Face& root = p.face(face_id);
  std::map<int, int> local;
  for (std::size_t i = 0; i < root.vertex_ids.size(); ++i)
    local[root.vertex_ids[i]] = static_cast<int>(i);
  std::set<int> reach{face_id};
  std::vector<int> stack{face_id};
  while (!stack.empty()) {
    const int f = stack.back();
    stack.pop_back();
    for (int g : p.face(f).facet_ids)
      if (reach.insert(g).second) stack.push_back(g);
  }
  std::vector<int> ids(reach.begin(), reach.end());
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (p.face(a).dim != p.face(b).dim) return p.face(a).dim < p.face(b).dim;
    return a < b;
  });
  std::map<int, int> renumber;
  for (std::size_t i = 0; i < ids.size(); ++i) renumber[ids[i]] = static_cast<int>(i);
  std::vector<Face> faces(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Face& src = p.face(ids[i]);
    Face& f = faces[i];
    f.id = static_cast<int>(i);
    f.dim = src.dim;
    for (int v : src.vertex_ids) f.vertex_ids.push_back(local.at(v));
    for (int g : src.facet_ids) f.facet_ids.push_back(renumber.at(g));
  }
  return Polytope(p.face_points(root), std::move(faces), renumber.at(face_id));
}

// ---------------------------------------------------------------------------
// Frames, distances, hulls

struct AffineFrame {
  Vector origin;
  Matrix basis_t;  // spanning vertex differences, d x j
  Matrix basis_q;  // orthonormal, d x j
  Matrix factor_r; // j x j, upper triangular, positive diagonal
  double measure_scale = 1.0;

  int dim() const { return static_cast<int>(basis_q.cols()); }
};

/// Frame of an affine point set of known dimension. For a simplex (j+1
/// points) the basis consists of successive differences p_k - p_{k-1};
/// otherwise the first j independent differences p_k - p_0 are used.
inline AffineFrame affine_frame_of_points(const Matrix& pts, int dim) {
  AffineFrame frame;
  frame.origin = pts.col(0);
  const Eigen::Index d = pts.rows();
  if (dim == 0) {
    frame.basis_t = Matrix(d, 0);
    frame.basis_q = Matrix(d, 0);
    frame.factor_r = Matrix(0, 0);
    return frame;
  }
  if (pts.cols() == dim + 1) {
    frame.basis_t.resize(d, dim);
    for (int k = 1; k <= dim; ++k) frame.basis_t.col(k - 1) = pts.col(k) - pts.col(k - 1);
  } else {
    Matrix diff(d, pts.cols() - 1);
    for (Eigen::Index k = 1; k < pts.cols(); ++k) diff.col(k - 1) = pts.col(k) - pts.col(0);
    const auto cols = greedy_independent_columns(diff);
    if (static_cast<int>(cols.size()) < dim)
      fail(ErrorKind::DegenerateFace, "face vertices span fewer than its dimension");
    frame.basis_t.resize(d, dim);
    for (int k = 0; k < dim; ++k) frame.basis_t.col(k) = diff.col(cols[k]);
  }
  if (numerical_rank(frame.basis_t) < dim)
    fail(ErrorKind::DegenerateFace, "face vertex differences are rank deficient");
  ThinQR qr = thin_qr(frame.basis_t);
  frame.basis_q = std::move(qr.q);
  frame.factor_r = std::move(qr.r);
  frame.measure_scale = frame.factor_r.diagonal().prod();
  return frame;
}

inline AffineFrame affine_frame(const Polytope& poly, const Face& face) {
  return affine_frame_of_points(poly.face_points(face), face.dim);
}

inline double dist_point_to_aff(const Vector& x, const AffineFrame& frame) {
  Vector r = x - frame.origin;
  if (frame.dim() > 0) r -= frame.basis_q * (frame.basis_q.transpose() * r);
  return r.norm();
}

inline double dist_point_to_aff(const Vector& x, const Polytope& poly, const Face& face) {
  return dist_point_to_aff(x, affine_frame(poly, face));
}

/// Euclidean distance between the polytope face `face` and the affine
/// hull of the given frame.
inline double dist_face_to_aff(const Polytope& poly, const Face& face, const AffineFrame& frame) {
  Matrix proj = poly.face_points(face);
  for (Eigen::Index i = 0; i < proj.cols(); ++i) {
    Vector r = proj.col(i) - frame.origin;
    if (frame.dim() > 0) r -= frame.basis_q * (frame.basis_q.transpose() * r);
    proj.col(i) = r;
  }
  return min_norm_point(proj).norm();
}

struct HullDescriptor {
  int face_a = -1;  // ids in the owning polytope, -1 for standalone polytopes
  int face_b = -1;
  double delta = 0.0;
  int s = 0;
  int r = 0;
};

namespace detail {
inline Matrix hull_matrix(const AffineFrame& a, const AffineFrame& b) {
  Matrix m(a.origin.size(), a.dim() + b.dim() + 1);
  m << a.basis_t, b.basis_t, b.origin - a.origin;
  return m;
}
}  // namespace detail

/// aff(A) and aff(B) are disjoint and H_A, H_B meet only in 0, i.e. the
/// matrix [T_A, T_B, w - v] has full column rank.
inline bool check_hull_assumption(const AffineFrame& a, const AffineFrame& b) {
  const Matrix m = detail::hull_matrix(a, b);
  if (m.cols() > m.rows()) return false;
  return numerical_rank(m) == m.cols();
}

inline bool check_hull_assumption(const Polytope& poly, const Face& a, const Face& b) {
  return check_hull_assumption(affine_frame(poly, a), affine_frame(poly, b));
}

inline bool check_hull_assumption(const Polytope& a, const Polytope& b) {
  return check_hull_assumption(affine_frame(a, a.top()), affine_frame(b, b.top()));
}

/// delta = |det R| / (|det R_A| |det R_B|) with R the triangular factor of
/// [T_A, T_B, w - v].
inline HullDescriptor hull_descriptor(const AffineFrame& a, const AffineFrame& b) {
  if (!check_hull_assumption(a, b))
    fail(ErrorKind::AssumptionViolated, "affine hulls of the two faces are not skew");
  const Matrix m = detail::hull_matrix(a, b);
  const double scale = largest_column_norm(m);
  Eigen::HouseholderQR<Matrix> qr(m);
  double det = 1.0;
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    const double rii = std::abs(qr.matrixQR()(i, i));
    if (rii < kRankTolerance * scale) fail(ErrorKind::DegenerateHull, "convex hull is degenerate");
    det *= rii;
  }
  HullDescriptor h;
  h.s = a.dim();
  h.r = b.dim();
  h.delta = det / (a.measure_scale * b.measure_scale);
  if (!(h.delta > 0.0) || !std::isfinite(h.delta))
    fail(ErrorKind::DegenerateHull, "non-positive hull factor");
  return h;
}

inline HullDescriptor hull_descriptor(const Polytope& poly, const Face& a, const Face& b) {
  HullDescriptor h = hull_descriptor(affine_frame(poly, a), affine_frame(poly, b));
  h.face_a = a.id;
  h.face_b = b.id;
  return h;
}

inline HullDescriptor hull_descriptor(const Polytope& a, const Polytope& b) {
  return hull_descriptor(affine_frame(a, a.top()), affine_frame(b, b.top()));
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Volume of the simplex spanned by the columns of `pts`.
inline double simplex_volume(const Matrix& pts) {
  const Eigen::Index j = pts.cols() - 1;
  if (j <= 0) return 1.0;
  Matrix diff(pts.rows(), j);
  for (Eigen::Index k = 1; k <= j; ++k) diff.col(k - 1) = pts.col(k) - pts.col(0);
  return abs_det_r(diff) / factorial(static_cast<int>(j));
}

// ---------------------------------------------------------------------------
// Parallelotope recognition

struct ParallelotopeShape {
  Vector origin;
  Matrix generators;           // d x j
  std::vector<int> generator_ids;  // point index of origin + generator k
};

/// Checks whether the points form origin + {sum of a subset of generators},
/// with generators p_g - p_origin for g in `candidate` (exactly j of them).
inline std::optional<ParallelotopeShape> match_parallelotope(const Matrix& pts, int origin,
                                                             const std::vector<int>& candidate) {
  const int j = static_cast<int>(candidate.size());
  const int n = static_cast<int>(pts.cols());
  if (n != (1 << j)) return std::nullopt;
  ParallelotopeShape shape;
  shape.origin = pts.col(origin);
  shape.generators.resize(pts.rows(), j);
  for (int k = 0; k < j; ++k) shape.generators.col(k) = pts.col(candidate[k]) - shape.origin;
  shape.generator_ids = candidate;
  if (numerical_rank(shape.generators) < j) return std::nullopt;
  const double scale = largest_column_norm(shape.generators);
  std::vector<bool> used(n, false);
  for (int code = 0; code < n; ++code) {
    Vector target = shape.origin;
    for (int k = 0; k < j; ++k)
      if (code & (1 << k)) target += shape.generators.col(k);
    int hit = -1;
    for (int i = 0; i < n; ++i)
      if (!used[i] && (pts.col(i) - target).norm() <= 1e-10 * std::max(1.0, scale)) hit = i;
    if (hit < 0) return std::nullopt;
    used[hit] = true;
  }
  return shape;
}

/// Tries every j-subset of the other points as generators around `origin`.
inline std::optional<ParallelotopeShape> detect_parallelotope(const Matrix& pts, int dim, int origin = 0) {
  const int n = static_cast<int>(pts.cols());
  if (dim < 1 || n != (1 << dim)) return std::nullopt;
  std::vector<int> others;
  for (int i = 0; i < n; ++i)
    if (i != origin) others.push_back(i);
  std::vector<int> pick(dim);
  std::vector<bool> mask(others.size(), false);
  std::fill(mask.begin(), mask.begin() + dim, true);
  do {
    pick.clear();
    for (std::size_t i = 0; i < others.size(); ++i)
      if (mask[i]) pick.push_back(others[i]);
    if (auto shape = match_parallelotope(pts, origin, pick)) return shape;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return std::nullopt;
}

/// Parallelotope recognition for a face with a lattice: generators are the
/// edges at the face's first vertex.
inline std::optional<ParallelotopeShape> face_parallelotope(const Polytope& poly, const Face& face) {
  if (face.dim < 1 || face.vertex_ids.size() != (std::size_t{1} << face.dim)) return std::nullopt;
  const int v0 = face.vertex_ids.front();
  std::vector<int> candidate;
  std::set<int> reach{face.id};
  std::vector<int> stack{face.id};
  while (!stack.empty()) {
    const int f = stack.back();
    stack.pop_back();
    const Face& g = poly.face(f);
    if (g.dim == 1) {
      if (g.vertex_ids[0] == v0 || g.vertex_ids[1] == v0) {
        const int other = g.vertex_ids[0] == v0 ? g.vertex_ids[1] : g.vertex_ids[0];
        const auto it = std::find(face.vertex_ids.begin(), face.vertex_ids.end(), other);
        candidate.push_back(static_cast<int>(it - face.vertex_ids.begin()));
      }
      continue;
    }
    for (int h : g.facet_ids)
      if (reach.insert(h).second) stack.push_back(h);
  }
  if (static_cast<int>(candidate.size()) != face.dim) return std::nullopt;
  std::sort(candidate.begin(), candidate.end());
  return match_parallelotope(poly.face_points(face), 0, candidate);
}

}  // namespace pyraquad
