#pragma once

// Quadrature rules on faces. Reference simplex rules live on the ordered
// simplex {0 <= x_n <= ... <= x_1 <= 1}; cube rules on [0,1]^n.

#include "pyraquad/decomposition.hpp"
#include "pyraquad/error.hpp"
#include "pyraquad/geometry.hpp"
#include "pyraquad/quad1d.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace pyraquad {

enum class RuleSource { DuffyTensor, CubeTensor, GeneralizedGaussFile, Triangulated };

inline const char* to_string(RuleSource s) {
  switch (s) {
    case RuleSource::DuffyTensor: return "duffy-tensor";
    case RuleSource::CubeTensor: return "cube-tensor";
    case RuleSource::GeneralizedGaussFile: return "generalized-gauss-file";
    case RuleSource::Triangulated: return "triangulated";
  }
  return "unknown";
}

/// Nodes are columns. Before mapping, rows = dim (reference coordinates);
/// after mapping onto a face, rows = ambient dimension.
struct FaceRule {
  int dim = 0;
  Matrix nodes;
  std::vector<double> weights;
  int degree = 0;
  RuleSource source = RuleSource::DuffyTensor;

  int size() const { return static_cast<int>(weights.size()); }
  double weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Exact integral of x^beta over the ordered simplex.
inline double ordered_simplex_monomial(const std::vector<int>& beta) {
  const int n = static_cast<int>(beta.size());
  double v = 1.0;
  int tail = 0;
  for (int j = n; j >= 1; --j) {
    tail += beta[j - 1];
    v /= tail + n - j + 1;
  }
  return v;
}

/// p^n-point collapsed tensor rule: x_i = xi_1 ... xi_i with a Gauss-Jacobi
/// rule for the weight xi_j^(n-j) on axis j.
inline FaceRule duffy_simplex_rule(int n, int p) {
  if (n < 0 || p < 1) fail(ErrorKind::InvalidArgument, "duffy_simplex_rule needs n >= 0, p >= 1");
  FaceRule rule;
  rule.dim = n;
  rule.degree = 2 * p - 1;
  rule.source = RuleSource::DuffyTensor;
  if (n == 0) {
    rule.nodes = Matrix(0, 1);
    rule.weights = {1.0};
    return rule;
  }
  std::vector<Rule1D> axes;
  for (int j = 1; j <= n; ++j) axes.push_back(gauss_jacobi(p, 0.0, n - j));
  long total = 1;
  for (int j = 0; j < n; ++j) total *= p;
  rule.nodes.resize(n, total);
  rule.weights.resize(total);
  std::vector<int> idx(n, 0);
  for (long q = 0; q < total; ++q) {
    double prod = 1.0;
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      prod *= axes[j].nodes[idx[j]];
      w *= axes[j].weights[idx[j]];
      rule.nodes(j, q) = prod;
    }
    rule.weights[q] = w;
    for (int j = n - 1; j >= 0; --j) {
      if (++idx[j] < p) break;
      idx[j] = 0;
    }
  }
  return rule;
}

/// n-fold tensor of the p-point Gauss-Legendre rule on [0,1]^n.
inline FaceRule cube_tensor_rule(int n, int p) {
  if (n < 0 || p < 1) fail(ErrorKind::InvalidArgument, "cube_tensor_rule needs n >= 0, p >= 1");
  FaceRule rule;
  rule.dim = n;
  rule.degree = 2 * p - 1;
  rule.source = RuleSource::CubeTensor;
  const Rule1D g = gauss_legendre(p);
  long total = 1;
  for (int j = 0; j < n; ++j) total *= p;
  rule.nodes.resize(n, total);
  rule.weights.resize(total);
  std::vector<int> idx(n, 0);
  for (long q = 0; q < total; ++q) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      rule.nodes(j, q) = g.nodes[idx[j]];
      w *= g.weights[idx[j]];
    }
    rule.weights[q] = w;
    for (int j = n - 1; j >= 0; --j) {
      if (++idx[j] < p) break;
      idx[j] = 0;
    }
  }
  return rule;
}

namespace detail {

/// Calls f(beta) for every multi-index of length n with |beta| <= q.
template <class F>
void for_each_monomial(int n, int q, F&& f) {
  std::vector<int> beta(n, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n) {
      f(beta);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      beta[i] = e;
      rec(i + 1, left - e);
    }
    beta[i] = 0;
  };
  rec(0, q);
}

inline double apply_monomial(const FaceRule& rule, const std::vector<int>& beta) {
  double sum = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    double v = rule.weights[q];
    for (int i = 0; i < rule.dim; ++i) v *= std::pow(rule.nodes(i, q), beta[i]);
    sum += v;
  }
  return sum;
}

inline std::string describe(const std::vector<int>& beta) {
  std::string s = "x^(";
  for (std::size_t i = 0; i < beta.size(); ++i) s += (i ? "," : "") + std::to_string(beta[i]);
  return s + ")";
}

}  // namespace detail

/// Checks node placement, weight signs and exactness for all monomials of
/// total degree <= rule.degree on the ordered simplex.
inline void validate_simplex_rule(const FaceRule& rule, double tol = 1e-12) {
  const int n = rule.dim;
  for (int q = 0; q < rule.size(); ++q) {
    if (!(rule.weights[q] > 0.0))
      fail(ErrorKind::ValidationError, "weight " + std::to_string(q) + " is not positive");
    double prev = 1.0;
    for (int i = 0; i < n; ++i) {
      const double x = rule.nodes(i, q);
      if (x > prev + 1e-12 || x < -1e-12)
        fail(ErrorKind::ValidationError, "node " + std::to_string(q) + " lies outside the simplex");
      prev = x;
    }
  }
  detail::for_each_monomial(n, rule.degree, [&](const std::vector<int>& beta) {
    const double exact = ordered_simplex_monomial(beta);
    const double got = detail::apply_monomial(rule, beta);
    if (!(std::abs(got - exact) <= tol * exact))
      fail(ErrorKind::ValidationError,
           "rule is not exact for " + detail::describe(beta) + " (declared degree " + std::to_string(rule.degree) + ")");
  });
}

/// Reads a precomputed simplex rule. Header tokens: `dim n degree q count m`
/// and optionally `convention ordered|barycentric`, followed by m lines of
/// n coordinates and a weight. Barycentric files give Cartesian coordinates
/// in [0, e_1, ..., e_n]; they are converted to ordered coordinates.
inline FaceRule load_generalized_rule(const std::string& path, int n = -1) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open rule file " + path);
  std::string line;
  std::map<std::string, std::string> header;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    do {
      std::string value;
      if (!(ls >> value)) fail(ErrorKind::ParseError, path + ": header key '" + key + "' has no value");
      header[key] = value;
    } while (ls >> key);
    break;
  }
  int dim = 0, degree = 0, count = 0;
  try {
    dim = std::stoi(header.at("dim"));
    degree = std::stoi(header.at("degree"));
    count = std::stoi(header.at("count"));
  } catch (const std::exception&) {
    fail(ErrorKind::ParseError, path + ": header must provide dim, degree and count");
  }
  if (dim < 1 || degree < 0 || count < 1) fail(ErrorKind::ParseError, path + ": invalid header values");
  if (n >= 0 && n != dim)
    fail(ErrorKind::DimensionMismatch, path + ": rule dimension " + std::to_string(dim) + " != " + std::to_string(n));
  const std::string convention = header.count("convention") ? header["convention"] : "ordered";
  if (convention != "ordered" && convention != "barycentric")
    fail(ErrorKind::ParseError, path + ": unknown convention '" + convention + "'");

  FaceRule rule;
  rule.dim = dim;
  rule.degree = degree;
  rule.source = RuleSource::GeneralizedGaussFile;
  rule.nodes.resize(dim, count);
  rule.weights.resize(count);
  int row = 0;
  while (row < count && std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (!ls.eof()) fail(ErrorKind::ParseError, path + ": non-numeric entry in line '" + line + "'");
    if (vals.empty()) continue;
    if (static_cast<int>(vals.size()) != dim + 1)
      fail(ErrorKind::ParseError, path + ": expected " + std::to_string(dim + 1) + " numbers per line");
    for (int i = 0; i < dim; ++i) rule.nodes(i, row) = vals[i];
    rule.weights[row] = vals[dim];
    ++row;
  }
  if (row != count) fail(ErrorKind::ParseError, path + ": fewer nodes than declared");
  if (convention == "barycentric") {
    for (int q = 0; q < count; ++q) {
      double tail = 0.0;
      for (int i = dim - 1; i >= 0; --i) {
        tail += rule.nodes(i, q);
        rule.nodes(i, q) = tail;
      }
    }
  }
  validate_simplex_rule(rule);
  return rule;
}

/// Chooses simplex rules per dimension: Duffy tensor rules, or the
/// cheapest loaded file rule of sufficient degree (Duffy if none fits).
class SimplexRuleProvider {
 public:
  SimplexRuleProvider() = default;

  /// `spec` is "duffy" or "file:<path>" where path is a rule file or a
  /// directory of rule files.
  static SimplexRuleProvider from_spec(const std::string& spec) {
    SimplexRuleProvider provider;
    if (spec.empty() || spec == "duffy") return provider;
    if (spec.rfind("file:", 0) != 0) fail(ErrorKind::InvalidArgument, "unknown rule source '" + spec + "'");
    const std::filesystem::path path = spec.substr(5);
    if (std::filesystem::is_directory(path)) {
      std::vector<std::filesystem::path> files;
      for (const auto& e : std::filesystem::directory_iterator(path))
        if (e.is_regular_file()) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) provider.add(load_generalized_rule(f.string()));
    } else {
      provider.add(load_generalized_rule(path.string()));
    }
    return provider;
  }

  void add(FaceRule rule) { files_[rule.dim].push_back(std::move(rule)); }

  bool has_files() const { return !files_.empty(); }

  FaceRule simplex_rule(int n, int p) const {
    const int needed = 2 * p - 1;
    const FaceRule* best = nullptr;
    if (auto it = files_.find(n); it != files_.end()) {
      for (const auto& r : it->second)
        if (r.degree >= needed && (!best || r.degree < best->degree ||
                                   (r.degree == best->degree && r.size() < best->size())))
          best = &r;
    }
    if (best) return *best;
    return duffy_simplex_rule(n, p);
  }

 private:
  std::map<int, std::vector<FaceRule>> files_;
};

/// Maps a reference rule onto a face of `poly`: simplex rules through
/// x = v_0 + sum_k (v_k - v_(k-1)) x_k, cube rules through the face's
/// parallelotope generators. Weights absorb the measure scale.
inline FaceRule map_rule_to_face(const FaceRule& rule, const Polytope& poly, const Face& face) {
  if (rule.dim != face.dim)
    fail(ErrorKind::DimensionMismatch, "rule dimension " + std::to_string(rule.dim) + " does not match face dimension " +
                                           std::to_string(face.dim));
  FaceRule out;
  out.dim = rule.dim;
  out.degree = rule.degree;
  out.source = rule.source;
  const Matrix pts = poly.face_points(face);
  Matrix t(poly.ambient_dim(), face.dim);
  Vector origin = pts.col(0);
  double scale = 1.0;
  if (face.dim > 0) {
    if (rule.source == RuleSource::CubeTensor) {
      auto shape = face_parallelotope(poly, face);
      if (!shape) fail(ErrorKind::InvalidArgument, "cube rule requires a parallelotope face");
      origin = shape->origin;
      t = shape->generators;
    } else {
      if (!poly.is_simplex_face(face)) fail(ErrorKind::InvalidArgument, "simplex rule requires a simplex face");
      for (int k = 1; k <= face.dim; ++k) t.col(k - 1) = pts.col(k) - pts.col(k - 1);
    }
    scale = abs_det_r(t);
    if (!(scale > 0.0)) fail(ErrorKind::DegenerateFace, "face has zero measure");
  }
  out.nodes = t * rule.nodes;
  out.nodes.colwise() += origin;
  out.weights.resize(rule.weights.size());
  for (std::size_t q = 0; q < rule.weights.size(); ++q) out.weights[q] = rule.weights[q] * scale;
  return out;
}

/// Embedded rule of polynomial degree 2p-1 on any face: simplex faces use
/// the provider's simplex rule, parallelotopes a tensor rule, anything else
/// a triangulation.
inline FaceRule general_face_rule(const Polytope& poly, const Face& face, int p,
                                  const SimplexRuleProvider& provider = {}) {
  if (face.dim == 0) {
    FaceRule r;
    r.dim = 0;
    r.degree = 2 * p - 1;
    r.nodes = poly.vertex(face.vertex_ids.front());
    r.weights = {1.0};
    return r;
  }
  if (poly.is_simplex_face(face)) return map_rule_to_face(provider.simplex_rule(face.dim, p), poly, face);
  if (face_parallelotope(poly, face)) return map_rule_to_face(cube_tensor_rule(face.dim, p), poly, face);
  const Polytope sub = subpolytope(poly, face.id);
  const FaceRule ref = provider.simplex_rule(face.dim, p);
  FaceRule out;
  out.dim = face.dim;
  out.degree = ref.degree;
  out.source = RuleSource::Triangulated;
  std::vector<Matrix> blocks;
  Eigen::Index total = 0;
  for (const auto& s : triangulate(sub)) {
    Matrix spts(sub.ambient_dim(), static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) spts.col(static_cast<Eigen::Index>(i)) = sub.vertex(s[i]);
    const Polytope simplex_piece = simplex_from_points(spts);
    FaceRule m = map_rule_to_face(ref, simplex_piece, simplex_piece.top());
    total += m.nodes.cols();
    blocks.push_back(std::move(m.nodes));
    out.weights.insert(out.weights.end(), m.weights.begin(), m.weights.end());
  }
  out.nodes.resize(poly.ambient_dim(), total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.nodes.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

/// Rule on a whole polytope (its top face).
inline FaceRule polytope_rule(const Polytope& poly, int p, const SimplexRuleProvider& provider = {}) {
  return general_face_rule(poly, poly.top(), p, provider);
}

/// CSV with header x1,...,xd,w.
inline void write_face_rule_csv(std::ostream& os, const FaceRule& rule) {
  const Eigen::Index d = rule.nodes.rows();
  for (Eigen::Index i = 0; i < d; ++i) os << 'x' << (i + 1) << ',';
  os << "w\n";
  os << std::setprecision(17);
  for (int q = 0; q < rule.size(); ++q) {
    for (Eigen::Index i = 0; i < d; ++i) os << rule.nodes(i, q) << ',';
    os << rule.weights[q] << '\n';
  }
}

}  // namespace pyraquad
