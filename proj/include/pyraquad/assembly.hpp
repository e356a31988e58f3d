#pragma once

// Composite rules for int_Px int_Py |x - y|^(-alpha) g(x, y) dy dx: every
// hull piece conv(A, F_x x F_y) contributes a Gauss-Jacobi rule in lambda
// tensorized with rules on A, F_x and F_y.

#include "pyraquad/decomposition.hpp"
#include "pyraquad/error.hpp"
#include "pyraquad/face_rules.hpp"
#include "pyraquad/kernels.hpp"
#include "pyraquad/quad1d.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace pyraquad {

/// Compensated (Neumaier) running sum.
class Accumulator {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Rules for one hull piece. Apex nodes live in R^(2d) (on the diagonal),
/// base nodes in R^d.
struct PieceRule {
  int id = 0;
  int d = 0;
  double delta = 1.0;
  int s = 0;
  int r = 0;
  Rule1D lambda;
  FaceRule apex;
  FaceRule base_x;
  FaceRule base_y;
  std::vector<double> kernel;  // |x_F - y_F|^(-alpha) per (x_F, y_F) pair

  long size() const {
    return static_cast<long>(lambda.points()) * apex.size() * base_x.size() * base_y.size();
  }
};

/// Folded rule kept in factored form; nodes are generated on the fly.
struct PreparedRule {
  int d = 0;
  double alpha = 0.0;
  int points = 1;
  bool unfolded = false;
  std::vector<PieceRule> pieces;

  int degree() const { return 2 * points - 1; }
  long size() const {
    long n = 0;
    for (const auto& p : pieces) n += p.size();
    return n;
  }
};

/// Materialized rule: columns of x and y are node pairs.
struct KernelRule {
  int d = 0;
  double alpha = 0.0;
  int degree = 1;
  bool unfolded = false;
  Matrix x;
  Matrix y;
  std::vector<double> w;
  std::vector<int> piece_id;

  long size() const { return static_cast<long>(w.size()); }
};

inline PieceRule prepare_piece(const HullPiece& piece, int id, double alpha, int p,
                               const SimplexRuleProvider& provider) {
  if (!piece.base_x || !piece.base_y)
    fail(ErrorKind::InvalidArgument, "hull piece has no product base");
  PieceRule pr;
  pr.id = id;
  pr.d = piece.base_x->ambient_dim();
  pr.delta = piece.descriptor.delta;
  pr.s = piece.s();
  pr.r = piece.base_x->dim() + piece.base_y->dim();
  if (!(alpha < pr.r + 1.0))
    fail(ErrorKind::IntegrabilityViolated, "alpha = " + std::to_string(alpha) + " is not below r + 1 = " +
                                               std::to_string(pr.r + 1) + " on piece " + std::to_string(id));
  pr.lambda = gauss_jacobi(p, pr.s, pr.r - alpha);
  pr.apex = general_face_rule(piece.apex, piece.apex.top(), p, provider);
  pr.base_x = general_face_rule(*piece.base_x, piece.base_x->top(), p, provider);
  pr.base_y = general_face_rule(*piece.base_y, piece.base_y->top(), p, provider);
  const int nx = pr.base_x.size();
  const int ny = pr.base_y.size();
  double scale = 0.0;
  for (int i = 0; i < nx; ++i) scale = std::max(scale, pr.base_x.nodes.col(i).lpNorm<Eigen::Infinity>());
  for (int j = 0; j < ny; ++j) scale = std::max(scale, pr.base_y.nodes.col(j).lpNorm<Eigen::Infinity>());
  pr.kernel.resize(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double dist = (pr.base_x.nodes.col(i) - pr.base_y.nodes.col(j)).norm();
      if (!(dist > 1e-12 * std::max(1.0, scale)))
        fail(ErrorKind::DegenerateBase, "base nodes coincide on piece " + std::to_string(id) +
                                            " (the base touches the singular set)");
      pr.kernel[static_cast<std::size_t>(i) * ny + j] = alpha == 0.0 ? 1.0 : std::pow(dist, -alpha);
    }
  }
  return pr;
}

namespace detail {

/// Runs body(i) for i in [0, n) on up to `threads` workers.
template <class Body>
void parallel_for(int n, int threads, Body&& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next++; i < n; i = next++) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Calls f(x, y, w) for every node of the piece, in a fixed order.
template <class F>
void for_each_node(const PieceRule& pr, bool unfolded, double alpha, F&& f) {
  const int d = pr.d;
  const int nx = pr.base_x.size();
  const int ny = pr.base_y.size();
  std::vector<double> x(d);
  std::vector<double> y(d);
  for (int l = 0; l < pr.lambda.points(); ++l) {
    const double lam = pr.lambda.nodes[l];
    const double wl = pr.delta * pr.lambda.weights[l];
    for (int a = 0; a < pr.apex.size(); ++a) {
      const double wa = wl * pr.apex.weights[a];
      for (int i = 0; i < nx; ++i) {
        const double wx = wa * pr.base_x.weights[i];
        for (int j = 0; j < ny; ++j) {
          double w = wx * pr.base_y.weights[j] * pr.kernel[static_cast<std::size_t>(i) * ny + j];
          for (int c = 0; c < d; ++c) {
            x[c] = (1.0 - lam) * pr.apex.nodes(c, a) + lam * pr.base_x.nodes(c, i);
            y[c] = (1.0 - lam) * pr.apex.nodes(d + c, a) + lam * pr.base_y.nodes(c, j);
          }
          if (unfolded && alpha != 0.0) {
            double dist2 = 0.0;
            for (int c = 0; c < d; ++c) dist2 += (x[c] - y[c]) * (x[c] - y[c]);
            w *= std::pow(std::sqrt(dist2), alpha);
          }
          f(std::span<const double>(x), std::span<const double>(y), w);
        }
      }
    }
  }
}

}  // namespace detail

/// Per-piece rules with p points in every direction (polynomial degree
/// 2p - 1). `unfolded` drops the kernel |x - y|^(-alpha) from the weights.
inline PreparedRule prepare_kernel_rule(const std::vector<HullPiece>& pieces, double alpha, int p,
                                        const SimplexRuleProvider& provider = {}, int threads = 1,
                                        bool unfolded = false) {
  if (p < 1) fail(ErrorKind::InvalidArgument, "need at least one point per direction");
  if (!std::isfinite(alpha)) fail(ErrorKind::InvalidExponent, "alpha must be finite");
  if (pieces.empty()) fail(ErrorKind::InvalidArgument, "no pieces to assemble");
  PreparedRule rule;
  rule.alpha = alpha;
  rule.points = p;
  rule.unfolded = unfolded;
  rule.pieces.resize(pieces.size());
  detail::parallel_for(static_cast<int>(pieces.size()), threads, [&](int i) {
    rule.pieces[i] = prepare_piece(pieces[i], i, alpha, p, provider);
  });
  rule.d = rule.pieces.front().d;
  return rule;
}

/// Sum of w g(x, y) over the rule. Each piece is summed with compensation,
/// then the piece totals in piece order, so the result does not depend on
/// the thread count.
inline double integrate(const PreparedRule& rule, const SmoothFn& g, int threads = 1) {
  std::vector<double> totals(rule.pieces.size(), 0.0);
  detail::parallel_for(static_cast<int>(rule.pieces.size()), threads, [&](int i) {
    Accumulator acc;
    long node = 0;
    detail::for_each_node(rule.pieces[i], rule.unfolded, rule.alpha,
                          [&](std::span<const double> x, std::span<const double> y, double w) {
                            const double v = w * g(x, y);
                            if (!std::isfinite(v))
                              fail(ErrorKind::NonFiniteValue, "non-finite integrand at node " + std::to_string(node) +
                                                                  " of piece " + std::to_string(i));
                            acc.add(v);
                            ++node;
                          });
    totals[i] = acc.value();
  });
  Accumulator acc;
  for (double t : totals) acc.add(t);
  return acc.value();
}

inline KernelRule materialize(const PreparedRule& rule) {
  KernelRule out;
  out.d = rule.d;
  out.alpha = rule.alpha;
  out.degree = rule.degree();
  out.unfolded = rule.unfolded;
  const long n = rule.size();
  out.x.resize(rule.d, n);
  out.y.resize(rule.d, n);
  out.w.reserve(n);
  out.piece_id.reserve(n);
  long q = 0;
  for (const auto& pr : rule.pieces) {
    detail::for_each_node(pr, rule.unfolded, rule.alpha,
                          [&](std::span<const double> x, std::span<const double> y, double w) {
                            for (int c = 0; c < rule.d; ++c) {
                              out.x(c, q) = x[c];
                              out.y(c, q) = y[c];
                            }
                            out.w.push_back(w);
                            out.piece_id.push_back(pr.id);
                            ++q;
                          });
  }
  return out;
}

/// Folded rule on P_x x P_y from the hull pieces (p points per direction).
inline KernelRule assemble_kernel_rule(const std::vector<HullPiece>& pieces, double alpha, int p,
                                       const SimplexRuleProvider& provider = {}, bool unfolded = false) {
  return materialize(prepare_kernel_rule(pieces, alpha, p, provider, 1, unfolded));
}

/// Same summation order as integrate(PreparedRule, ...).
inline double integrate(const KernelRule& rule, const SmoothFn& g) {
  Accumulator total;
  Accumulator piece;
  const long n = rule.size();
  std::vector<double> x(rule.d);
  std::vector<double> y(rule.d);
  for (long q = 0; q < n; ++q) {
    if (q > 0 && rule.piece_id[q] != rule.piece_id[q - 1]) {
      total.add(piece.value());
      piece = Accumulator();
    }
    for (int c = 0; c < rule.d; ++c) {
      x[c] = rule.x(c, q);
      y[c] = rule.y(c, q);
    }
    const double v = rule.w[q] * g(std::span<const double>(x), std::span<const double>(y));
    if (!std::isfinite(v)) fail(ErrorKind::NonFiniteValue, "non-finite integrand at node " + std::to_string(q));
    piece.add(v);
  }
  if (n > 0) total.add(piece.value());
  return total.value();
}

/// CSV: a header line `alpha,degree,d`, its values, then a column header
/// and one row `x1..xd,y1..yd,w,piece_id` per node. Values use 17
/// significant digits so a re-import is exact.
inline void write_kernel_rule_csv(std::ostream& os, const KernelRule& rule) {
  os << "alpha,degree,d\n" << std::setprecision(17) << rule.alpha << ',' << rule.degree << ',' << rule.d << '\n';
  for (int c = 0; c < rule.d; ++c) os << 'x' << c + 1 << ',';
  for (int c = 0; c < rule.d; ++c) os << 'y' << c + 1 << ',';
  os << "w,piece_id\n";
  for (long q = 0; q < rule.size(); ++q) {
    for (int c = 0; c < rule.d; ++c) os << rule.x(c, q) << ',';
    for (int c = 0; c < rule.d; ++c) os << rule.y(c, q) << ',';
    os << rule.w[q] << ',' << rule.piece_id[q] << '\n';
  }
}

inline KernelRule read_kernel_rule_csv(std::istream& is) {
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  std::string line;
  KernelRule rule;
  if (!std::getline(is, line) || line != "alpha,degree,d") fail(ErrorKind::ParseError, "missing rule CSV header");
  if (!std::getline(is, line)) fail(ErrorKind::ParseError, "missing rule CSV metadata");
  try {
    const auto meta = split(line);
    if (meta.size() != 3) fail(ErrorKind::ParseError, "bad rule CSV metadata");
    rule.alpha = std::stod(meta[0]);
    rule.degree = std::stoi(meta[1]);
    rule.d = std::stoi(meta[2]);
    if (!std::getline(is, line)) fail(ErrorKind::ParseError, "missing rule CSV column header");
    std::vector<std::vector<double>> cols;
    long n = 0;
    std::vector<double> xs, ys;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto cells = split(line);
      if (static_cast<int>(cells.size()) != 2 * rule.d + 2) fail(ErrorKind::ParseError, "bad rule CSV row");
      for (int c = 0; c < rule.d; ++c) xs.push_back(std::stod(cells[c]));
      for (int c = 0; c < rule.d; ++c) ys.push_back(std::stod(cells[rule.d + c]));
      rule.w.push_back(std::stod(cells[2 * rule.d]));
      rule.piece_id.push_back(std::stoi(cells[2 * rule.d + 1]));
      ++n;
    }
    rule.x = Eigen::Map<Matrix>(xs.data(), rule.d, n);
    rule.y = Eigen::Map<Matrix>(ys.data(), rule.d, n);
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::ParseError, "non-numeric entry in rule CSV");
  } catch (const std::out_of_range&) {
    fail(ErrorKind::ParseError, "number out of range in rule CSV");
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Convergence studies and reference values

/// Points per direction for a requested polynomial degree q: the smallest
/// p with 2p - 1 >= q.
inline int points_for_degree(int q) { return std::max(1, q / 2 + 1); }

struct ConvergenceRow {
  int degree = 0;
  long nodes = 0;
  double value = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
};

/// Values for each requested degree, errors against the value at
/// `reference_degree` (the highest requested degree when 0).
inline std::vector<ConvergenceRow> convergence_sweep(const std::vector<HullPiece>& pieces, const KernelSpec& kernel,
                                                     const std::vector<int>& degrees,
                                                     const SimplexRuleProvider& provider = {}, int threads = 1,
                                                     int reference_degree = 0) {
  if (degrees.empty()) fail(ErrorKind::InvalidArgument, "no degrees requested");
  if (!std::is_sorted(degrees.begin(), degrees.end()))
    fail(ErrorKind::InvalidArgument, "degrees must be ascending");
  std::vector<ConvergenceRow> rows;
  for (int q : degrees) {
    const PreparedRule rule = prepare_kernel_rule(pieces, kernel.alpha, points_for_degree(q), provider, threads);
    ConvergenceRow row;
    row.degree = q;
    row.nodes = rule.size();
    row.value = integrate(rule, kernel.g, threads);
    rows.push_back(row);
  }
  double ref = rows.back().value;
  if (reference_degree > 0 && reference_degree != degrees.back()) {
    const auto it = std::find(degrees.begin(), degrees.end(), reference_degree);
    if (it != degrees.end()) {
      ref = rows[it - degrees.begin()].value;
    } else {
      const PreparedRule rule =
          prepare_kernel_rule(pieces, kernel.alpha, points_for_degree(reference_degree), provider, threads);
      ref = integrate(rule, kernel.g, threads);
    }
  }
  for (auto& row : rows) {
    row.abs_err = std::abs(row.value - ref);
    row.rel_err = ref != 0.0 ? row.abs_err / std::abs(ref) : row.abs_err;
  }
  return rows;
}

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "degree,nodes,value,abs_err,rel_err\n" << std::setprecision(17);
  for (const auto& r : rows)
    os << r.degree << ',' << r.nodes << ',' << r.value << ',' << r.abs_err << ',' << r.rel_err << '\n';
}

/// A pair of conforming polytopes and a kernel.
struct Problem {
  Polytope px;
  Polytope py;
  std::vector<std::pair<int, int>> shared;
  KernelSpec kernel;
};

struct OracleResult {
  double value = 0.0;
  double accuracy = 0.0;  // estimated absolute error
  int points = 0;         // 0 for closed forms
  std::string method;
};

/// Reference values: closed forms where available (identical unit-length
/// segments with g = 1; alpha = 0 with g = 1), otherwise increasing the
/// number of points until successive values and their Aitken extrapolation
/// agree to `tol` (relative). Throws BudgetExceeded when the node budget
/// runs out first.
inline OracleResult oracle_integrate(const Problem& problem, long node_budget = 50'000'000, double tol = 1e-12,
                                     int threads = 1) {
  const bool g_one = problem.kernel.name == "one";
  if (g_one && problem.kernel.alpha == 0.0) {
    return {volume(problem.px) * volume(problem.py), 0.0, 0, "volume-product"};
  }
  const double alpha = problem.kernel.alpha;
  if (g_one && problem.px.dim() == 1 && problem.py.dim() == 1 && problem.shared.size() == 2 && alpha < 1.0) {
    const double len = volume(problem.px);
    if (std::abs(volume(problem.py) - len) <= 1e-14 * len) {
      const double v = std::pow(len, 2.0 - alpha) * 2.0 / ((1.0 - alpha) * (2.0 - alpha));
      return {v, 0.0, 0, "closed-form-segment"};
    }
  }
  const auto pieces = product_decomp(problem.px, problem.py, problem.shared);
  std::vector<double> values;
  long used = 0;
  for (int p = 1;; ++p) {
    const PreparedRule rule = prepare_kernel_rule(pieces, alpha, p, {}, threads);
    used += rule.size();
    if (used > node_budget)
      fail(ErrorKind::BudgetExceeded, "oracle did not reach tolerance within " + std::to_string(node_budget) + " nodes");
    values.push_back(integrate(rule, problem.kernel.g, threads));
    const std::size_t n = values.size();
    if (n < 3) continue;
    const double v0 = values[n - 3], v1 = values[n - 2], v2 = values[n - 1];
    const double diff = std::abs(v2 - v1);
    const double denom = (v2 - v1) - (v1 - v0);
    const double aitken = denom != 0.0 ? v2 - (v2 - v1) * (v2 - v1) / denom : v2;
    const double est = std::max(diff, std::abs(aitken - v2));
    if (est <= tol * std::abs(v2)) return {v2, est, p, "degree-escalation"};
  }
}

}  // namespace pyraquad
