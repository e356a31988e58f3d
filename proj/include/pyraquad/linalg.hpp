#pragma once

// Small dense linear-algebra helpers shared by the geometry and
// decomposition code. Matrices here are tiny (a few dozen rows at most).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace pyraquad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative threshold below which a triangular-factor diagonal entry is
/// treated as zero (scaled by the largest column norm of the matrix).
inline constexpr double kRankTolerance = 1e-10;

inline double largest_column_norm(const Matrix& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) best = std::max(best, m.col(j).norm());
  return best;
}

inline int numerical_rank(const Matrix& m) {
  if (m.cols() == 0 || m.rows() == 0) return 0;
  const double scale = largest_column_norm(m);
  if (scale == 0.0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  const Matrix& r = qr.matrixQR();
  const Eigen::Index n = std::min(m.rows(), m.cols());
  int rank = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(r(i, i)) >= kRankTolerance * scale) ++rank;
  return rank;
}

/// Thin QR factorization T = Q R with R upper triangular and diag(R) >= 0.
struct ThinQR {
  Matrix q;
  Matrix r;
};

inline ThinQR thin_qr(const Matrix& t) {
  const Eigen::Index d = t.rows();
  const Eigen::Index j = t.cols();
  ThinQR out{Matrix(d, j), Matrix::Zero(j, j)};
  if (j == 0) return out;
  Eigen::HouseholderQR<Matrix> qr(t);
  out.q = qr.householderQ() * Matrix::Identity(d, j);
  out.r = qr.matrixQR().topRows(j).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < j; ++i) {
    if (out.r(i, i) < 0.0) {
      out.r.row(i) *= -1.0;
      out.q.col(i) *= -1.0;
    }
  }
  return out;
}

/// |det R| for the triangular factor of a tall matrix; 1 for an empty matrix.
inline double abs_det_r(const Matrix& t) {
  if (t.cols() == 0) return 1.0;
  Eigen::HouseholderQR<Matrix> qr(t);
  double det = 1.0;
  for (Eigen::Index i = 0; i < t.cols(); ++i) det *= std::abs(qr.matrixQR()(i, i));
  return det;
}

/// Indices of a maximal set of linearly independent columns, chosen greedily
/// from left to right.
inline std::vector<int> greedy_independent_columns(const Matrix& m) {
  std::vector<int> chosen;
  const double scale = largest_column_norm(m);
  if (scale == 0.0) return chosen;
  Matrix basis(m.rows(), 0);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Vector c = m.col(j);
    if (basis.cols() > 0) c -= basis * (basis.transpose() * c);
    if (basis.cols() > 0) c -= basis * (basis.transpose() * c);
    if (c.norm() >= kRankTolerance * scale) {
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = c.normalized();
      chosen.push_back(static_cast<int>(j));
    }
  }
  return chosen;
}

/// Minimum-norm point of the convex hull of the columns of `pts`
/// (Wolfe's algorithm).
inline Vector min_norm_point(const Matrix& pts) {
  const Eigen::Index m = pts.cols();
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) scale = std::max(scale, pts.col(i).squaredNorm());
  if (scale == 0.0) return Vector::Zero(pts.rows());
  const double tol = 1e-14 * scale;

  Eigen::Index first = 0;
  for (Eigen::Index i = 1; i < m; ++i)
    if (pts.col(i).squaredNorm() < pts.col(first).squaredNorm()) first = i;
  std::vector<Eigen::Index> active{first};
  std::vector<double> lambda{1.0};
  Vector x = pts.col(first);

  for (int major = 0; major < 1000; ++major) {
    Eigen::Index j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double v = x.dot(pts.col(i));
      if (v < best) {
        best = v;
        j = i;
      }
    }
    if (best >= x.squaredNorm() - tol) break;
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    lambda.push_back(0.0);

    for (int minor = 0; minor < 1000; ++minor) {
      const auto k = static_cast<Eigen::Index>(active.size());
      Matrix kkt = Matrix::Zero(k + 1, k + 1);
      Vector rhs = Vector::Zero(k + 1);
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b)
          kkt(a, b) = pts.col(active[a]).dot(pts.col(active[b]));
        kkt(a, k) = 1.0;
        kkt(k, a) = 1.0;
      }
      rhs(k) = 1.0;
      const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      bool interior = true;
      for (Eigen::Index a = 0; a < k; ++a)
        if (sol(a) <= 1e-15) interior = false;
      if (interior) {
        for (Eigen::Index a = 0; a < k; ++a) lambda[a] = sol(a);
        break;
      }
      double theta = 1.0;
      for (Eigen::Index a = 0; a < k; ++a)
        if (sol(a) <= 1e-15) theta = std::min(theta, lambda[a] / (lambda[a] - sol(a)));
      for (Eigen::Index a = 0; a < k; ++a) lambda[a] = (1.0 - theta) * lambda[a] + theta * sol(a);
      std::vector<Eigen::Index> kept;
      std::vector<double> kept_lambda;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (lambda[a] > 1e-15) {
          kept.push_back(active[a]);
          kept_lambda.push_back(lambda[a]);
        }
      }
      active = std::move(kept);
      lambda = std::move(kept_lambda);
      const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
      for (double& l : lambda) l /= total;
    }
    x.setZero();
    for (std::size_t a = 0; a < active.size(); ++a) x += lambda[a] * pts.col(active[a]);
  }
  return x;
}

}  // namespace pyraquad
