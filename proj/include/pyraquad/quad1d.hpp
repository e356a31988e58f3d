#pragma once

// Gauss-Jacobi rules on [0,1] for the weight (1-x)^a x^b, computed from the
// Jacobi three-term recurrence (Golub-Welsch).

#include "pyraquad/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace pyraquad {

struct Rule1D {
  std::vector<double> nodes;    // strictly increasing, in (0,1)
  std::vector<double> weights;  // positive
  double a = 0.0;               // exponent of (1-x)
  double b = 0.0;               // exponent of x
  int points() const { return static_cast<int>(nodes.size()); }
};

inline double beta_fn(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0))
    fail(ErrorKind::DomainError, "Beta(x, y) requires x, y > 0");
  if (x + y < 170.0) return std::tgamma(x) / std::tgamma(x + y) * std::tgamma(y);
  return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

namespace detail {

/// Implicit QL iteration on a symmetric tridiagonal matrix (diagonal `d`,
/// off-diagonal `e` with e[i] coupling rows i and i+1). Only the first
/// component of each eigenvector is tracked, in `z`.
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  constexpr double kOffDiagonalTol = 1e-15;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kOffDiagonalTol * dd) break;
      }
      if (m == l) break;
      if (++iter > 60) fail(ErrorKind::DomainError, "tridiagonal eigenvalue iteration did not converge");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      int i = m - 1;
      bool underflow = false;
      for (; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        f = z[i + 1];
        z[i + 1] = s * z[i] + c * f;
        z[i] = c * z[i] - s * f;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

}  // namespace detail

/// p-point rule exact for polynomials of degree <= 2p-1 against the weight
/// (1-x)^a x^b on [0,1].
inline Rule1D gauss_jacobi(int p, double a, double b) {
  if (p < 1) fail(ErrorKind::InvalidArgument, "gauss_jacobi needs at least one point");
  if (!(a > -1.0) || !(b > -1.0))
    fail(ErrorKind::InvalidExponent,
         "Jacobi exponents must exceed -1 (got a=" + std::to_string(a) + ", b=" + std::to_string(b) + ")");

  // Monic Jacobi recurrence on [-1,1] for (1-t)^a (1+t)^b, mapped by x = (1+t)/2.
  std::vector<double> diag(p);
  std::vector<double> off(p, 0.0);
  const double ab = a + b;
  for (int n = 0; n < p; ++n) {
    double alpha;
    if (n == 0) {
      alpha = (b - a) / (ab + 2.0);
    } else {
      const double t = 2.0 * n + ab;
      alpha = (b * b - a * a) / (t * (t + 2.0));
    }
    diag[n] = 0.5 * (1.0 + alpha);
  }
  for (int n = 1; n < p; ++n) {
    double beta;
    if (n == 1) {
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double t = 2.0 * n + ab;
      beta = 4.0 * n * (n + a) * (n + b) * (n + ab) / (t * t * (t + 1.0) * (t - 1.0));
    }
    off[n - 1] = 0.5 * std::sqrt(beta);
  }
  std::vector<double> z(p, 0.0);
  z[0] = 1.0;
  detail::tridiagonal_ql(diag, off, z);

  const double mass = beta_fn(a + 1.0, b + 1.0);
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return diag[i] < diag[j]; });
  Rule1D rule;
  rule.a = a;
  rule.b = b;
  rule.nodes.reserve(p);
  rule.weights.reserve(p);
  for (int i : order) {
    rule.nodes.push_back(diag[i]);
    rule.weights.push_back(mass * z[i] * z[i]);
  }
  return rule;
}

inline Rule1D gauss_legendre(int p) { return gauss_jacobi(p, 0.0, 0.0); }

}  // namespace pyraquad
