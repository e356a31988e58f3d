#pragma once

// Smooth parts g(x, y) of the kernel |x - y|^(-alpha) g(x, y).

#include "pyraquad/error.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pyraquad {

/// Must be pure: it is called concurrently from worker threads.
using SmoothFn = std::function<double(std::span<const double> x, std::span<const double> y)>;

struct KernelSpec {
  double alpha = 0.0;
  SmoothFn g;
  int d = 0;  // 0 means "any"
  std::string name;
};

/// Polynomial in the coordinates of x and y: sum of coefficient * product of
/// powers x_i^e, y_j^f.
struct CoordPoly {
  struct Factor {
    bool is_y = false;
    int index = 0;  // zero-based
    int power = 1;
  };
  struct Term {
    double coef = 1.0;
    std::vector<Factor> factors;
  };
  std::vector<Term> terms;

  int max_index() const {
    int m = -1;
    for (const auto& t : terms)
      for (const auto& f : t.factors) m = std::max(m, f.index);
    return m;
  }

  double operator()(std::span<const double> x, std::span<const double> y) const {
    double sum = 0.0;
    for (const auto& t : terms) {
      double v = t.coef;
      for (const auto& f : t.factors) {
        const double base = f.is_y ? y[f.index] : x[f.index];
        double p = 1.0;
        for (int e = 0; e < f.power; ++e) p *= base;
        v *= p;
      }
      sum += v;
    }
    return sum;
  }
};

/// Grammar: terms joined by + or -, each a *-product of numbers and
/// variables x<i> / y<i> (1-based) with optional ^<int>. Example:
/// "x1*y2 - 3*x1^2 + 0.5".
inline CoordPoly parse_coord_poly(const std::string& text) {
  CoordPoly poly;
  std::size_t pos = 0;
  auto bad = [&](const std::string& why) -> void {
    fail(ErrorKind::UnknownKernel, "coord-poly '" + text + "': " + why);
  };
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto read_int = [&]() {
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) bad("expected an integer at position " + std::to_string(start));
    return std::stoi(text.substr(start, pos - start));
  };
  skip();
  if (pos == text.size()) bad("empty polynomial");
  double sign = 1.0;
  while (true) {
    skip();
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      if (text[pos] == '-') sign = -sign;
      ++pos;
      continue;
    }
    CoordPoly::Term term;
    term.coef = sign;
    while (true) {
      skip();
      if (pos >= text.size()) bad("unexpected end");
      const char c = text[pos];
      if (c == 'x' || c == 'y') {
        ++pos;
        CoordPoly::Factor f;
        f.is_y = c == 'y';
        f.index = read_int() - 1;
        if (f.index < 0) bad("variable indices start at 1");
        skip();
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          skip();
          f.power = read_int();
        }
        term.factors.push_back(f);
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        term.coef *= std::stod(text.substr(pos), &used);
        pos += used;
      } else {
        bad(std::string("unexpected character '") + c + "'");
      }
      skip();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        continue;
      }
      break;
    }
    poly.terms.push_back(std::move(term));
    sign = 1.0;
    skip();
    if (pos == text.size()) break;
    if (text[pos] != '+' && text[pos] != '-') bad(std::string("unexpected character '") + text[pos] + "'");
  }
  return poly;
}

/// `one`, `exp-sum` (exp of the sum of all coordinates of x and y) or
/// `coord-poly:<polynomial>`.
inline KernelSpec builtin_kernels(const std::string& name) {
  KernelSpec k;
  k.name = name;
  if (name == "one") {
    k.g = [](std::span<const double>, std::span<const double>) { return 1.0; };
  } else if (name == "exp-sum") {
    k.g = [](std::span<const double> x, std::span<const double> y) {
      double s = 0.0;
      for (double v : x) s += v;
      for (double v : y) s += v;
      return std::exp(s);
    };
  } else if (name.rfind("coord-poly:", 0) == 0) {
    auto poly = std::make_shared<CoordPoly>(parse_coord_poly(name.substr(11)));
    k.d = poly->max_index() + 1;
    k.g = [poly](std::span<const double> x, std::span<const double> y) { return (*poly)(x, y); };
  } else {
    fail(ErrorKind::UnknownKernel, "unknown kernel '" + name + "' (expected one, exp-sum or coord-poly:<poly>)");
  }
  return k;
}

}  // namespace pyraquad
