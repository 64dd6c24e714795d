#pragma once

// Shared fixtures for the test suite: the parser golden table, a random
// expression-tree generator for round-trip and derivative properties, and
// small finite-difference helpers.

#include <cmath>
#include <string>
#include <vector>

#include "contact3/expr.hpp"
#include "contact3/sampling.hpp"

namespace testsupport {

using contact3::Expr;
using contact3::ExprKind;
using contact3::ParseError;
using contact3::Point;
using contact3::SplitMix64;

inline const Point kGoldenPoint{1.5, -0.25, 2.0};

struct GoldenCase {
  std::string input;
  bool valid;
  std::string rendered;                // valid: canonical rendering
  double value;                        // valid: value at kGoldenPoint
  std::size_t error_pos;               // invalid: 1-based position
  ParseError::Kind error_kind;         // invalid
};

inline GoldenCase ok(std::string input, std::string rendered, double value) {
  return {std::move(input), true, std::move(rendered), value, 0,
          ParseError::Kind::Syntax};
}

inline GoldenCase bad(std::string input, std::size_t pos,
                      ParseError::Kind kind = ParseError::Kind::Syntax) {
  return {std::move(input), false, "", 0.0, pos, kind};
}

inline const std::vector<GoldenCase>& golden_cases() {
  static const std::vector<GoldenCase> cases = [] {
    const double x = kGoldenPoint[0], y = kGoldenPoint[1], z = kGoldenPoint[2];
    std::vector<GoldenCase> v;
    v.push_back(ok("2", "2", 2.0));
    v.push_back(ok("x", "x", x));
    v.push_back(ok(" y ", "y", y));
    v.push_back(ok("x+y*z", "x+y*z", x + y * z));
    v.push_back(ok("(x+y)*z", "(x+y)*z", (x + y) * z));
    v.push_back(ok("x-y-z", "x-y-z", x - y - z));
    v.push_back(ok("x-(y-z)", "x-(y-z)", x - (y - z)));
    v.push_back(ok("-x^2", "-x^2", -(x * x)));
    v.push_back(ok("(-x)^2", "(-x)^2", x * x));
    v.push_back(ok("2^3^2", "2^9", 512.0));
    v.push_back(ok("x^-2", "x^-2", 1.0 / (x * x)));
    v.push_back(ok("x^0.5", "exp(0.5*ln(x))", std::exp(0.5 * std::log(x))));
    v.push_back(ok("x^(1/2)", "exp(0.5*ln(x))", std::exp(0.5 * std::log(x))));
    v.push_back(ok("sqrt(z)", "sqrt(z)", std::sqrt(z)));
    v.push_back(ok("ln(exp(x))", "ln(exp(x))", x));
    v.push_back(ok("sin(x)^2+cos(x)^2", "sin(x)^2+cos(x)^2", 1.0));
    v.push_back(ok("2*x - 3/z", "2*x-3/z", 2.0 * x - 3.0 / z));
    v.push_back(ok("-x*y", "-x*y", -x * y));
    v.push_back(ok("-(x*y)", "-(x*y)", -(x * y)));
    v.push_back(ok("--x", "--x", x));
    v.push_back(ok("2e3", "2000", 2000.0));
    v.push_back(ok("1.25e-1", "0.125", 0.125));
    v.push_back(ok("x/y/z", "x/y/z", x / y / z));
    v.push_back(ok("x/(y/z)", "x/(y/z)", x / (y / z)));
    v.push_back(ok("exp(0)", "exp(0)", 1.0));
    v.push_back(ok("(x)", "x", x));
    v.push_back(ok("3.50", "3.5", 3.5));
    v.push_back(ok("2*-3", "2*-3", -6.0));
    v.push_back(ok("z^2*z^-2", "z^2*z^-2", 1.0));
    v.push_back(ok("sin(x*y)+cos(y*z)",
                   "sin(x*y)+cos(y*z)", std::sin(x * y) + std::cos(y * z)));
    v.push_back(ok("1/(1+x^2)", "1/(1+x^2)", 1.0 / (1.0 + x * x)));
    v.push_back(ok("sqrt(x^2+y^2+z^2)", "sqrt(x^2+y^2+z^2)",
                   std::sqrt(x * x + y * y + z * z)));
    v.push_back(bad("2*", 3));
    v.push_back(bad("", 1));
    v.push_back(bad("(x+y", 5));
    v.push_back(bad("x+*y", 3));
    v.push_back(bad("foo", 1, ParseError::Kind::UnknownIdentifier));
    v.push_back(bad("tan(x)", 1, ParseError::Kind::UnknownIdentifier));
    v.push_back(bad("x~y", 2));
    v.push_back(bad("x^y", 3));
    v.push_back(bad("1e999", 1));
    v.push_back(bad("x + ", 5));
    v.push_back(bad("w", 1, ParseError::Kind::UnknownIdentifier));
    v.push_back(bad("2..5", 2));
    v.push_back(bad("SIN(x)", 1, ParseError::Kind::UnknownIdentifier));
    v.push_back(bad("x y", 3));
    return v;
  }();
  return cases;
}

// Random raw trees that satisfy the renderer's reachability invariants
// (no negation wrapping a literal). `budget` bounds the node count.
inline Expr random_tree(SplitMix64& rng, int depth) {
  if (depth <= 0) {
    switch (rng.next() % 4) {
      case 0: return Expr::coord(0);
      case 1: return Expr::coord(1);
      case 2: return Expr::coord(2);
      default: {
        double v = std::round(rng.uniform(-3.0, 3.0) * 16.0) / 16.0;
        return Expr::constant(v == 0.0 ? 0.5 : v);
      }
    }
  }
  switch (rng.next() % 12) {
    case 0: return Expr::make_binary(ExprKind::Add, random_tree(rng, depth - 1),
                                     random_tree(rng, depth - 1));
    case 1: return Expr::make_binary(ExprKind::Sub, random_tree(rng, depth - 1),
                                     random_tree(rng, depth - 1));
    case 2:
    case 3: return Expr::make_binary(ExprKind::Mul, random_tree(rng, depth - 1),
                                     random_tree(rng, depth - 1));
    case 4: return Expr::make_binary(ExprKind::Div, random_tree(rng, depth - 1),
                                     random_tree(rng, depth - 1));
    case 5: {
      int n = static_cast<int>(rng.next() % 7) - 3;
      return Expr::make_pow(random_tree(rng, depth - 1), n);
    }
    case 6: {
      Expr c = random_tree(rng, depth - 1);
      if (c.kind() == ExprKind::Constant) return Expr::constant(-c.constant_value());
      return Expr::make_unary(ExprKind::Neg, c);
    }
    case 7: return Expr::make_unary(ExprKind::Ln, random_tree(rng, depth - 1));
    case 8: return Expr::make_unary(ExprKind::Exp, random_tree(rng, depth - 1));
    case 9: return Expr::make_unary(ExprKind::Sqrt, random_tree(rng, depth - 1));
    case 10: return Expr::make_unary(ExprKind::Sin, random_tree(rng, depth - 1));
    default: return Expr::make_unary(ExprKind::Cos, random_tree(rng, depth - 1));
  }
}

// Random polynomial expressions (no division or transcendentals), safe to
// evaluate and differentiate everywhere.
inline Expr random_poly(SplitMix64& rng, int depth) {
  if (depth <= 0) {
    switch (rng.next() % 4) {
      case 0: return Expr::coord(0);
      case 1: return Expr::coord(1);
      case 2: return Expr::coord(2);
      default:
        return Expr::constant(std::round(rng.uniform(-2.0, 2.0) * 8.0) / 8.0);
    }
  }
  switch (rng.next() % 4) {
    case 0: return Expr::make_binary(ExprKind::Add, random_poly(rng, depth - 1),
                                     random_poly(rng, depth - 1));
    case 1: return Expr::make_binary(ExprKind::Sub, random_poly(rng, depth - 1),
                                     random_poly(rng, depth - 1));
    default: return Expr::make_binary(ExprKind::Mul, random_poly(rng, depth - 1),
                                      random_poly(rng, depth - 1));
  }
}

// Central finite difference of a scalar expression along one coordinate.
inline double fd_diff(const Expr& e, const Point& p, int coord, double step,
                      const contact3::CoordNames& coords = contact3::kDefaultCoords) {
  Point lo = p, hi = p;
  lo[static_cast<std::size_t>(coord)] -= step;
  hi[static_cast<std::size_t>(coord)] += step;
  return (contact3::eval(e, hi, coords) - contact3::eval(e, lo, coords)) /
         (2.0 * step);
}

inline bool close_rel(double a, double b, double tol, double floor = 1.0) {
  return std::abs(a - b) <= tol * std::max({floor, std::abs(a), std::abs(b)});
}

}  // namespace testsupport
