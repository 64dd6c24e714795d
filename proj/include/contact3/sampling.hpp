#pragma once

// Deterministic point sampling over a chart's coordinate box, rejecting
// points too close to the excluded sets declared by the chart.

#include <cstdint>
#include <string>
#include <vector>

#include "contact3/expr.hpp"

namespace contact3 {

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// splitmix64: tiny, seedable, stable across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

 private:
  std::uint64_t state_;
};

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

enum class ConstraintKind { NonZero, Positive };

struct DomainConstraint {
  Expr expr;
  ConstraintKind kind = ConstraintKind::NonZero;
};

struct ChartSpec {
  CoordNames coords = kDefaultCoords;
  std::array<Interval, kDim> box{};
  std::vector<DomainConstraint> constraints;
};

// Margin keeping samples away from excluded sets, so residuals stay
// well-conditioned near singular loci.
inline constexpr double kConstraintMargin = 1e-2;
inline constexpr int kMaxSampleAttempts = 10000;

inline bool point_admissible(const ChartSpec& chart, const Point& p,
                             double margin = kConstraintMargin) {
  for (const auto& c : chart.constraints) {
    double v;
    try {
      v = eval(c.expr, p, chart.coords);
    } catch (const EvalError&) {
      return false;
    }
    if (c.kind == ConstraintKind::NonZero && std::abs(v) < margin) return false;
    if (c.kind == ConstraintKind::Positive && v < margin) return false;
  }
  return true;
}

inline std::vector<Point> sample_points(const ChartSpec& chart, int n,
                                        std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  int attempts = 0;
  while (static_cast<int>(pts.size()) < n) {
    if (++attempts > kMaxSampleAttempts) {
      throw SamplingError(
          "sampling exhausted after " + std::to_string(kMaxSampleAttempts) +
          " attempts (" + std::to_string(pts.size()) + " of " +
          std::to_string(n) + " points found); the admissible region is too thin");
    }
    Point p;
    for (int i = 0; i < kDim; ++i) {
      const auto& iv = chart.box[static_cast<std::size_t>(i)];
      p[static_cast<std::size_t>(i)] = rng.uniform(iv.lo, iv.hi);
    }
    if (point_admissible(chart, p)) pts.push_back(p);
  }
  return pts;
}

}  // namespace contact3
