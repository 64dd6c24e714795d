#pragma once

// Shared result types for pointwise verification sweeps: each named check
// records its worst residual over the sampled points and the point where it
// occurred.

#include <string>
#include <vector>

#include "contact3/expr.hpp"

namespace contact3 {

struct CheckRow {
  std::string name;
  double worst = 0.0;
  Point witness{};
  bool pass = true;
};

struct CheckReport {
  std::vector<CheckRow> rows;
  double tol = 0.0;
  int points = 0;
  std::vector<Point> skipped_points;
  bool pass = true;

  const CheckRow* find(const std::string& name) const {
    for (const auto& r : rows)
      if (r.name == name) return &r;
    return nullptr;
  }
};

// Tracks the worst residual seen for one named check.
class ResidualAccum {
 public:
  explicit ResidualAccum(std::string name) : name_(std::move(name)) {}

  void update(double residual, const Point& p) {
    if (residual > worst_) {
      worst_ = residual;
      witness_ = p;
    }
    seen_ = true;
  }

  CheckRow row(double tol) const {
    CheckRow r;
    r.name = name_;
    r.worst = seen_ ? worst_ : 0.0;
    r.witness = witness_;
    r.pass = r.worst < tol;
    return r;
  }

 private:
  std::string name_;
  double worst_ = -1.0;
  Point witness_{};
  bool seen_ = false;
};

}  // namespace contact3
