#pragma once

// Contact metric structures on a chart: the tensors (g, phi, xi, eta, h),
// assembled either from an adapted orthonormal frame or from raw tensor
// input, plus the axiom validator that checks the defining identities
// pointwise over sampled points.

#include <cmath>
#include <string>
#include <vector>

#include "contact3/checks.hpp"
#include "contact3/fields.hpp"
#include "contact3/sampling.hpp"

namespace contact3 {

class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ContactStructure {
  ChartSpec chart;
  Mat3 g;              // metric, (0,2)
  Mat3 g_inv;
  TensorField11 phi;
  VectorField xi;      // Reeb field
  OneForm eta;         // metric dual of xi
  TensorField11 h;     // half the Lie derivative of phi along xi
};

namespace detail {

inline Mat3 columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    m[i][0] = c0[i];
    m[i][1] = c1[i];
    m[i][2] = c2[i];
  }
  return m;
}

inline std::string point_str(const Point& p, const CoordNames& coords) {
  std::string s = "(";
  for (int i = 0; i < 3; ++i) {
    if (i) s += ", ";
    s += coords[static_cast<std::size_t>(i)] + "=" + format_double(p[static_cast<std::size_t>(i)]);
  }
  return s + ")";
}

}  // namespace detail

// Probes the frame determinant over the chart to reject frames that
// degenerate inside the declared domain. A 5x5x5 lattice catches zero sets
// that random sampling would almost surely miss (axis-aligned planes in
// particular); random samples cover the rest of the box.
inline void check_frame_nondegenerate(const ChartSpec& chart, const Expr& det) {
  const std::uint64_t probe_seed = 0x7a3d55aa12cULL;
  std::vector<Point> pts = sample_points(chart, 32, probe_seed);
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      for (int c = 0; c < 5; ++c) {
        Point p;
        int idx[3] = {a, b, c};
        for (int i = 0; i < 3; ++i) {
          const auto& iv = chart.box[static_cast<std::size_t>(i)];
          p[static_cast<std::size_t>(i)] =
              iv.lo + (iv.hi - iv.lo) * (static_cast<double>(idx[i]) / 4.0);
        }
        if (point_admissible(chart, p)) pts.push_back(p);
      }
    }
  }
  for (const auto& p : pts) {
    double v;
    try {
      v = eval(det, p, chart.coords);
    } catch (const EvalError& err) {
      throw BuildError(std::string("frame determinant undefined on the chart: ") +
                       err.what());
    }
    if (std::abs(v) < 1e-10) {
      throw BuildError("frame is singular inside the chart domain at " +
                       detail::point_str(p, chart.coords));
    }
  }
}

// Builds the structure from an adapted frame (xi, e, phie), declared
// orthonormal with phi acting as e -> phie -> -e and xi -> 0. The metric is
// the one making the frame orthonormal; eta is the metric dual of xi; h is
// half the Lie derivative of phi along xi.
inline ContactStructure build_from_frame(const ChartSpec& chart,
                                         const VectorField& xi,
                                         const VectorField& e,
                                         const VectorField& phie) {
  Mat3 frame = detail::columns(xi, e, phie);
  Expr det = det3(frame);
  check_frame_nondegenerate(chart, det);

  Mat3 adj = adjugate3(frame);
  Mat3 frame_inv;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) frame_inv[i][j] = adj[i][j] / det;

  ContactStructure s;
  s.chart = chart;
  s.g = mat_mul(mat_transpose(frame_inv), frame_inv);
  s.g_inv = mat_mul(frame, mat_transpose(frame));

  // phi in frame coordinates: kills the first column, rotates the plane.
  Mat3 j{};
  j[2][1] = Expr::constant(1.0);
  j[1][2] = Expr::constant(-1.0);
  s.phi = mat_mul(frame, mat_mul(j, frame_inv));

  s.xi = xi;
  s.eta = mat_vec(s.g, xi);

  DiffCache dc;
  s.h = mat_scale(Expr::constant(0.5), lie_derivative_11(xi, s.phi, dc));
  return s;
}

// Builds the structure from tensor input. g must be symmetric positive
// definite and xi the Reeb field of eta = g(xi, .); h is derived, not taken
// as input. Consistency of (g, phi, xi) is the validator's job.
inline ContactStructure build_from_tensors(const ChartSpec& chart, const Mat3& g,
                                           const TensorField11& phi,
                                           const VectorField& xi) {
  ContactStructure s;
  s.chart = chart;
  s.g = g;
  s.g_inv = mat_inverse(g);
  s.phi = phi;
  s.xi = xi;
  s.eta = mat_vec(g, xi);
  DiffCache dc;
  s.h = mat_scale(Expr::constant(0.5), lie_derivative_11(xi, phi, dc));
  return s;
}

// ---------------------------------------------------------------------------
// Axiom validation.
//
// Checked pointwise, with residuals measured entrywise (max absolute value):
//   g symmetric, positive definite (leading principal minors > 0),
//   g * g_inv = I,
//   eta(xi) = 1, phi(xi) = 0, eta o phi = 0,
//   phi^2 = -I + xi (x) eta,
//   g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y),
//   (1/2) d eta (X, Y) = g(X, phi Y)   [contact compatibility],
//   eta ^ d eta != 0                   [contact nondegeneracy],
//   h xi = 0, eta o h = 0, h and phi h symmetric w.r.t. g,
//   phi h + h phi = 0, tr h = 0, tr phi h = 0.
//
// The exterior derivative here uses the convention (d eta)_ij =
// d_i eta_j - d_j eta_i, which double-counts against the normalized pairing
// used in the compatibility identity; hence the explicit 1/2.

struct ValidationReport : CheckReport {};

namespace detail {

struct AxiomExprs {
  // entrywise-zero matrices
  std::vector<std::pair<std::string, Mat3>> mats;
  // zero vectors
  std::vector<std::pair<std::string, Vec3>> vecs;
  // zero scalars
  std::vector<std::pair<std::string, Expr>> scalars;
  // evaluated specially
  Mat3 g;
  Vec3 eta;
  Mat3 half_deta;
};

inline AxiomExprs build_axiom_exprs(const ContactStructure& s) {
  AxiomExprs ax;
  ax.g = s.g;
  ax.eta = s.eta;

  Mat3 ident = identity_mat();

  ax.mats.emplace_back("g_symmetric", mat_sub(s.g, mat_transpose(s.g)));
  ax.mats.emplace_back("metric_inverse", mat_sub(mat_mul(s.g, s.g_inv), ident));
  ax.scalars.emplace_back("eta_of_xi", form_apply(s.eta, s.xi) - Expr::constant(1.0));
  ax.vecs.emplace_back("phi_of_xi", mat_vec(s.phi, s.xi));
  ax.vecs.emplace_back("eta_circ_phi", mat_vec(mat_transpose(s.phi), s.eta));
  ax.mats.emplace_back(
      "phi_squared",
      mat_sub(mat_mul(s.phi, s.phi), mat_sub(outer(s.xi, s.eta), ident)));
  // g(phi X, phi Y) - g(X, Y) + eta(X) eta(Y), as a (0,2) matrix.
  ax.mats.emplace_back(
      "metric_phi_compatibility",
      mat_add(mat_sub(mat_mul(mat_transpose(s.phi), mat_mul(s.g, s.phi)), s.g),
              outer(s.eta, s.eta)));

  DiffCache dc;
  TwoForm deta = d_oneform(s.eta, dc);
  Mat3 half = mat_scale(Expr::constant(0.5), deta.comp);
  ax.half_deta = half;
  // (1/2) d eta (X, Y) - g(X, phi Y)
  ax.mats.emplace_back("contact_form_compatibility",
                       mat_sub(half, mat_mul(s.g, s.phi)));

  ax.vecs.emplace_back("h_of_xi", mat_vec(s.h, s.xi));
  ax.vecs.emplace_back("eta_circ_h", mat_vec(mat_transpose(s.h), s.eta));
  Mat3 gh = mat_mul(s.g, s.h);
  ax.mats.emplace_back("h_symmetric", mat_sub(gh, mat_transpose(gh)));
  Mat3 gphih = mat_mul(s.g, mat_mul(s.phi, s.h));
  ax.mats.emplace_back("phi_h_symmetric", mat_sub(gphih, mat_transpose(gphih)));
  ax.mats.emplace_back("phi_h_anticommute",
                       mat_add(mat_mul(s.phi, s.h), mat_mul(s.h, s.phi)));
  ax.scalars.emplace_back("trace_h", mat_trace(s.h));
  ax.scalars.emplace_back("trace_phi_h", mat_trace(mat_mul(s.phi, s.h)));
  return ax;
}

}  // namespace detail

inline ValidationReport validate(const ContactStructure& s, int n_points,
                                 std::uint64_t seed, double tol) {
  detail::AxiomExprs ax = detail::build_axiom_exprs(s);

  std::vector<ResidualAccum> accums;
  for (const auto& [name, m] : ax.mats) accums.emplace_back(name);
  for (const auto& [name, v] : ax.vecs) accums.emplace_back(name);
  for (const auto& [name, e] : ax.scalars) accums.emplace_back(name);
  ResidualAccum pd_accum("g_positive_definite");
  ResidualAccum nondeg_accum("contact_nondegeneracy");

  ValidationReport report;
  report.tol = tol;

  std::vector<Point> pts = sample_points(s.chart, n_points, seed);
  for (const auto& p : pts) {
    EvalContext ctx(p, s.chart.coords);
    try {
      std::size_t k = 0;
      for (const auto& [name, m] : ax.mats) {
        accums[k++].update(nmat_abs_max(eval_mat(ctx, m)), p);
      }
      for (const auto& [name, v] : ax.vecs) {
        accums[k++].update(nvec_abs_max(eval_vec(ctx, v)), p);
      }
      for (const auto& [name, e] : ax.scalars) {
        accums[k++].update(std::abs(ctx.eval(e)), p);
      }

      // Positive definiteness via leading principal minors: the residual is
      // how far the smallest minor is from being safely positive.
      NMat3 g = eval_mat(ctx, ax.g);
      double m1 = g[0][0];
      double m2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
      double m3 = ndet3(g);
      double worst_minor = std::min({m1, m2, m3});
      pd_accum.update(worst_minor > 0.0 ? 0.0 : 1.0 - worst_minor, p);

      // eta ^ d eta evaluated on the coordinate basis must stay away from 0.
      NVec3 eta = eval_vec(ctx, ax.eta);
      NMat3 d = eval_mat(ctx, ax.half_deta);
      double vol = eta[0] * d[1][2] - eta[1] * d[0][2] + eta[2] * d[0][1];
      nondeg_accum.update(std::abs(vol) > 1e-9 ? 0.0 : 1.0, p);

      ++report.points;
    } catch (const EvalError&) {
      report.skipped_points.push_back(p);
    }
  }

  std::size_t k = 0;
  for (std::size_t i = 0; i < ax.mats.size() + ax.vecs.size() + ax.scalars.size(); ++i) {
    report.rows.push_back(accums[k++].row(tol));
  }
  report.rows.push_back(pd_accum.row(tol));
  report.rows.push_back(nondeg_accum.row(tol));

  report.pass = report.points > 0;
  for (const auto& r : report.rows) report.pass = report.pass && r.pass;
  return report;
}

}  // namespace contact3
