#pragma once

// D-homothetic deformation of a contact metric structure by a positive
// constant alpha:
//
//   eta -> alpha eta,  xi -> xi / alpha,  phi -> phi,
//   g   -> alpha g + alpha (alpha - 1) eta (x) eta,
//
// which is again contact metric. The operator h of the deformed structure
// is rederived from its definition (half the Lie derivative of phi along
// the new Reeb field) rather than scaled, so the scaling law h -> h/alpha
// stays an observable fact rather than an assumption; verify_transform
// measures it together with the induced laws for lambda, kappa, mu, nu and
// the gradient norm of lambda.

#include <cmath>
#include <vector>

#include "contact3/nullity.hpp"

namespace contact3 {

inline ContactStructure d_homothetic(const ContactStructure& s, double alpha) {
  if (!(alpha > 0.0))
    throw BuildError("deformation parameter must be positive");

  ContactStructure out;
  out.chart = s.chart;
  Expr a = Expr::constant(alpha);
  Expr inv_a = Expr::constant(1.0 / alpha);
  Expr shift = Expr::constant(alpha * (alpha - 1.0));
  // Closed-form inverse of alpha g + alpha (alpha - 1) eta (x) eta.
  Expr inv_shift = Expr::constant((1.0 - alpha) / (alpha * alpha));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.g[i][j] = a * s.g[i][j] + shift * (s.eta[i] * s.eta[j]);
      out.g_inv[i][j] = inv_a * s.g_inv[i][j] + inv_shift * (s.xi[i] * s.xi[j]);
    }
  }
  out.phi = s.phi;
  for (int i = 0; i < 3; ++i) {
    out.xi[i] = inv_a * s.xi[i];
    out.eta[i] = a * s.eta[i];
  }
  DiffCache dc;
  out.h = mat_scale(Expr::constant(0.5), lie_derivative_11(out.xi, out.phi, dc));
  return out;
}

// Measures the deformation laws on samples. The nullity rows (kappa_law,
// mu_law, nu_law) only accumulate at points where the original structure
// satisfies its nullity condition to within tol; lambda/h/gradient rows are
// unconditional.
inline CheckReport verify_transform(const ContactStructure& original,
                                    double alpha, const std::vector<Point>& pts,
                                    double tol) {
  ContactStructure bar = d_homothetic(original, alpha);
  Connection conn = christoffel(original);
  Connection bar_conn = christoffel(bar);
  CurvatureBundle bundle = make_curvature_bundle(original, conn);
  CurvatureBundle bar_bundle = make_curvature_bundle(bar, bar_conn);
  LambdaField lam = make_lambda_field(original, *conn.cache);
  LambdaField bar_lam = make_lambda_field(bar, *bar_conn.cache);

  ResidualAccum lambda_row("lambda_scaling");
  ResidualAccum h_row("h_scaling");
  ResidualAccum reeb_row("reeb_normalization");
  ResidualAccum grad_row("gradient_scaling");
  ResidualAccum kappa_row("kappa_law");
  ResidualAccum mu_row("mu_law");
  ResidualAccum nu_row("nu_law");

  CheckReport report;
  report.tol = tol;
  const double a2 = alpha * alpha;
  const double inv_a32 = 1.0 / (alpha * std::sqrt(alpha));

  for (const auto& p : pts) {
    try {
      EvalContext ctx(p, original.chart.coords);

      lambda_row.update(
          std::abs(lambda_at(bar, p) - lambda_at(original, p) / alpha), p);

      NMat3 h0 = eval_mat(ctx, original.h);
      NMat3 h1 = eval_mat(ctx, bar.h);
      double worst = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          worst = std::max(worst, std::abs(h1[i][j] - h0[i][j] / alpha));
      h_row.update(worst, p);

      NMat3 gb = eval_mat(ctx, bar.g);
      NVec3 xib = eval_vec(ctx, bar.xi);
      NVec3 etab = eval_vec(ctx, bar.eta);
      double pairing = etab[0] * xib[0] + etab[1] * xib[1] + etab[2] * xib[2];
      double r = std::abs(ndot_g(gb, xib, xib) - 1.0);
      r = std::max(r, std::abs(pairing - 1.0));
      reeb_row.update(r, p);

      grad_row.update(
          std::abs(grad_lambda_norm_at(bar, bar_lam, p) -
                   inv_a32 * grad_lambda_norm_at(original, lam, p)),
          p);

      PointNullity pn0 = extract_kmn_at(original, bundle, p);
      if (pn0.residual < tol) {
        PointNullity pn1 = extract_kmn_at(bar, bar_bundle, p);
        kappa_row.update(
            std::abs(pn1.kappa - (pn0.kappa + a2 - 1.0) / a2), p);
        if (pn0.mu.has_value() && pn1.mu.has_value()) {
          mu_row.update(
              std::abs(*pn1.mu - (*pn0.mu + 2.0 * (alpha - 1.0)) / alpha), p);
          nu_row.update(std::abs(*pn1.nu - *pn0.nu / alpha), p);
        }
      }
      ++report.points;
    } catch (const EvalError&) {
      report.skipped_points.push_back(p);
    } catch (const NullityError&) {
      report.skipped_points.push_back(p);
    }
  }

  report.rows.push_back(lambda_row.row(tol));
  report.rows.push_back(h_row.row(tol));
  report.rows.push_back(reeb_row.row(tol));
  report.rows.push_back(grad_row.row(tol));
  report.rows.push_back(kappa_row.row(tol));
  report.rows.push_back(mu_row.row(tol));
  report.rows.push_back(nu_row.row(tol));
  report.pass = report.points > 0;
  for (const auto& r : report.rows) report.pass = report.pass && r.pass;
  return report;
}

}  // namespace contact3
