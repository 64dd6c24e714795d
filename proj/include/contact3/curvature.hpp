#pragma once

// Levi-Civita connection and curvature of a contact metric structure:
// Christoffel symbols, the full Riemann tensor, Ricci tensor and operator,
// the Jacobi-type operator along the Reeb field, the torsion tensor
// tau = L_xi g with its transport derivative, and the pointwise identity
// suite tying them all together.
//
// Curvature sign convention: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z
// - nabla_[X,Y] Z, with coordinate components
//   R(d_i, d_j) d_k = riem[l][i][j][k] d_l.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "contact3/checks.hpp"
#include "contact3/structure.hpp"

namespace contact3 {

struct Connection {
  // gamma[k][i][j] is the k-th component of nabla_{d_i} d_j (symmetric in ij).
  std::array<Mat3, 3> gamma;
  // Shared so every stage of an assembly reuses one derivative table.
  std::shared_ptr<DiffCache> cache;
};

inline Connection christoffel(const ContactStructure& s) {
  Connection conn;
  conn.cache = std::make_shared<DiffCache>();
  DiffCache& dc = *conn.cache;

  // dg[l][i][j] = d_l g_ij
  std::array<Mat3, 3> dg;
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) dg[l][i][j] = dc.diff(s.g[i][j], l);

  const Expr half = Expr::constant(0.5);
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        Expr sum = Expr::constant(0.0);
        for (int l = 0; l < 3; ++l) {
          sum = sum + s.g_inv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
        }
        conn.gamma[k][i][j] = half * sum;
        conn.gamma[k][j][i] = conn.gamma[k][i][j];
      }
    }
  }
  return conn;
}

// nabla_X Y for vector fields.
inline VectorField covariant_derivative(const Connection& conn,
                                        const VectorField& x,
                                        const VectorField& y) {
  DiffCache& dc = *conn.cache;
  VectorField r;
  for (int k = 0; k < 3; ++k) {
    Expr s = Expr::constant(0.0);
    for (int i = 0; i < 3; ++i) {
      s = s + x[i] * dc.diff(y[k], i);
      for (int j = 0; j < 3; ++j) s = s + conn.gamma[k][i][j] * x[i] * y[j];
    }
    r[k] = s;
  }
  return r;
}

// nabla_X T for a (1,1)-tensor field.
inline TensorField11 covariant_derivative_op(const Connection& conn,
                                             const VectorField& x,
                                             const TensorField11& t) {
  DiffCache& dc = *conn.cache;
  TensorField11 r;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      Expr s = Expr::constant(0.0);
      for (int i = 0; i < 3; ++i) {
        s = s + x[i] * dc.diff(t[k][j], i);
        for (int m = 0; m < 3; ++m) {
          s = s + x[i] * (conn.gamma[k][i][m] * t[m][j] - conn.gamma[m][i][j] * t[k][m]);
        }
      }
      r[k][j] = s;
    }
  }
  return r;
}

// nabla_X T for a (0,2)-tensor field.
inline Mat3 covariant_derivative_bilinear(const Connection& conn,
                                          const VectorField& x, const Mat3& t) {
  DiffCache& dc = *conn.cache;
  Mat3 r;
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      Expr s = Expr::constant(0.0);
      for (int i = 0; i < 3; ++i) {
        s = s + x[i] * dc.diff(t[j][k], i);
        for (int m = 0; m < 3; ++m) {
          s = s - x[i] * (conn.gamma[m][i][j] * t[m][k] + conn.gamma[m][i][k] * t[j][m]);
        }
      }
      r[j][k] = s;
    }
  }
  return r;
}

// riem[l][i][j][k]: component l of R(d_i, d_j) d_k.
using Riemann4 = std::array<std::array<std::array<std::array<Expr, 3>, 3>, 3>, 3>;

inline Riemann4 riemann(const Connection& conn) {
  DiffCache& dc = *conn.cache;
  Riemann4 r;
  for (int l = 0; l < 3; ++l) {
    for (int i = 0; i < 3; ++i) {
      r[l][i][i] = {Expr::constant(0.0), Expr::constant(0.0), Expr::constant(0.0)};
      for (int j = i + 1; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          Expr s = dc.diff(conn.gamma[l][j][k], i) - dc.diff(conn.gamma[l][i][k], j);
          for (int m = 0; m < 3; ++m) {
            s = s + conn.gamma[m][j][k] * conn.gamma[l][i][m] -
                conn.gamma[m][i][k] * conn.gamma[l][j][m];
          }
          r[l][i][j][k] = s;
          r[l][j][i][k] = -s;
        }
      }
    }
  }
  return r;
}

// Ricci tensor S(X, Y) = trace of Z -> R(Z, X) Y.
inline Mat3 ricci_tensor(const Riemann4& riem) {
  Mat3 s;
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      Expr sum = Expr::constant(0.0);
      for (int i = 0; i < 3; ++i) sum = sum + riem[i][i][j][k];
      s[j][k] = sum;
    }
  }
  return s;
}

inline TensorField11 ricci_operator(const Riemann4& riem,
                                    const ContactStructure& s) {
  return mat_mul(s.g_inv, ricci_tensor(riem));
}

// The operator X -> R(X, xi) xi.
inline TensorField11 curvature_vs_reeb(const Riemann4& riem,
                                       const VectorField& xi) {
  TensorField11 r;
  for (int l = 0; l < 3; ++l) {
    for (int j = 0; j < 3; ++j) {
      Expr s = Expr::constant(0.0);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) s = s + riem[l][j][a][b] * xi[a] * xi[b];
      r[l][j] = s;
    }
  }
  return r;
}

// tau = L_xi g, computed from the Lie derivative directly so the identity
// tau = 2 g(phi ., h .) stays an independent cross-check.
inline Mat3 lie_derivative_metric(const VectorField& xi, const Mat3& g,
                                  DiffCache& dc) {
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Expr s = Expr::constant(0.0);
      for (int k = 0; k < 3; ++k) {
        s = s + xi[k] * dc.diff(g[i][j], k) + g[k][j] * dc.diff(xi[k], i) +
            g[i][k] * dc.diff(xi[k], j);
      }
      r[i][j] = s;
    }
  }
  return r;
}

// Comparison object for the torsion evolution law nabla_xi tau = 2a tauphi:
// raise tau to an operator, compose with phi on the left, lower back, i.e.
// tauphi(X, Y) = g(phi((g^-1 tau) X), Y). Since phi is g-skew this equals
// -tau(phi X, Y), which is the form assembled here. With this composition
// order the coefficient recovered on the classified structures is 2a where
// a = g(nabla_xi e, phi e); composing phi on the other side flips its sign.
inline Mat3 tau_phi(const ContactStructure& s, const Mat3& tau) {
  Mat3 m = mat_mul(mat_transpose(s.phi), tau);
  return mat_scale(Expr::constant(-1.0), m);
}

struct CurvatureBundle {
  Riemann4 riem;
  Mat3 ricci;             // (0,2)
  TensorField11 q;        // Ricci operator
  TensorField11 l_op;     // X -> R(X, xi) xi
  Mat3 tau;               // L_xi g
  Mat3 nabla_xi_tau;      // (0,2)
  TensorField11 nabla_xi_h;
};

inline CurvatureBundle make_curvature_bundle(const ContactStructure& s,
                                             const Connection& conn) {
  CurvatureBundle b;
  b.riem = riemann(conn);
  b.ricci = ricci_tensor(b.riem);
  b.q = mat_mul(s.g_inv, b.ricci);
  b.l_op = curvature_vs_reeb(b.riem, s.xi);
  b.tau = lie_derivative_metric(s.xi, s.g, *conn.cache);
  b.nabla_xi_tau = covariant_derivative_bilinear(conn, s.xi, b.tau);
  b.nabla_xi_h = covariant_derivative_op(conn, s.xi, s.h);
  return b;
}

// ---------------------------------------------------------------------------
// Identity suite. All residuals are entrywise max-abs of expressions that
// vanish identically on a contact metric structure:
//   metric_compatibility         nabla g = 0
//   first_bianchi                R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0
//   reeb_covariant_derivative    nabla_X xi = -phi X - phi h X
//   h_transport                  nabla_xi h = phi (I - h^2 - l)
//   jacobi_phi_conjugation       l - phi l phi = -2 (h^2 + phi^2)
//   jacobi_trace                 Tr l = 2 - tr h^2
//   ricci_reeb_reeb              S(xi, xi) = 2 - tr h^2
//   tau_via_phi_h                tau = 2 g(phi ., h .)
//   tau_transport                nabla_xi tau = 2 g(phi ., (nabla_xi h) .)
//   tau_norm                     |tau|^2 = 4 tr h^2
//   phi_covariant_derivative     (nabla_X phi) Y = g(X + hX, Y) xi
//                                               - eta(Y) (X + hX)

inline CheckReport check_identities(const ContactStructure& s,
                                    const Connection& conn,
                                    const CurvatureBundle& b,
                                    const std::vector<Point>& pts, double tol) {
  DiffCache& dc = *conn.cache;

  // nabla g, 27 components.
  std::array<Mat3, 3> nabla_g;
  {
    VectorField basis[3] = {{Expr::constant(1.0), Expr::constant(0.0), Expr::constant(0.0)},
                            {Expr::constant(0.0), Expr::constant(1.0), Expr::constant(0.0)},
                            {Expr::constant(0.0), Expr::constant(0.0), Expr::constant(1.0)}};
    for (int i = 0; i < 3; ++i)
      nabla_g[i] = covariant_derivative_bilinear(conn, basis[i], s.g);
  }

  // First Bianchi sum.
  Riemann4 bianchi;
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          bianchi[l][i][j][k] =
              b.riem[l][i][j][k] + b.riem[l][j][k][i] + b.riem[l][k][i][j];

  // nabla xi as a (1,1) operator, column j = nabla_{d_j} xi.
  Mat3 nabla_xi;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      Expr v = dc.diff(s.xi[k], j);
      for (int m = 0; m < 3; ++m) v = v + conn.gamma[k][j][m] * s.xi[m];
      nabla_xi[k][j] = v;
    }
  }
  Mat3 phih = mat_mul(s.phi, s.h);
  Mat3 reeb_cov = mat_add(nabla_xi, mat_add(s.phi, phih));

  Mat3 h2 = mat_mul(s.h, s.h);
  Mat3 phi2 = mat_mul(s.phi, s.phi);
  Mat3 ident = identity_mat();

  Mat3 h_transport = mat_sub(
      b.nabla_xi_h, mat_mul(s.phi, mat_sub(ident, mat_add(h2, b.l_op))));

  Mat3 jacobi_conj =
      mat_add(mat_sub(b.l_op, mat_mul(s.phi, mat_mul(b.l_op, s.phi))),
              mat_scale(Expr::constant(2.0), mat_add(h2, phi2)));

  Expr two_minus_trh2 = Expr::constant(2.0) - mat_trace(h2);
  Expr jacobi_trace = mat_trace(b.l_op) - two_minus_trh2;
  Expr ricci_reeb = metric_pair(b.ricci, s.xi, s.xi) - two_minus_trh2;

  Mat3 two_phitgh = mat_scale(Expr::constant(2.0),
                              mat_mul(mat_transpose(s.phi), mat_mul(s.g, s.h)));
  Mat3 tau_via = mat_sub(b.tau, two_phitgh);

  Mat3 tau_transport = mat_sub(
      b.nabla_xi_tau,
      mat_scale(Expr::constant(2.0),
                mat_mul(mat_transpose(s.phi), mat_mul(s.g, b.nabla_xi_h))));

  Expr tau_norm2 = mat_trace(mat_mul(s.g_inv, mat_mul(b.tau, mat_mul(s.g_inv, b.tau))));
  Expr tau_norm = tau_norm2 - Expr::constant(4.0) * mat_trace(h2);

  // Integrability of phi: 27 components.
  std::array<Mat3, 3> phi_cov;
  {
    Mat3 g_plus_gh = mat_add(s.g, mat_mul(s.g, s.h));
    for (int i = 0; i < 3; ++i) {
      VectorField ei{Expr::constant(i == 0 ? 1.0 : 0.0),
                     Expr::constant(i == 1 ? 1.0 : 0.0),
                     Expr::constant(i == 2 ? 1.0 : 0.0)};
      TensorField11 np = covariant_derivative_op(conn, ei, s.phi);
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          Expr rhs = g_plus_gh[i][j] * s.xi[k] -
                     s.eta[j] * ((i == k ? Expr::constant(1.0) : Expr::constant(0.0)) +
                                 s.h[k][i]);
          phi_cov[i][k][j] = np[k][j] - rhs;
        }
      }
    }
  }

  ResidualAccum acc_nabla_g("metric_compatibility");
  ResidualAccum acc_bianchi("first_bianchi");
  ResidualAccum acc_reeb("reeb_covariant_derivative");
  ResidualAccum acc_htrans("h_transport");
  ResidualAccum acc_conj("jacobi_phi_conjugation");
  ResidualAccum acc_jtrace("jacobi_trace");
  ResidualAccum acc_ricci("ricci_reeb_reeb");
  ResidualAccum acc_tau_via("tau_via_phi_h");
  ResidualAccum acc_tau_trans("tau_transport");
  ResidualAccum acc_tau_norm("tau_norm");
  ResidualAccum acc_phi_cov("phi_covariant_derivative");

  CheckReport report;
  report.tol = tol;

  for (const auto& p : pts) {
    EvalContext ctx(p, s.chart.coords);
    try {
      double w = 0.0;
      for (int i = 0; i < 3; ++i) w = std::max(w, nmat_abs_max(eval_mat(ctx, nabla_g[i])));
      acc_nabla_g.update(w, p);

      w = 0.0;
      for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
              w = std::max(w, std::abs(ctx.eval(bianchi[l][i][j][k])));
      acc_bianchi.update(w, p);

      acc_reeb.update(nmat_abs_max(eval_mat(ctx, reeb_cov)), p);
      acc_htrans.update(nmat_abs_max(eval_mat(ctx, h_transport)), p);
      acc_conj.update(nmat_abs_max(eval_mat(ctx, jacobi_conj)), p);
      acc_jtrace.update(std::abs(ctx.eval(jacobi_trace)), p);
      acc_ricci.update(std::abs(ctx.eval(ricci_reeb)), p);
      acc_tau_via.update(nmat_abs_max(eval_mat(ctx, tau_via)), p);
      acc_tau_trans.update(nmat_abs_max(eval_mat(ctx, tau_transport)), p);
      acc_tau_norm.update(std::abs(ctx.eval(tau_norm)), p);

      w = 0.0;
      for (int i = 0; i < 3; ++i) w = std::max(w, nmat_abs_max(eval_mat(ctx, phi_cov[i])));
      acc_phi_cov.update(w, p);

      ++report.points;
    } catch (const EvalError&) {
      report.skipped_points.push_back(p);
    }
  }

  for (const auto& acc : {acc_nabla_g, acc_bianchi, acc_reeb, acc_htrans,
                          acc_conj, acc_jtrace, acc_ricci, acc_tau_via,
                          acc_tau_trans, acc_tau_norm, acc_phi_cov}) {
    report.rows.push_back(acc.row(tol));
  }
  report.pass = report.points > 0;
  for (const auto& r : report.rows) report.pass = report.pass && r.pass;
  return report;
}

}  // namespace contact3
