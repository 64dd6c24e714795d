#pragma once

// Pointwise eigenframe analysis of a contact metric structure: the
// h-eigenvalue field lambda, the orthonormal frame (xi, e, phi e) with
// h e = +lambda e, the frame rotation coefficients a, b, c and the Ricci
// pairings S(xi, e), S(xi, phi e), the coefficients (kappa, mu, nu) of
// R(X, Y) xi in the eta/h/phi-h basis, and a sample-based classifier.
//
// Everything here lives on the open set where lambda > 0; points with
// lambda below kDegenerateLambda take the degenerate path (kappa only).

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "contact3/curvature.hpp"

namespace contact3 {

class NullityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDegenerateLambda = 1e-6;

// lambda as a scalar field: h has eigenvalues {0, lambda, -lambda}, so
// tr h^2 = 2 lambda^2.
inline Expr lambda_field_expr(const ContactStructure& s) {
  return sqrt(Expr::constant(0.5) * mat_trace(mat_mul(s.h, s.h)));
}

inline double lambda_from(const NMat3& h) {
  double tr2 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) tr2 += h[i][j] * h[j][i];
  return std::sqrt(std::max(0.0, 0.5 * tr2));
}

inline double lambda_at(const ContactStructure& s, const Point& p) {
  EvalContext ctx(p, s.chart.coords);
  return lambda_from(eval_mat(ctx, s.h));
}

struct PhiBasis {
  NVec3 xi{};
  NVec3 e{};
  NVec3 phie{};
  double lambda = 0.0;
  // Worst defect among g-orthonormality of the triple and the eigenvector
  // equations h e = lambda e, h phie = -lambda phie.
  double frame_residual = 0.0;
};

inline PhiBasis phi_basis_from(const NMat3& h, const NMat3& g,
                               const NMat3& phi, const NVec3& xi) {
  PhiBasis basis;
  basis.xi = xi;
  basis.lambda = lambda_from(h);
  if (basis.lambda < kDegenerateLambda)
    throw NullityError("h is degenerate at this point (lambda < 1e-6)");

  // (h^2 + lambda h) / (2 lambda^2) projects onto the +lambda eigenline.
  const double lam = basis.lambda;
  NMat3 h2 = nmat_mul(h, h);
  NMat3 proj{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      proj[i][j] = (h2[i][j] + lam * h[i][j]) / (2.0 * lam * lam);

  NVec3 best{};
  double best_norm2 = -1.0;
  for (int t = 0; t < 3; ++t) {
    NVec3 trial{};
    trial[t] = 1.0;
    NVec3 v = nmat_vec(proj, trial);
    double n2 = ndot_g(g, v, v);
    if (n2 > best_norm2) {
      best_norm2 = n2;
      best = v;
    }
  }
  if (best_norm2 <= 0.0)
    throw NullityError("eigenline projector vanished on all trial vectors");

  NVec3 e = nvec_scale(1.0 / std::sqrt(best_norm2), best);
  for (int i = 0; i < 3; ++i) {
    if (std::abs(e[i]) > 1e-9) {
      if (e[i] < 0.0) e = nvec_scale(-1.0, e);
      break;
    }
  }
  NVec3 phie = nmat_vec(phi, e);
  double pn = nnorm_g(g, phie);
  basis.frame_residual = std::abs(pn - 1.0);
  phie = nvec_scale(1.0 / pn, phie);
  basis.e = e;
  basis.phie = phie;

  double r = basis.frame_residual;
  r = std::max(r, std::abs(ndot_g(g, xi, xi) - 1.0));
  r = std::max(r, std::abs(ndot_g(g, xi, e)));
  r = std::max(r, std::abs(ndot_g(g, xi, phie)));
  r = std::max(r, std::abs(ndot_g(g, e, phie)));
  NVec3 he = nmat_vec(h, e);
  NVec3 hp = nmat_vec(h, phie);
  r = std::max(r, nvec_abs_max(nvec_sub(he, nvec_scale(lam, e))));
  r = std::max(r, nvec_abs_max(nvec_add(hp, nvec_scale(lam, phie))));
  basis.frame_residual = r;
  return basis;
}

inline PhiBasis phi_basis_at(const ContactStructure& s, const Point& p) {
  EvalContext ctx(p, s.chart.coords);
  return phi_basis_from(eval_mat(ctx, s.h), eval_mat(ctx, s.g),
                        eval_mat(ctx, s.phi), eval_vec(ctx, s.xi));
}

// Coefficients of R(X, Y) xi at one point in the basis
//   kappa (eta(Y)X - eta(X)Y) + mu (eta(Y)hX - eta(X)hY)
//     + nu (eta(Y)phi hX - eta(X)phi hY),
// extracted from the operator X -> R(X, xi) xi on the eigenframe. residual
// is the worst g-norm defect of the condition over the frame pairs,
// including R(e, phie) xi which the condition forces to vanish.
struct PointNullity {
  Point p{};
  double lambda = 0.0;
  double kappa = 0.0;
  std::optional<double> mu;
  std::optional<double> nu;
  double residual = 0.0;
};

namespace detail {

struct RiemannEval {
  double r[3][3][3][3];
};

inline RiemannEval eval_riemann(EvalContext& ctx, const Riemann4& riem) {
  RiemannEval out{};
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) out.r[l][i][j][k] = ctx.eval(riem[l][i][j][k]);
  return out;
}

// Component vector of R(X, Y) Z for numeric X, Y, Z.
inline NVec3 riemann_apply(const RiemannEval& re, const NVec3& x,
                           const NVec3& y, const NVec3& z) {
  NVec3 out{};
  for (int l = 0; l < 3; ++l) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) s += re.r[l][i][j][k] * x[i] * y[j] * z[k];
    out[l] = s;
  }
  return out;
}

}  // namespace detail

inline PointNullity extract_kmn_at(const ContactStructure& s,
                                   const CurvatureBundle& b, const Point& p) {
  EvalContext ctx(p, s.chart.coords);
  NMat3 h = eval_mat(ctx, s.h);
  NMat3 g = eval_mat(ctx, s.g);
  NMat3 phi = eval_mat(ctx, s.phi);
  NVec3 xi = eval_vec(ctx, s.xi);
  NVec3 eta = eval_vec(ctx, s.eta);
  detail::RiemannEval re = detail::eval_riemann(ctx, b.riem);

  PointNullity out;
  out.p = p;
  out.lambda = lambda_from(h);

  NMat3 phih = nmat_mul(phi, h);
  auto eta_of = [&](const NVec3& v) {
    return eta[0] * v[0] + eta[1] * v[1] + eta[2] * v[2];
  };
  // Defect of the condition on the pair (X, Y).
  auto defect = [&](const NVec3& x, const NVec3& y, double kappa, double mu,
                    double nu) {
    NVec3 lhs = detail::riemann_apply(re, x, y, xi);
    NVec3 rhs{};
    double ex = eta_of(x), ey = eta_of(y);
    NVec3 hx = nmat_vec(h, x), hy = nmat_vec(h, y);
    NVec3 px = nmat_vec(phih, x), py = nmat_vec(phih, y);
    for (int i = 0; i < 3; ++i) {
      rhs[i] = kappa * (ey * x[i] - ex * y[i]) + mu * (ey * hx[i] - ex * hy[i]) +
               nu * (ey * px[i] - ex * py[i]);
    }
    return nnorm_g(g, nvec_sub(lhs, rhs));
  };

  if (out.lambda < kDegenerateLambda) {
    // h vanishes: only kappa survives, read off tr of X -> R(X, xi) xi.
    NMat3 l{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) l[i][j] = ctx.eval(b.l_op[i][j]);
    out.kappa = 0.5 * (l[0][0] + l[1][1] + l[2][2]);
    NVec3 d1{1.0, 0.0, 0.0}, d2{0.0, 1.0, 0.0}, d3{0.0, 0.0, 1.0};
    double r = defect(d1, d2, out.kappa, 0.0, 0.0);
    r = std::max(r, defect(d1, d3, out.kappa, 0.0, 0.0));
    r = std::max(r, defect(d2, d3, out.kappa, 0.0, 0.0));
    out.residual = r;
    return out;
  }

  PhiBasis basis = phi_basis_from(h, g, phi, xi);
  const double lam = basis.lambda;
  NVec3 le = detail::riemann_apply(re, basis.e, xi, xi);
  NVec3 lp = detail::riemann_apply(re, basis.phie, xi, xi);
  double c1 = ndot_g(g, le, basis.e);
  double c2 = ndot_g(g, lp, basis.phie);
  double c3 = ndot_g(g, le, basis.phie);
  double c4 = ndot_g(g, lp, basis.e);

  out.kappa = 0.5 * (c1 + c2);
  out.mu = (c1 - c2) / (2.0 * lam);
  out.nu = (c3 + c4) / (2.0 * lam);
  double r = defect(basis.e, xi, out.kappa, *out.mu, *out.nu);
  r = std::max(r, defect(basis.phie, xi, out.kappa, *out.mu, *out.nu));
  r = std::max(r, defect(basis.e, basis.phie, out.kappa, *out.mu, *out.nu));
  out.residual = r;
  return out;
}

// lambda together with its coordinate differential, for gradient work.
struct LambdaField {
  Expr value;
  Vec3 differential;
};

inline LambdaField make_lambda_field(const ContactStructure& s, DiffCache& dc) {
  LambdaField f{lambda_field_expr(s), {}};
  for (int i = 0; i < 3; ++i) f.differential[i] = dc.diff(f.value, i);
  return f;
}

inline double grad_lambda_norm_at(const ContactStructure& s,
                                  const LambdaField& f, const Point& p) {
  EvalContext ctx(p, s.chart.coords);
  NVec3 d = eval_vec(ctx, f.differential);
  NMat3 ginv = eval_mat(ctx, s.g_inv);
  return std::sqrt(std::max(0.0, ndot_g(ginv, d, d)));
}

// Frame rotation coefficients and their defining relations at one point.
// The eigenframe is differentiated by central finite differences with the
// neighbouring frames sign-aligned to the center frame.
struct FrameData {
  PhiBasis basis;
  double a = 0.0;  // g(nabla_xi e, phi e)
  double b = 0.0;  // g(nabla_e e, phi e)
  double c = 0.0;  // g(nabla_phie phie, e)
  double ricci_xi_e = 0.0;     // S(xi, e)
  double ricci_xi_phie = 0.0;  // S(xi, phi e)
  double xi_dot_lambda = 0.0;
  double e_dot_lambda = 0.0;
  double phie_dot_lambda = 0.0;
  // Worst g-norm defect of the nine frame covariant-derivative relations.
  double transport_residual = 0.0;
  // Defects of 2*lambda*b = (phie.lambda) + S(xi,e) and
  // 2*lambda*c = (e.lambda) + S(xi,phie).
  double coefficient_residual = 0.0;
  // Max-abs defect of nabla_xi h = -2a h phi + (xi.lambda) h/lambda.
  double h_evolution_residual = 0.0;
  // Max-abs defect of nabla_xi tau = 2a tauphi (tau_phi composition).
  double tau_evolution_residual = 0.0;
};

inline FrameData abc_at(const ContactStructure& s, const Connection& conn,
                        const CurvatureBundle& b, const LambdaField& lam_field,
                        const Point& p, double fd_step = 1e-6) {
  EvalContext ctx(p, s.chart.coords);
  NMat3 h = eval_mat(ctx, s.h);
  NMat3 g = eval_mat(ctx, s.g);
  NMat3 phi = eval_mat(ctx, s.phi);
  NVec3 xi = eval_vec(ctx, s.xi);

  FrameData out;
  out.basis = phi_basis_from(h, g, phi, xi);
  const double lam = out.basis.lambda;
  const NVec3& e = out.basis.e;
  const NVec3& phie = out.basis.phie;

  // Eigenframe fields around p, aligned to the center signs.
  NVec3 e_nbr[3][2], phie_nbr[3][2];
  for (int i = 0; i < 3; ++i) {
    for (int side = 0; side < 2; ++side) {
      Point q = p;
      q[static_cast<std::size_t>(i)] += (side == 0 ? -fd_step : fd_step);
      PhiBasis nb = phi_basis_at(s, q);
      double align = nb.e[0] * e[0] + nb.e[1] * e[1] + nb.e[2] * e[2];
      if (align < 0.0) {
        nb.e = nvec_scale(-1.0, nb.e);
        nb.phie = nvec_scale(-1.0, nb.phie);
      }
      e_nbr[i][side] = nb.e;
      phie_nbr[i][side] = nb.phie;
    }
  }
  double de[3][3], dphie[3][3];  // de[i][k] = d_i e^k
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      de[i][k] = (e_nbr[i][1][k] - e_nbr[i][0][k]) / (2.0 * fd_step);
      dphie[i][k] = (phie_nbr[i][1][k] - phie_nbr[i][0][k]) / (2.0 * fd_step);
    }
  }

  double gamma[3][3][3];
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gamma[k][i][j] = ctx.eval(conn.gamma[k][i][j]);

  // nabla_X F for a numerically differentiated field F.
  auto cov = [&](const NVec3& x, const double dF[3][3], const NVec3& f) {
    NVec3 out_v{};
    for (int k = 0; k < 3; ++k) {
      double v = 0.0;
      for (int i = 0; i < 3; ++i) {
        v += x[i] * dF[i][k];
        for (int m = 0; m < 3; ++m) v += x[i] * gamma[k][i][m] * f[m];
      }
      out_v[k] = v;
    }
    return out_v;
  };
  // nabla_X xi, exact (xi is an explicit coordinate field).
  double dxi[3][3];
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) dxi[i][k] = ctx.eval(conn.cache->diff(s.xi[k], i));
  auto cov_xi = [&](const NVec3& x) { return cov(x, dxi, xi); };

  NVec3 n_xi_e = cov(xi, de, e);
  NVec3 n_e_e = cov(e, de, e);
  NVec3 n_phie_e = cov(phie, de, e);
  NVec3 n_xi_phie = cov(xi, dphie, phie);
  NVec3 n_e_phie = cov(e, dphie, phie);
  NVec3 n_phie_phie = cov(phie, dphie, phie);
  NVec3 n_xi_xi = cov_xi(xi);
  NVec3 n_e_xi = cov_xi(e);
  NVec3 n_phie_xi = cov_xi(phie);

  out.a = ndot_g(g, n_xi_e, phie);
  out.b = ndot_g(g, n_e_e, phie);
  out.c = ndot_g(g, n_phie_phie, e);

  NMat3 ricci = eval_mat(ctx, b.ricci);
  out.ricci_xi_e = ndot_g(ricci, xi, e);
  out.ricci_xi_phie = ndot_g(ricci, xi, phie);

  NVec3 dlam = eval_vec(ctx, lam_field.differential);
  auto along = [&](const NVec3& x) {
    return x[0] * dlam[0] + x[1] * dlam[1] + x[2] * dlam[2];
  };
  out.xi_dot_lambda = along(xi);
  out.e_dot_lambda = along(e);
  out.phie_dot_lambda = along(phie);

  auto combo = [&](double ce, double cp, double cx) {
    NVec3 v{};
    for (int i = 0; i < 3; ++i) v[i] = ce * e[i] + cp * phie[i] + cx * xi[i];
    return v;
  };
  auto dg = [&](const NVec3& got, const NVec3& want) {
    return nnorm_g(g, nvec_sub(got, want));
  };
  double r = dg(n_xi_e, combo(0.0, out.a, 0.0));
  r = std::max(r, dg(n_e_e, combo(0.0, out.b, 0.0)));
  r = std::max(r, dg(n_phie_e, combo(0.0, -out.c, lam - 1.0)));
  r = std::max(r, dg(n_xi_phie, combo(-out.a, 0.0, 0.0)));
  r = std::max(r, dg(n_e_phie, combo(-out.b, 0.0, 1.0 + lam)));
  r = std::max(r, dg(n_phie_phie, combo(out.c, 0.0, 0.0)));
  r = std::max(r, dg(n_xi_xi, combo(0.0, 0.0, 0.0)));
  r = std::max(r, dg(n_e_xi, combo(0.0, -(1.0 + lam), 0.0)));
  r = std::max(r, dg(n_phie_xi, combo(1.0 - lam, 0.0, 0.0)));
  out.transport_residual = r;

  out.coefficient_residual = std::max(
      std::abs(2.0 * lam * out.b - out.phie_dot_lambda - out.ricci_xi_e),
      std::abs(2.0 * lam * out.c - out.e_dot_lambda - out.ricci_xi_phie));

  NMat3 nh = eval_mat(ctx, b.nabla_xi_h);
  NMat3 hphi = nmat_mul(h, phi);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double want = -2.0 * out.a * hphi[i][j] + out.xi_dot_lambda * h[i][j] / lam;
      worst = std::max(worst, std::abs(nh[i][j] - want));
    }
  }
  out.h_evolution_residual = worst;

  NMat3 nt = eval_mat(ctx, b.nabla_xi_tau);
  NMat3 tau = eval_mat(ctx, b.tau);
  worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double tp = 0.0;  // same composition as tau_phi: -tau(phi d_i, d_j)
      for (int k = 0; k < 3; ++k) tp -= phi[k][i] * tau[k][j];
      worst = std::max(worst, std::abs(nt[i][j] - 2.0 * out.a * tp));
    }
  }
  out.tau_evolution_residual = worst;
  return out;
}

// Sample-based classification of the structure by its nullity behaviour.
struct ClassifyResult {
  std::string label;
  int points = 0;
  int degenerate_points = 0;
  double lambda_max = 0.0;
  double h_max_abs = 0.0;
  double kappa_mean = 0.0, kappa_spread = 0.0;
  double mu_mean = 0.0, mu_spread = 0.0;
  double nu_mean = 0.0, nu_max_abs = 0.0;
  double worst_residual = 0.0;
  std::vector<PointNullity> samples;
};

namespace detail {

inline bool is_constant_series(double mean, double spread) {
  return spread < 1e-6 * (1.0 + std::abs(mean));
}

inline void mean_spread(const std::vector<double>& xs, double& mean,
                        double& spread) {
  mean = 0.0;
  spread = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  spread = std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace detail

inline ClassifyResult classify(const ContactStructure& s,
                               const CurvatureBundle& b,
                               const std::vector<Point>& pts, double tol) {
  ClassifyResult out;
  std::vector<double> kappas, mus, nus, deg_kappas;
  for (const auto& p : pts) {
    PointNullity pn = extract_kmn_at(s, b, p);
    out.samples.push_back(pn);
    ++out.points;
    out.lambda_max = std::max(out.lambda_max, pn.lambda);
    out.worst_residual = std::max(out.worst_residual, pn.residual);
    {
      EvalContext ctx(p, s.chart.coords);
      out.h_max_abs = std::max(out.h_max_abs, nmat_abs_max(eval_mat(ctx, s.h)));
    }
    if (pn.mu.has_value()) {
      kappas.push_back(pn.kappa);
      mus.push_back(*pn.mu);
      nus.push_back(*pn.nu);
    } else {
      ++out.degenerate_points;
      deg_kappas.push_back(pn.kappa);
    }
  }

  if (out.degenerate_points == out.points) {
    detail::mean_spread(deg_kappas, out.kappa_mean, out.kappa_spread);
    out.label = "Sasakian";
    return out;
  }

  detail::mean_spread(kappas, out.kappa_mean, out.kappa_spread);
  detail::mean_spread(mus, out.mu_mean, out.mu_spread);
  double nu_spread = 0.0;
  detail::mean_spread(nus, out.nu_mean, nu_spread);
  for (double n : nus) out.nu_max_abs = std::max(out.nu_max_abs, std::abs(n));

  if (out.worst_residual > tol) {
    out.label = "generic";
  } else if (out.nu_max_abs > tol) {
    out.label = "(kappa,mu,nu)";
  } else if (detail::is_constant_series(out.kappa_mean, out.kappa_spread) &&
             detail::is_constant_series(out.mu_mean, out.mu_spread)) {
    out.label = "(kappa,mu)";
  } else {
    out.label = "generalized (kappa,mu)";
  }
  return out;
}

}  // namespace contact3
