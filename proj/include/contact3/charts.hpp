#pragma once

// Chart builders for the two normal forms of a structure whose eigenvalue
// has a unit-length gradient along one leg of the moving frame, the
// verification suite for the construction laws those charts satisfy, and
// the catalog of shipped structures with their claimed invariants.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "contact3/nullity.hpp"
#include "contact3/specfile.hpp"

namespace contact3 {

class ChartError : public std::runtime_error {
 public:
  explicit ChartError(const std::string& message)
      : std::runtime_error(message) {}
};

// ---------------------------------------------------------------------------
// Closed-form integration of 1/k3 in z. Supported integrands are sums of
// monomials c*z^n: the power rule for n != -1, a logarithm for n = -1.
// Anything outside that table is rejected.

namespace detail {

struct Monomial {
  double coeff = 0.0;
  int power = 0;
};

inline std::optional<std::vector<Monomial>> monomials_in_z(const Expr& e) {
  using K = ExprKind;
  using List = std::vector<Monomial>;
  switch (e.kind()) {
    case K::Constant:
      return List{{e.constant_value(), 0}};
    case K::Coord:
      if (e.coord_index() != 2) return std::nullopt;
      return List{{1.0, 1}};
    case K::Neg: {
      auto a = monomials_in_z(e.child_a());
      if (!a) return std::nullopt;
      for (auto& m : *a) m.coeff = -m.coeff;
      return a;
    }
    case K::Add:
    case K::Sub: {
      auto a = monomials_in_z(e.child_a());
      auto b = monomials_in_z(e.child_b());
      if (!a || !b) return std::nullopt;
      double sign = e.kind() == K::Sub ? -1.0 : 1.0;
      for (const auto& m : *b) a->push_back({sign * m.coeff, m.power});
      return a;
    }
    case K::Mul: {
      auto a = monomials_in_z(e.child_a());
      auto b = monomials_in_z(e.child_b());
      if (!a || !b) return std::nullopt;
      List out;
      for (const auto& x : *a)
        for (const auto& y : *b) out.push_back({x.coeff * y.coeff, x.power + y.power});
      return out;
    }
    case K::Div: {
      auto a = monomials_in_z(e.child_a());
      auto b = monomials_in_z(e.child_b());
      if (!a || !b || b->size() != 1 || (*b)[0].coeff == 0.0) return std::nullopt;
      for (auto& m : *a) {
        m.coeff /= (*b)[0].coeff;
        m.power -= (*b)[0].power;
      }
      return a;
    }
    case K::Pow: {
      auto a = monomials_in_z(e.child_a());
      if (!a || a->size() != 1) return std::nullopt;
      int n = e.exponent();
      if ((*a)[0].coeff == 0.0 && n <= 0) return std::nullopt;
      return List{{std::pow((*a)[0].coeff, n), (*a)[0].power * n}};
    }
    default:
      return std::nullopt;
  }
}

}  // namespace detail

inline Expr integrate_reciprocal(const Expr& k3, double lambda_const) {
  if (k3.is_constant(0.0)) throw ChartError("k3 must not be zero");
  auto terms = detail::monomials_in_z(Expr::constant(1.0) / k3);
  if (!terms) {
    throw ChartError(
        "cannot integrate 1/k3 in closed form: 1/k3 must reduce to a sum of "
        "monomials c*z^n");
  }
  std::map<int, double> by_power;
  for (const auto& m : *terms) by_power[m.power] += m.coeff;

  Expr z = Expr::coord(2);
  Expr lam = Expr::constant(lambda_const);
  for (const auto& [n, c] : by_power) {
    if (c == 0.0) continue;
    if (n == -1) {
      lam = lam + Expr::constant(c) * ln(z);
    } else {
      lam = lam + Expr::constant(c / (n + 1)) * pow_int(z, n + 1);
    }
  }
  return simplify(lam);
}

// ---------------------------------------------------------------------------
// Chart construction.

struct ChartParams {
  int case_id = 1;                  // which leg of the frame carries grad(lambda)
  Expr k3 = Expr::constant(1.0);    // third component of the moving leg, in z
  Expr r = Expr::constant(0.0);     // free profile in z
  Expr beta = Expr::constant(0.0);  // free profile in z
  Expr H = Expr::constant(0.0);     // free profile in y and z
  double lambda_const = 0.0;        // integration constant for the eigenvalue
  Interval z_hint{0.25, 4.0};       // range scanned for an admissible z box
};

struct GeneratedChart {
  ChartParams params;
  Expr lambda;  // prescribed eigenvalue profile, a function of z
  Expr F;       // dH/dy
  Expr a;       // lambda - 1 in case 1, -1 - lambda in case 2
  ManifoldSpec spec;
};

namespace detail {

inline void require_free_of(const Expr& e, int coord, const char* what) {
  if (!simplify(diff(e, coord)).is_constant(0.0)) {
    throw ChartError(std::string(what) + " must not depend on " +
                     kDefaultCoords[coord]);
  }
}

// Longest grid run inside the hint where k3 stays away from zero and the
// eigenvalue profile stays positive; both with a fixed safety margin.
inline Interval admissible_z_interval(const Expr& k3, const Expr& lambda,
                                      Interval hint) {
  constexpr int kGrid = 1024;
  constexpr int kMinRun = 16;
  constexpr double kMargin = 0.05;
  if (!(hint.lo < hint.hi)) throw ChartError("z hint must have lo < hi");

  const double step = (hint.hi - hint.lo) / (kGrid - 1);
  int best_lo = -1, best_len = 0, run_lo = -1;
  for (int i = 0; i < kGrid; ++i) {
    double z = hint.lo + step * i;
    bool ok = false;
    try {
      EvalContext ctx(Point{0.0, 0.0, z});
      ok = std::abs(ctx.eval(k3)) >= kMargin && ctx.eval(lambda) >= kMargin;
    } catch (const EvalError&) {
      ok = false;
    }
    if (ok) {
      if (run_lo < 0) run_lo = i;
      int len = i - run_lo + 1;
      if (len > best_len) {
        best_len = len;
        best_lo = run_lo;
      }
    } else {
      run_lo = -1;
    }
  }
  if (best_len < kMinRun) {
    throw ChartError(
        "no z interval inside the hint keeps k3 away from zero and the "
        "eigenvalue positive");
  }
  return {hint.lo + step * best_lo, hint.lo + step * (best_lo + best_len - 1)};
}

}  // namespace detail

inline GeneratedChart build_chart(const ChartParams& params) {
  if (params.case_id != 1 && params.case_id != 2)
    throw ChartError("case must be 1 or 2");
  detail::require_free_of(params.k3, 0, "k3");
  detail::require_free_of(params.k3, 1, "k3");
  detail::require_free_of(params.r, 0, "r");
  detail::require_free_of(params.r, 1, "r");
  detail::require_free_of(params.beta, 0, "beta");
  detail::require_free_of(params.beta, 1, "beta");
  detail::require_free_of(params.H, 0, "H");

  GeneratedChart gc;
  gc.params = params;
  gc.lambda = integrate_reciprocal(params.k3, params.lambda_const);
  gc.F = simplify(diff(params.H, 1));

  Expr x = Expr::coord(0), y = Expr::coord(1);
  Expr two_lam = Expr::constant(2.0) * gc.lambda;
  Expr k2 = Expr::constant(2.0) * x * gc.lambda -
            (params.H + y) / two_lam + params.beta;
  Expr k1 = params.case_id == 1 ? Expr::constant(-2.0) * y + params.r
                                : Expr::constant(2.0) * y + params.r;

  ManifoldSpec& spec = gc.spec;
  spec.mode = SpecMode::Frame;
  spec.chart.box[2] =
      detail::admissible_z_interval(params.k3, gc.lambda, params.z_hint);
  spec.chart.constraints.push_back({gc.lambda, ConstraintKind::Positive});
  if (params.k3.kind() != ExprKind::Constant)
    spec.chart.constraints.push_back({params.k3, ConstraintKind::NonZero});

  Vec3 moving{simplify(k1), simplify(k2), params.k3};
  spec.xi = {Expr::constant(1.0), Expr::constant(0.0), Expr::constant(0.0)};
  if (params.case_id == 1) {
    spec.name = "case1-chart";
    spec.e = moving;
    spec.phie = {Expr::constant(0.0), Expr::constant(1.0), Expr::constant(0.0)};
    gc.a = simplify(gc.lambda - Expr::constant(1.0));
  } else {
    spec.name = "case2-chart";
    spec.e = {Expr::constant(0.0), Expr::constant(1.0), Expr::constant(0.0)};
    spec.phie = moving;
    gc.a = simplify(Expr::constant(-1.0) - gc.lambda);
  }
  return gc;
}

inline GeneratedChart build_case1(const ChartParams& params) {
  ChartParams p = params;
  p.case_id = 1;
  return build_chart(p);
}

inline GeneratedChart build_case2(const ChartParams& params) {
  ChartParams p = params;
  p.case_id = 2;
  return build_chart(p);
}

// ---------------------------------------------------------------------------
// Construction-law verification. Every row is a residual that vanishes
// identically when the generated chart satisfies the laws that define it:
// the frame bracket relations, the closed-form connection coefficients, the
// Ricci pattern along the Reeb leg, the unit gradient of the eigenvalue, and
// the torsion evolution law.

inline CheckReport verify_chart_laws(const GeneratedChart& gc, int n_points,
                                     std::uint64_t seed, double tol) {
  ContactStructure s = build_structure(gc.spec);
  Connection conn = christoffel(s);
  DiffCache& dc = *conn.cache;
  CurvatureBundle bun = make_curvature_bundle(s, conn);

  const VectorField& xi = gc.spec.xi;
  const VectorField& e = gc.spec.e;
  const VectorField& phie = gc.spec.phie;
  const bool case1 = gc.params.case_id == 1;

  Expr two_lam = Expr::constant(2.0) * gc.lambda;
  Expr b_cf = case1 ? Expr::constant(0.0) : (gc.F + Expr::constant(1.0)) / two_lam;
  Expr c_cf = case1 ? (gc.F + Expr::constant(1.0)) / two_lam : Expr::constant(0.0);
  Expr a_cf = gc.a;
  Expr big_a_cf = case1 ? Expr::constant(0.0) : gc.F;
  Expr big_b_cf = case1 ? gc.F : Expr::constant(0.0);

  // Bracket relations of the defining frame.
  Vec3 br1 = vec_sub(lie_bracket(e, phie, dc),
                     vec_add(vec_sub(vec_scale(c_cf, phie), vec_scale(b_cf, e)),
                             vec_scale(Expr::constant(2.0), xi)));
  Vec3 br2 = case1 ? vec_add(lie_bracket(e, xi, dc), vec_scale(two_lam, phie))
                   : lie_bracket(e, xi, dc);
  Vec3 br3 = case1 ? lie_bracket(phie, xi, dc)
                   : vec_add(lie_bracket(phie, xi, dc), vec_scale(two_lam, e));

  // Connection coefficients of the frame against their closed forms.
  Expr a_gap = metric_pair(s.g, covariant_derivative(conn, xi, e), phie) - a_cf;
  Expr b_gap = metric_pair(s.g, covariant_derivative(conn, e, e), phie) - b_cf;
  Expr c_gap = metric_pair(s.g, covariant_derivative(conn, phie, phie), e) - c_cf;

  // Ricci pattern along the Reeb leg.
  Expr ric_e_gap = metric_pair(bun.ricci, xi, e) - big_a_cf;
  Expr ric_phie_gap = metric_pair(bun.ricci, xi, phie) - big_b_cf;

  // Eigenvalue rows: pipeline field vs the prescribed profile, its gradient,
  // and its invariance along the Reeb field.
  LambdaField lf = make_lambda_field(s, dc);
  Expr profile_gap = lf.value - gc.lambda;
  Expr xi_dot_lambda = form_apply(lf.differential, xi);
  Expr deriv_gap = dc.diff(gc.lambda, 2) * gc.params.k3 - Expr::constant(1.0);
  Expr det_gap =
      det3(s.g) * gc.params.k3 * gc.params.k3 - Expr::constant(1.0);

  // Torsion evolution along the Reeb field.
  Mat3 torsion_gap =
      mat_sub(bun.nabla_xi_tau,
              mat_scale(Expr::constant(2.0) * a_cf, tau_phi(s, bun.tau)));

  ResidualAccum bracket_e_phie("bracket_e_phie");
  ResidualAccum bracket_e_xi("bracket_e_xi");
  ResidualAccum bracket_phie_xi("bracket_phie_xi");
  ResidualAccum coefficient_a("coefficient_a");
  ResidualAccum coefficient_b("coefficient_b");
  ResidualAccum coefficient_c("coefficient_c");
  ResidualAccum ricci_xi_e("ricci_xi_e");
  ResidualAccum ricci_xi_phie("ricci_xi_phie");
  ResidualAccum eigenvalue_profile("eigenvalue_profile");
  ResidualAccum reeb_derivative("reeb_eigenvalue_derivative");
  ResidualAccum gradient_norm("eigenvalue_gradient_norm");
  ResidualAccum derivative_product("eigenvalue_derivative_times_k3");
  ResidualAccum metric_determinant("metric_determinant");
  ResidualAccum torsion_evolution("torsion_evolution");

  CheckReport report;
  report.tol = tol;
  for (const auto& p : sample_points(s.chart, n_points, seed)) {
    try {
      EvalContext ctx(p, s.chart.coords);
      NMat3 gm = eval_mat(ctx, s.g);
      bracket_e_phie.update(nnorm_g(gm, eval_vec(ctx, br1)), p);
      bracket_e_xi.update(nnorm_g(gm, eval_vec(ctx, br2)), p);
      bracket_phie_xi.update(nnorm_g(gm, eval_vec(ctx, br3)), p);
      coefficient_a.update(std::abs(ctx.eval(a_gap)), p);
      coefficient_b.update(std::abs(ctx.eval(b_gap)), p);
      coefficient_c.update(std::abs(ctx.eval(c_gap)), p);
      ricci_xi_e.update(std::abs(ctx.eval(ric_e_gap)), p);
      ricci_xi_phie.update(std::abs(ctx.eval(ric_phie_gap)), p);
      eigenvalue_profile.update(std::abs(ctx.eval(profile_gap)), p);
      reeb_derivative.update(std::abs(ctx.eval(xi_dot_lambda)), p);
      gradient_norm.update(std::abs(grad_lambda_norm_at(s, lf, p) - 1.0), p);
      derivative_product.update(std::abs(ctx.eval(deriv_gap)), p);
      metric_determinant.update(std::abs(ctx.eval(det_gap)), p);
      torsion_evolution.update(nmat_abs_max(eval_mat(ctx, torsion_gap)), p);
      ++report.points;
    } catch (const EvalError&) {
      report.skipped_points.push_back(p);
    }
  }

  for (const auto* acc :
       {&bracket_e_phie, &bracket_e_xi, &bracket_phie_xi, &coefficient_a,
        &coefficient_b, &coefficient_c, &ricci_xi_e, &ricci_xi_phie,
        &eigenvalue_profile, &reeb_derivative, &gradient_norm,
        &derivative_product, &metric_determinant, &torsion_evolution}) {
    report.rows.push_back(acc->row(tol));
  }
  report.pass = report.points > 0;
  for (const auto& row : report.rows) report.pass = report.pass && row.pass;
  return report;
}

// ---------------------------------------------------------------------------
// Catalog of shipped structures and their claimed invariants. A claim whose
// value is known to disagree with what the built structure satisfies is
// marked known_mismatch; the runner reports it without failing the entry.

struct CatalogClaim {
  std::string quantity;  // lambda | kappa | mu | nu | tau_coefficient
  Expr value;
  std::string note;
  bool known_mismatch = false;
};

struct CatalogEntry {
  std::string name;
  std::string summary;
  std::string expected_label;
  ManifoldSpec spec;
  std::vector<CatalogClaim> claims;
};

namespace detail {

inline CatalogClaim claim(const std::string& quantity, const std::string& value,
                          const CoordNames& coords, const std::string& note,
                          bool known_mismatch = false) {
  return CatalogClaim{quantity, parse(value, coords), note, known_mismatch};
}

}  // namespace detail

inline std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> entries;

  {
    CatalogEntry e;
    e.name = "example1";
    e.summary = "reciprocal-power frame on the slab x3 != 0";
    e.expected_label = "generalized (kappa,mu)";
    e.spec = parse_manifold_spec(
        "[manifold]\n"
        "name = example1\n"
        "coords = x1 x2 x3\n"
        "box = -1 1 -1 1 0.5 3\n"
        "nonzero = x3\n"
        "[frame]\n"
        "xi = 1, 0, 0\n"
        "e = -2*x2*x3, 2*x1/x3^3, -1/x3^2\n"
        "phie = 0, 1/x3, 0\n");
    const CoordNames& c = e.spec.chart.coords;
    e.claims = {
        detail::claim("lambda", "1/x3^2", c, "eigenvalue of the structure tensor"),
        detail::claim("kappa", "(x3^4 - 1)/x3^4", c, "claimed curvature coefficient"),
        detail::claim("mu", "2*(1 - 1/x3^2)", c, "claimed curvature coefficient"),
        detail::claim("nu", "0", c, "claimed curvature coefficient"),
        detail::claim("tau_coefficient", "2*(1 - 1/x3^2)", c,
                      "claimed with the opposite sign to this library's torsion "
                      "composition; the computed coefficient is 2*(1/x3^2 - 1)",
                      true),
    };
    entries.push_back(std::move(e));
  }

  {
    CatalogEntry e;
    e.name = "example3";
    e.summary = "unit-k3 chart whose eigenvalue grows linearly in z";
    e.expected_label = "generic";
    e.spec = parse_manifold_spec(
        "[manifold]\n"
        "name = example3\n"
        "coords = x y z\n"
        "box = -1 1 -1 1 0.25 2\n"
        "nonzero = z\n"
        "[frame]\n"
        "xi = 1, 0, 0\n"
        "e = -2*y, 2*x*z - 1, 1\n"
        "phie = 0, 1, 0\n");
    const CoordNames& c = e.spec.chart.coords;
    e.claims = {
        detail::claim("lambda", "z", c, "eigenvalue of the structure tensor"),
        detail::claim("tau_coefficient", "2*(z - 1)", c,
                      "torsion evolution coefficient 2*a with a = z - 1"),
    };
    entries.push_back(std::move(e));
  }

  {
    CatalogEntry e;
    e.name = "example4";
    e.summary =
        "chart kept for the discrepancy protocol: its claimed invariants "
        "disagree with what the built structure satisfies";
    e.expected_label = "generic";
    e.spec = parse_manifold_spec(
        "[manifold]\n"
        "name = example4\n"
        "coords = x y z\n"
        "box = -1 1 -1 1 0.25 2\n"
        "positive = z\n"
        "[frame]\n"
        "xi = 1, 0, 0\n"
        "e = 0, 1, 0\n"
        "phie = 2*y, 2*x*z - (2*z + y)/(2*z), z\n");
    const CoordNames& c = e.spec.chart.coords;
    e.claims = {
        detail::claim("lambda", "ln(z)", c,
                      "claimed eigenvalue profile; the built structure tensor "
                      "disagrees",
                      true),
        detail::claim("lambda", "z", c,
                      "eigenvalue of the structure tensor as built"),
        detail::claim("kappa", "1 - ln(z)^2", c,
                      "claimed curvature coefficient; the computed value is "
                      "1 - z^2",
                      true),
        detail::claim("mu", "2*(-1 - ln(z))", c,
                      "claimed curvature coefficient; the computed value is "
                      "2*(1 + z)",
                      true),
        detail::claim("nu", "0", c, "claimed curvature coefficient"),
        detail::claim("tau_coefficient", "2*(-ln(z) - 1)", c,
                      "claimed torsion evolution coefficient; the computed "
                      "coefficient is 2*(-1 - z)",
                      true),
    };
    entries.push_back(std::move(e));
  }

  {
    CatalogEntry e;
    e.name = "sasakian";
    e.summary = "standard structure with vanishing h";
    e.expected_label = "Sasakian";
    e.spec = parse_manifold_spec(
        "[manifold]\n"
        "name = sasakian\n"
        "coords = x y z\n"
        "box = -1 1 -1 1 -1 1\n"
        "[frame]\n"
        "xi = 0, 0, 2\n"
        "e = 0, 2, 0\n"
        "phie = 2, 0, 2*y\n");
    const CoordNames& c = e.spec.chart.coords;
    e.claims = {
        detail::claim("lambda", "0", c, "the structure tensor vanishes"),
        detail::claim("kappa", "1", c, "curvature along the Reeb field"),
    };
    entries.push_back(std::move(e));
  }

  {
    CatalogEntry e;
    e.name = "flat";
    e.summary = "structure whose curvature annihilates the Reeb field";
    e.expected_label = "(kappa,mu)";
    e.spec = parse_manifold_spec(
        "[manifold]\n"
        "name = flat\n"
        "coords = x y z\n"
        "box = -1 1 -1 1 -1 1\n"
        "[frame]\n"
        "xi = 1, 0, 0\n"
        "e = -2*y, 2*x, 1\n"
        "phie = 0, 1, 0\n");
    const CoordNames& c = e.spec.chart.coords;
    e.claims = {
        detail::claim("lambda", "1", c, "eigenvalue of the structure tensor"),
        detail::claim("kappa", "0", c, "curvature coefficient"),
        detail::claim("mu", "0", c, "curvature coefficient"),
        detail::claim("nu", "0", c, "curvature coefficient"),
        detail::claim("tau_coefficient", "0", c,
                      "the torsion is parallel along the Reeb field"),
    };
    entries.push_back(std::move(e));
  }

  return entries;
}

inline const CatalogEntry& catalog_entry(const std::vector<CatalogEntry>& entries,
                                         const std::string& name) {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw ChartError("no catalog entry named '" + name + "'");
}

// The returned reference points into the caller's vector; a temporary would
// leave it dangling.
const CatalogEntry& catalog_entry(std::vector<CatalogEntry>&&,
                                  const std::string&) = delete;

// ---------------------------------------------------------------------------
// Catalog runner: classify the entry, then compare every computable claimed
// quantity against its computed value at the sample points.

struct ClaimCheck {
  CatalogClaim claim;
  int evaluated = 0;  // points where the quantity was computable
  double worst = 0.0;
  Point witness{};
  bool match = false;
};

struct CatalogRun {
  std::string name;
  std::string expected_label;
  ClassifyResult classification;
  bool label_match = false;
  std::vector<ClaimCheck> checks;
  bool undocumented_mismatch = false;
  bool pass = false;  // expected label and every claim not marked as a
                      // known mismatch agree with the computed values
};

inline CatalogRun run_catalog_entry(const CatalogEntry& entry, int n_points,
                                    std::uint64_t seed, double tol) {
  ContactStructure s = build_structure(entry.spec);
  Connection conn = christoffel(s);
  CurvatureBundle bun = make_curvature_bundle(s, conn);
  std::vector<Point> pts = sample_points(s.chart, n_points, seed);

  CatalogRun run;
  run.name = entry.name;
  run.expected_label = entry.expected_label;
  run.classification = classify(s, bun, pts, tol);
  run.label_match = run.classification.label == entry.expected_label;

  // Per-point fitted torsion evolution coefficient: the least-squares c in
  // nabla_xi tau = c * tau_phi, undefined where tau_phi vanishes.
  bool need_tau = false;
  for (const auto& c : entry.claims)
    if (c.quantity == "tau_coefficient") need_tau = true;
  std::vector<std::optional<double>> tau_coeffs(pts.size());
  if (need_tau) {
    Mat3 tphi = tau_phi(s, bun.tau);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EvalContext ctx(pts[i], s.chart.coords);
      NMat3 top = eval_mat(ctx, bun.nabla_xi_tau);
      NMat3 bot = eval_mat(ctx, tphi);
      double tp = 0.0, pp = 0.0;
      for (int r = 0; r < 3; ++r)
        for (int c2 = 0; c2 < 3; ++c2) {
          tp += top[r][c2] * bot[r][c2];
          pp += bot[r][c2] * bot[r][c2];
        }
      if (pp > 1e-12) tau_coeffs[i] = tp / pp;
    }
  }

  for (const auto& claim : entry.claims) {
    ClaimCheck cc;
    cc.claim = claim;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const PointNullity& pn = run.classification.samples[i];
      std::optional<double> computed;
      if (claim.quantity == "lambda") computed = pn.lambda;
      else if (claim.quantity == "kappa") computed = pn.kappa;
      else if (claim.quantity == "mu") computed = pn.mu;
      else if (claim.quantity == "nu") computed = pn.nu;
      else if (claim.quantity == "tau_coefficient") computed = tau_coeffs[i];
      else throw ChartError("unknown claim quantity '" + claim.quantity + "'");
      if (!computed) continue;

      EvalContext ctx(pts[i], s.chart.coords);
      double want = ctx.eval(claim.value);
      double gap = std::abs(*computed - want) / (1.0 + std::abs(want));
      ++cc.evaluated;
      if (gap >= cc.worst) {
        if (gap > cc.worst || cc.evaluated == 1) cc.witness = pts[i];
        cc.worst = std::max(cc.worst, gap);
      }
    }
    cc.match = cc.evaluated > 0 && cc.worst < tol;
    if (!cc.match && !claim.known_mismatch) run.undocumented_mismatch = true;
    run.checks.push_back(std::move(cc));
  }

  run.pass = run.label_match && !run.undocumented_mismatch;
  return run;
}

}  // namespace contact3
