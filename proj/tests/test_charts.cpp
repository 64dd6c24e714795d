#include <cmath>
#include <set>
#include <string>

#include "catch2/catch_amalgamated.hpp"
#include "contact3/charts.hpp"

namespace contact3 {
namespace {

bool close_abs(double a, double b, double tol) { return std::abs(a - b) < tol; }

double eval_at_z(const Expr& e, double z) {
  EvalContext ctx(Point{0.0, 0.0, z});
  return ctx.eval(e);
}

// Componentwise gap between a vector field and reference expression strings.
double field_gap(const VectorField& v, const std::array<const char*, 3>& ref,
                 const Point& p) {
  EvalContext ctx(p);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    double want = ctx.eval(parse(ref[i]));
    worst = std::max(worst, std::abs(ctx.eval(v[i]) - want));
  }
  return worst;
}

const ClaimCheck* find_claim(const CatalogRun& run, const std::string& quantity,
                             bool known_mismatch) {
  for (const auto& cc : run.checks)
    if (cc.claim.quantity == quantity && cc.claim.known_mismatch == known_mismatch)
      return &cc;
  return nullptr;
}

TEST_CASE("closed-form integration of 1/k3", "[charts]") {
  struct Case {
    const char* k3;
    double z;
    double want;
  };
  const Case cases[] = {
      {"1", 1.7, 1.7},            // constant: lambda = z
      {"z", 2.0, std::log(2.0)},  // lambda = ln z
      {"2", 3.0, 1.5},            // lambda = z/2
      {"z^2", 2.0, -0.5},         // lambda = -1/z
      {"1/z", 2.0, 2.0},          // lambda = z^2/2
      {"2*z^3", 2.0, -1.0 / 16},  // lambda = -1/(4 z^2)
      {"z*z", 4.0, -0.25},        // product form of z^2
  };
  for (const auto& c : cases) {
    INFO("k3 = " << c.k3);
    Expr lam = integrate_reciprocal(parse(c.k3), 0.0);
    CHECK(close_abs(eval_at_z(lam, c.z), c.want, 1e-13));
  }

  // The integration constant is added on.
  Expr shifted = integrate_reciprocal(parse("1"), 2.5);
  CHECK(close_abs(eval_at_z(shifted, 1.0), 3.5, 1e-13));

  CHECK_THROWS_AS(integrate_reciprocal(parse("1 + z^2"), 0.0), ChartError);
  CHECK_THROWS_AS(integrate_reciprocal(parse("sin(z)"), 0.0), ChartError);
  CHECK_THROWS_AS(integrate_reciprocal(parse("0"), 0.0), ChartError);
  CHECK_THROWS_AS(integrate_reciprocal(parse("x + z"), 0.0), ChartError);
}

TEST_CASE("case-1 construction reproduces the shipped unit chart", "[charts]") {
  ChartParams p;
  p.k3 = parse("1");
  p.r = parse("0");
  p.beta = parse("-1");
  p.H = parse("-y");
  GeneratedChart gc = build_case1(p);

  CHECK(gc.spec.name == "case1-chart");
  CHECK(gc.spec.mode == SpecMode::Frame);

  // lambda = z, a = z - 1, F = -1.
  CHECK(close_abs(eval_at_z(gc.lambda, 1.3), 1.3, 1e-13));
  CHECK(close_abs(eval_at_z(gc.a, 1.3), 0.3, 1e-13));
  CHECK(close_abs(eval_at_z(gc.F, 0.7), -1.0, 1e-13));

  // The moving leg is exactly the shipped unit chart's frame.
  for (const Point& q : {Point{0.4, -0.8, 1.1}, Point{-0.2, 0.5, 2.7}}) {
    CHECK(field_gap(gc.spec.e, {"-2*y", "2*x*z - 1", "1"}, q) < 1e-13);
    CHECK(field_gap(gc.spec.phie, {"0", "1", "0"}, q) < 1e-13);
    CHECK(field_gap(gc.spec.xi, {"1", "0", "0"}, q) < 1e-13);
  }

  // The z box sits inside the hint and keeps lambda positive there.
  const Interval& zbox = gc.spec.chart.box[2];
  CHECK(zbox.lo >= 0.25);
  CHECK(zbox.hi <= 4.0);
  CHECK(eval_at_z(gc.lambda, zbox.lo) > 0.0);
  REQUIRE(!gc.spec.chart.constraints.empty());
  CHECK(gc.spec.chart.constraints[0].kind == ConstraintKind::Positive);

  // The generated spec survives a serialization round trip.
  ManifoldSpec reparsed = parse_manifold_spec(serialize_manifold_spec(gc.spec));
  CHECK(serialize_manifold_spec(reparsed) == serialize_manifold_spec(gc.spec));
}

TEST_CASE("construction rejects unusable parameters", "[charts]") {
  ChartParams p;

  p.case_id = 3;
  CHECK_THROWS_AS(build_chart(p), ChartError);
  p.case_id = 1;

  SECTION("k3 depending on another coordinate") {
    p.k3 = parse("x + 1");
    CHECK_THROWS_AS(build_chart(p), ChartError);
  }
  SECTION("H depending on the Reeb coordinate") {
    p.H = parse("x*y");
    CHECK_THROWS_AS(build_chart(p), ChartError);
  }
  SECTION("k3 outside the integration table") {
    p.k3 = parse("1 + z^2");
    CHECK_THROWS_AS(build_chart(p), ChartError);
  }
  SECTION("eigenvalue never positive on the hint") {
    p.k3 = parse("-1");  // lambda = -z < 0 on the default hint
    CHECK_THROWS_AS(build_chart(p), ChartError);
  }
}

TEST_CASE("construction laws hold for case-1 charts", "[charts]") {
  struct Params {
    const char* k3;
    const char* r;
    const char* beta;
    const char* H;
  };
  for (const Params& ps : {Params{"1", "z^2", "3*z", "y*z"},
                           Params{"1", "0", "-1", "-y"}}) {
    INFO("k3=" << ps.k3 << " r=" << ps.r << " beta=" << ps.beta
               << " H=" << ps.H);
    ChartParams p;
    p.k3 = parse(ps.k3);
    p.r = parse(ps.r);
    p.beta = parse(ps.beta);
    p.H = parse(ps.H);
    GeneratedChart gc = build_case1(p);

    ValidationReport axioms = validate(build_structure(gc.spec), 16, 42, 1e-8);
    CHECK(axioms.pass);

    CheckReport laws = verify_chart_laws(gc, 16, 42, 1e-8);
    CHECK(laws.pass);
    CHECK(laws.points == 16);
    for (const char* name :
         {"bracket_e_phie", "bracket_e_xi", "bracket_phie_xi", "coefficient_a",
          "coefficient_b", "coefficient_c", "ricci_xi_e", "ricci_xi_phie",
          "eigenvalue_profile", "reeb_eigenvalue_derivative",
          "eigenvalue_gradient_norm", "eigenvalue_derivative_times_k3",
          "metric_determinant", "torsion_evolution"}) {
      const CheckRow* row = laws.find(name);
      REQUIRE(row != nullptr);
      INFO("row " << name << " worst " << row->worst);
      CHECK(row->pass);
    }
  }
}

TEST_CASE("construction laws hold for a case-2 chart", "[charts]") {
  ChartParams p;
  p.case_id = 2;
  p.k3 = parse("1");
  p.H = parse("y^2");
  GeneratedChart gc = build_chart(p);

  CHECK(gc.spec.name == "case2-chart");
  // a = -1 - lambda with lambda = z; the moving leg is now phi e.
  CHECK(close_abs(eval_at_z(gc.a, 1.5), -2.5, 1e-13));
  for (const Point& q : {Point{0.4, -0.8, 1.1}}) {
    CHECK(field_gap(gc.spec.e, {"0", "1", "0"}, q) < 1e-13);
    CHECK(field_gap(gc.spec.phie, {"2*y", "2*x*z - (y^2 + y)/(2*z)", "1"}, q) <
          1e-13);
  }

  ValidationReport axioms = validate(build_structure(gc.spec), 16, 42, 1e-8);
  CHECK(axioms.pass);

  CheckReport laws = verify_chart_laws(gc, 16, 42, 1e-8);
  CHECK(laws.pass);

  // In case 2 the Ricci pattern moves to the e leg: S(xi, e) = dH/dy.
  const CheckRow* ric = laws.find("ricci_xi_e");
  REQUIRE(ric != nullptr);
  CHECK(ric->worst < 1e-8);
}

TEST_CASE("logarithmic eigenvalue chart picks a safe box", "[charts]") {
  ChartParams p;
  p.case_id = 2;
  p.k3 = parse("z");
  GeneratedChart gc = build_chart(p);

  // lambda = ln z vanishes at z = 1, so the box must start above it.
  CHECK(gc.spec.chart.box[2].lo > 1.0);
  CHECK(close_abs(eval_at_z(gc.lambda, 2.0), std::log(2.0), 1e-13));

  ValidationReport axioms = validate(build_structure(gc.spec), 12, 42, 1e-8);
  CHECK(axioms.pass);

  CheckReport laws = verify_chart_laws(gc, 12, 42, 1e-8);
  CHECK(laws.pass);
}

TEST_CASE("catalog entries mirror the shipped manifold files", "[charts]") {
  std::vector<CatalogEntry> entries = catalog();
  REQUIRE(entries.size() == 5);

  std::set<std::string> names;
  for (const auto& entry : entries) names.insert(entry.name);
  CHECK(names.size() == entries.size());

  const std::string dir = CONTACT3_MANIFOLD_DIR;
  for (const auto& entry : entries) {
    INFO("entry " << entry.name);
    ManifoldSpec shipped = load_manifold_spec(dir + "/" + entry.name + ".cmm");
    CHECK(serialize_manifold_spec(shipped) == serialize_manifold_spec(entry.spec));
    CHECK(!entry.claims.empty());
    CHECK(!entry.summary.empty());
    CHECK(!entry.expected_label.empty());
  }

  CHECK(catalog_entry(entries, "example3").name == "example3");
  CHECK_THROWS_AS(catalog_entry(entries, "missing"), ChartError);
}

TEST_CASE("catalog runs match the expected labels and claims", "[charts]") {
  std::vector<CatalogEntry> entries = catalog();

  auto run_one = [&](const std::string& name) {
    return run_catalog_entry(catalog_entry(entries, name), 24, 42, 1e-6);
  };

  SECTION("example1") {
    CatalogRun run = run_one("example1");
    CHECK(run.label_match);
    CHECK(run.classification.label == "generalized (kappa,mu)");
    CHECK(run.pass);
    for (const char* q : {"lambda", "kappa", "mu", "nu"}) {
      const ClaimCheck* cc = find_claim(run, q, false);
      REQUIRE(cc != nullptr);
      INFO("claim " << q << " worst " << cc->worst);
      CHECK(cc->match);
    }
    const ClaimCheck* tau = find_claim(run, "tau_coefficient", true);
    REQUIRE(tau != nullptr);
    CHECK(!tau->match);  // flipped sign, flagged as a known mismatch
    CHECK(!run.undocumented_mismatch);
  }

  SECTION("example3") {
    CatalogRun run = run_one("example3");
    CHECK(run.classification.label == "generic");
    CHECK(run.pass);
    const ClaimCheck* lam = find_claim(run, "lambda", false);
    REQUIRE(lam != nullptr);
    CHECK(lam->match);
    const ClaimCheck* tau = find_claim(run, "tau_coefficient", false);
    REQUIRE(tau != nullptr);
    CHECK(tau->match);
  }

  SECTION("example4") {
    CatalogRun run = run_one("example4");
    CHECK(run.classification.label == "generic");
    CHECK(run.pass);

    // Of the two claimed eigenvalue profiles only the linear one is realized.
    const ClaimCheck* lam_log = find_claim(run, "lambda", true);
    REQUIRE(lam_log != nullptr);
    CHECK(!lam_log->match);
    const ClaimCheck* lam_lin = find_claim(run, "lambda", false);
    REQUIRE(lam_lin != nullptr);
    CHECK(lam_lin->match);

    for (const char* q : {"kappa", "mu", "tau_coefficient"}) {
      const ClaimCheck* cc = find_claim(run, q, true);
      REQUIRE(cc != nullptr);
      INFO("claim " << q);
      CHECK(!cc->match);
    }
    const ClaimCheck* nu = find_claim(run, "nu", false);
    REQUIRE(nu != nullptr);
    CHECK(nu->match);
    CHECK(!run.undocumented_mismatch);
  }

  SECTION("sasakian") {
    CatalogRun run = run_one("sasakian");
    CHECK(run.classification.label == "Sasakian");
    CHECK(run.classification.h_max_abs < 1e-12);
    CHECK(run.pass);
    const ClaimCheck* kappa = find_claim(run, "kappa", false);
    REQUIRE(kappa != nullptr);
    CHECK(kappa->match);
    CHECK(kappa->evaluated == 24);
  }

  SECTION("flat") {
    CatalogRun run = run_one("flat");
    CHECK(run.classification.label == "(kappa,mu)");
    CHECK(run.pass);
    for (const char* q : {"lambda", "kappa", "mu", "nu", "tau_coefficient"}) {
      const ClaimCheck* cc = find_claim(run, q, false);
      REQUIRE(cc != nullptr);
      INFO("claim " << q);
      CHECK(cc->match);
    }
  }
}

TEST_CASE("an undocumented mismatch fails the entry", "[charts]") {
  std::vector<CatalogEntry> entries = catalog();
  CatalogEntry tampered = catalog_entry(entries, "example3");
  for (auto& c : tampered.claims) {
    if (c.quantity == "lambda") c.value = parse("z + 1/10");
  }
  CatalogRun run = run_catalog_entry(tampered, 16, 42, 1e-6);
  CHECK(run.undocumented_mismatch);
  CHECK(!run.pass);
}

}  // namespace
}  // namespace contact3
