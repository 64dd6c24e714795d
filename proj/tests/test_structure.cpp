#include <catch2/catch_amalgamated.hpp>

#include "contact3/structure.hpp"
#include "support.hpp"

using namespace contact3;
using testsupport::close_rel;

namespace {

ChartSpec z_positive_chart() {
  ChartSpec c;
  c.box = {{{-1.0, 1.0}, {-1.0, 1.0}, {0.25, 2.0}}};
  c.constraints.push_back({parse("z"), ConstraintKind::Positive});
  return c;
}

// Frame with nonconstant plane rotation; its h has eigenvalue z.
ContactStructure z_eigenvalue_structure() {
  ChartSpec c = z_positive_chart();
  VectorField xi{parse("1"), parse("0"), parse("0")};
  VectorField e{parse("-2*y"), parse("2*x*z-1"), parse("1")};
  VectorField phie{parse("0"), parse("1"), parse("0")};
  return build_from_frame(c, xi, e, phie);
}

ContactStructure flat_structure() {
  ChartSpec c;  // default box, no constraints
  VectorField xi{parse("1"), parse("0"), parse("0")};
  VectorField e{parse("-2*y"), parse("2*x"), parse("1")};
  VectorField phie{parse("0"), parse("1"), parse("0")};
  return build_from_frame(c, xi, e, phie);
}

ContactStructure heisenberg_structure() {
  ChartSpec c;
  VectorField xi{parse("0"), parse("0"), parse("2")};
  VectorField e{parse("0"), parse("2"), parse("0")};
  VectorField phie{parse("2"), parse("0"), parse("2*y")};
  return build_from_frame(c, xi, e, phie);
}

}  // namespace

TEST_CASE("frame build reproduces closed-form tensors", "[structure]") {
  ContactStructure s = z_eigenvalue_structure();

  Mat3 g_exp, phi_exp, h_exp;
  g_exp[0] = {parse("1"), parse("0"), parse("2*y")};
  g_exp[1] = {parse("0"), parse("1"), parse("1-2*x*z")};
  g_exp[2] = {parse("2*y"), parse("1-2*x*z"), parse("1+(2*y)^2+(1-2*x*z)^2")};
  phi_exp[0] = {parse("0"), parse("2*y"), parse("2*y*(1-2*x*z)")};
  phi_exp[1] = {parse("0"), parse("1-2*x*z"), parse("(1-2*x*z)^2+1")};
  phi_exp[2] = {parse("0"), parse("-1"), parse("-(1-2*x*z)")};
  h_exp[0] = {parse("0"), parse("0"), parse("-2*y*z")};
  h_exp[1] = {parse("0"), parse("-z"), parse("2*z*(2*x*z-1)")};
  h_exp[2] = {parse("0"), parse("0"), parse("z")};
  OneForm eta_exp{parse("1"), parse("0"), parse("2*y")};

  std::vector<Point> pts = sample_points(s.chart, 20, 7);
  for (const auto& p : pts) {
    EvalContext ctx(p);
    NMat3 dg{}, dphi{}, dh{};
    NMat3 g = eval_mat(ctx, s.g), ge = eval_mat(ctx, g_exp);
    NMat3 ph = eval_mat(ctx, s.phi), phe = eval_mat(ctx, phi_exp);
    NMat3 h = eval_mat(ctx, s.h), he = eval_mat(ctx, h_exp);
    NVec3 et = eval_vec(ctx, s.eta), ete = eval_vec(ctx, eta_exp);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(et[i] - ete[i]) < 1e-10);
      for (int j = 0; j < 3; ++j) {
        dg[i][j] = g[i][j] - ge[i][j];
        dphi[i][j] = ph[i][j] - phe[i][j];
        dh[i][j] = h[i][j] - he[i][j];
      }
    }
    CHECK(nmat_abs_max(dg) < 1e-10);
    CHECK(nmat_abs_max(dphi) < 1e-10);
    CHECK(nmat_abs_max(dh) < 1e-10);
  }
}

TEST_CASE("frame build validates", "[structure]") {
  ValidationReport r = validate(z_eigenvalue_structure(), 64, 42, 1e-8);
  for (const auto& row : r.rows) {
    INFO(row.name << " worst residual " << row.worst);
    CHECK(row.pass);
  }
  CHECK(r.pass);
  CHECK(r.points == 64);
  CHECK(r.skipped_points.empty());
}

TEST_CASE("flat and nilpotent-group fixtures validate", "[structure]") {
  for (const ContactStructure& s : {flat_structure(), heisenberg_structure()}) {
    ValidationReport r = validate(s, 48, 11, 1e-8);
    INFO("structure with g[2][2] = " << to_string(s.g[2][2]));
    CHECK(r.pass);
  }
}

TEST_CASE("nilpotent-group structure has vanishing h", "[structure]") {
  ContactStructure s = heisenberg_structure();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(s.h[i][j].is_constant(0.0));
}

TEST_CASE("tensor build matches frame build", "[structure]") {
  ContactStructure a = z_eigenvalue_structure();
  ContactStructure b = build_from_tensors(a.chart, a.g, a.phi, a.xi);
  std::vector<Point> pts = sample_points(a.chart, 10, 3);
  for (const auto& p : pts) {
    EvalContext ca(p), cb(p);
    NMat3 ha = eval_mat(ca, a.h), hb = eval_mat(cb, b.h);
    NMat3 ia = eval_mat(ca, a.g_inv), ib = eval_mat(cb, b.g_inv);
    NVec3 ea = eval_vec(ca, a.eta), eb = eval_vec(cb, b.eta);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(ea[i] - eb[i]) < 1e-12);
      for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(ha[i][j] - hb[i][j]) < 1e-12);
        CHECK(std::abs(ia[i][j] - ib[i][j]) < 1e-10);
      }
    }
  }
  CHECK(validate(b, 32, 5, 1e-8).pass);
}

TEST_CASE("validator rejects a non-contact structure", "[structure]") {
  ChartSpec c;
  ContactStructure s =
      build_from_tensors(c, identity_mat(), zero_mat(),
                         {parse("1"), parse("0"), parse("0")});
  ValidationReport r = validate(s, 16, 9, 1e-8);
  CHECK_FALSE(r.pass);
  const CheckRow* sq = r.find("phi_squared");
  REQUIRE(sq != nullptr);
  CHECK_FALSE(sq->pass);
  const CheckRow* nd = r.find("contact_nondegeneracy");
  REQUIRE(nd != nullptr);
  CHECK_FALSE(nd->pass);
}

TEST_CASE("singular frame is rejected", "[structure]") {
  ChartSpec c;
  VectorField xi{parse("1"), parse("0"), parse("0")};
  VectorField e{parse("0"), parse("1"), parse("0")};
  VectorField phie{parse("0"), parse("0"), parse("x")};
  CHECK_THROWS_AS(build_from_frame(c, xi, e, phie), BuildError);
}

TEST_CASE("sampling respects constraints and is deterministic", "[sampling]") {
  ChartSpec c;
  c.box = {{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
  c.constraints.push_back({parse("z"), ConstraintKind::NonZero});
  auto a = sample_points(c, 50, 42);
  auto b = sample_points(c, 50, 42);
  REQUIRE(a.size() == 50);
  CHECK(a == b);
  for (const auto& p : a) CHECK(std::abs(p[2]) >= kConstraintMargin);

  auto other = sample_points(c, 50, 43);
  CHECK(a != other);
}

TEST_CASE("sampling reports exhaustion", "[sampling]") {
  ChartSpec c;
  c.constraints.push_back({parse("x-10"), ConstraintKind::Positive});
  CHECK_THROWS_AS(sample_points(c, 4, 1), SamplingError);
}
