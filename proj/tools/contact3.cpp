// contact3: load manifold files, run the verification pipelines, and emit
// deterministic text or JSON reports. Exit codes: 0 all checks passed,
// 1 a mathematical check failed, 2 input or usage error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "contact3/charts.hpp"
#include "contact3/dhomothety.hpp"

using json = nlohmann::ordered_json;

namespace c3 = contact3;

namespace {

struct RunConfig {
  int n_points = 64;
  std::uint64_t seed = 42;
  double tol = 1e-8;
  double fd_step = 1e-6;
  double alpha = 1.0;
  int case_id = 1;
  std::string k3 = "1";
  std::string r = "0";
  std::string beta = "0";
  std::string H = "0";
  std::string format = "text";
  bool verbose = false;
  std::string emit_path;
};

// Input problems that should exit 2 with a plain message.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& m) : std::runtime_error(m) {}
};

std::string fmt(double v) { return c3::detail::format_double(v); }

std::string fmt_point(const c3::Point& p) {
  return "(" + fmt(p[0]) + ", " + fmt(p[1]) + ", " + fmt(p[2]) + ")";
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

std::string pass_str(bool ok) { return ok ? "pass" : "FAIL"; }

// ---------------------------------------------------------------------------
// Text rendering.

void print_config(std::ostream& out, const RunConfig& cfg) {
  out << "points: " << cfg.n_points << "  seed: " << cfg.seed
      << "  tol: " << fmt(cfg.tol) << "  fd-step: " << fmt(cfg.fd_step)
      << "\n";
}

void print_check_table(std::ostream& out, const std::string& title,
                       const c3::CheckReport& rep) {
  out << title << "  (" << rep.points << " points";
  if (!rep.skipped_points.empty())
    out << ", " << rep.skipped_points.size() << " skipped";
  out << ", tol " << fmt(rep.tol) << ")\n";

  std::size_t name_w = 5;
  for (const auto& row : rep.rows) name_w = std::max(name_w, row.name.size());
  name_w += 2;
  out << "  " << pad("check", name_w) << pad("status", 8) << pad("worst", 24)
      << "witness\n";
  for (const auto& row : rep.rows) {
    out << "  " << pad(row.name, name_w) << pad(pass_str(row.pass), 8)
        << pad(fmt(row.worst), 24) << fmt_point(row.witness) << "\n";
  }
}

void print_classification(std::ostream& out, const c3::ClassifyResult& cls) {
  out << "classification: " << cls.label << "\n";
  out << "points: " << cls.points << "  degenerate: " << cls.degenerate_points
      << "\n";
  out << "eigenvalue max: " << fmt(cls.lambda_max)
      << "  h entry max: " << fmt(cls.h_max_abs) << "\n";
  out << "kappa: mean " << fmt(cls.kappa_mean) << "  spread "
      << fmt(cls.kappa_spread) << "\n";
  out << "mu: mean " << fmt(cls.mu_mean) << "  spread " << fmt(cls.mu_spread)
      << "\n";
  out << "nu: mean " << fmt(cls.nu_mean) << "  max abs " << fmt(cls.nu_max_abs)
      << "\n";
  out << "worst nullity residual: " << fmt(cls.worst_residual) << "\n";
}

void print_sample_table(std::ostream& out, const c3::ClassifyResult& cls) {
  std::size_t pw = 5;
  for (const auto& pn : cls.samples)
    pw = std::max(pw, fmt_point(pn.p).size());
  pw += 2;
  out << "per-point values\n";
  out << "  " << pad("point", pw) << pad("lambda", 24) << pad("kappa", 24)
      << pad("mu", 24) << pad("nu", 24) << "residual\n";
  for (const auto& pn : cls.samples) {
    out << "  " << pad(fmt_point(pn.p), pw) << pad(fmt(pn.lambda), 24)
        << pad(fmt(pn.kappa), 24)
        << pad(pn.mu ? fmt(*pn.mu) : std::string("-"), 24)
        << pad(pn.nu ? fmt(*pn.nu) : std::string("-"), 24) << fmt(pn.residual)
        << "\n";
  }
}

// ---------------------------------------------------------------------------
// JSON rendering.

json point_json(const c3::Point& p) { return json::array({p[0], p[1], p[2]}); }

json config_json(const RunConfig& cfg) {
  return json{{"points", cfg.n_points},
              {"seed", cfg.seed},
              {"tol", cfg.tol},
              {"fd_step", cfg.fd_step},
              {"format", cfg.format}};
}

json check_report_json(const c3::CheckReport& rep) {
  json rows = json::array();
  for (const auto& row : rep.rows) {
    rows.push_back(json{{"name", row.name},
                        {"worst", row.worst},
                        {"witness", point_json(row.witness)},
                        {"pass", row.pass}});
  }
  return json{{"tol", rep.tol},
              {"points", rep.points},
              {"skipped", rep.skipped_points.size()},
              {"pass", rep.pass},
              {"checks", rows}};
}

json classification_json(const c3::ClassifyResult& cls, bool with_samples) {
  json out{{"label", cls.label},
           {"points", cls.points},
           {"degenerate_points", cls.degenerate_points},
           {"lambda_max", cls.lambda_max},
           {"h_max_abs", cls.h_max_abs},
           {"kappa_mean", cls.kappa_mean},
           {"kappa_spread", cls.kappa_spread},
           {"mu_mean", cls.mu_mean},
           {"mu_spread", cls.mu_spread},
           {"nu_mean", cls.nu_mean},
           {"nu_max_abs", cls.nu_max_abs},
           {"worst_residual", cls.worst_residual}};
  if (with_samples) {
    json samples = json::array();
    for (const auto& pn : cls.samples) {
      json s{{"point", point_json(pn.p)},
             {"lambda", pn.lambda},
             {"kappa", pn.kappa}};
      s["mu"] = pn.mu ? json(*pn.mu) : json(nullptr);
      s["nu"] = pn.nu ? json(*pn.nu) : json(nullptr);
      s["residual"] = pn.residual;
      samples.push_back(std::move(s));
    }
    out["samples"] = std::move(samples);
  }
  return out;
}

void emit_json(const json& doc) { std::cout << doc.dump(2) << "\n"; }

// ---------------------------------------------------------------------------
// Shared pieces.

c3::Expr parse_flag_expr(const std::string& text, const char* flag) {
  try {
    return c3::parse(text);
  } catch (const c3::ParseError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

c3::ManifoldSpec deformed_spec(const c3::ManifoldSpec& spec,
                               const c3::ContactStructure& deformed) {
  c3::ManifoldSpec out;
  out.name = spec.name + "-deformed";
  out.chart = deformed.chart;
  out.mode = c3::SpecMode::Tensor;
  out.g = deformed.g;
  out.phi = deformed.phi;
  out.xi = deformed.xi;
  for (int i = 0; i < 3; ++i) {
    out.xi[i] = c3::simplify(out.xi[i]);
    for (int j = 0; j < 3; ++j) {
      out.g[i][j] = c3::simplify(out.g[i][j]);
      out.phi[i][j] = c3::simplify(out.phi[i][j]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands.

int cmd_verify(const std::string& path, const RunConfig& cfg) {
  c3::ManifoldSpec spec = c3::load_manifold_spec(path);
  c3::ContactStructure s = c3::build_structure(spec);
  c3::ValidationReport axioms = c3::validate(s, cfg.n_points, cfg.seed, cfg.tol);
  c3::Connection conn = c3::christoffel(s);
  c3::CurvatureBundle bundle = c3::make_curvature_bundle(s, conn);
  std::vector<c3::Point> pts = c3::sample_points(s.chart, cfg.n_points, cfg.seed);
  c3::CheckReport identities = c3::check_identities(s, conn, bundle, pts, cfg.tol);
  bool pass = axioms.pass && identities.pass;

  if (cfg.format == "json") {
    emit_json(json{{"command", "verify"},
                   {"manifold", spec.name},
                   {"config", config_json(cfg)},
                   {"axioms", check_report_json(axioms)},
                   {"identities", check_report_json(identities)},
                   {"pass", pass}});
  } else {
    std::ostringstream out;
    out << "manifold: " << spec.name << "\n";
    print_config(out, cfg);
    out << "\n";
    print_check_table(out, "structure axioms", axioms);
    out << "\n";
    print_check_table(out, "curvature identities", identities);
    out << "\nresult: " << (pass ? "PASS" : "FAIL") << "\n";
    std::cout << out.str();
  }
  return pass ? 0 : 1;
}

int cmd_nullity(const std::string& path, const RunConfig& cfg) {
  c3::ManifoldSpec spec = c3::load_manifold_spec(path);
  c3::ContactStructure s = c3::build_structure(spec);
  c3::Connection conn = c3::christoffel(s);
  c3::CurvatureBundle bundle = c3::make_curvature_bundle(s, conn);
  std::vector<c3::Point> pts = c3::sample_points(s.chart, cfg.n_points, cfg.seed);
  c3::ClassifyResult cls = c3::classify(s, bundle, pts, cfg.tol);

  if (cfg.format == "json") {
    emit_json(json{{"command", "nullity"},
                   {"manifold", spec.name},
                   {"config", config_json(cfg)},
                   {"classification", classification_json(cls, true)},
                   {"pass", true}});
  } else {
    std::ostringstream out;
    out << "manifold: " << spec.name << "\n";
    print_config(out, cfg);
    out << "\n";
    print_classification(out, cls);
    if (cfg.verbose) {
      out << "\n";
      print_sample_table(out, cls);
    }
    std::cout << out.str();
  }
  return 0;
}

int cmd_dhomothety(const std::string& path, const RunConfig& cfg) {
  c3::ManifoldSpec spec = c3::load_manifold_spec(path);
  c3::ContactStructure s = c3::build_structure(spec);
  std::vector<c3::Point> pts = c3::sample_points(s.chart, cfg.n_points, cfg.seed);
  c3::CheckReport rep = c3::verify_transform(s, cfg.alpha, pts, cfg.tol);

  std::string emitted;
  if (!cfg.emit_path.empty()) {
    c3::ContactStructure bar = c3::d_homothetic(s, cfg.alpha);
    c3::save_manifold_spec(deformed_spec(spec, bar), cfg.emit_path);
    emitted = cfg.emit_path;
  }

  if (cfg.format == "json") {
    json doc{{"command", "dhomothety"},
             {"manifold", spec.name},
             {"alpha", cfg.alpha},
             {"config", config_json(cfg)},
             {"transform", check_report_json(rep)},
             {"pass", rep.pass}};
    if (!emitted.empty()) doc["emitted"] = emitted;
    emit_json(doc);
  } else {
    std::ostringstream out;
    out << "manifold: " << spec.name << "\n";
    out << "alpha: " << fmt(cfg.alpha) << "\n";
    print_config(out, cfg);
    out << "\n";
    print_check_table(out, "deformation scaling laws", rep);
    if (!emitted.empty()) out << "\nwrote deformed manifold: " << emitted << "\n";
    out << "\nresult: " << (rep.pass ? "PASS" : "FAIL") << "\n";
    std::cout << out.str();
  }
  return rep.pass ? 0 : 1;
}

int cmd_chart(const RunConfig& cfg) {
  c3::ChartParams params;
  params.case_id = cfg.case_id;
  params.k3 = parse_flag_expr(cfg.k3, "--k3");
  params.r = parse_flag_expr(cfg.r, "--r");
  params.beta = parse_flag_expr(cfg.beta, "--beta");
  params.H = parse_flag_expr(cfg.H, "--H");
  c3::GeneratedChart gc = c3::build_chart(params);

  c3::ContactStructure s = c3::build_structure(gc.spec);
  c3::ValidationReport axioms = c3::validate(s, cfg.n_points, cfg.seed, cfg.tol);
  c3::CheckReport laws = c3::verify_chart_laws(gc, cfg.n_points, cfg.seed, cfg.tol);
  bool pass = axioms.pass && laws.pass;

  std::string spec_text = c3::serialize_manifold_spec(gc.spec);
  std::string emitted;
  if (!cfg.emit_path.empty()) {
    c3::save_manifold_spec(gc.spec, cfg.emit_path);
    emitted = cfg.emit_path;
  }

  const c3::CoordNames& coords = gc.spec.chart.coords;
  if (cfg.format == "json") {
    json doc{{"command", "chart"},
             {"case", cfg.case_id},
             {"parameters",
              json{{"k3", cfg.k3},
                   {"r", cfg.r},
                   {"beta", cfg.beta},
                   {"H", cfg.H}}},
             {"lambda", c3::to_string(gc.lambda, coords)},
             {"a", c3::to_string(gc.a, coords)},
             {"z_box", json::array({gc.spec.chart.box[2].lo,
                                    gc.spec.chart.box[2].hi})},
             {"manifold_spec", spec_text},
             {"config", config_json(cfg)},
             {"axioms", check_report_json(axioms)},
             {"construction_laws", check_report_json(laws)},
             {"pass", pass}};
    if (!emitted.empty()) doc["emitted"] = emitted;
    emit_json(doc);
  } else {
    std::ostringstream out;
    out << "generated chart: case " << cfg.case_id << "\n";
    out << "lambda: " << c3::to_string(gc.lambda, coords) << "\n";
    out << "a: " << c3::to_string(gc.a, coords) << "\n";
    out << "z box: [" << fmt(gc.spec.chart.box[2].lo) << ", "
        << fmt(gc.spec.chart.box[2].hi) << "]\n";
    print_config(out, cfg);
    out << "\nmanifold file\n";
    std::istringstream lines(spec_text);
    std::string line;
    while (std::getline(lines, line)) out << "  " << line << "\n";
    out << "\n";
    print_check_table(out, "structure axioms", axioms);
    out << "\n";
    print_check_table(out, "construction laws", laws);
    if (!emitted.empty()) out << "\nwrote manifold: " << emitted << "\n";
    out << "\nresult: " << (pass ? "PASS" : "FAIL") << "\n";
    std::cout << out.str();
  }
  return pass ? 0 : 1;
}

int cmd_examples(const RunConfig& cfg) {
  std::vector<c3::CatalogEntry> entries = c3::catalog();
  std::vector<c3::CatalogRun> runs;
  bool all_pass = true;
  for (const auto& entry : entries) {
    runs.push_back(c3::run_catalog_entry(entry, cfg.n_points, cfg.seed, cfg.tol));
    all_pass = all_pass && runs.back().pass;
  }

  if (cfg.format == "json") {
    json items = json::array();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& entry = entries[i];
      const auto& run = runs[i];
      json claims = json::array();
      for (const auto& cc : run.checks) {
        claims.push_back(
            json{{"quantity", cc.claim.quantity},
                 {"claimed", c3::to_string(cc.claim.value,
                                           entry.spec.chart.coords)},
                 {"note", cc.claim.note},
                 {"known_mismatch", cc.claim.known_mismatch},
                 {"evaluated_points", cc.evaluated},
                 {"worst_gap", cc.worst},
                 {"witness", point_json(cc.witness)},
                 {"match", cc.match}});
      }
      items.push_back(
          json{{"name", run.name},
               {"summary", entry.summary},
               {"expected_label", run.expected_label},
               {"classification", classification_json(run.classification,
                                                      cfg.verbose)},
               {"label_match", run.label_match},
               {"claims", claims},
               {"undocumented_mismatch", run.undocumented_mismatch},
               {"pass", run.pass}});
    }
    emit_json(json{{"command", "examples"},
                   {"config", config_json(cfg)},
                   {"entries", items},
                   {"pass", all_pass}});
  } else {
    std::ostringstream out;
    print_config(out, cfg);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& entry = entries[i];
      const auto& run = runs[i];
      out << "\nentry: " << run.name << "\n";
      out << "  summary: " << entry.summary << "\n";
      out << "  classification: " << run.classification.label
          << "  (expected: " << run.expected_label << ", "
          << (run.label_match ? "match" : "MISMATCH") << ")\n";
      out << "  worst nullity residual: "
          << fmt(run.classification.worst_residual) << "\n";
      out << "  claims\n";
      std::size_t qw = 8;
      for (const auto& cc : run.checks)
        qw = std::max(qw, cc.claim.quantity.size());
      qw += 2;
      for (const auto& cc : run.checks) {
        std::string status = cc.match ? "match"
                             : cc.claim.known_mismatch ? "known mismatch"
                                                       : "MISMATCH";
        out << "    " << pad(cc.claim.quantity, qw) << pad(status, 17)
            << "worst gap " << pad(fmt(cc.worst), 24) << "claimed "
            << c3::to_string(cc.claim.value, entry.spec.chart.coords) << "\n";
      }
      bool any_known = false;
      for (const auto& cc : run.checks)
        any_known = any_known || (cc.claim.known_mismatch && !cc.match);
      if (any_known) {
        out << "  documented discrepancies\n";
        for (const auto& cc : run.checks) {
          if (cc.claim.known_mismatch && !cc.match)
            out << "    " << cc.claim.quantity << ": " << cc.claim.note << "\n";
        }
      }
      out << "  entry result: " << (run.pass ? "PASS" : "FAIL") << "\n";
    }
    out << "\nresult: " << (all_pass ? "PASS" : "FAIL") << "\n";
    std::cout << out.str();
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"computational verification of three-dimensional contact "
               "metric structures"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string spec_path;

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--points", cfg.n_points, "sample points per check")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "PRNG seed for the sample sweep")
        ->envname("CONTACT3_SEED");
    sub->add_option("--tol", cfg.tol, "residual tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--fd-step", cfg.fd_step, "finite difference step")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", cfg.format, "report format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_flag("--verbose", cfg.verbose,
                  "include per-point tables in text reports");
  };

  CLI::App* verify = app.add_subcommand(
      "verify", "check the structure axioms and curvature identities");
  verify->add_option("spec", spec_path, "manifold file (.cmm)")->required();
  add_common(verify);

  CLI::App* nullity = app.add_subcommand(
      "nullity", "extract pointwise curvature coefficients and classify");
  nullity->add_option("spec", spec_path, "manifold file (.cmm)")->required();
  add_common(nullity);

  CLI::App* dhom = app.add_subcommand(
      "dhomothety", "verify the scaling laws of a deformation");
  dhom->add_option("spec", spec_path, "manifold file (.cmm)")->required();
  dhom->add_option("--alpha", cfg.alpha, "deformation parameter (> 0)")
      ->required();
  dhom->add_option("--emit", cfg.emit_path,
                   "write the deformed manifold to this path");
  add_common(dhom);

  CLI::App* chart = app.add_subcommand(
      "chart", "generate a normal-form chart and verify its construction laws");
  chart->add_option("--case", cfg.case_id,
                    "frame leg carrying the eigenvalue gradient (1 or 2)");
  chart->add_option("--k3", cfg.k3, "third component of the moving leg, in z");
  chart->add_option("--r", cfg.r, "free profile in z");
  chart->add_option("--beta", cfg.beta, "free profile in z");
  chart->add_option("--H", cfg.H, "free profile in y and z");
  chart->add_option("--emit", cfg.emit_path,
                    "write the generated manifold to this path");
  add_common(chart);

  CLI::App* examples = app.add_subcommand(
      "examples", "run the catalog against its claimed invariants");
  add_common(examples);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return cmd_verify(spec_path, cfg);
    if (nullity->parsed()) return cmd_nullity(spec_path, cfg);
    if (dhom->parsed()) return cmd_dhomothety(spec_path, cfg);
    if (chart->parsed()) return cmd_chart(cfg);
    return cmd_examples(cfg);
  } catch (const c3::SpecError& e) {
    std::cerr << "contact3: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "contact3: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    // BuildError, ChartError, ParseError, NullityError, EvalError: all are
    // problems with the input rather than failed checks.
    std::cerr << "contact3: " << e.what() << "\n";
    return 2;
  }
}
