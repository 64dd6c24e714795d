// End-to-end checks of the command line binary: exit codes, report shape,
// determinism, and the error paths. The binary path and the manifold
// directory come in as compile definitions.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr merged
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(CONTACT3_CLI_PATH) + " " + args + " 2>&1";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    res.output.append(buf.data(), n);
  int status = pclose(pipe);
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string manifold(const std::string& name) {
  return std::string(CONTACT3_MANIFOLD_DIR) + "/" + name;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("verify command", "[cli]") {
  SECTION("passing manifold exits 0 with a full report") {
    RunResult r = run_cli("verify " + manifold("example3.cmm"));
    CHECK(r.code == 0);
    CHECK(contains(r.output, "manifold: example3"));
    CHECK(contains(r.output, "structure axioms"));
    CHECK(contains(r.output, "curvature identities"));
    CHECK(contains(r.output, "tau_transport"));
    CHECK(contains(r.output, "result: PASS"));
    CHECK(!contains(r.output, "FAIL"));
  }

  SECTION("json format carries both check groups") {
    RunResult r = run_cli("verify " + manifold("example3.cmm") +
                          " --format json");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "\"command\": \"verify\""));
    CHECK(contains(r.output, "\"axioms\""));
    CHECK(contains(r.output, "\"identities\""));
    CHECK(contains(r.output, "\"pass\": true"));
  }

  SECTION("structure that fails its checks exits 1") {
    auto path = temp_file("contact3_cli_notcontact.cmm");
    write_file(path,
               "[manifold]\n"
               "name = notcontact\n"
               "coords = x y z\n"
               "box = -1 1 -1 1 -1 1\n"
               "\n"
               "[tensor]\n"
               "g = 1, 0, 0, 1, 0, 1\n"
               "phi = 0, -1, 0, 1, 0, 0, 0, 0, 0\n"
               "xi = 0, 0, 1\n");
    RunResult r = run_cli("verify " + path.string());
    CHECK(r.code == 1);
    CHECK(contains(r.output, "result: FAIL"));
    CHECK(contains(r.output, "contact_nondegeneracy"));
    std::filesystem::remove(path);
  }

  SECTION("missing file exits 2") {
    RunResult r = run_cli("verify /nonexistent/nowhere.cmm");
    CHECK(r.code == 2);
    CHECK(contains(r.output, "cannot open"));
  }

  SECTION("parse errors exit 2 and carry line and column") {
    auto path = temp_file("contact3_cli_broken.cmm");
    write_file(path,
               "[manifold]\n"
               "name = broken\n"
               "coords = x y z\n"
               "box = -1 1 -1 1 0.5 2\n"
               "\n"
               "[frame]\n"
               "xi = 1, 0, 0\n"
               "e = -2*y, 2*x* , 1\n"
               "phie = 0, 1, 0\n");
    RunResult r = run_cli("verify " + path.string());
    CHECK(r.code == 2);
    CHECK(contains(r.output, "line 8"));
    CHECK(contains(r.output, "column"));
    std::filesystem::remove(path);
  }
}

TEST_CASE("nullity command", "[cli]") {
  SECTION("classification report is informational and exits 0") {
    RunResult r = run_cli("nullity " + manifold("example1.cmm"));
    CHECK(r.code == 0);
    CHECK(contains(r.output, "classification: generalized (kappa,mu)"));
    CHECK(contains(r.output, "worst nullity residual"));
    CHECK(!contains(r.output, "per-point values"));
  }

  SECTION("verbose adds the per-point table") {
    RunResult r = run_cli("nullity " + manifold("example1.cmm") +
                          " --verbose --points 8");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "per-point values"));
    CHECK(contains(r.output, "lambda"));
  }

  SECTION("a generic structure still exits 0") {
    RunResult r = run_cli("nullity " + manifold("example4.cmm"));
    CHECK(r.code == 0);
    CHECK(contains(r.output, "classification: generic"));
  }

  SECTION("json always includes samples and null optional entries") {
    RunResult r = run_cli("nullity " + manifold("sasakian.cmm") +
                          " --format json --points 4");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "\"samples\""));
    CHECK(contains(r.output, "\"mu\": null"));
    CHECK(contains(r.output, "\"label\": \"Sasakian\""));
  }
}

TEST_CASE("dhomothety command", "[cli]") {
  SECTION("scaling laws verify and exit 0") {
    RunResult r = run_cli("dhomothety " + manifold("example1.cmm") +
                          " --alpha 2");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "alpha: 2"));
    CHECK(contains(r.output, "kappa_law"));
    CHECK(contains(r.output, "mu_law"));
    CHECK(contains(r.output, "result: PASS"));
  }

  SECTION("alpha is required") {
    RunResult r = run_cli("dhomothety " + manifold("example1.cmm"));
    CHECK(r.code == 2);
  }

  SECTION("alpha must be positive") {
    RunResult r = run_cli("dhomothety " + manifold("example1.cmm") +
                          " --alpha 0");
    CHECK(r.code == 2);
    CHECK(contains(r.output, "positive"));
  }

  SECTION("emitted deformed manifold verifies on its own") {
    auto path = temp_file("contact3_cli_deformed.cmm");
    RunResult r = run_cli("dhomothety " + manifold("example3.cmm") +
                          " --alpha 2 --emit " + path.string());
    CHECK(r.code == 0);
    CHECK(contains(r.output, "wrote deformed manifold"));
    REQUIRE(std::filesystem::exists(path));

    RunResult v = run_cli("verify " + path.string());
    CHECK(v.code == 0);
    CHECK(contains(v.output, "manifold: example3-deformed"));
    std::filesystem::remove(path);
  }
}

TEST_CASE("chart command", "[cli]") {
  SECTION("defaults build the unit chart and pass") {
    RunResult r = run_cli("chart --case 1");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "generated chart: case 1"));
    CHECK(contains(r.output, "lambda: z"));
    CHECK(contains(r.output, "construction laws"));
    CHECK(contains(r.output, "torsion_evolution"));
    CHECK(contains(r.output, "result: PASS"));
  }

  SECTION("parameter expressions reach the builder") {
    RunResult r = run_cli("chart --case 2 --k3 z --H y^2");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "lambda: ln(z)"));
    CHECK(contains(r.output, "a: -1-ln(z)"));
  }

  SECTION("emitted chart file verifies on its own") {
    auto path = temp_file("contact3_cli_chart.cmm");
    RunResult r = run_cli("chart --case 1 --r z^2 --beta 3*z --H y*z --emit " +
                          path.string());
    CHECK(r.code == 0);
    REQUIRE(std::filesystem::exists(path));
    RunResult v = run_cli("verify " + path.string());
    CHECK(v.code == 0);
    std::filesystem::remove(path);
  }

  SECTION("invalid case exits 2") {
    RunResult r = run_cli("chart --case 3");
    CHECK(r.code == 2);
    CHECK(contains(r.output, "case must be 1 or 2"));
  }

  SECTION("malformed parameter expression exits 2 naming the flag") {
    RunResult r = run_cli("chart --k3 z+");
    CHECK(r.code == 2);
    CHECK(contains(r.output, "--k3"));
  }

  SECTION("disallowed parameter dependence exits 2") {
    RunResult r = run_cli("chart --k3 x");
    CHECK(r.code == 2);
    CHECK(contains(r.output, "k3"));
  }
}

TEST_CASE("examples command", "[cli]") {
  RunResult r = run_cli("examples");
  CHECK(r.code == 0);
  CHECK(contains(r.output, "entry: example1"));
  CHECK(contains(r.output, "entry: example3"));
  CHECK(contains(r.output, "entry: example4"));
  CHECK(contains(r.output, "entry: sasakian"));
  CHECK(contains(r.output, "entry: flat"));
  CHECK(contains(r.output, "known mismatch"));
  CHECK(contains(r.output, "documented discrepancies"));
  CHECK(contains(r.output, "result: PASS"));
  CHECK(!contains(r.output, "MISMATCH"));
}

TEST_CASE("global command behavior", "[cli]") {
  SECTION("no subcommand exits 2") {
    RunResult r = run_cli("");
    CHECK(r.code == 2);
  }

  SECTION("help exits 0") {
    RunResult r = run_cli("--help");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "verify"));
    CHECK(contains(r.output, "dhomothety"));
  }

  SECTION("unknown format value exits 2") {
    RunResult r = run_cli("verify " + manifold("example3.cmm") +
                          " --format yaml");
    CHECK(r.code == 2);
  }

  SECTION("repeated runs are byte identical") {
    std::string args = "examples --format json --points 16";
    RunResult a = run_cli(args);
    RunResult b = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.output == b.output);

    RunResult c = run_cli("verify " + manifold("example1.cmm"));
    RunResult d = run_cli("verify " + manifold("example1.cmm"));
    CHECK(c.output == d.output);
  }

  SECTION("seed flag and environment override agree") {
    RunResult flag = run_cli("nullity " + manifold("example1.cmm") +
                             " --seed 7");
    CHECK(contains(flag.output, "seed: 7"));

    std::string cmd = "CONTACT3_SEED=7 " + std::string(CONTACT3_CLI_PATH) +
                      " nullity " + manifold("example1.cmm");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string env_out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
      env_out.append(buf.data(), n);
    pclose(pipe);
    CHECK(env_out == flag.output);
  }

  SECTION("point count is configurable") {
    RunResult r = run_cli("verify " + manifold("example3.cmm") +
                          " --points 16");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "(16 points"));
  }
}
