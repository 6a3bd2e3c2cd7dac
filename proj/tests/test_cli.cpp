#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

#include "ehvac/lattice.hpp"
#include "ehvac/pv_scheme.hpp"
#include "ehvac/renorm.hpp"

using namespace ehvac;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string tag = std::to_string(++counter);
  const std::string out_path = "/tmp/ehvac_test_out_" + tag;
  const std::string err_path = "/tmp/ehvac_test_err_" + tag;
  const std::string cmd =
      std::string(EHVAC_CLI_SOURCE) + " " + args + " > " + out_path + " 2> " + err_path;
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// CSV text with the named column replaced by "-" in every data row, so
// timing columns can be ignored in determinism comparisons.
std::string mask_column(const std::string& text, const std::string& column) {
  auto rows = parse_csv(text);
  if (rows.empty()) return text;
  size_t target = rows[0].size();
  for (size_t i = 0; i < rows[0].size(); ++i)
    if (rows[0][i] == column) target = i;
  std::string out;
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) {
      if (c) out += ",";
      out += (r > 0 && c == target) ? "-" : rows[r][c];
    }
    out += "\n";
  }
  return out;
}

double cell_value(const json& report, const std::string& name) {
  for (const auto& v : report.at("values"))
    if (v.at("name") == name) return v.at("value").get<double>();
  FAIL("value '" << name << "' not found in report");
  return 0.0;
}

bool cell_pass(const json& report, const std::string& name) {
  for (const auto& v : report.at("values"))
    if (v.at("name") == name) return v.at("pass").get<bool>();
  FAIL("check '" << name << "' not found in report");
  return false;
}

}  // namespace

TEST_CASE("usage errors exit 1 with a single aggregated message") {
  const CliResult none = run_cli("");
  CHECK(none.exit_code == 1);
  CHECK(none.err.find("invalid configuration") != std::string::npos);

  const CliResult unknown = run_cli("frobnicate");
  CHECK(unknown.exit_code == 1);

  // Two independent config mistakes arrive in one message on one line.
  const CliResult agg = run_cli("tabulate-fpv --masses 1,2 --b-grid 1e-3:bad:log:5");
  CHECK(agg.exit_code == 1);
  CHECK(agg.err.find("--masses") != std::string::npos);
  CHECK(agg.err.find("--b-grid") != std::string::npos);
  CHECK(std::count(agg.err.begin(), agg.err.end(), '\n') == 1);
  CHECK(agg.out.empty());
}

TEST_CASE("tabulate-fpv emits the documented CSV and matches the library") {
  const CliResult r = run_cli("tabulate-fpv --masses 1,2,3 --b-grid 1:10:lin:3");
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"b", "f_pv", "weak_ratio", "strong_ratio"});
  const PvScheme s = make_scheme(1, 2, 3);
  const double grid[3] = {1.0, 5.5, 10.0};
  for (int i = 0; i < 3; ++i) {
    CHECK(std::stod(rows[i + 1][0]) == doctest::Approx(grid[i]).epsilon(1e-15));
    CHECK(std::stod(rows[i + 1][1]) == doctest::Approx(f_pv(s, grid[i])).epsilon(1e-12));
  }
  // Default grid: 25 rows.
  const CliResult d = run_cli("tabulate-fpv");
  CHECK(parse_csv(d.out).size() == 26);
  // Bit-identical rerun.
  const CliResult again = run_cli("tabulate-fpv --masses 1,2,3 --b-grid 1:10:lin:3");
  CHECK(again.out == r.out);
}

TEST_CASE("tabulate-eh CSV is negative-valued with asymptote ratios") {
  const CliResult r = run_cli("tabulate-eh --mass 1 --x-grid 1e-2:1e2:log:5");
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"x", "f_eh", "weak_ratio", "strong_ratio"});
  for (size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) < 0.0);
  // The weak-field ratio approaches 1 from the first grid point.
  CHECK(std::stod(rows[1][2]) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("grid syntax: single point, lin endpoints, rejects malformed input") {
  const CliResult one = run_cli("tabulate-fpv --b-grid 2.5:9:log:1");
  REQUIRE(one.exit_code == 0);
  const auto rows = parse_csv(one.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "2.5");

  const CliResult lin = run_cli("tabulate-fpv --b-grid 1:3:lin:3");
  const auto lrows = parse_csv(lin.out);
  REQUIRE(lrows.size() == 4);
  CHECK(lrows[1][0] == "1");
  CHECK(lrows[2][0] == "2");
  CHECK(lrows[3][0] == "3");

  CHECK(run_cli("tabulate-fpv --b-grid 1:3:cubic:3").exit_code == 1);
  CHECK(run_cli("tabulate-fpv --b-grid 1:3:lin:0").exit_code == 1);
  CHECK(run_cli("tabulate-fpv --b-grid 1:3:lin").exit_code == 1);
  CHECK(run_cli("tabulate-fpv --b-grid -1:3:log:3").exit_code == 1);
}

TEST_CASE("relation-check reports JSON with stable key order") {
  const CliResult r = run_cli("relation-check --masses 1,2,3 --b 1");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep.at("command") == "relation-check");
  CHECK(rep.at("all_passed") == true);
  CHECK(cell_pass(rep, "relative_residual"));
  CHECK(cell_value(rep, "f_pv") == doctest::Approx(f_pv(make_scheme(1, 2, 3), 1.0)).epsilon(1e-10));
  // Top-level key order is fixed: command, inputs, values, all_passed, runtime_s.
  const size_t p0 = r.out.find("\"command\"");
  const size_t p1 = r.out.find("\"inputs\"");
  const size_t p2 = r.out.find("\"values\"");
  const size_t p3 = r.out.find("\"all_passed\"");
  const size_t p4 = r.out.find("\"runtime_s\"");
  CHECK(p0 < p1);
  CHECK(p1 < p2);
  CHECK(p2 < p3);
  CHECK(p3 < p4);
}

TEST_CASE("renorm-check matches the library and passes its own bound") {
  const CliResult r = run_cli("renorm-check --masses 1,10,20 --e 0.3 --b 1");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  const RenormState st = renormalize(0.3, make_scheme(1, 10, 20));
  CHECK(cell_value(rep, "z3") == doctest::Approx(st.z3).epsilon(1e-13));
  CHECK(cell_value(rep, "e_ph") == doctest::Approx(st.e_ph).epsilon(1e-13));
  CHECK(cell_pass(rep, "identity_agreement"));
  CHECK(cell_pass(rep, "suppression"));
  const double diff = cell_value(rep, "difference");
  CHECK(std::fabs(diff) <= cell_value(rep, "suppression_bound"));
}

TEST_CASE("landau-check: exit 2 on an unattainable tolerance, report still emitted") {
  const CliResult ok = run_cli("landau-check --s 1 --b 1");
  CHECK(ok.exit_code == 0);
  const CliResult tight = run_cli("landau-check --s 1 --b 1 --tol 1e-30");
  CHECK(tight.exit_code == 2);
  const json rep = json::parse(tight.out);  // failure still produces the full report
  CHECK(rep.at("all_passed") == false);
  CHECK(cell_value(rep, "sum_route") ==
        doctest::Approx(cell_value(rep, "closed_route")).epsilon(1e-12));
}

TEST_CASE("kernel-check passes the decay bounds on sampled pairs") {
  const CliResult r = run_cli("kernel-check --mu 1 --b 0.5 --samples 40 --seed 3");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(cell_value(rep, "min_resolvent_margin") >= 0.0);
  CHECK(cell_value(rep, "min_gradient_margin") >= 0.0);
  CHECK(cell_pass(rep, "min_resolvent_margin"));
  CHECK(cell_pass(rep, "min_gradient_margin"));
}

TEST_CASE("heat-trace agrees with the closed form") {
  const CliResult r = run_cli("heat-trace --s 1 --b 1 --rho 0.5");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(cell_pass(rep, "localization_independence"));
  CHECK(cell_value(rep, "localized_trace") ==
        doctest::Approx(cell_value(rep, "closed_form")).epsilon(1e-8));
}

TEST_CASE("biot-savart reconstructs a band-limited field") {
  const CliResult r = run_cli("biot-savart --profile fourier --n 16 --box 8 --amplitude 1.5");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(cell_pass(rep, "curl_residual"));
  CHECK(cell_value(rep, "divergence_rel") < 1e-10);
}

TEST_CASE("lda matches the constant-field identity and rejects bad grid files") {
  const CliResult r = run_cli("lda --profile constant --b0 0.8 --n 8 --box 4 --e 1");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(cell_pass(rep, "constant_field_identity"));
  const double want = 64.0 * f_pv(make_scheme(1, 2, 3), 0.8);
  CHECK(cell_value(rep, "lda_energy") == doctest::Approx(want).epsilon(1e-10));

  const CliResult bad = run_cli("lda --grid-file /nonexistent/grid.txt");
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("grid-file") != std::string::npos);
}

TEST_CASE("lattice-density reproduces the library density") {
  const CliResult r = run_cli("lattice-density --n 6 --a 0.7 --flux-quanta 2 --dims 2");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  const LatticeSpec spec{6, 0.7, 2, 2};
  const double b = constant_field_of(spec);
  const SpectralEnergy se = pv_energy_density(spec, b, make_scheme(1, 2, 3));
  CHECK(cell_value(rep, "b") == doctest::Approx(b).epsilon(1e-14));
  CHECK(cell_value(rep, "lattice_density") == doctest::Approx(se.density).epsilon(1e-12));
  CHECK(cell_value(rep, "ratio") ==
        doctest::Approx(se.density / f_pv(make_scheme(1, 2, 3), b)).epsilon(1e-10));
}

TEST_CASE("sweep CSV: documented columns, deterministic data, library agreement") {
  const std::string args = "sweep --profile stripes --eps 0.5,0.25 --n 24 --a 0.5 "
                           "--flux-quanta 1 --dims 2";
  const CliResult r = run_cli(args);
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"eps", "lattice_energy_density", "lda_value",
                                            "deviation", "runtime_s"});
  const SweepReport rep = semiclassical_sweep("stripes", {0.5, 0.25}, LatticeSpec{24, 0.5, 1, 2},
                                              make_scheme(1, 2, 3));
  for (int i = 0; i < 2; ++i) {
    CHECK(std::stod(rows[i + 1][0]) == doctest::Approx(rep.rows[i].eps).epsilon(1e-15));
    CHECK(std::stod(rows[i + 1][1]) ==
          doctest::Approx(rep.rows[i].lattice_energy_density).epsilon(1e-12));
    CHECK(std::stod(rows[i + 1][2]) == doctest::Approx(rep.rows[i].lda_value).epsilon(1e-12));
    CHECK(std::stod(rows[i + 1][3]) == doctest::Approx(rep.rows[i].deviation).epsilon(1e-12));
  }
  // Determinism modulo the wall-clock column.
  const CliResult again = run_cli(args);
  CHECK(mask_column(again.out, "runtime_s") == mask_column(r.out, "runtime_s"));
}

TEST_CASE("sweep JSON carries the matched reference and the resolution warning") {
  const CliResult r = run_cli(
      "sweep --profile stripes --eps 0.5,0.25 --n 24 --a 0.5 --flux-quanta 1 --dims 2 --out json");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep.at("inputs").at("warning").get<std::string>().find("resolution-insufficient") !=
        std::string::npos);
  CHECK(cell_value(rep, "matched_fitted_rate") == doctest::Approx(1.1885).epsilon(1e-3));
  CHECK(cell_value(rep, "resolution_ok") == 0.0);
  CHECK(cell_pass(rep, "matched_monotone"));
  CHECK(cell_value(rep, "matched_deviation[0.25]") ==
        doctest::Approx(7.642118456719915e-04).epsilon(1e-8));
}

TEST_CASE("sweep rejects malformed configurations") {
  CHECK(run_cli("sweep --eps 0.25,0.5 --n 16 --dims 2").exit_code == 1);   // ascending
  CHECK(run_cli("sweep --eps 0.5,0.3 --n 16 --dims 2").exit_code == 1);    // non-integer sites
  CHECK(run_cli("sweep --profile sawtooth --eps 0.5 --n 16").exit_code == 1);
  CHECK(run_cli("sweep --eps 0.5,0.25 --n 16 --dims 5").exit_code == 1);
}

TEST_CASE("--output writes the report to a file instead of stdout") {
  const std::string path = "/tmp/ehvac_test_output_file.csv";
  const CliResult r = run_cli("tabulate-fpv --b-grid 1:10:lin:3 --output " + path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.empty());
  const CliResult direct = run_cli("tabulate-fpv --b-grid 1:10:lin:3");
  CHECK(slurp(path) == direct.out);
  std::remove(path.c_str());
}

TEST_CASE("--out json renders tabulations as value reports") {
  const CliResult r = run_cli("tabulate-fpv --b-grid 1:10:lin:3 --out json");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep.at("command") == "tabulate-fpv");
  CHECK(rep.at("values").size() == 3);
  CHECK(cell_value(rep, "f_pv(1)") ==
        doctest::Approx(f_pv(make_scheme(1, 2, 3), 1.0)).epsilon(1e-12));
}

TEST_CASE("every subcommand offers a passing self-test") {
  for (const std::string cmd :
       {"tabulate-eh", "tabulate-fpv", "relation-check", "renorm-check", "landau-check",
        "kernel-check", "heat-trace", "biot-savart", "lda", "lattice-density", "sweep"}) {
    const CliResult r = run_cli(cmd + " --self-test");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("checks passed") != std::string::npos);
  }
}
