// Command-line front end: tabulation, identity checks, kernel-bound
// verification, field-grid utilities, and the semiclassical lattice sweep.
//
// Exit codes: 0 = success and every check passed; 2 = a scientific check
// failed (the report is still emitted); 1 = usage or configuration error,
// reported as a single aggregated message on stderr.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ehvac/eh_density.hpp"
#include "ehvac/field_grid.hpp"
#include "ehvac/landau.hpp"
#include "ehvac/lattice.hpp"
#include "ehvac/pv_scheme.hpp"
#include "ehvac/quadrature.hpp"
#include "ehvac/renorm.hpp"
#include "ehvac/report.hpp"

using namespace ehvac;

namespace {

using clock_type = std::chrono::steady_clock;

double elapsed_s(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Config parsing helpers.  All numeric flags arrive as strings so that every
// invalid value can be collected into one aggregated message.
// ---------------------------------------------------------------------------

struct ConfigErrors {
  std::vector<std::string> items;
  void add(const std::string& msg) { items.push_back(msg); }
  bool ok() const { return items.empty(); }
  std::string message() const {
    std::string out = "invalid configuration: ";
    for (size_t i = 0; i < items.size(); ++i) {
      if (i) out += "; ";
      out += items[i];
    }
    return out;
  }
};

double parse_double(const std::string& text, const std::string& flag, ConfigErrors& errs) {
  const char* c = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(c, &end);
  if (end == c || *end != '\0' || !std::isfinite(v)) {
    errs.add(flag + ": '" + text + "' is not a finite number");
    return 0.0;
  }
  return v;
}

long parse_int(const std::string& text, const std::string& flag, ConfigErrors& errs) {
  const char* c = text.c_str();
  char* end = nullptr;
  const long v = std::strtol(c, &end, 10);
  if (end == c || *end != '\0') {
    errs.add(flag + ": '" + text + "' is not an integer");
    return 0;
  }
  return v;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag,
                                      ConfigErrors& errs) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, flag, errs));
  if (out.empty()) errs.add(flag + ": empty list");
  return out;
}

PvScheme parse_scheme(const std::string& text, ConfigErrors& errs) {
  std::vector<double> m = parse_double_list(text, "--masses", errs);
  if (m.size() != 3) {
    errs.add("--masses: need exactly three comma-separated masses");
    return PvScheme{};
  }
  if (!errs.ok()) return PvScheme{};
  try {
    return make_scheme(m[0], m[1], m[2]);
  } catch (const std::exception& e) {
    errs.add(std::string("--masses: ") + e.what());
    return PvScheme{};
  }
}

// Grid syntax start:stop:scale:count with scale in {lin, log}.
std::vector<double> parse_grid(const std::string& text, const std::string& flag,
                               ConfigErrors& errs) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) {
    errs.add(flag + ": expected start:stop:scale:count, got '" + text + "'");
    return {};
  }
  ConfigErrors local;
  const double start = parse_double(parts[0], flag, local);
  const double stop = parse_double(parts[1], flag, local);
  const long count = parse_int(parts[3], flag, local);
  const std::string& scale = parts[2];
  if (!local.ok()) {
    for (const auto& m : local.items) errs.add(m);
    return {};
  }
  if (scale != "lin" && scale != "log") {
    errs.add(flag + ": scale must be lin or log, got '" + scale + "'");
    return {};
  }
  if (count < 1 || count > 100000) {
    errs.add(flag + ": count must be in [1, 100000]");
    return {};
  }
  if (scale == "log" && (start <= 0.0 || stop <= 0.0)) {
    errs.add(flag + ": log grids need positive endpoints");
    return {};
  }
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(start);
    return out;
  }
  for (long i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(scale == "lin" ? start + (stop - start) * t
                                 : start * std::pow(stop / start, t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emission.
// ---------------------------------------------------------------------------

std::string report_csv(const EnergyReport& rep) {
  CsvTable t({"name", "value", "route", "tolerance", "checked", "pass"});
  for (const ReportValue& v : rep.values)
    t.add_text_row({v.name, format_double(v.value), v.route, format_double(v.tolerance),
                    v.checked ? "1" : "0", v.pass ? "1" : "0"});
  return t.str();
}

int emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(output_path);
  if (!f) {
    std::cerr << "ehvac: cannot open output file '" << output_path << "'\n";
    return 1;
  }
  f << text;
  return 0;
}

int finish(const EnergyReport& rep, const std::string& out_format,
           const std::string& output_path) {
  const std::string text = out_format == "json" ? rep.to_json() : report_csv(rep);
  const int io = emit(text, output_path);
  if (io != 0) return io;
  return rep.all_passed() ? 0 : 2;
}

// ---------------------------------------------------------------------------
// Self tests: cheap closed-form sanity checks per subcommand.
// ---------------------------------------------------------------------------

struct SelfTest {
  int checks = 0;
  int failures = 0;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      ++failures;
      std::cout << "self-test FAIL: " << what << "\n";
    }
  }
  int finish(const std::string& cmd) const {
    std::cout << "self-test " << cmd << ": " << (checks - failures) << "/" << checks
              << " checks passed\n";
    return failures == 0 ? 0 : 2;
  }
};

bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1e-300, std::fabs(a), std::fabs(b)});
}

int self_test_tabulate_eh() {
  SelfTest st;
  st.expect(f_eh(0.0, 1.0) == 0.0, "f_eh vanishes at zero field");
  st.expect(f_eh(1.0, 1.0) < 0.0, "f_eh is negative");
  st.expect(f_eh(2.0, 1.0) < f_eh(1.0, 1.0), "f_eh decreases");
  const double x = 1e-2;
  st.expect(std::fabs(f_eh(x, 1.0) * 360.0 * M_PI * M_PI / (x * x * x * x) + 1.0) < 1e-2,
            "weak-field quartic coefficient");
  return st.finish("tabulate-eh");
}

int self_test_tabulate_fpv() {
  SelfTest st;
  const PvScheme s = make_scheme(1, 2, 3);
  st.expect(close_rel(s.c1, -1.6, 1e-12), "c1 for masses 1,2,3");
  st.expect(close_rel(s.c2, 0.6, 1e-12), "c2 for masses 1,2,3");
  st.expect(std::fabs(s.c0 + s.c1 + s.c2) < 1e-12, "sum c_j = 0");
  st.expect(std::fabs(s.c0 + 4 * s.c1 + 9 * s.c2) < 1e-12, "sum c_j m_j^2 = 0");
  st.expect(f_pv(s, 0.0) == 0.0, "f_pv vanishes at zero field");
  st.expect(f_pv(s, 1.0) > 0.0, "f_pv is positive");
  st.expect(std::fabs(pv_weight(s, 0.0)) < 1e-15, "weight vanishes at s = 0");
  return st.finish("tabulate-fpv");
}

int self_test_relation_check() {
  SelfTest st;
  const PvScheme s = make_scheme(1, 2, 3);
  const RelationBreakdown z = relation_residual(s, 0.0);
  st.expect(z.f_pv_value == 0.0 && z.residual == 0.0, "all terms vanish at zero field");
  const RelationBreakdown r = relation_residual(s, 1.0);
  st.expect(std::fabs(r.residual) <= 1e-9 * r.scale, "residual is quadrature noise at b = 1");
  return st.finish("relation-check");
}

int self_test_renorm_check() {
  SelfTest st;
  const PvScheme s = make_scheme(1, 2, 3);
  const RenormState off = renormalize(0.0, s);
  st.expect(off.z3 == 1.0 && off.e_ph == 0.0, "free theory is untouched");
  const RenormState on = renormalize(1.0, s);
  const double z3 = 1.0 / (1.0 + 2.0 / (3.0 * M_PI) * s.log_lambda);
  st.expect(close_rel(on.z3, z3, 1e-14), "z3 closed form");
  st.expect(close_rel(on.e_ph, std::sqrt(z3), 1e-14), "e_ph = sqrt(z3) e");
  return st.finish("renorm-check");
}

int self_test_landau_check() {
  SelfTest st;
  const LandauSpectrum ls = make_landau_spectrum(2.0, 1);
  st.expect(close_rel(ls.degeneracy_density, 2.0 / (2.0 * M_PI), 1e-15), "degeneracy b/2pi");
  st.expect(ls.levels.size() == 4, "two oscillator indices, two spins");
  st.expect(ls.levels[0].energy == 0.0 && ls.levels[0].nu == -1, "zero mode first");
  const HeatRoutes free0 = landau_heat_density(1.0, 0.0);
  st.expect(free0.sum_route == 0.0 && free0.closed_route == 0.0, "free field gives zero");
  const HeatRoutes hr = landau_heat_density(1.0, 1.0);
  st.expect(close_rel(hr.sum_route, hr.closed_route, 1e-12), "routes agree at s = b = 1");
  return st.finish("landau-check");
}

int self_test_kernel_check() {
  SelfTest st;
  const auto a = kernel_bound_samples(10, 42);
  const auto b = kernel_bound_samples(10, 42);
  bool same = a.size() == b.size();
  bool inside = true, separated = true;
  for (size_t i = 0; i < a.size(); ++i) {
    same = same && a[i].first.x == b[i].first.x && a[i].second.z == b[i].second.z;
    for (double c : {a[i].first.x, a[i].first.y, a[i].first.z, a[i].second.x, a[i].second.y,
                     a[i].second.z})
      inside = inside && std::fabs(c) <= 2.5;
    const double dx = a[i].first.x - a[i].second.x, dy = a[i].first.y - a[i].second.y,
                 dz = a[i].first.z - a[i].second.z;
    separated = separated && std::sqrt(dx * dx + dy * dy + dz * dz) >= 0.05;
  }
  st.expect(same, "sampling is deterministic for a fixed seed");
  st.expect(inside, "samples stay inside the box");
  st.expect(separated, "pairs respect the minimum separation");
  return st.finish("kernel-check");
}

int self_test_heat_trace() {
  SelfTest st;
  const double s = 1.0;
  const double free_density = 2.0 * std::pow(4.0 * M_PI * s, -1.5);
  st.expect(close_rel(localized_heat_trace(s, 0.0, GaussianLocalizer{1.0}), free_density, 1e-9),
            "localized trace reduces to the free density at b = 0");
  const SpinKernel k = pauli_heat_kernel(s, 0.0, Vec3{0, 0, 0}, Vec3{0, 0, 0});
  st.expect(close_rel(k.up.real(), std::pow(4.0 * M_PI * s, -1.5), 1e-13),
            "free diagonal heat kernel");
  return st.finish("heat-trace");
}

int self_test_biot_savart() {
  SelfTest st;
  const AnalyticField f = fourier_mode_profile(8.0, 1.5);
  const FieldGrid b = sample_profile(f, 16, 8.0);
  const FieldGrid a = biot_savart(b);
  double worst = 0.0;
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) {
        const Vec3 want = f.a(Vec3{i * 0.5, j * 0.5, k * 0.5});
        const Vec3& got = a.at(i, j, k);
        worst = std::max({worst, std::fabs(got.x - want.x), std::fabs(got.y - want.y),
                          std::fabs(got.z - want.z)});
      }
  st.expect(worst < 1e-10, "single-mode potential matches the closed form");
  st.expect(divergence_rel_spectral(a) < 1e-12, "potential is divergence free");
  return st.finish("biot-savart");
}

int self_test_lda() {
  SelfTest st;
  const PvScheme s = make_scheme(1, 2, 3);
  const FieldGrid g = sample_profile(constant_profile(Vec3{0, 0, 0.8}), 8, 4.0);
  const double vol = 4.0 * 4.0 * 4.0;
  st.expect(close_rel(lda_energy(g, 1.0, s), vol * f_pv(s, 0.8), 1e-12),
            "constant field gives V f_pv(|b|)");
  st.expect(close_rel(lda_energy(g, 0.5, s), vol * f_pv(s, 0.4), 1e-12),
            "charge rescales the field");
  return st.finish("lda");
}

int self_test_lattice_density() {
  SelfTest st;
  const LatticeSpec spec{6, 0.8, 0, 2};
  const SpectralEnergy se = pv_energy_density(spec, 0.0, make_scheme(1, 2, 3));
  st.expect(std::fabs(se.density) <= 1e-12, "zero field gives zero density");
  const std::vector<double> fr = free_pauli_eigenvalues(spec);
  st.expect(fr.front() == 0.0 && fr.size() == 72, "free spectrum starts at zero, spin doubled");
  st.expect(close_rel(constant_field_of(LatticeSpec{6, 0.7, 2, 2}),
                      2.0 * M_PI * 2.0 / (4.2 * 4.2), 1e-14),
            "flux quantization formula");
  return st.finish("lattice-density");
}

int self_test_sweep() {
  SelfTest st;
  const std::vector<double> a{0.5, 0.25};
  const std::vector<double> v{2.0 + 3.0 * 0.25, 2.0 + 3.0 * 0.0625};
  st.expect(close_rel(richardson_extrapolate(a, v), 2.0, 1e-13),
            "extrapolation removes the quadratic error term");
  bool threw = false;
  try {
    semiclassical_sweep("constant", {0.25, 0.5}, LatticeSpec{8, 0.5, 1, 2},
                        make_scheme(1, 2, 3));
  } catch (const std::domain_error&) {
    threw = true;
  }
  st.expect(threw, "ascending eps lists are rejected");
  return st.finish("sweep");
}

// ---------------------------------------------------------------------------
// Subcommand configuration: every flag is a string until validated.
// ---------------------------------------------------------------------------

struct Flags {
  std::string masses = "1,2,3";
  std::string e = "1";
  std::string b = "1";
  std::string b_grid = "1e-3:1e3:log:25";
  std::string x_grid = "1e-2:1e2:log:22";
  std::string mass = "1";
  std::string s = "1";
  std::string rho = "1";
  std::string mu = "1";
  std::string samples = "100";
  std::string seed = "1";
  std::string n_max = "-1";
  std::string tol;  // per-subcommand default filled at dispatch
  std::string profile;
  std::string grid_file;
  std::string eps = "0.5,0.25";
  std::string n = "16";
  std::string a = "0.5";
  std::string flux_quanta = "1";
  std::string dims = "2";
  std::string box = "10";
  std::string sigma = "0.705";
  std::string amplitude = "2";
  std::string b0 = "1";
  std::string out_format;  // csv for tables, json for checks unless overridden
  std::string output_path;
  bool self_test = false;
};

int run_tabulate_eh(const Flags& fl) {
  if (fl.self_test) return self_test_tabulate_eh();
  ConfigErrors errs;
  const double mass = parse_double(fl.mass, "--mass", errs);
  const std::vector<double> xs = parse_grid(fl.x_grid, "--x-grid", errs);
  if (errs.ok() && mass <= 0.0) errs.add("--mass: must be positive");
  if (errs.ok())
    for (double x : xs)
      if (x < 0.0) errs.add("--x-grid: negative field strength");
  if (!errs.ok()) {
    std::cerr << "ehvac: " << errs.message() << "\n";
    return 1;
  }
  const std::string fmt = fl.out_format.empty() ? "csv" : fl.out_format;
  if (fmt == "csv") {
    CsvTable t({"x", "f_eh", "weak_ratio", "strong_ratio"});
    for (double x : xs) {
      const double v = f_eh(x, mass);
      const double m2 = mass * mass;
      const double weak = -std::pow(x, 4) / (360.0 * M_PI * M_PI * m2 * m2);
      const double strong = -x * x * std::log(x / m2) / (24.0 * M_PI * M_PI);
      t.add_row({x, v, weak == 0.0 ? 0.0 : v / weak, strong == 0.0 ? 0.0 : v / strong});
    }
    return emit(t.str(), fl.output_path);
  }
  EnergyReport rep;
  rep.command = "tabulate-eh";
  rep.add_input("mass", format_double(mass));
  rep.add_input("x_grid", fl.x_grid);
  for (double x : xs)
    rep.add_value("f_eh(" + format_double(x) + ")", f_eh(x, mass), "proper-time quadrature");
  return finish(rep, "json", fl.output_path);
}

int run_tabulate_fpv(const Flags& fl) {
  if (fl.self_test) return self_test_tabulate_fpv();
  ConfigErrors errs;
  const PvScheme sch = parse_scheme(fl.masses, errs);
  const std::vector<double> bs = parse_grid(fl.b_grid, "--b-grid", errs);
  if (errs.ok())
    for (double b : bs)
      if (b < 0.0) errs.add("--b-grid: negative field strength");
  if (!errs.ok()) {
    std::cerr << "ehvac: " << errs.message() << "\n";
    return 1;
  }
  const double q = relation_quadratic_coefficient(sch);
  // Large fields grow linearly with slope sum_j c_j m_j^2 log m_j^2 / (8 pi^2).
  const double slope = (sch.c0 * sch.m0 * sch.m0 * std::log(sch.m0 * sch.m0) +
                        sch.c1 * sch.m1 * sch.m1 * std::log(sch.m1 * sch.m1) +
                        sch.c2 * sch.m2 * sch.m2 * std::log(sch.m2 * sch.m2)) /
                       (8.0 * M_PI * M_PI);
  const std::string fmt = fl.out_format.empty() ? "csv" : fl.out_format;
  if (fmt == "csv") {
    CsvTable t({"b", "f_pv", "weak_ratio", "strong_ratio"});
    for (double b : bs) {
      const double v = f_pv(sch, b);
      const double weak = q * b * b;
      const double strong = slope * b;
      t.add_row({b, v, weak == 0.0 ? 0.0 : v / weak, strong == 0.0 ? 0.0 : v / strong});
    }
    return emit(t.str(), fl.output_path);
  }
  EnergyReport rep;
  rep.command = "tabulate-fpv";
  rep.add_input("masses", fl.masses);
  rep.add_input("b_grid", fl.b_grid);
  for (double b : bs)
    rep.add_value("f_pv(" + format_double(b) + ")", f_pv(sch, b), "proper-time quadrature");
  return finish(rep, "json", fl.output_path);
}

int run_relation_check(const Flags& fl) {
  if (fl.self_test) return self_test_relation_check();
  ConfigErrors errs;
  const PvScheme sch = parse_scheme(fl.masses, errs);
  const double b = parse_double(fl.b, "--b", errs);
  const double tol = parse_double(fl.tol.empty() ? "1e-8" : fl.tol, "--tol", errs);
  if (errs.ok() && b < 0.0) errs.add("--b: must be nonnegative");
  if (errs.ok() && tol <= 0.0) errs.add("--tol: must be positive");
  if (!errs.ok()) {
    std::cerr << "ehvac: " << errs.message() << "\n";
    return 1;
  }
  const auto t0 = clock_type::now();
  const RelationBreakdown r = relation_residual(sch, b);
  EnergyReport rep;
  rep.command = "relation-check";
  rep.add_input("masses", fl.masses);
  rep.add_input("b", format_double(b));
  rep.add_value("f_pv", r.f_pv_value, "direct regulated quadrature");
  rep.add_value("eh_sum", r.eh_sum, "rescaled unregulated densities");
  rep.add_value("quadratic_term", r.quadratic_term, "closed form");
  rep.add_value("residual", r.residual, "difference of routes");
  const double rel = r.scale > 0.0 ? std::fabs(r.residual) / r.scale : 0.0;
  rep.add_check("relative_residual", rel, "difference of routes", tol, rel < tol);
  rep.runtime_s = elapsed_s(t0);
  return finish(rep, fl.out_format.empty() ? "json" : fl.out_format, fl.output_path);
}

int run_renorm_check(const Flags& fl) {
  if (fl.self_test) return self_test_renorm_check();
  ConfigErrors errs;
  const PvScheme sch = parse_scheme(fl.masses, errs);
  const double e = parse_double(fl.e, "--e", errs);
  const double b = parse_double(fl.b, "--b", errs);
  const double tol = parse_double(fl.tol.empty() ? "1e-8" : fl.tol, "--tol", errs);
  if (errs.ok() && e < 0.0) errs.add("--e: must be nonnegative");
  if (errs.ok() && b < 0.0) errs.add("--b: must be nonnegative");
  if (errs.ok() && tol <= 0.0) errs.add("--tol: must be positive");
  if (!errs.ok()) {
    std::cerr << "ehvac: " << errs.message() << "\n";
    return 1;
  }
  const auto t0 = clock_type::now();
  const RenormState st = renormalize(e, sch);
  const EnergyDifference d = energy_difference(st, b);
  EnergyReport rep;
  rep.command = "renorm-check";
  rep.add_input("masses", fl.masses);
  rep.add_input("e", format_double(e));
  rep.add_input("b", format_double(b));
  rep.add_value("z3", st.z3, "closed form");
  rep.add_value("e_ph", st.e_ph, "closed form");
  rep.add_value("b_ph", d.b_ph, "closed form");
  rep.add_value("difference", d.difference, "bracket quadratures");
  rep.add_value("exact_identity_value", d.exact_identity_value, "closed form");
  rep.add_value("suppression_bound", d.suppression_bound, "closed form");
  // The brackets are dominated by the field energy b_ph^2/(8 pi); judge the
  // two routes against that scale.
  const double scale = std::max(d.b_ph * d.b_ph / (8.0 * M_PI), 1e-300);
  const double rel = std::fabs(d.difference - d.exact_identity_value) / scale;
  rep.add_check("identity_agreement", rel, "bracket vs closed form", tol, rel < tol);
  rep.add_check("suppression", std::fabs(d.difference), "bracket quadratures",
                d.suppression_bound, std::fabs(d.difference) <= d.suppression_bound);
  rep.runtime_s = elapsed_s(t0);
  return finish(rep, fl.out_format.empty() ? "json" : fl.out_format, fl.output_path);
}

int run_landau_check(const Flags& fl) {
  if (fl.self_test) return self_test_landau_check();
  ConfigErrors errs;
  const double s = parse_double(fl.s, "--s", errs);
  const double b = parse_double(fl.b, "--b", errs);
  const long n_max = parse_int(fl.n_max, "--n-max", errs);
  const double tol = parse_double(fl.tol.empty() ? "1e-12" : fl.tol, "--tol", errs);
  if (errs.ok() && s <= 0.0) errs.add("--s: must be positive");
  if (errs.ok() && b < 0.0) errs.add("--b: must be nonnegative");
  if (errs.ok() && tol <= 0.0) errs.add("--tol: must be positive");
  if (!errs.ok()) {
    std::cerr << "ehvac: " << errs.message() << "\n";
    return 1;
  }
  const auto t0 = clock_type::now();
  const HeatRoutes hr = landau_heat_density(s, b, static_cast<int>(n_max));
  EnergyReport rep;
  rep.command = "landau-check";
  rep.add_input("s", format_double(s));
  rep.add_input("b", format_double(b));
  rep.add_value("sum_route", hr.sum_route, "degeneracy-weighted level sum");
  rep.add_value("closed_route", hr.closed_route, "closed form");
  rep.add_value("n_terms", static_cast<double>(hr.n_terms), "truncation bookkeeping");
  rep.add_value("tail_bound", hr.tail_bound, "truncation bookkeeping");
  const double denom = std::max(std::fabs(hr.closed_route), 1e-300);
  const double rel = b == 0.0 ? 0.0 : std::fabs(hr.sum_route - hr.closed_route) / denom;
  rep.add_check("route_agreement", rel, "level sum vs closed form", tol, rel < tol);
  rep.runtime_s = elapsed_s(t0);
  return finish(rep, fl.out_format.empty() ? "json" : fl.out_format, fl.output_path);
}

int run_kernel_check(const Flags& fl) {
  if (fl.self_test) return self_test_kernel_check();
  ConfigErrors errs;
  const double mu = parse_double(fl.mu, "--mu", errs);
  const double b = parse_double(fl.b, "--b", errs);
  const long samples = parse_int(fl.samples, "--samples", errs);
  const long seed = parse_int(fl.seed, "--seed", errs);
  if (errs.ok() && mu <= 0.0) errs.add("--mu: must be positive");
  if (errs.ok() && b < 0.0) errs.add("--b: must be nonnegative");
  if (errs.ok() && (samples < 1 || samples > 100000)) errs.add("--samples: must be in [1, 100000]");
  if (errs.ok() && seed < 0) errs.add("--seed: must be nonnegative");
  if (!errs.ok()) {
    std::cerr << "ehvac: " << errs.message() << "\n";
    return 1;
  }
  const auto t0 = clock_type::now();
  const auto pairs =
      kernel_bound_samples(static_cast<int>(samples), static_cast<unsigned long long>(seed));
  const KernelBoundReport kr = check_kernel_bounds(mu, b, pairs);
  EnergyReport rep;
  rep.command = "kernel-check";
  rep.add_input("mu", format_double(mu));
  rep.add_input("b", format_double(b));
  rep.add_input("samples", format_double(static_cast<double>(samples)));
  rep.add_input("seed", format_double(static_cast<double>(seed)));
  rep.add_value("worst_resolvent_value", kr.worst_resolvent.resolvent_value,
                "proper-time quadrature");
  rep.add_value("worst_resolvent_bound", kr.worst_resolvent.resolvent_bound, "closed form");
  rep.add_value("worst_gradient_value", kr.worst_gradient.gradient_value,
                "proper-time quadrature");
  rep.add_value("worst_gradient_bound", kr.worst_gradient.gradient_bound, "closed form");
  rep.add_check("min_resolvent_margin", kr.min_resolvent_margin, "bound minus value", 0.0,
                kr.min_resolvent_margin >= 0.0);
  rep.add_check("min_gradient_margin", kr.min_gradient_margin, "bound minus value", 0.0,
                kr.min_gradient_margin >= 0.0);
  rep.runtime_s = elapsed_s(t0);
  return finish(rep, fl.out_format.empty() ? "json" : fl.out_format, fl.output_path);
}

int run_heat_trace(const Flags& fl) {
  if (fl.self_test) return self_test_heat_trace();
  ConfigErrors errs;
  const double s = parse_double(fl.s, "--s", errs);
  const double b = parse_double(fl.b, "--b", errs);
  const double rho = parse_double(fl.rho, "--rho", errs);
  const double tol = parse_double(fl.tol.empty() ? "1e-8" : fl.tol, "--tol", errs);
  if (errs.ok() && s <= 0.0) errs.add("--s: must be positive");
  if (errs.ok() && b < 0.0) errs.add("--b: must be nonnegative");
  if (errs.ok() && rho <= 0.0) errs.add("--rho: must be positive");
  if (errs.ok() && tol <= 0.0) errs.add("--tol: must be positive");
  if (!errs.ok()) {
    std::cerr << "ehvac: " << errs.message() << "\n";
    return 1;
  }
  const auto t0 = clock_type::now();
  const double loc = localized_heat_trace(s, b, GaussianLocalizer{rho});
  // Diagonal spin trace per unit volume: sb coth(sb)/(4 pi^{3/2} s^{3/2}).
  const double closed =
      (coth_reduced(s * b) + 1.0) / (4.0 * std::pow(M_PI, 1.5) * std::pow(s, 1.5));
  EnergyReport rep;
  rep.command = "heat-trace";
  rep.add_input("s", format_double(s));
  rep.add_input("b", format_double(b));
  rep.add_input("rho", format_double(rho));
  rep.add_value("localized_trace", loc, "localizer quadrature");
  rep.add_value("closed_form", closed, "closed form");
  rep.add_value("free_subtracted_density", landau_heat_density(s, b).closed_route,
                "closed form");
  const double rel = std::fabs(loc - closed) / std::max(std::fabs(closed), 1e-300);
  rep.add_check("localization_independence", rel, "localizer quadrature vs closed form", tol,
                rel < tol);
  rep.runtime_s = elapsed_s(t0);
  return finish(rep, fl.out_format.empty() ? "json" : fl.out_format, fl.output_path);
}

int run_biot_savart(const Flags& fl) {
  if (fl.self_test) return self_test_biot_savart();
  ConfigErrors errs;
  const long n = parse_int(fl.n, "--n", errs);
  const double box = parse_double(fl.box, "--box", errs);
  const double sigma = parse_double(fl.sigma, "--sigma", errs);
  const double amplitude = parse_double(fl.amplitude, "--amplitude", errs);
  const double tol = parse_double(fl.tol.empty() ? "1e-8" : fl.tol, "--tol", errs);
  const std::string profile = fl.profile.empty() ? "gaussian" : fl.profile;
  if (errs.ok() && (n < 4 || n > 256)) errs.add("--n: must be in [4, 256]");
  if (errs.ok() && box <= 0.0) errs.add("--box: must be positive");
  if (errs.ok() && sigma <= 0.0) errs.add("--sigma: must be positive");
  if (errs.ok() && tol <= 0.0) errs.add("--tol: must be positive");
  if (errs.ok() && profile != "gaussian" && profile != "fourier")
    errs.add("--profile: must be gaussian or fourier");
  if (!errs.ok()) {
    std::cerr << "ehvac: " << errs.message() << "\n";
    return 1;
  }
  const auto t0 = clock_type::now();
  const AnalyticField f = profile == "gaussian"
                              ? gaussian_envelope_profile(box, sigma, amplitude)
                              : fourier_mode_profile(box, amplitude);
  const FieldGrid bg = sample_profile(f, static_cast<int>(n), box);
  FieldGrid a;
  try {
    a = biot_savart(bg);
  } catch (const std::exception& e) {
    std::cerr << "ehvac: " << e.what() << "\n";
    return 1;
  }
  const FieldGrid back = curl_spectral(a);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < bg.values.size(); ++i) {
    num = std::max({num, std::fabs(back.values[i].x - bg.values[i].x),
                    std::fabs(back.values[i].y - bg.values[i].y),
                    std::fabs(back.values[i].z - bg.values[i].z)});
    den = std::max({den, std::fabs(bg.values[i].x), std::fabs(bg.values[i].y),
                    std::fabs(bg.values[i].z)});
  }
  const double rel = den > 0.0 ? num / den : 0.0;
  EnergyReport rep;
  rep.command = "biot-savart";
  rep.add_input("profile", profile);
  rep.add_input("n", format_double(static_cast<double>(n)));
  rep.add_input("box", format_double(box));
  rep.add_value("max_field", den, "grid samples");
  rep.add_value("divergence_rel", divergence_rel_spectral(a), "spectral test");
  rep.add_check("curl_residual", rel, "curl of reconstructed potential vs field", tol, rel < tol);
  rep.runtime_s = elapsed_s(t0);
  return finish(rep, fl.out_format.empty() ? "json" : fl.out_format, fl.output_path);
}

int run_lda(const Flags& fl) {
  if (fl.self_test) return self_test_lda();
  ConfigErrors errs;
  const PvScheme sch = parse_scheme(fl.masses, errs);
  const double e = parse_double(fl.e, "--e", errs);
  const long n = parse_int(fl.n, "--n", errs);
  const double box = parse_double(fl.box, "--box", errs);
  const double sigma = parse_double(fl.sigma, "--sigma", errs);
  const double amplitude = parse_double(fl.amplitude, "--amplitude", errs);
  const double b0 = parse_double(fl.b0, "--b0", errs);
  const std::string profile = fl.profile.empty() ? "constant" : fl.profile;
  if (errs.ok() && e < 0.0) errs.add("--e: must be nonnegative");
  if (errs.ok() && (n < 2 || n > 256)) errs.add("--n: must be in [2, 256]");
  if (errs.ok() && box <= 0.0) errs.add("--box: must be positive");
  if (errs.ok() && fl.grid_file.empty() && profile != "constant" && profile != "gaussian" &&
      profile != "fourier")
    errs.add("--profile: must be constant, gaussian, or fourier");
  if (!errs.ok()) {
    std::cerr << "ehvac: " << errs.message() << "\n";
    return 1;
  }
  const auto t0 = clock_type::now();
  FieldGrid g;
  if (!fl.grid_file.empty()) {
    try {
      g = load_grid(fl.grid_file);
    } catch (const std::exception& e) {
      std::cerr << "ehvac: invalid configuration: --grid-file: " << e.what() << "\n";
      return 1;
    }
  } else {
    const AnalyticField f = profile == "constant" ? constant_profile(Vec3{0, 0, b0})
                            : profile == "gaussian"
                                ? gaussian_envelope_profile(box, sigma, amplitude)
                                : fourier_mode_profile(box, amplitude);
    g = sample_profile(f, static_cast<int>(n), box);
  }
  const double energy = lda_energy(g, e, sch);
  const double volume = std::pow(g.side(), 3);
  EnergyReport rep;
  rep.command = "lda";
  rep.add_input("masses", fl.masses);
  rep.add_input("e", format_double(e));
  rep.add_input("profile", fl.grid_file.empty() ? profile : "file:" + fl.grid_file);
  rep.add_input("n", format_double(static_cast<double>(g.n)));
  rep.add_value("lda_energy", energy, "nodewise f_pv sum");
  rep.add_value("volume", volume, "grid geometry");
  if (fl.grid_file.empty() && profile == "constant") {
    const double want = volume * f_pv(sch, e * std::fabs(b0));
    const double rel = std::fabs(energy - want) / std::max(std::fabs(want), 1e-300);
    rep.add_check("constant_field_identity", rel, "sum vs V f_pv(e |b|)", 1e-10, rel < 1e-10);
  }
  rep.runtime_s = elapsed_s(t0);
  return finish(rep, fl.out_format.empty() ? "json" : fl.out_format, fl.output_path);
}

int run_lattice_density(const Flags& fl) {
  if (fl.self_test) return self_test_lattice_density();
  ConfigErrors errs;
  const PvScheme sch = parse_scheme(fl.masses, errs);
  const long n = parse_int(fl.n, "--n", errs);
  const double a = parse_double(fl.a, "--a", errs);
  const long q = parse_int(fl.flux_quanta, "--flux-quanta", errs);
  const long dims = parse_int(fl.dims, "--dims", errs);
  if (errs.ok() && (n < 2 || n > 128)) errs.add("--n: must be in [2, 128]");
  if (errs.ok() && a <= 0.0) errs.add("--a: must be positive");
  if (errs.ok() && q < 0) errs.add("--flux-quanta: must be nonnegative");
  if (errs.ok() && dims != 2 && dims != 3) errs.add("--dims: must be 2 or 3");
  if (!errs.ok()) {
    std::cerr << "ehvac: " << errs.message() << "\n";
    return 1;
  }
  const LatticeSpec spec{static_cast<int>(n), a, static_cast<int>(q), static_cast<int>(dims)};
  const auto t0 = clock_type::now();
  SpectralEnergy se;
  double b = 0.0;
  try {
    b = constant_field_of(spec);
    se = pv_energy_density(spec, b, sch);
  } catch (const std::exception& e) {
    std::cerr << "ehvac: " << e.what() << "\n";
    return 1;
  }
  EnergyReport rep;
  rep.command = "lattice-density";
  rep.add_input("masses", fl.masses);
  rep.add_input("n", format_double(static_cast<double>(n)));
  rep.add_input("a", format_double(a));
  rep.add_input("flux_quanta", format_double(static_cast<double>(q)));
  rep.add_input("dims", format_double(static_cast<double>(dims)));
  rep.add_value("b", b, "flux quantization");
  rep.add_value("lattice_density", se.density, "dense spectral sum");
  const double cont = f_pv(sch, b);
  rep.add_value("continuum_density", cont, "proper-time quadrature");
  rep.add_value("ratio", cont != 0.0 ? se.density / cont : 0.0, "lattice vs continuum");
  rep.runtime_s = elapsed_s(t0);
  return finish(rep, fl.out_format.empty() ? "json" : fl.out_format, fl.output_path);
}

int run_sweep(const Flags& fl) {
  if (fl.self_test) return self_test_sweep();
  ConfigErrors errs;
  const PvScheme sch = parse_scheme(fl.masses, errs);
  const std::vector<double> eps = parse_double_list(fl.eps, "--eps", errs);
  const long n = parse_int(fl.n, "--n", errs);
  const double a = parse_double(fl.a, "--a", errs);
  const long q = parse_int(fl.flux_quanta, "--flux-quanta", errs);
  const long dims = parse_int(fl.dims, "--dims", errs);
  const std::string profile = fl.profile.empty() ? "cosine" : fl.profile;
  if (errs.ok() && (n < 2 || n > 128)) errs.add("--n: must be in [2, 128]");
  if (errs.ok() && a <= 0.0) errs.add("--a: must be positive");
  if (errs.ok() && q < 0) errs.add("--flux-quanta: must be nonnegative");
  if (errs.ok() && dims != 2 && dims != 3) errs.add("--dims: must be 2 or 3");
  if (!errs.ok()) {
    std::cerr << "ehvac: " << errs.message() << "\n";
    return 1;
  }
  const LatticeSpec spec{static_cast<int>(n), a, static_cast<int>(q), static_cast<int>(dims)};
  SweepReport rep;
  try {
    rep = semiclassical_sweep(profile, eps, spec, sch);
  } catch (const std::exception& e) {
    std::cerr << "ehvac: " << e.what() << "\n";
    return 1;
  }
  // The matched reference cancels the fixed-spacing discretization offset;
  // with at least two scales it must improve monotonically.
  const bool trend_ok = rep.rows.size() < 2 || rep.matched_monotone;
  const std::string fmt = fl.out_format.empty() ? "csv" : fl.out_format;
  int io = 0;
  if (fmt == "csv") {
    CsvTable t({"eps", "lattice_energy_density", "lda_value", "deviation", "runtime_s"});
    for (const SweepRow& r : rep.rows)
      t.add_row({r.eps, r.lattice_energy_density, r.lda_value, r.deviation, r.runtime_s});
    io = emit(t.str(), fl.output_path);
  } else {
    EnergyReport jr;
    jr.command = "sweep";
    jr.add_input("profile", rep.profile);
    jr.add_input("masses", fl.masses);
    jr.add_input("eps", fl.eps);
    jr.add_input("n", format_double(static_cast<double>(n)));
    jr.add_input("a", format_double(a));
    jr.add_input("flux_quanta", format_double(static_cast<double>(q)));
    jr.add_input("dims", format_double(static_cast<double>(dims)));
    if (!rep.warning.empty()) jr.add_input("warning", rep.warning);
    for (size_t i = 0; i < rep.rows.size(); ++i) {
      const SweepRow& r = rep.rows[i];
      const std::string tag = "[" + format_double(r.eps) + "]";
      jr.add_value("lattice_energy_density" + tag, r.lattice_energy_density,
                   "dense spectral sum");
      jr.add_value("lda_value" + tag, r.lda_value, "local-density integral");
      jr.add_value("deviation" + tag, r.deviation, "difference");
      jr.add_value("matched_lda" + tag, r.matched_lda, "equal-spacing reference");
      jr.add_value("matched_deviation" + tag, r.matched_deviation, "difference");
    }
    jr.add_value("fitted_rate", rep.fitted_rate, "log-log least squares");
    jr.add_value("matched_fitted_rate", rep.matched_fitted_rate, "log-log least squares");
    jr.add_value("resolution_ok", rep.resolution_ok ? 1.0 : 0.0, "resolution heuristic");
    jr.add_check("matched_monotone", rep.matched_monotone ? 1.0 : 0.0,
                 "deviation trend along descending eps", 0.0, trend_ok);
    io = emit(jr.to_json(), fl.output_path);
  }
  if (io != 0) return io;
  return trend_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vacuum-energy density toolkit: tabulation, identity checks, and lattice sweeps"};
  app.require_subcommand(1);
  Flags fl;

  auto add_common = [&fl](CLI::App* cmd) {
    cmd->add_option("--out", fl.out_format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output", fl.output_path, "write the report to this path");
    cmd->add_flag("--self-test", fl.self_test, "run built-in sanity checks and exit");
  };

  CLI::App* teh = app.add_subcommand("tabulate-eh", "tabulate the unregulated vacuum density");
  teh->add_option("--mass", fl.mass, "fermion mass");
  teh->add_option("--x-grid", fl.x_grid, "field grid start:stop:scale:count");
  add_common(teh);

  CLI::App* tfpv = app.add_subcommand("tabulate-fpv", "tabulate the regulated vacuum density");
  tfpv->add_option("--masses", fl.masses, "scheme masses m0,m1,m2");
  tfpv->add_option("--b-grid", fl.b_grid, "field grid start:stop:scale:count");
  add_common(tfpv);

  CLI::App* rel = app.add_subcommand("relation-check", "regulated vs rescaled-unregulated identity");
  rel->add_option("--masses", fl.masses, "scheme masses m0,m1,m2");
  rel->add_option("--b", fl.b, "field strength");
  rel->add_option("--tol", fl.tol, "relative tolerance (default 1e-8)");
  add_common(rel);

  CLI::App* ren = app.add_subcommand("renorm-check", "charge renormalization cancellation");
  ren->add_option("--masses", fl.masses, "scheme masses m0,m1,m2");
  ren->add_option("--e", fl.e, "bare charge");
  ren->add_option("--b", fl.b, "field strength");
  ren->add_option("--tol", fl.tol, "relative tolerance (default 1e-8)");
  add_common(ren);

  CLI::App* lan = app.add_subcommand("landau-check", "level sum vs closed-form heat density");
  lan->add_option("--s", fl.s, "proper time");
  lan->add_option("--b", fl.b, "field strength");
  lan->add_option("--n-max", fl.n_max, "level truncation (-1 = automatic)");
  lan->add_option("--tol", fl.tol, "relative tolerance (default 1e-12)");
  add_common(lan);

  CLI::App* ker = app.add_subcommand("kernel-check", "resolvent kernel decay bounds");
  ker->add_option("--mu", fl.mu, "mass parameter");
  ker->add_option("--b", fl.b, "field strength");
  ker->add_option("--samples", fl.samples, "number of random point pairs");
  ker->add_option("--seed", fl.seed, "sampling seed");
  add_common(ker);

  CLI::App* het = app.add_subcommand("heat-trace", "localized heat trace vs closed form");
  het->add_option("--s", fl.s, "proper time");
  het->add_option("--b", fl.b, "field strength");
  het->add_option("--rho", fl.rho, "localizer width");
  het->add_option("--tol", fl.tol, "relative tolerance (default 1e-8)");
  add_common(het);

  CLI::App* bio = app.add_subcommand("biot-savart", "divergence-free potential reconstruction");
  bio->add_option("--profile", fl.profile, "field profile: gaussian or fourier");
  bio->add_option("--n", fl.n, "grid nodes per dimension")->capture_default_str();
  bio->add_option("--box", fl.box, "torus side length");
  bio->add_option("--sigma", fl.sigma, "gaussian envelope width");
  bio->add_option("--amplitude", fl.amplitude, "profile amplitude");
  bio->add_option("--tol", fl.tol, "curl-residual tolerance (default 1e-8)");
  add_common(bio);

  CLI::App* lda = app.add_subcommand("lda", "local-density vacuum energy of a field grid");
  lda->add_option("--masses", fl.masses, "scheme masses m0,m1,m2");
  lda->add_option("--e", fl.e, "charge");
  lda->add_option("--profile", fl.profile, "field profile: constant, gaussian, or fourier");
  lda->add_option("--grid-file", fl.grid_file, "load the field grid from this path");
  lda->add_option("--n", fl.n, "grid nodes per dimension");
  lda->add_option("--box", fl.box, "torus side length");
  lda->add_option("--sigma", fl.sigma, "gaussian envelope width");
  lda->add_option("--amplitude", fl.amplitude, "profile amplitude");
  lda->add_option("--b0", fl.b0, "constant-profile field strength");
  add_common(lda);

  CLI::App* lat = app.add_subcommand("lattice-density", "dense-spectrum vacuum density on a torus");
  lat->add_option("--masses", fl.masses, "scheme masses m0,m1,m2");
  lat->add_option("--n", fl.n, "sites per dimension");
  lat->add_option("--a", fl.a, "lattice spacing");
  lat->add_option("--flux-quanta", fl.flux_quanta, "integer flux per plane");
  lat->add_option("--dims", fl.dims, "2 or 3");
  add_common(lat);

  CLI::App* swp = app.add_subcommand("sweep", "semiclassical scaling sweep");
  swp->add_option("--profile", fl.profile, "field profile: constant, cosine, stripes, gaussian");
  swp->add_option("--eps", fl.eps, "descending comma-separated scale list");
  swp->add_option("--masses", fl.masses, "scheme masses m0,m1,m2");
  swp->add_option("--n", fl.n, "sites per dimension at the finest scale");
  swp->add_option("--a", fl.a, "lattice spacing");
  swp->add_option("--flux-quanta", fl.flux_quanta, "integer flux through the period cell");
  swp->add_option("--dims", fl.dims, "2 or 3");
  add_common(swp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "ehvac: invalid configuration: " << e.what() << "\n";
    return 1;
  }

  try {
    if (teh->parsed()) return run_tabulate_eh(fl);
    if (tfpv->parsed()) return run_tabulate_fpv(fl);
    if (rel->parsed()) return run_relation_check(fl);
    if (ren->parsed()) return run_renorm_check(fl);
    if (lan->parsed()) return run_landau_check(fl);
    if (ker->parsed()) return run_kernel_check(fl);
    if (het->parsed()) return run_heat_trace(fl);
    if (bio->parsed()) return run_biot_savart(fl);
    if (lda->parsed()) return run_lda(fl);
    if (lat->parsed()) return run_lattice_density(fl);
    if (swp->parsed()) return run_sweep(fl);
  } catch (const std::exception& e) {
    std::cerr << "ehvac: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "ehvac: invalid configuration: no subcommand selected\n";
  return 1;
}
