#pragma once

// Report plumbing shared by the CLI subcommands: value rows that carry their
// route tag, tolerance and pass flag; JSON emission with stable key order;
// deterministic CSV with shortest round-trip floats.

#include <string>
#include <utility>
#include <vector>

namespace ehvac {

// Shortest decimal form of v that round-trips to the same double.
std::string format_double(double v);

struct ReportValue {
  std::string name;
  double value = 0.0;
  std::string route;       // formula/oracle that produced the value
  double tolerance = 0.0;  // tolerance the check ran with (0 = informational)
  bool checked = false;    // true when pass/fail is meaningful
  bool pass = true;
};

struct EnergyReport {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // config echo, ordered
  std::vector<ReportValue> values;
  double runtime_s = 0.0;

  void add_input(const std::string& key, const std::string& val);
  void add_value(const std::string& name, double value, const std::string& route);
  void add_check(const std::string& name, double value, const std::string& route,
                 double tolerance, bool pass);
  bool all_passed() const;
  std::string to_json() const;  // stable key order, insertion-ordered inputs
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  explicit CsvTable(std::vector<std::string> columns) : header(std::move(columns)) {}
  void add_row(const std::vector<double>& values);
  void add_text_row(const std::vector<std::string>& cells);
  std::string str() const;
};

}  // namespace ehvac
