#include "ehvac/report.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ehvac {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

void EnergyReport::add_input(const std::string& key, const std::string& val) {
  inputs.emplace_back(key, val);
}

void EnergyReport::add_value(const std::string& name, double value, const std::string& route) {
  ReportValue v;
  v.name = name;
  v.value = value;
  v.route = route;
  values.push_back(std::move(v));
}

void EnergyReport::add_check(const std::string& name, double value, const std::string& route,
                             double tolerance, bool pass) {
  ReportValue v;
  v.name = name;
  v.value = value;
  v.route = route;
  v.tolerance = tolerance;
  v.checked = true;
  v.pass = pass;
  values.push_back(std::move(v));
}

bool EnergyReport::all_passed() const {
  for (const ReportValue& v : values)
    if (v.checked && !v.pass) return false;
  return true;
}

std::string EnergyReport::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  nlohmann::ordered_json in = nlohmann::ordered_json::object();
  for (const auto& [k, v] : inputs) in[k] = v;
  j["inputs"] = in;
  nlohmann::ordered_json vals = nlohmann::ordered_json::array();
  for (const ReportValue& v : values) {
    nlohmann::ordered_json row;
    row["name"] = v.name;
    row["value"] = v.value;
    row["route"] = v.route;
    if (v.checked) {
      row["tolerance"] = v.tolerance;
      row["pass"] = v.pass;
    }
    vals.push_back(row);
  }
  j["values"] = vals;
  j["all_passed"] = all_passed();
  j["runtime_s"] = runtime_s;
  return j.dump(2) + "\n";
}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != header.size())
    throw std::domain_error("CsvTable: row width does not match the header");
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  rows.push_back(std::move(cells));
}

void CsvTable::add_text_row(const std::vector<std::string>& cells) {
  if (cells.size() != header.size())
    throw std::domain_error("CsvTable: row width does not match the header");
  rows.push_back(cells);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace ehvac
