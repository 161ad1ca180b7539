#pragma once

// Structured (JSON) and flat (CSV) run reports.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "cstate/checks.hpp"
#include "cstate/error.hpp"

namespace cstate {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct Report {
  nlohmann::json config;
  std::vector<SuiteResult> suites;

  bool passed() const {
    for (const auto& s : suites)
      if (!s.passed()) return false;
    return true;
  }

  std::vector<std::string> failing_checks() const {
    std::vector<std::string> out;
    for (const auto& s : suites)
      for (const auto& c : s.checks)
        if (!c.pass) out.push_back(s.suite + "/" + c.name);
    return out;
  }
};

namespace detail {

inline nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

inline nlohmann::json to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json row = nlohmann::json::array();
    for (double v : r) row.push_back(detail::number(v));
    rows.push_back(row);
  }
  return {{"name", t.name}, {"columns", t.columns}, {"rows", rows}};
}

inline nlohmann::json to_json(const SuiteResult& s) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : s.checks)
    checks.push_back({{"name", c.name},
                      {"value", detail::number(c.value)},
                      {"tolerance", detail::number(c.tolerance)},
                      {"bound", c.lower_bound ? "lower" : "upper"},
                      {"pass", c.pass}});
  nlohmann::json diags = nlohmann::json::array();
  for (const auto& d : s.diagnostics) diags.push_back({{"name", d.name}, {"value", detail::number(d.value)}});
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : s.tables) tables.push_back(to_json(t));
  return {{"suite", s.suite}, {"model", s.model}, {"pass", s.passed()},
          {"checks", checks}, {"diagnostics", diags}, {"tables", tables}};
}

/// Everything except provenance; identical configs and seeds give identical bodies.
inline nlohmann::json report_body(const Report& r) {
  nlohmann::json suites = nlohmann::json::array();
  for (const auto& s : r.suites) suites.push_back(to_json(s));
  return {{"schema_version", kReportSchemaVersion},
          {"config", r.config},
          {"suites", suites},
          {"pass", r.passed()},
          {"failing_checks", r.failing_checks()}};
}

inline nlohmann::json report_json(const Report& r) {
  std::ostringstream compiler;
#if defined(__clang__)
  compiler << "clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
  compiler << "gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#else
  compiler << "unknown";
#endif
  const std::string eigen = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION);
  return {{"body", report_body(r)},
          {"provenance",
           {{"tool", "cstate-lab"},
            {"version", kToolVersion},
            {"eigen", eigen},
            {"compiler", compiler.str()},
            {"timestamp", detail::utc_timestamp()}}}};
}

/// One row per check and diagnostic: suite,model,kind,name,value,tolerance,pass.
inline std::string flat_table_csv(const Report& r) {
  std::ostringstream os;
  os << "suite,model,kind,name,value,tolerance,pass\n";
  for (const auto& s : r.suites) {
    for (const auto& c : s.checks)
      os << s.suite << ',' << '"' << s.model << '"' << ",check," << c.name << ',' << detail::csv_number(c.value)
         << ',' << detail::csv_number(c.tolerance) << ',' << (c.pass ? "true" : "false") << '\n';
    for (const auto& d : s.diagnostics)
      os << s.suite << ',' << '"' << s.model << '"' << ",diagnostic," << d.name << ',' << detail::csv_number(d.value)
         << ",,\n";
  }
  return os.str();
}

inline std::string table_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << detail::csv_number(row[c]);
    os << '\n';
  }
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::invalid_config, "cannot write " + path);
  out << text;
}

/// Writes <prefix>.json, <prefix>.csv and <prefix>.<table>.csv for each table.
inline std::vector<std::string> write_report(const Report& r, const std::string& prefix) {
  std::vector<std::string> written;
  write_text(prefix + ".json", report_json(r).dump(2) + "\n");
  written.push_back(prefix + ".json");
  write_text(prefix + ".csv", flat_table_csv(r));
  written.push_back(prefix + ".csv");
  for (const auto& s : r.suites)
    for (const auto& t : s.tables) {
      const std::string path = prefix + "." + s.suite + "." + t.name + ".csv";
      write_text(path, table_csv(t));
      written.push_back(path);
    }
  return written;
}

}  // namespace cstate
