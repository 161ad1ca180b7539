#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace cstate {

/// A gating check. Upper-bound checks pass when value <= tolerance, lower-bound
/// checks when value > tolerance. Non-finite values never pass.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool lower_bound = false;
  bool pass = false;
};

inline Check upper_check(std::string name, double value, double tol) {
  return {std::move(name), value, tol, false, std::isfinite(value) && value <= tol};
}

inline Check lower_check(std::string name, double value, double tol) {
  return {std::move(name), value, tol, true, std::isfinite(value) && value > tol};
}

/// Reported number that does not gate the run.
struct Diagnostic {
  std::string name;
  double value = 0.0;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct SuiteResult {
  std::string suite;
  std::string model;
  std::vector<Check> checks;
  std::vector<Diagnostic> diagnostics;
  std::vector<Table> tables;

  bool passed() const {
    for (const Check& c : checks)
      if (!c.pass) return false;
    return true;
  }

  const Check* find_check(const std::string& name) const {
    for (const Check& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  const Diagnostic* find_diagnostic(const std::string& name) const {
    for (const Diagnostic& d : diagnostics)
      if (d.name == name) return &d;
    return nullptr;
  }
};

}  // namespace cstate
