// cstate-lab: runs verification suites and writes JSON/CSV reports.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cstate/runner.hpp"

namespace {

template <class T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent-state verification runner"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Execute the configured suites");

  std::optional<std::string> config_path, model, embedding, suite, pair, out;
  std::optional<int> n, k, cutoff, radial, angular;
  std::optional<double> hbar, zeta, radius;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_sections, n_points;
  std::vector<int> k_list;
  std::vector<std::string> tol_overrides;

  run->add_option("--config", config_path, "JSON config file; flags override its keys");
  run->add_option("--model", model, "cpn | disk | pullback");
  run->add_option("--n", n, "chart dimension");
  run->add_option("--k", k, "bundle power");
  run->add_option("--hbar", hbar, "disk parameter; 1/hbar integer or half-integer >= 2");
  run->add_option("--cutoff", cutoff, "disk basis cutoff");
  run->add_option("--embedding", embedding, "circle | torus | path to an embedding CSV");
  run->add_option("--radial-order", radial, "radial Gauss order");
  run->add_option("--angular-order", angular, "angular nodes (0 selects 2k+2)");
  run->add_option("--suite", suite, "coherent | squeezed | berezin | repn | all");
  run->add_option("--zeta", zeta, "squeezing parameter");
  run->add_option("--k-list", k_list, "levels for the correspondence table")->delimiter(',');
  run->add_option("--pair", pair, "xy | xx | x2y");
  run->add_option("--seed", seed, "RNG seed (CSTATE_SEED overrides)");
  run->add_option("--out", out, "report path prefix");
  run->add_option("--n-sections", n_sections, "random unit sections");
  run->add_option("--n-points", n_points, "random sample points");
  run->add_option("--radius", radius, "disk radius for the tail-bound and convergence probes");
  run->add_option("--tol", tol_overrides, "tolerance override key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  nlohmann::json cfg = nlohmann::json::object();
  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) {
      std::cerr << "invalid config: cannot open " << *config_path << "\n";
      return 2;
    }
    try {
      cfg = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "invalid config: " << e.what() << "\n";
      return 2;
    }
    if (!cfg.is_object()) {
      std::cerr << "invalid config: top level must be an object\n";
      return 2;
    }
  }
  put(cfg, "model", model);
  put(cfg, "n", n);
  put(cfg, "k", k);
  put(cfg, "hbar", hbar);
  put(cfg, "cutoff", cutoff);
  put(cfg, "embedding", embedding);
  put(cfg, "radial-order", radial);
  put(cfg, "angular-order", angular);
  put(cfg, "suite", suite);
  put(cfg, "zeta", zeta);
  put(cfg, "pair", pair);
  put(cfg, "seed", seed);
  put(cfg, "out", out);
  put(cfg, "n-sections", n_sections);
  put(cfg, "n-points", n_points);
  put(cfg, "radius", radius);
  if (!k_list.empty()) cfg["k-list"] = k_list;
  for (const std::string& t : tol_overrides) {
    const auto eq = t.find('=');
    double v = 0.0;
    try {
      if (eq == std::string::npos) throw std::invalid_argument(t);
      std::size_t used = 0;
      v = std::stod(t.substr(eq + 1), &used);
      if (used != t.size() - eq - 1) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      std::cerr << "invalid config: --tol expects key=value, got '" << t << "'\n";
      return 2;
    }
    cfg["tolerances"][t.substr(0, eq)] = v;
  }

  cstate::RunResult result;
  try {
    result = cstate::run_checked(cfg, std::getenv("CSTATE_SEED"));
  } catch (const std::exception& e) {
    std::cerr << "run aborted: " << e.what() << "\n";
    return 1;
  }
  if (result.exit_code == 2) {
    std::cerr << result.message << "\n";
    return 2;
  }

  const std::string prefix = result.report.config.value("out", std::string("cstate-report"));
  try {
    for (const auto& path : cstate::write_report(result.report, prefix)) std::cout << "wrote " << path << "\n";
  } catch (const cstate::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  for (const auto& s : result.report.suites) {
    std::size_t passed = 0;
    for (const auto& c : s.checks) passed += c.pass ? 1 : 0;
    std::cout << (s.passed() ? "PASS " : "FAIL ") << s.suite << " [" << s.model << "] " << passed << "/"
              << s.checks.size() << " checks\n";
  }
  if (result.exit_code != 0) std::cerr << result.message << "\n";
  return result.exit_code;
}
