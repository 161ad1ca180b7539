#pragma once

// Run configuration, validation and suite orchestration for cstate-lab.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "cstate/berezin.hpp"
#include "cstate/checks.hpp"
#include "cstate/coherent.hpp"
#include "cstate/disk.hpp"
#include "cstate/error.hpp"
#include "cstate/hilbert.hpp"
#include "cstate/pullback.hpp"
#include "cstate/repn.hpp"
#include "cstate/report.hpp"
#include "cstate/squeezed.hpp"

namespace cstate {

struct Tolerances {
  double coefficient = 1e-10;
  double quadrature = 1e-6;
  double likelihood = 1e-12;
  double kernel = 1e-9;
  double rank = 1e-8;
  double orthonormality = 1e-10;
  double chi2_law = 1e-8;
  double gram_closed_form = 1e-12;
  double hermitian = 1e-9;
  double implication = 1e-8;
  double lift = 1e-8;
  double commutation = 1e-10;
  double spectrum = 1e-8;
  double overlap = 1e-8;
  double unitarity = 1e-10;
  double ratio_lo = 0.3;
  double ratio_hi = 0.8;
};

/// Keys mirror the CLI flags.
struct RunConfig {
  std::string model = "cpn";  // cpn | disk | pullback
  int n = 1;
  int k = 2;
  double hbar = 0.5;
  int cutoff = 40;
  std::string embedding = "circle";  // circle | torus | path to a CSV file
  int radial_order = 64;
  int angular_order = 0;
  std::string suite = "coherent";  // coherent | squeezed | berezin | repn | all
  double zeta = 1.0;
  std::vector<int> k_list{8, 16, 32, 64};
  std::string pair = "xy";
  std::uint64_t seed = 20240611;
  std::string out = "cstate-report";
  std::size_t n_sections = 1000;
  std::size_t n_points = 100;
  double radius = 0.7;
  Tolerances tolerances;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::invalid_config, what);
}

template <class T>
T json_get(const nlohmann::json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      require(v.is_string(), "'" + key + "' must be a string");
    } else if constexpr (std::is_integral_v<T>) {
      require(v.is_number_integer(), "'" + key + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>) require(v.is_number_unsigned() || v.get<std::int64_t>() >= 0,
                                                   "'" + key + "' must be non-negative");
    } else {
      require(v.is_number(), "'" + key + "' must be a number");
    }
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::invalid_config, "'" + key + "' has the wrong type");
  }
}

/// 1/hbar must be an integer or half-integer >= 2 so the radial weight stays polynomial.
inline bool admissible_cli_hbar(double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) return false;
  const double twice = 2.0 / hbar;
  return std::abs(twice - std::round(twice)) < 1e-12 && std::round(twice) >= 4.0;
}

}  // namespace detail

inline Tolerances parse_tolerances(const nlohmann::json& j) {
  detail::require(j.is_object(), "'tolerances' must be an object");
  Tolerances t;
  const std::vector<std::pair<std::string, double*>> fields = {
      {"coefficient", &t.coefficient}, {"quadrature", &t.quadrature},   {"likelihood", &t.likelihood},
      {"kernel", &t.kernel},           {"rank", &t.rank},               {"orthonormality", &t.orthonormality},
      {"chi2-law", &t.chi2_law},       {"gram-closed-form", &t.gram_closed_form},
      {"hermitian", &t.hermitian},     {"implication", &t.implication}, {"lift", &t.lift},
      {"commutation", &t.commutation}, {"spectrum", &t.spectrum},       {"overlap", &t.overlap},
      {"unitarity", &t.unitarity},     {"ratio-lo", &t.ratio_lo},       {"ratio-hi", &t.ratio_hi}};
  for (const auto& [key, value] : j.items()) {
    auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
    detail::require(it != fields.end(), "unknown tolerance key '" + key + "'");
    const double v = detail::json_get<double>(value, "tolerances." + key);
    detail::require(std::isfinite(v) && v >= 0.0, "tolerance '" + key + "' must be finite and >= 0");
    *it->second = v;
  }
  detail::require(t.ratio_lo < t.ratio_hi, "ratio window must have ratio-lo < ratio-hi");
  return t;
}

inline nlohmann::json to_json(const Tolerances& t) {
  return {{"coefficient", t.coefficient}, {"quadrature", t.quadrature},   {"likelihood", t.likelihood},
          {"kernel", t.kernel},           {"rank", t.rank},               {"orthonormality", t.orthonormality},
          {"chi2-law", t.chi2_law},       {"gram-closed-form", t.gram_closed_form},
          {"hermitian", t.hermitian},     {"implication", t.implication}, {"lift", t.lift},
          {"commutation", t.commutation}, {"spectrum", t.spectrum},       {"overlap", t.overlap},
          {"unitarity", t.unitarity},     {"ratio-lo", t.ratio_lo},       {"ratio-hi", t.ratio_hi}};
}

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"model", c.model},
          {"n", c.n},
          {"k", c.k},
          {"hbar", c.hbar},
          {"cutoff", c.cutoff},
          {"embedding", c.embedding},
          {"radial-order", c.radial_order},
          {"angular-order", c.angular_order},
          {"suite", c.suite},
          {"zeta", c.zeta},
          {"k-list", c.k_list},
          {"pair", c.pair},
          {"seed", c.seed},
          {"out", c.out},
          {"n-sections", c.n_sections},
          {"n-points", c.n_points},
          {"radius", c.radius},
          {"tolerances", to_json(c.tolerances)}};
}

/// Semantic checks shared by the JSON and CLI paths.
inline void validate(const RunConfig& c) {
  using detail::require;
  static const std::set<std::string> models{"cpn", "disk", "pullback"};
  static const std::set<std::string> suites{"coherent", "squeezed", "berezin", "repn", "all"};
  static const std::set<std::string> pairs{"xy", "xx", "x2y"};
  require(models.count(c.model) > 0, "model must be cpn, disk or pullback");
  require(suites.count(c.suite) > 0, "suite must be coherent, squeezed, berezin, repn or all");
  require(pairs.count(c.pair) > 0, "pair must be xy, xx or x2y");
  require(c.k >= 0, "k must be >= 0");
  require(c.n >= 1, "n must be >= 1");
  if (c.model == "cpn") require(c.n <= 2, "cpn models are available for n = 1 and n = 2");
  if (c.model == "disk") {
    require(detail::admissible_cli_hbar(c.hbar), "hbar must make 1/hbar an integer or half-integer >= 2");
    require(c.cutoff >= 1, "cutoff must be >= 1");
    require(c.radius >= 0.0 && c.radius < 1.0, "radius must lie in [0, 1)");
  }
  if (c.model == "pullback") {
    if (c.embedding == "circle") require(c.n == 1, "the circle embedding lives in CP^1 (n = 1)");
    if (c.embedding == "torus") require(c.n >= 1, "the torus embedding needs n >= 1");
    require(!c.embedding.empty(), "embedding must be circle, torus or a file path");
  }
  if (c.suite == "repn") require(c.model == "cpn", "the repn suite needs a cpn model");
  require(c.radial_order >= 1, "radial-order must be >= 1");
  require(c.angular_order >= 0, "angular-order must be >= 0");
  require(std::isfinite(c.zeta), "zeta must be finite");
  require(!c.k_list.empty(), "k-list must not be empty");
  for (std::size_t i = 0; i < c.k_list.size(); ++i) {
    require(c.k_list[i] >= 1, "k-list entries must be >= 1");
    if (i > 0) require(c.k_list[i] > c.k_list[i - 1], "k-list must be strictly increasing");
  }
  require(c.n_sections >= 1, "n-sections must be >= 1");
  require(c.n_points >= 1, "n-points must be >= 1");
  require(!c.out.empty(), "out must not be empty");
}

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::json_get;
  detail::require(j.is_object(), "config must be a JSON object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "model") c.model = json_get<std::string>(v, key);
    else if (key == "n") c.n = json_get<int>(v, key);
    else if (key == "k") c.k = json_get<int>(v, key);
    else if (key == "hbar") c.hbar = json_get<double>(v, key);
    else if (key == "cutoff") c.cutoff = json_get<int>(v, key);
    else if (key == "embedding") c.embedding = json_get<std::string>(v, key);
    else if (key == "radial-order") c.radial_order = json_get<int>(v, key);
    else if (key == "angular-order") c.angular_order = json_get<int>(v, key);
    else if (key == "suite") c.suite = json_get<std::string>(v, key);
    else if (key == "zeta") c.zeta = json_get<double>(v, key);
    else if (key == "k-list") {
      detail::require(v.is_array(), "'k-list' must be an array");
      c.k_list.clear();
      for (const auto& e : v) c.k_list.push_back(json_get<int>(e, key));
    } else if (key == "pair") c.pair = json_get<std::string>(v, key);
    else if (key == "seed") c.seed = json_get<std::uint64_t>(v, key);
    else if (key == "out") c.out = json_get<std::string>(v, key);
    else if (key == "n-sections") c.n_sections = json_get<std::size_t>(v, key);
    else if (key == "n-points") c.n_points = json_get<std::size_t>(v, key);
    else if (key == "radius") c.radius = json_get<double>(v, key);
    else if (key == "tolerances") c.tolerances = parse_tolerances(v);
    else throw Error(ErrorCode::invalid_config, "unknown config key '" + key + "'");
  }
  validate(c);
  return c;
}

/// Applies CSTATE_SEED when set; a malformed value is a config error.
inline void apply_seed_override(RunConfig& c, const char* env) {
  if (env == nullptr || *env == '\0') return;
  const std::string s(env);
  detail::require(s.find_first_not_of("0123456789") == std::string::npos, "CSTATE_SEED must be a decimal integer");
  try {
    c.seed = std::stoull(s);
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_config, "CSTATE_SEED is out of range");
  }
}

struct BuiltModel {
  QuantModel model;
  std::optional<PullbackModel> pullback;
};

inline BuiltModel build_model(const RunConfig& c) {
  BuiltModel b;
  if (c.model == "cpn") {
    b.model = cpn_model(c.n, c.k, {c.radial_order, c.angular_order});
  } else if (c.model == "disk") {
    b.model = disk_model(c.hbar, c.cutoff);
  } else {
    Embedding emb;
    if (c.embedding == "circle") emb = circle_embedding(static_cast<std::size_t>(2 * c.k + 2));
    else if (c.embedding == "torus") emb = torus_embedding(c.n, static_cast<std::size_t>(2 * c.k + 2));
    else emb = load_user_embedding(c.embedding);
    if (emb.target_n != c.n)
      throw Error(ErrorCode::invalid_config, "embedding targets CP^" + std::to_string(emb.target_n) +
                                                 " but n = " + std::to_string(c.n));
    b.pullback = make_pullback_model(emb, c.k);
    b.model = b.pullback->model;
  }
  return b;
}

inline CoherentConfig coherent_config(const RunConfig& c) {
  CoherentConfig cc;
  cc.n_sections = c.n_sections;
  cc.n_points = c.n_points;
  cc.seed = c.seed;
  cc.coeff_tol = c.tolerances.coefficient;
  cc.likelihood_tol = c.tolerances.likelihood;
  cc.kernel_tol = c.tolerances.kernel;
  cc.quad_tol = c.tolerances.quadrature;
  cc.rank_tol = c.tolerances.rank;
  return cc;
}

namespace detail {

/// Gram of the n = 1 functions normalized with the point-dependent constant as
/// printed, sqrt(c_p(mu)) mu^p = (mu/|mu|)^p; reported next to the constant path.
inline double printed_normalization_deviation(const QuantModel& model) {
  const Eigen::Index m = model.level + 1;
  CMatrix G = CMatrix::Zero(m, m);
  for (std::size_t s = 0; s < model.rule.size(); ++s) {
    const ChartPoint& z = model.rule.nodes[s];
    const double r = std::abs(z(0));
    if (r == 0.0) continue;
    CVector f(m);
    for (Eigen::Index p = 0; p < m; ++p) f(p) = std::pow(z(0) / r, static_cast<double>(p));
    G += model.rule.weights[s] * model.weight(z) * f.conjugate() * f.transpose();
  }
  return (G - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
}

inline double closed_form_constant_deviation(const QuantModel& model) {
  const auto c = cp1_orthonormal_constants(model.level);
  double dev = 0.0;
  for (Eigen::Index i = 0; i < model.ortho.rows(); ++i)
    for (Eigen::Index j = 0; j < model.ortho.cols(); ++j) {
      const double expect = i == j ? c[static_cast<std::size_t>(i)] : 0.0;
      dev = std::max(dev, std::abs(std::abs(model.ortho(i, j)) - expect));
    }
  return dev;
}

}  // namespace detail

/// Always-run checks on the model itself.
inline SuiteResult verify_model(const RunConfig& c, const BuiltModel& b) {
  const QuantModel& model = b.model;
  const Tolerances& tol = c.tolerances;
  SuiteResult out;
  out.suite = "model";
  out.model = model.name;
  out.diagnostics.push_back({"dimension", static_cast<double>(model.dim())});
  out.checks.push_back(upper_check("orthonormality", orthonormality_deviation(model), tol.orthonormality));

  Rng rng(c.seed);
  const auto points = sample_points(model, c.n_points, rng);
  double min_chi2 = std::numeric_limits<double>::infinity();
  for (const auto& p : points) min_chi2 = std::min(min_chi2, chi_squared(model, p));
  out.checks.push_back(lower_check("basepoint-free", min_chi2, 0.0));

  if (c.model == "cpn") {
    // chi^2 is the constant dim H on CP^n with the normalized measure
    double dev = 0.0;
    for (const auto& p : points)
      dev = std::max(dev, std::abs(chi_squared(model, p) - static_cast<double>(model.dim())));
    out.checks.push_back(upper_check("chi2-constant", dev, tol.chi2_law));
    if (c.n == 1) {
      out.checks.push_back(
          upper_check("closed-form-constants", detail::closed_form_constant_deviation(model), tol.chi2_law));
      out.diagnostics.push_back({"printed-normalization-deviation", detail::printed_normalization_deviation(model)});
    }
  }

  if (c.model == "disk") {
    // truncated chi^2 misses exactly the tail of the closed-form series
    double worst = 0.0;
    for (const auto& p : points) {
      if (std::abs(p(0)) > c.radius) continue;
      const double closed = disk_chi_closed_form(p, c.hbar);
      const double bound = disk_tail_bound(p.squaredNorm(), c.hbar, c.cutoff) + 1e-12 * closed;
      worst = std::max(worst, std::abs(closed - chi_squared(model, p)) / bound);
    }
    out.checks.push_back(upper_check("chi2-within-tail-bound", worst, 1.0));

    // keep the squeezed probe point inside the disk
    const double stretch = std::sqrt(0.5 * (1.0 + c.zeta * c.zeta));
    const double radius = std::min(c.radius, 0.9 / std::max(stretch, 1e-300));
    std::vector<int> cutoffs;
    for (int q : {c.cutoff / 4, c.cutoff / 2, c.cutoff})
      if (q >= 1 && (cutoffs.empty() || q > cutoffs.back())) cutoffs.push_back(q);
    Table t = disk_convergence_report(c.hbar, c.zeta, radius, cutoffs);
    out.diagnostics.push_back({"convergence-radius", radius});
    out.checks.push_back(upper_check("convergence-monotone", increments_monotone(t) ? 0.0 : 1.0, 0.0));
    double tail_ok = 0.0;
    for (const auto& row : t.rows) tail_ok = std::max(tail_ok, row[4] / (row[5] + 1e-12));
    out.diagnostics.push_back({"chi2-increment-over-tail-bound", tail_ok});
    out.tables.push_back(std::move(t));
  }

  if (b.pullback) {
    const RankReport& r = b.pullback->rank;
    out.diagnostics.push_back({"raw-dimension", static_cast<double>(r.raw_dim)});
    out.diagnostics.push_back({"rank", static_cast<double>(r.rank)});
    out.diagnostics.push_back({"discarded-directions", static_cast<double>(r.discarded.size())});
    out.checks.push_back(lower_check("node-chi2-positive", r.min_chi2, 0.0));
    if (c.embedding == "circle" || c.embedding == "torus") {
      // raw Gram along the standard torus in CP^d is (1+d)^{-k} I
      const CMatrix G = gram_matrix(model);
      const double expect = std::pow(1.0 + c.n, -static_cast<double>(c.k));
      const double dev = (G - expect * CMatrix::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
      out.checks.push_back(upper_check("gram-closed-form", dev, tol.gram_closed_form));
    }
  }
  return out;
}

inline SuiteResult failed_suite(const std::string& suite, const std::string& model, const Error& e) {
  SuiteResult out;
  out.suite = suite;
  out.model = model;
  out.checks.push_back(upper_check(std::string("error:") + to_string(e.code()),
                                   std::numeric_limits<double>::quiet_NaN(), 0.0));
  out.diagnostics.push_back({"error-index", e.index() ? static_cast<double>(*e.index()) : -1.0});
  return out;
}

struct RunResult {
  Report report;
  int exit_code = 0;  // 0 all checks pass, 1 some check failed, 2 invalid config
  std::string message;
};

inline int exit_status(const Report& r) { return r.passed() ? 0 : 1; }

inline std::vector<std::string> selected_suites(const RunConfig& c) {
  if (c.suite != "all") return {c.suite};
  std::vector<std::string> s{"coherent", "squeezed", "berezin"};
  if (c.model == "cpn") s.push_back("repn");
  return s;
}

/// Executes the configured suites. Library errors inside a suite become a
/// failing check named after the error code.
inline Report run(const RunConfig& c) {
  validate(c);
  Report report;
  report.config = to_json(c);
  const std::string model_label = c.model;
  BuiltModel b;
  try {
    b = build_model(c);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::invalid_config) throw;
    report.suites.push_back(failed_suite("model", model_label, e));
    return report;
  }
  report.config["suites-run"] = selected_suites(c);

  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      report.suites.push_back(fn());
    } catch (const Error& e) {
      report.suites.push_back(failed_suite(name, b.model.name, e));
    }
  };
  guarded("model", [&] { return verify_model(c, b); });
  for (const std::string& s : selected_suites(c)) {
    if (s == "coherent") {
      guarded(s, [&] { return verify_coherent(b.model, coherent_config(c)); });
    } else if (s == "squeezed") {
      guarded(s, [&] {
        SqueezedConfig sc;
        sc.base = coherent_config(c);
        sc.hermitian_tol = c.tolerances.hermitian;
        sc.implication_tol = c.tolerances.implication;
        return verify_squeezed(b.model, c.zeta, sc);
      });
    } else if (s == "berezin") {
      guarded(s, [&] {
        BerezinConfig bc;
        bc.seed = c.seed;
        bc.k_list = c.k_list;
        bc.pair = c.pair;
        bc.coeff_tol = c.tolerances.coefficient;
        bc.lift_tol = c.tolerances.lift;
        bc.ratio_lo = c.tolerances.ratio_lo;
        bc.ratio_hi = c.tolerances.ratio_hi;
        return verify_berezin(bc);
      });
    } else if (s == "repn") {
      guarded(s, [&] {
        RepnConfig rc;
        rc.seed = c.seed;
        rc.commutation_tol = c.tolerances.commutation;
        rc.spectrum_tol = c.tolerances.spectrum;
        rc.overlap_tol = c.tolerances.overlap;
        rc.unitarity_tol = c.tolerances.unitarity;
        return verify_repn(b.model, rc);
      });
    }
  }
  return report;
}

/// Validation, execution and exit-status mapping without touching the filesystem.
inline RunResult run_checked(const nlohmann::json& config_json, const char* seed_env) {
  RunResult out;
  RunConfig c;
  try {
    c = parse_config(config_json);
    apply_seed_override(c, seed_env);
    out.report = run(c);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::invalid_config && e.code() != ErrorCode::unsupported_dimension) throw;
    out.exit_code = 2;
    out.message = std::string("invalid config: ") + e.what();
    return out;
  }
  out.exit_code = exit_status(out.report);
  if (out.exit_code != 0) {
    out.message = "failing checks:";
    for (const auto& f : out.report.failing_checks()) out.message += " " + f;
  }
  return out;
}

}  // namespace cstate
