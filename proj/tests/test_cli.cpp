#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "cstate/runner.hpp"

using namespace cstate;
using nlohmann::json;

namespace {

RunResult run_json(const json& j, const char* env = nullptr) { return run_checked(j, env); }

const SuiteResult* suite(const Report& r, const std::string& name) {
  for (const auto& s : r.suites)
    if (s.suite == name) return &s;
  return nullptr;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cstate-cli-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

int lab(const std::string& args) {
  const std::string cmd = std::string(CSTATE_LAB_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST(Config, DefaultsValidate) {
  const RunConfig c = parse_config(json::object());
  EXPECT_EQ(c.model, "cpn");
  EXPECT_EQ(c.k, 2);
  EXPECT_EQ(c.k_list, (std::vector<int>{8, 16, 32, 64}));
}

TEST(Config, RejectsUnknownAndMalformedKeys) {
  const std::vector<json> bad{
      {{"modle", "cpn"}},
      {{"model", "sphere"}},
      {{"k", "two"}},
      {{"k", -1}},
      {{"n", 3}},
      {{"model", "disk"}, {"hbar", 0.3}},
      {{"model", "disk"}, {"hbar", 1.0}},
      {{"suite", "repn"}, {"model", "disk"}},
      {{"k-list", {8, 8}}},
      {{"pair", "yz"}},
      {{"tolerances", {{"quadrature", -1.0}}}},
      {{"tolerances", {{"bogus", 1.0}}}},
      {{"seed", -4}},
      {{"model", "pullback"}, {"embedding", "circle"}, {"n", 2}},
  };
  for (const auto& j : bad) {
    const RunResult r = run_json(j);
    EXPECT_EQ(r.exit_code, 2) << j.dump();
    EXPECT_NE(r.message.find("invalid config"), std::string::npos);
  }
}

TEST(Config, AdmissibleDiskHbar) {
  EXPECT_NO_THROW(parse_config({{"model", "disk"}, {"hbar", 0.5}}));
  EXPECT_NO_THROW(parse_config({{"model", "disk"}, {"hbar", 0.4}}));
  EXPECT_THROW(parse_config({{"model", "disk"}, {"hbar", 0.45}}), Error);
}

TEST(Config, SeedEnvironmentOverride) {
  RunConfig c;
  apply_seed_override(c, "77");
  EXPECT_EQ(c.seed, 77u);
  apply_seed_override(c, nullptr);
  EXPECT_EQ(c.seed, 77u);
  EXPECT_THROW(apply_seed_override(c, "12abc"), Error);
  const RunResult r = run_json({{"n-sections", 10}, {"n-points", 5}}, "1234");
  EXPECT_EQ(r.report.config["seed"], 1234u);
}

TEST(Config, EchoRoundTrips) {
  const RunConfig c = parse_config({{"model", "disk"}, {"hbar", 0.5}, {"cutoff", 12}, {"zeta", 0.5}});
  json echo = to_json(c);
  const RunConfig d = parse_config(echo);
  EXPECT_EQ(to_json(d), echo);
}

TEST(Run, CoherentOnCp1PassesTheoremChecks) {
  const RunResult r = run_json({{"model", "cpn"}, {"n", 1}, {"k", 2}, {"suite", "coherent"}});
  EXPECT_EQ(r.exit_code, 0) << r.message;
  const SuiteResult* s = suite(r.report, "coherent");
  ASSERT_NE(s, nullptr);
  for (const char* name : {"maximal-likelihood", "dominance", "reproducing-kernel", "resolution-of-identity",
                           "overcompleteness"})
    ASSERT_NE(s->find_check(name), nullptr) << name;
  EXPECT_TRUE(s->passed());
  const SuiteResult* model = suite(r.report, "model");
  ASSERT_NE(model, nullptr);
  EXPECT_NE(model->find_check("closed-form-constants"), nullptr);
  EXPECT_NE(model->find_diagnostic("printed-normalization-deviation"), nullptr);
}

TEST(Run, SqueezedAtZetaOneEqualsCoherent) {
  const RunResult c = run_json({{"suite", "coherent"}});
  const RunResult s = run_json({{"suite", "squeezed"}, {"zeta", 1.0}});
  EXPECT_EQ(s.exit_code, 0) << s.message;
  const SuiteResult* cs = suite(c.report, "coherent");
  const SuiteResult* ss = suite(s.report, "squeezed");
  ASSERT_NE(cs, nullptr);
  ASSERT_NE(ss, nullptr);
  EXPECT_EQ(ss->find_check("zeta-one-exact")->value, 0.0);
  for (const auto& ch : cs->checks) {
    if (const Check* m = ss->find_check(ch.name)) {
      EXPECT_EQ(m->value, ch.value) << ch.name;
    }
  }
}

TEST(Run, BerezinSpinPairFailsRatioWindowAndNamesIt) {
  const RunResult r = run_json({{"suite", "berezin"}, {"k-list", {8, 16, 32, 64}}});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.message.find("berezin/correspondence-ratio-window"), std::string::npos);
  const SuiteResult* s = suite(r.report, "berezin");
  ASSERT_NE(s, nullptr);
  ASSERT_EQ(s->tables.size(), 1u);
  EXPECT_TRUE(s->find_check("correspondence-star-decreasing")->pass);
}

TEST(Run, BerezinQuadraticPairPasses) {
  const RunResult r = run_json({{"suite", "berezin"}, {"pair", "x2y"}});
  EXPECT_EQ(r.exit_code, 0) << r.message;
}

TEST(Run, DiskAndPullbackModels) {
  const RunResult d = run_json({{"model", "disk"}, {"hbar", 0.5}, {"cutoff", 20}, {"suite", "squeezed"}, {"zeta", 0.5}});
  EXPECT_EQ(d.exit_code, 0) << d.message;
  const SuiteResult* m = suite(d.report, "model");
  ASSERT_NE(m, nullptr);
  EXPECT_NE(m->find_check("chi2-within-tail-bound"), nullptr);
  EXPECT_EQ(m->tables.size(), 1u);
  const RunResult t = run_json({{"model", "pullback"}, {"embedding", "torus"}, {"n", 2}, {"k", 1}});
  EXPECT_EQ(t.exit_code, 0) << t.message;
  EXPECT_TRUE(suite(t.report, "model")->find_check("gram-closed-form")->pass);
}

TEST(Run, UserEmbeddingFile) {
  const RunResult r = run_json({{"model", "pullback"}, {"embedding", std::string(CSTATE_SOURCE_DIR) + "/configs/circle8.csv"},
                                {"n", 1}, {"k", 2}});
  EXPECT_EQ(r.exit_code, 0) << r.message;
  const RunResult missing = run_json({{"model", "pullback"}, {"embedding", "/nonexistent.csv"}});
  EXPECT_EQ(missing.exit_code, 2);
}

TEST(Run, AllSuitesOnCp2FailOnlyTheSpinPairCommutatorColumn) {
  const RunResult r = run_json({{"n", 2}, {"k", 1}, {"suite", "all"}, {"n-sections", 200}});
  for (const auto& f : r.report.failing_checks())
    EXPECT_TRUE(f == "berezin/correspondence-ratio-window" || f == "berezin/correspondence-commutator-decreasing") << f;
  EXPECT_NE(suite(r.report, "repn"), nullptr);
}

TEST(Report, BodyIsDeterministicAndConjunctive) {
  const json cfg = {{"suite", "all"}, {"n-sections", 100}, {"n-points", 20}};
  const RunResult a = run_json(cfg), b = run_json(cfg);
  EXPECT_EQ(report_body(a.report).dump(), report_body(b.report).dump());
  EXPECT_EQ(flat_table_csv(a.report), flat_table_csv(b.report));
  bool all = true;
  for (const auto& s : a.report.suites)
    for (const auto& c : s.checks) all = all && c.pass;
  EXPECT_EQ(a.report.passed(), all);
  EXPECT_EQ(a.exit_code, all ? 0 : 1);
}

TEST(Report, JsonLayout) {
  const RunResult r = run_json({{"suite", "coherent"}, {"n-sections", 20}});
  const json j = report_json(r.report);
  EXPECT_EQ(j["body"]["schema_version"], kReportSchemaVersion);
  EXPECT_TRUE(j["body"]["pass"].get<bool>());
  EXPECT_TRUE(j["provenance"].contains("timestamp"));
  EXPECT_TRUE(j["provenance"].contains("eigen"));
  for (const auto& s : j["body"]["suites"])
    for (const auto& c : s["checks"])
      for (const char* key : {"name", "value", "tolerance", "pass"}) EXPECT_TRUE(c.contains(key));
}

TEST(Binary, ExitCodesAndFiles) {
  const auto prefix = scratch("coherent");
  EXPECT_EQ(lab("run --model cpn --n 1 --k 2 --suite coherent --out " + prefix.string()), 0);
  const json j = read_json(prefix.string() + ".json");
  EXPECT_TRUE(j["body"]["pass"].get<bool>());
  EXPECT_TRUE(std::filesystem::exists(prefix.string() + ".csv"));

  EXPECT_EQ(lab("run --model sphere"), 2);
  EXPECT_EQ(lab("run --bogus-flag 1"), 2);
  EXPECT_EQ(lab("run --tol quadrature"), 2);

  const auto cfg = scratch("bad.json");
  std::ofstream(cfg) << R"({"model": "cpn", "unknown": 1})";
  EXPECT_EQ(lab("run --config " + cfg.string()), 2);

  const auto bz = scratch("berezin");
  EXPECT_EQ(lab("run --suite berezin --k-list 8,16,32,64 --out " + bz.string()), 1);
  EXPECT_TRUE(std::filesystem::exists(bz.string() + ".berezin.correspondence-xy.csv"));
}

TEST(Binary, ConfigFileAndSeedEnvironment) {
  const auto cfg = scratch("good.json");
  const auto out = scratch("seeded");
  std::ofstream(cfg) << R"({"model": "cpn", "k": 1, "n-sections": 10, "n-points": 5, "out": ")" << out.string()
                     << R"("})";
  const std::string cmd = "CSTATE_SEED=99 " + std::string(CSTATE_LAB_PATH) + " run --config " + cfg.string() +
                          " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(read_json(out.string() + ".json")["body"]["config"]["seed"], 99u);
}
