#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "arbor/runner.hpp"

using namespace arbor;
using nlohmann::json;

namespace {

#ifdef ARBOR_CLI_PATH
// Runs the actual binary, capturing stdout and the exit code.
std::pair<int, std::string> run_cli(const std::string& args) {
  const std::string path = std::string("/tmp/arbor_cli_out_") + std::to_string(::getpid());
  const std::string cmd = std::string(ARBOR_CLI_PATH) + " " + args + " > " + path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::remove(path.c_str());
  return {WEXITSTATUS(status), buffer.str()};
}
#endif

}  // namespace

TEST_CASE("odometer report shape and content") {
  RunConfig cfg;
  cfg.command = "odometer";
  cfg.orbit = PCOrbit{8, 7};
  cfg.max_level = 12;
  const RunResult result = run(cfg);
  CHECK(result.exit_code == 0);
  const json r = json::parse(result.output);
  CHECK(r["version"] == "0.1.0");
  CHECK(r["r"] == 8);
  CHECK(r["s"] == 7);
  CHECK(r["exists"] == true);
  CHECK(r["witness"] == json::array({1, 5, 2, 6}));
  CHECK(r["search_witness"] == json::array({1, 2, 5, 6}));
  CHECK(r["method"] == "criterion");
  CHECK(r["certified_level"] == 12);
  CHECK(r["config"]["seed"] == 0);
}

TEST_CASE("odometer report for a family without odometers") {
  RunConfig cfg;
  cfg.command = "odometer";
  cfg.orbit = PCOrbit{6, 3};
  const RunResult result = run(cfg);
  CHECK(result.exit_code == 0);
  const json r = json::parse(result.output);
  CHECK(r["exists"] == false);
  CHECK(r["witness"].is_null());
}

TEST_CASE("settled report lists cycles with split levels") {
  RunConfig cfg;
  cfg.command = "settled";
  cfg.orbit = PCOrbit{3, 2};
  cfg.word = "a1";
  cfg.level = 1;
  cfg.depth = 8;
  const RunResult result = run(cfg);
  const json r = json::parse(result.output);
  CHECK(r["cycles"].size() == 1);
  CHECK(r["cycles"][0]["length"] == 2);
  const std::string status = r["cycles"][0]["status"];
  CHECK(status.rfind("split-at-level-", 0) == 0);
  CHECK(r["proportion"]["value"] == 0.0);
  CHECK(r["probe_depth"] == 8);
}

TEST_CASE("group CSV carries the level-2 order 8 row") {
  RunConfig cfg;
  cfg.command = "group";
  cfg.orbit = PCOrbit{3, 2};
  cfg.max_level = 2;
  cfg.quotients = true;
  const RunResult result = run(cfg);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("n,group_order,i,closure_order,quotient_order,cyclic,checks_passed") !=
        std::string::npos);
  CHECK(result.output.find("2,8,,,,,true") != std::string::npos);
  CHECK(result.output.find("2,8,1,4,2,true,true") != std::string::npos);
  CHECK(result.output.find("\r\n") != std::string::npos);
}

TEST_CASE("frobenius single-base report and post-critical rejection") {
  RunConfig cfg;
  cfg.command = "frobenius";
  cfg.prime = 5;
  cfg.base = 2;
  cfg.tree_depth = 3;
  cfg.seed = 7;
  const RunResult ok = run(cfg);
  CHECK(ok.exit_code == 0);
  const json r = json::parse(ok.output);
  CHECK(r["levels"].size() == 4);
  CHECK(r["levels"][1]["cycle_type"] == json::array({2}));
  CHECK(r["errors"].empty());

  cfg.base = 0;  // lies on the orbit 1 -> inf -> 0
  const RunResult bad = run(cfg);
  CHECK(bad.exit_code == 1);
  const json rb = json::parse(bad.output);
  CHECK(rb["errors"].size() == 1);
  CHECK(rb["errors"][0]["type"] == "PostCriticalBase");
}

TEST_CASE("frobenius sweep covers exactly the valid bases") {
  RunConfig cfg;
  cfg.command = "frobenius";
  cfg.prime = 7;
  cfg.tree_depth = 4;
  cfg.seed = 3;
  const RunResult result = run(cfg);
  CHECK(result.exit_code == 0);
  const json r = json::parse(result.output);
  CHECK(r["sweeps"].size() == 5);  // 7 residues minus the post-critical {0, 1}
  CHECK(r["excluded_post_critical"] == json::array({0, 1}));
}

TEST_CASE("reports are byte-identical for identical config and seed") {
  RunConfig cfg;
  cfg.command = "verify-all";
  cfg.orbit = PCOrbit{4, 2};
  cfg.max_level = 4;
  cfg.samples = 40;
  cfg.seed = 777;
  const RunResult a = run(cfg);
  const RunResult b = run(cfg);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);

  // a different seed changes the sampled words but not the verdicts
  cfg.seed = 778;
  const RunResult c = run(cfg);
  CHECK(c.exit_code == 0);
  const json rc = json::parse(c.output);
  CHECK(rc["seed"] == 778);
}

TEST_CASE("verify-all names every check") {
  RunConfig cfg;
  cfg.command = "verify-all";
  cfg.orbit = PCOrbit{5, 3};  // odometer-free family, s != 2
  cfg.max_level = 4;
  cfg.samples = 30;
  const RunResult result = run(cfg);
  CHECK(result.exit_code == 0);
  const json r = json::parse(result.output);
  std::vector<std::string> names;
  for (const auto& c : r["checks"]) names.push_back(c["name"]);
  CHECK(names == std::vector<std::string>{"relation_identity", "sign_closed_form",
                                          "odometer_criterion_vs_search", "no_settled_audit",
                                          "quotient_bounds_and_cyclicity",
                                          "semidirect_splitting"});
  CHECK(r["all_passed"] == true);
}

TEST_CASE("unknown command is rejected") {
  RunConfig cfg;
  cfg.command = "nonsense";
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}

#ifdef ARBOR_CLI_PATH

TEST_CASE("binary: usage errors exit nonzero") {
  CHECK(run_cli("odometer --r 2 --s 2").first != 0);
  CHECK(run_cli("odometer --r 4 --s 5").first != 0);     // s > r
  CHECK(run_cli("frobenius --p 4 --a 1").first != 0);    // not an odd prime
  CHECK(run_cli("frobenius --p 9 --a 1").first != 0);
  CHECK(run_cli("settled --r 3 --s 2").first != 0);      // neither --word nor --samples
  CHECK(run_cli("frobenius --p 5 --map \"x^3\"").first != 0);  // degree 3
  CHECK(run_cli("frobenius --p 5 --map \"1/(x-1\"").first != 0);
  CHECK(run_cli("bogus").first != 0);
}

TEST_CASE("binary: odometer output matches the library output") {
  const auto [code, text] = run_cli("odometer --r 8 --s 7");
  CHECK(code == 0);
  RunConfig cfg;
  cfg.command = "odometer";
  cfg.orbit = PCOrbit{8, 7};
  cfg.max_level = 12;
  CHECK(text == run(cfg).output);
}

TEST_CASE("binary: config file values are applied and flags win") {
  const std::string conf = "/tmp/arbor_test_conf_" + std::to_string(::getpid()) + ".ini";
  {
    std::ofstream out(conf);
    out << "[odometer]\n" << "r = 8\n" << "s = 7\n";
  }
  const auto [code, text] = run_cli("odometer --config " + conf);
  CHECK(code == 0);
  CHECK(json::parse(text)["r"] == 8);

  const auto [code2, text2] = run_cli("odometer --config " + conf + " --r 4 --s 2");
  CHECK(code2 == 0);
  CHECK(json::parse(text2)["r"] == 4);
  std::remove(conf.c_str());
}

TEST_CASE("binary: ARBOR_MAX_LEVEL caps the probe depth") {
  const std::string path = std::string("/tmp/arbor_cli_env_") + std::to_string(::getpid());
  const std::string cmd = std::string("ARBOR_MAX_LEVEL=4 ") + ARBOR_CLI_PATH +
                          " settled --r 3 --s 2 --word a1 --level 1 --depth 8 > /dev/null 2> " +
                          path;
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::remove(path.c_str());
  CHECK(buffer.str().find("exceeds cap") != std::string::npos);
}

TEST_CASE("binary: --output writes the report to a file") {
  const std::string path = "/tmp/arbor_test_out_" + std::to_string(::getpid()) + ".json";
  const auto [code, text] = run_cli("odometer --r 4 --s 2 --output " + path);
  CHECK(code == 0);
  CHECK(text.empty());
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(json::parse(buffer.str())["exists"] == true);
  std::remove(path.c_str());
}

#endif  // ARBOR_CLI_PATH
