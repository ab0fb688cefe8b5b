#include "cli_runner.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "teql/generator.hpp"

using namespace teql;
using testing::quote;
using testing::run_cli;

namespace {

std::string mini_inputs() {
  const auto d = testing::data_dir() / "mini";
  return "--schemas " + quote((d / "tables.json").string()) + " --examples " + quote((d / "dev.json").string());
}

std::string mini_config() { return quote((testing::data_dir() / "mini" / "config.json").string()); }

}  // namespace

TEST_CASE("usage errors exit 1") {
  const auto dir = testing::tmp_dir("cli_usage");
  CHECK(run_cli("", dir).code == 1);
  CHECK(run_cli("generate --bogus", dir).code == 1);
  CHECK(run_cli("sample --strategy ss", dir).code == 1);
  CHECK(run_cli("--help", dir).code == 0);
}

TEST_CASE("version names the hardness rules and lexicon fingerprints") {
  const auto dir = testing::tmp_dir("cli_version");
  const auto r = run_cli("--version", dir);
  CHECK(r.code == 0);
  CHECK(r.out.find(sql::kHardnessRuleVersion) != std::string::npos);
  CHECK(r.out.find("lexicon") != std::string::npos);
}

TEST_CASE("data errors exit 2") {
  const auto dir = testing::tmp_dir("cli_data");
  write_file(dir / "bad.json", "[{");
  CHECK(run_cli("generate --schemas " + quote((dir / "bad.json").string()) + " --examples x --out " +
                    quote((dir / "s.jsonl").string()),
                dir)
            .code == 2);
  CHECK(run_cli("generate " + mini_inputs() + " --mrs XX --out " + quote((dir / "s.jsonl").string()), dir).code == 2);
  CHECK(run_cli("sql parse 'SELECT FROM'", dir).code == 2);
  CHECK(run_cli("report --input " + quote((dir / "missing.json").string()), dir).code == 2);
}

TEST_CASE("generate, validate and tamper") {
  const auto dir = testing::tmp_dir("cli_generate");
  const auto suite = (dir / "suite.jsonl").string();
  auto r = run_cli("generate --config " + mini_config() + " --out " + quote(suite), dir);
  REQUIRE(r.code == 0);
  CHECK(r.err.find("generated") != std::string::npos);
  r = run_cli("validate --config " + mini_config() + " --suite " + quote(suite), dir);
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("violation_count") == 0);

  TestSuite s = read_suite(suite);
  s.cases[0].gold_sql = "SELECT 1 FROM singer";
  write_suite(s, dir / "tampered.jsonl");
  r = run_cli("validate --config " + mini_config() + " --suite " + quote((dir / "tampered.jsonl").string()), dir);
  CHECK(r.code == 2);
}

TEST_CASE("command-line flags override the config file") {
  const auto dir = testing::tmp_dir("cli_precedence");
  const auto suite = (dir / "suite.jsonl").string();
  REQUIRE(run_cli("generate --config " + mini_config() + " --max-variants 2 --mrs OK,PR --out " + quote(suite), dir)
              .code == 0);
  const TestSuite s = read_suite(suite);
  CHECK(s.counts_by_mr.size() == 2);
  std::map<std::pair<std::string, Mr>, int> per;
  for (const auto& c : s.cases) CHECK(++per[{c.seed_id, c.mr}] <= 2);
}

TEST_CASE("a dead adapter exits 3") {
  const auto dir = testing::tmp_dir("cli_dead");
  const auto suite = (dir / "suite.jsonl").string();
  REQUIRE(run_cli("generate " + mini_inputs() + " --mrs PR --out " + quote(suite), dir).code == 0);
  const std::string adapter = "cmd:" + quote(TEQL_MOCK_MODEL) + " --exit";
  const auto r = run_cli("run " + mini_inputs() + " --suite " + quote(suite) + " --timeout 2 --adapter " + quote(adapter), dir);
  CHECK(r.code == 3);
  const auto overall = nlohmann::json::parse(r.out).at("overall");
  CHECK(overall.at("counted") == 0);
  CHECK(overall.at("failures").get<int>() > 0);
}

TEST_CASE("run, report and re-render") {
  const auto dir = testing::tmp_dir("cli_run");
  const auto suite = (dir / "suite.jsonl").string();
  REQUIRE(run_cli("generate " + mini_inputs() + " --mrs PI,PR --out " + quote(suite), dir).code == 0);
  const std::string adapter = "cmd:" + quote(TEQL_MOCK_MODEL);
  const auto report = (dir / "report.json").string();
  auto r = run_cli("run " + mini_inputs() + " --suite " + quote(suite) + " --max-failure-rate 1 --adapter " +
                       quote(adapter) + " --report " + quote(report),
                   dir);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(read_file(report));
  CHECK(j.at("by_mr").size() == 12);
  r = run_cli("report --input " + quote(report) + " --format md", dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("| PI ") != std::string::npos);
  r = run_cli("report --input " + quote(report) + " --format csv", dir);
  CHECK(r.out.find("kind,group") != std::string::npos);
}

TEST_CASE("sample, folds and sql utilities") {
  const auto dir = testing::tmp_dir("cli_misc");
  const auto suite = (dir / "suite.jsonl").string();
  REQUIRE(run_cli("generate " + mini_inputs() + " --max-variants 2 --out " + quote(suite), dir).code == 0);
  auto r = run_cli("sample " + mini_inputs() + " --strategy as --rates '{\"PR\": 1}' --n 40 --suite " + quote(suite) +
                       " --out " + quote((dir / "aug").string()),
                   dir);
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(dir / "aug" / "train.json"));
  CHECK(std::filesystem::exists(dir / "aug" / "tables.json"));
  CHECK(run_cli("sample --strategy as --n 4 --suite " + quote(suite) + " --out " + quote((dir / "x").string()), dir)
            .code == 2);

  r = run_cli("folds " + mini_inputs() + " --k 5 --emit-dir " + quote((dir / "folds").string()), dir);
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("fold_count") == 5);
  CHECK(std::filesystem::exists(dir / "folds" / "fold_4" / "dev.json"));

  r = run_cli("sql match 'SELECT a, b FROM t' 'select b, a from T'", dir);
  CHECK(r.out == "match\n");
  r = run_cli("sql match 'SELECT a FROM t WHERE x = 1' 'SELECT a FROM t WHERE x = 2' --compare-values", dir);
  CHECK(r.out.rfind("mismatch: ", 0) == 0);
  r = run_cli("sql parse 'SELECT count(*) FROM t'", dir);
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).is_object());
}

TEST_CASE("fluency stats from the command line") {
  const auto dir = testing::tmp_dir("cli_fluency");
  const auto suite = (dir / "suite.jsonl").string();
  REQUIRE(run_cli("generate " + mini_inputs() + " --out " + quote(suite), dir).code == 0);
  const auto dev = (testing::data_dir() / "mini" / "dev.json").string();
  auto r = run_cli("fluency stats --original " + quote(dev) + " --synthetic " + quote(suite), dir);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j.at("relative_delta").get<double>()) <= 0.15);
  r = run_cli("fluency stats --original " + quote(dev) + " --synthetic " + quote(suite) + " --lm " +
                  quote("cmd:" + quote(TEQL_MOCK_SCORER)),
              dir);
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("relative_delta") == 0.0);
}
