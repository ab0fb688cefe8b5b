#include "doctest.h"
#include "support.hpp"
#include "teql/dataset.hpp"
#include "teql/schema.hpp"

using namespace teql;
using teql::testing::data_dir;
using teql::testing::make_schema;

namespace {

std::string one_table(const std::string& fks) {
  return R"([{"db_id":"concert","table_names":["singer"],"table_names_original":["singer"],
    "column_names":[[-1,"*"],[0,"id"],[0,"name"]],"column_names_original":[[-1,"*"],[0,"id"],[0,"name"]],
    "column_types":["text","number","text"],"primary_keys":[1],"foreign_keys":)" +
         fks + "}]";
}

}  // namespace

TEST_CASE("minimal one-table schema loads with the star column first") {
  const auto schemas = parse_schemas(one_table("[]"));
  REQUIRE(schemas.size() == 1);
  const Schema& s = schemas[0];
  CHECK(s.tables.size() == 1);
  CHECK(s.columns.size() == 3);
  CHECK(s.columns[0].table_index == -1);
  CHECK(s.columns[0].original_name == "*");
  CHECK(s.tables[0].column_indices == std::vector<int>{1, 2});
  CHECK(s.is_primary_key(1));
  CHECK(s.qualified_name(2) == "singer.name");
}

TEST_CASE("schema invariant violations are reported") {
  SUBCASE("foreign key on the star column") {
    CHECK_THROWS_WITH_AS(parse_schemas(one_table("[[0,1]]")), doctest::Contains("foreign key endpoint is star column"),
                         DataError);
  }
  SUBCASE("foreign key within one table") {
    CHECK_THROWS_AS(parse_schemas(one_table("[[1,2]]")), DataError);
  }
  SUBCASE("foreign key out of range") {
    CHECK_THROWS_WITH_AS(parse_schemas(one_table("[[1,9]]")), doctest::Contains("concert"), DataError);
  }
  SUBCASE("parse error carries an offset") {
    CHECK_THROWS_WITH_AS(parse_schemas("[{"), doctest::Contains("byte"), DataError);
  }
  SUBCASE("duplicate db_id") {
    const std::string one = one_table("[]");
    const std::string two = one.substr(0, one.size() - 1) + "," + one.substr(1);
    CHECK_THROWS_WITH_AS(parse_schemas(two), doctest::Contains("duplicate db_id"), DataError);
  }
  SUBCASE("duplicate table names differing in case") {
    CHECK_THROWS_AS(make_schema("d", {{"A", {{"x", "text"}}}, {"a", {{"y", "text"}}}}), DataError);
  }
}

TEST_CASE("fixture schemas round-trip byte-identically") {
  const auto text = read_file(data_dir() / "mini" / "tables.json");
  const auto schemas = parse_schemas(text);
  const auto once = serialize_schemas(schemas);
  CHECK(parse_schemas(once) == schemas);
  CHECK(serialize_schemas(parse_schemas(once)) == once);
  // Key order and indentation match the input file too.
  CHECK(once == text);
}

TEST_CASE("loading preserves positional indices") {
  const auto schemas = load_schemas(data_dir() / "mini" / "tables.json");
  const auto j = nlohmann::json::parse(read_file(data_dir() / "mini" / "tables.json"));
  for (std::size_t s = 0; s < schemas.size(); ++s) {
    const auto& cols = j[s]["column_names_original"];
    REQUIRE(cols.size() == schemas[s].columns.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
      CHECK(schemas[s].columns[i].original_name == cols[i][1].get<std::string>());
      CHECK(schemas[s].columns[i].table_index == cols[i][0].get<int>());
    }
    for (int pk : schemas[s].primary_keys) CHECK(pk > 0);
    for (auto [a, b] : schemas[s].foreign_keys) {
      CHECK(a > 0);
      CHECK(b > 0);
    }
  }
}

TEST_CASE("table order is part of the serialization") {
  auto a = make_schema("d", {{"a", {{"x", "text"}}}, {"b", {{"y", "text"}}}});
  auto b = make_schema("d", {{"b", {{"y", "text"}}}, {"a", {{"x", "text"}}}});
  CHECK(serialize_schema(a) != serialize_schema(b));
}

TEST_CASE("examples load, skip bad SQL, and reject bad references") {
  const auto schemas = parse_schemas(one_table("[]"));
  const auto ok = parse_examples(
      R"([{"question":"what is the age of all singers?","query":"SELECT name FROM singer","db_id":"concert"}])", schemas);
  REQUIRE(ok.examples.size() == 1);
  CHECK(ok.examples[0].example_id == "0");
  CHECK(ok.examples[0].gold_sql == "SELECT name FROM singer");

  const auto skipped = parse_examples(R"([
      {"question":"q1","query":"SELECT name FROM singer","db_id":"concert"},
      {"question":"q2","query":"SELECT age FROM singer","db_id":"concert"},
      {"question":"q3","query":"SELEC name","db_id":"concert"}])",
                                      schemas);
  CHECK(skipped.examples.size() == 1);
  REQUIRE(skipped.skipped.size() == 2);
  CHECK(skipped.skipped[0].example_id == "1");
  CHECK(serialize_skip_report(skipped.skipped).find("\"skipped_count\": 2") != std::string::npos);

  LoadOptions strict;
  strict.skip_invalid_sql = false;
  CHECK_THROWS_AS(parse_examples(R"([{"question":"q","query":"SELECT age FROM singer","db_id":"concert"}])", schemas,
                                 strict),
                  DataError);
  CHECK_THROWS_WITH_AS(parse_examples(R"([{"question":"  ","query":"SELECT name FROM singer","db_id":"concert"}])",
                                      schemas),
                       doctest::Contains("empty question"), DataError);
  CHECK_THROWS_WITH_AS(parse_examples(R"([{"question":"q","query":"SELECT name FROM singer","db_id":"nowhere"}])",
                                      schemas),
                       doctest::Contains("nowhere"), DataError);
}

TEST_CASE("examples round-trip through serialization") {
  const auto& mini = teql::testing::mini();
  const auto again = parse_examples(serialize_examples(mini.examples), mini.schemas);
  CHECK(again.skipped.empty());
  CHECK(again.examples == mini.examples);
}
