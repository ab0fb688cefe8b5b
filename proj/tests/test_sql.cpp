#include "doctest.h"
#include "support.hpp"
#include "teql/sql.hpp"

using namespace teql;
using namespace teql::sql;

namespace {

ColUnit col(std::string qualifier, std::string column, Agg agg = Agg::None) {
  ColUnit c;
  c.agg = agg;
  c.col = ColumnRef{std::move(qualifier), std::move(column)};
  return c;
}

Schema concert() {
  return testing::make_schema(
      "concert",
      {{"singer", {{"singer_id", "number"}, {"name", "text"}, {"age", "number"}, {"country", "text"}}},
       {"concert", {{"concert_id", "number"}, {"name", "text"}, {"singer_id", "number"}}}},
      {"singer.singer_id", "concert.concert_id"}, {{"concert.singer_id", "singer.singer_id"}});
}

}  // namespace

TEST_CASE("parse simple aggregate") {
  const Query q = parse_sql("SELECT max(age) FROM singer");
  REQUIRE(q.select.items.size() == 1);
  CHECK(q.select.items[0] == col("", "age", Agg::Max));
  REQUIRE(q.from.tables.size() == 1);
  CHECK(q.from.tables[0].name == "singer");
}

TEST_CASE("parse join condition") {
  const Query q = parse_sql("SELECT name FROM car JOIN vendor ON car.vendor_id = vendor.vendor_id");
  REQUIRE(q.from.joins.size() == 1);
  CHECK(q.from.joins[0].left == ColumnRef{"car", "vendor_id"});
  CHECK(q.from.joins[0].right == ColumnRef{"vendor", "vendor_id"});
}

TEST_CASE("parse nested IN subquery matches a hand-written AST") {
  Query inner;
  inner.select.items.push_back(col("", "b"));
  inner.from.tables.push_back(TableRef{"s", "", {}});
  Query expected;
  expected.select.items.push_back(col("", "a"));
  expected.from.tables.push_back(TableRef{"t", "", {}});
  Predicate p;
  p.lhs = col("", "b");
  p.op = CmpOp::In;
  p.rhs = Box<Query>(inner);
  Condition c;
  c.atom = Box<Predicate>(p);
  expected.where = c;
  CHECK(parse_sql("SELECT a FROM t WHERE b IN (SELECT b FROM s)") == expected);
}

TEST_CASE("keywords are case-insensitive") {
  CHECK(parse_sql("select DISTINCT name from singer where age >= 3 order by age desc limit 2") ==
        parse_sql("SELECT distinct name FROM singer WHERE age >= 3 ORDER BY age DESC LIMIT 2"));
}

TEST_CASE("syntax errors carry offset and expectation") {
  try {
    parse_sql("SELECT name FROM");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 16);
    CHECK(std::string(e.what()).find("expected") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_sql(""), ParseError);
  CHECK_THROWS_AS(parse_sql("SELECT a FROM t LIMIT -1"), ParseError);
  CHECK_THROWS_AS(parse_sql("SELECT a FROM t WHERE"), ParseError);
  CHECK_THROWS_AS(parse_sql("SELECT a FROM t extra tokens"), ParseError);
}

TEST_CASE("printer output parses back to the same AST") {
  const char* queries[] = {
      "SELECT count(*) FROM singer",
      "SELECT T1.name, T2.name FROM singer AS T1 JOIN concert AS T2 ON T1.singer_id = T2.singer_id WHERE T1.age > 3",
      "SELECT name FROM singer WHERE age BETWEEN 1 AND 5 OR country LIKE '%an%' AND name != 'x'",
      "SELECT country, avg(age) FROM singer GROUP BY country HAVING count(*) > 2 ORDER BY avg(age) DESC LIMIT 3",
      "SELECT name FROM singer EXCEPT SELECT name FROM concert",
      "SELECT name FROM singer WHERE singer_id NOT IN (SELECT singer_id FROM concert)",
      "SELECT count(DISTINCT country) FROM singer",
      "SELECT name FROM (SELECT name FROM singer) AS sub",
      "SELECT name FROM singer WHERE name = 'it''s'",
  };
  for (const char* text : queries) {
    CAPTURE(text);
    const Query q = parse_sql(text);
    CHECK(parse_sql(to_sql(q)) == q);
  }
}

TEST_CASE("binding computes usage sets") {
  const Schema s = concert();
  SUBCASE("plain column") {
    const auto u = bind_and_usage(parse_sql("SELECT age FROM singer"), s);
    CHECK(u.used_tables == std::set<int>{0});
    CHECK(u.used_columns == std::set<int>{*s.find_column(0, "age")});
  }
  SUBCASE("alias resolution") {
    const auto u = bind_and_usage(parse_sql("SELECT t1.age FROM singer AS t1"), s);
    CHECK(u.used_columns == std::set<int>{*s.find_column(0, "age")});
  }
  SUBCASE("star is a flag, not a column") {
    const auto u = bind_and_usage(parse_sql("SELECT * FROM singer"), s);
    CHECK(u.used_tables == std::set<int>{0});
    CHECK(u.used_columns.empty());
    CHECK(u.star_tables == std::set<int>{0});
    CHECK(u.protects_column(s, *s.find_column(0, "country")));
    CHECK_FALSE(u.protects_column(s, *s.find_column(1, "name")));
  }
  SUBCASE("count(*) protects nothing beyond the table") {
    const auto u = bind_and_usage(parse_sql("SELECT count(*) FROM singer"), s);
    CHECK(u.used_columns.empty());
    CHECK(u.star_tables.empty());
  }
  SUBCASE("join records the foreign key pair") {
    const auto u = bind_and_usage(
        parse_sql("SELECT T1.name FROM concert AS T1 JOIN singer AS T2 ON T2.singer_id = T1.singer_id"), s);
    CHECK(u.used_fk_pairs.size() == 1);
    CHECK(u.used_tables == std::set<int>{0, 1});
  }
  SUBCASE("nested subqueries contribute") {
    const auto u = bind_and_usage(
        parse_sql("SELECT name FROM singer WHERE singer_id IN (SELECT singer_id FROM concert WHERE concert_id > 1)"),
        s);
    CHECK(u.used_tables == std::set<int>{0, 1});
    CHECK(u.used_columns.count(*s.find_column(1, "concert_id")));
  }
  SUBCASE("unknown names identify the token") {
    try {
      bind_and_usage(parse_sql("SELECT height FROM singer"), s);
      FAIL("expected BindError");
    } catch (const BindError& e) {
      CHECK(e.token() == "height");
    }
    CHECK_THROWS_AS(bind_and_usage(parse_sql("SELECT name FROM nowhere"), s), BindError);
  }
  SUBCASE("ambiguous unqualified column") {
    CHECK_THROWS_AS(
        bind_and_usage(parse_sql("SELECT name FROM singer JOIN concert ON singer.singer_id = concert.singer_id"), s),
        BindError);
  }
  SUBCASE("named usage survives index changes") {
    const Schema other = testing::make_schema(
        "concert",
        {{"concert", {{"singer_id", "number"}, {"name", "text"}, {"concert_id", "number"}}},
         {"singer", {{"country", "text"}, {"age", "number"}, {"name", "text"}, {"singer_id", "number"}}}});
    const Query q = parse_sql("SELECT name, age FROM singer WHERE country = 'x'");
    CHECK(named_usage(bind_and_usage(q, s), s) == named_usage(bind_and_usage(q, other), other));
  }
}

TEST_CASE("exact set match basics") {
  auto em = [](const char* a, const char* b) { return exact_set_match(parse_sql(a), parse_sql(b)); };
  CHECK(em("SELECT a, b FROM t", "SELECT b, a FROM t"));
  CHECK_FALSE(em("SELECT sum(age) FROM singer", "SELECT count(*) FROM singer"));
  CHECK(em("SELECT a FROM t WHERE b = 1 AND c = 2", "SELECT a FROM t WHERE c = 2 AND b = 1"));
  CHECK(em("SELECT a FROM t WHERE b = 1", "SELECT a FROM t WHERE b = 7"));
  CHECK_FALSE(em("SELECT a FROM t ORDER BY a ASC", "SELECT a FROM t ORDER BY a DESC"));
  CHECK_FALSE(em("SELECT a FROM t LIMIT 1", "SELECT a FROM t LIMIT 2"));
  CHECK(em("SELECT T1.a FROM t AS T1", "SELECT t.a FROM t"));
  MatchOptions strict;
  strict.value_insensitive = false;
  CHECK_FALSE(exact_set_match(parse_sql("SELECT a FROM t WHERE b = 1"), parse_sql("SELECT a FROM t WHERE b = 7"),
                              strict));
}

TEST_CASE("exact set match resolves unqualified columns through the schema") {
  const Schema s = concert();
  const Query a = parse_sql("SELECT age FROM singer JOIN concert ON singer.singer_id = concert.singer_id");
  const Query b = parse_sql("SELECT T1.age FROM concert AS T2 JOIN singer AS T1 ON T2.singer_id = T1.singer_id");
  CHECK(exact_set_match(a, &s, b, &s));
}

TEST_CASE("hardness follows component counts") {
  CHECK(classify_hardness(parse_sql("SELECT count(*) FROM singer")) == Hardness::Easy);
  CHECK(classify_hardness(parse_sql("SELECT name FROM singer WHERE age > 3")) == Hardness::Easy);
  CHECK(classify_hardness(parse_sql("SELECT name, country, age FROM singer ORDER BY age DESC")) == Hardness::Medium);
  CHECK(classify_hardness(parse_sql("SELECT T1.name FROM singer AS T1 JOIN concert AS T2 ON T1.singer_id = "
                                    "T2.singer_id WHERE T2.name = 'x' ORDER BY T1.age LIMIT 1")) == Hardness::Extra);
  CHECK(classify_hardness(parse_sql("SELECT name FROM singer WHERE singer_id IN (SELECT singer_id FROM concert)")) ==
        Hardness::Hard);
  CHECK(classify_hardness(parse_sql("SELECT name FROM singer EXCEPT SELECT name FROM concert WHERE a = 1")) ==
        Hardness::Hard);

  const auto c = count_components(parse_sql(
      "SELECT name FROM singer WHERE age > 1 OR name LIKE 'a%' GROUP BY name ORDER BY age LIMIT 1"));
  CHECK(c.component1 == 6);  // where, group, order, limit, or, like
  CHECK(c.component2 == 0);
  CHECK(c.others == 1);      // two where atoms
}

TEST_CASE("hardness is monotone in every component count") {
  for (int c1 = 0; c1 <= 6; ++c1) {
    for (int c2 = 0; c2 <= 3; ++c2) {
      for (int o = 0; o <= 4; ++o) {
        const auto h = classify_counts({c1, c2, o});
        CHECK(classify_counts({c1 + 1, c2, o}) >= h);
        CHECK(classify_counts({c1, c2 + 1, o}) >= h);
        CHECK(classify_counts({c1, c2, o + 1}) >= h);
      }
    }
  }
  CHECK(classify_counts({0, 0, 0}) == Hardness::Easy);
  CHECK(classify_counts({2, 0, 1}) == Hardness::Medium);
  CHECK(classify_counts({3, 0, 1}) == Hardness::Hard);
  // (2, 0, 2) is extra under the raw table, so the closure lifts (3, 0, 2) too.
  CHECK(classify_counts({3, 0, 2}) == Hardness::Extra);
  CHECK(classify_counts({0, 1, 0}) == Hardness::Hard);
  CHECK(classify_counts({0, 2, 0}) == Hardness::Extra);
}
