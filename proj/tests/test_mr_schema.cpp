#include <algorithm>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "teql/lexicon.hpp"
#include "teql/mr_schema.hpp"
#include "teql/synthetic.hpp"

using namespace teql;
using testing::car_vendor;
using testing::make_schema;

namespace {

sql::UsageSet usage_of(const char* gold, const Schema& s) { return sql::bind_and_usage(sql::parse_sql(gold), s); }

std::multiset<std::string> triples(const Schema& s) {
  std::multiset<std::string> out;
  for (const Column& c : s.columns) {
    const std::string table = c.table_index < 0 ? "" : s.tables[static_cast<std::size_t>(c.table_index)].original_name;
    out.insert(table + "|" + c.original_name + "|" + std::string(to_string(c.col_type)));
  }
  return out;
}

std::set<std::string> named_fks(const Schema& s) {
  std::set<std::string> out;
  for (auto [a, b] : s.foreign_keys) out.insert(s.qualified_name(a) + "->" + s.qualified_name(b));
  return out;
}

std::vector<std::string> column_names(const Schema& s, const std::string& table) {
  std::vector<std::string> out;
  for (int c : s.tables[static_cast<std::size_t>(*s.find_table(table))].column_indices) {
    out.push_back(s.columns[static_cast<std::size_t>(c)].original_name);
  }
  return out;
}

Schema chain(int tables) {
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> spec;
  std::vector<std::string> pks;
  std::vector<std::pair<std::string, std::string>> fks;
  for (int t = 0; t < tables; ++t) {
    const std::string name = "t" + std::to_string(t);
    std::vector<std::pair<std::string, std::string>> cols{{"id", "number"}, {"label", "text"}};
    if (t > 0) {
      cols.push_back({"prev_id", "number"});
      fks.push_back({name + ".prev_id", "t" + std::to_string(t - 1) + ".id"});
    }
    spec.push_back({name, cols});
    pks.push_back(name + ".id");
  }
  return make_schema("chain", spec, pks, fks);
}

}  // namespace

TEST_CASE("normalization factors an unused column into a reference table") {
  const Schema s = make_schema("cars", {{"car", {{"id", "number"}, {"color", "text"}, {"vendor_id", "number"}}}},
                               {"car.id"});
  const auto rws = normalize(s, usage_of("SELECT id FROM car", s), 10, 1);
  REQUIRE(rws.size() == 2);  // color and vendor_id, which is not a key here
  auto color = std::find_if(rws.begin(), rws.end(),
                            [](const SchemaRewrite& rw) { return rw.after.find_table("car_color_ref").has_value(); });
  REQUIRE(color != rws.end());
  const Schema& a = color->after;
  CHECK(column_names(a, "car") == std::vector<std::string>{"id", "color_link", "vendor_id"});
  CHECK(column_names(a, "car_color_ref") == std::vector<std::string>{"color_link_key", "color"});
  CHECK(named_fks(a) == std::set<std::string>{"car.color_link->car_color_ref.color_link_key"});
  CHECK(a.is_primary_key(*a.find_column(*a.find_table("car_color_ref"), "color_link_key")));
  CHECK_NOTHROW(validate_schema(a));
  CHECK(color->before_fingerprint == schema_fingerprint(s));
}

TEST_CASE("normalization respects usage and the cap") {
  const Schema s = make_schema("cars", {{"car", {{"id", "number"}, {"color", "text"}}}}, {"car.id"});
  CHECK(normalize(s, usage_of("SELECT id, color FROM car", s), 10, 1).empty());

  std::vector<std::pair<std::string, std::string>> many{{"id", "number"}};
  for (int i = 0; i < 14; ++i) many.push_back({"c" + std::to_string(i), "text"});
  const Schema wide = make_schema("wide", {{"w", many}}, {"w.id"});
  const auto u = usage_of("SELECT id FROM w", wide);
  CHECK(normalize(wide, u, 10, 5).size() == 10);
  CHECK(normalize(wide, u, 20, 5).size() == 14);
  CHECK(normalize(wide, u, 3, 5).size() == 3);
  // Seeded selection is reproducible.
  const auto a = normalize(wide, u, 10, 5);
  const auto b = normalize(wide, u, 10, 5);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].after == b[i].after);
}

TEST_CASE("normalization followed by a conceptual re-flatten restores the schema") {
  const Schema s = car_vendor();
  for (const auto& rw : normalize(s, usage_of("SELECT count(*) FROM car", s), 10, 3)) {
    Schema back = rw.after;
    const int ref = static_cast<int>(back.tables.size()) - 1;
    const auto& ref_cols = back.tables[static_cast<std::size_t>(ref)].column_indices;
    const Column moved = back.columns[static_cast<std::size_t>(ref_cols[1])];
    // Put the moved column back where its link column sits.
    auto fk = std::find_if(back.foreign_keys.begin(), back.foreign_keys.end(), [&](ForeignKey k) {
      return back.columns[static_cast<std::size_t>(k.second)].table_index == ref;
    });
    REQUIRE(fk != back.foreign_keys.end());
    Column& link = back.columns[static_cast<std::size_t>(fk->first)];
    link.original_name = moved.original_name;
    link.name = moved.name;
    link.col_type = moved.col_type;
    back.foreign_keys.erase(fk);
    const int first_dropped = ref_cols[0];
    std::erase_if(back.primary_keys, [&](int c) { return c >= first_dropped; });
    back.columns.resize(static_cast<std::size_t>(first_dropped));
    back.tables.pop_back();
    reindex_tables(back);
    CHECK(serialize_schema(back) == serialize_schema(s));
  }
}

TEST_CASE("flattening merges an unused referenced table") {
  const Schema s = car_vendor();
  const auto rws = flatten(s, usage_of("SELECT color FROM car", s), 10);
  REQUIRE(rws.size() == 1);
  const Schema& a = rws[0].after;
  CHECK(a.tables.size() == 1);
  CHECK(column_names(a, "car") == std::vector<std::string>{"id", "name", "color", "vendor_id", "vendor_name", "country"});
  CHECK(a.foreign_keys.empty());
  CHECK_NOTHROW(validate_schema(a));

  CHECK(flatten(s, usage_of("SELECT car.name FROM car JOIN vendor ON car.vendor_id = vendor.vendor_id", s), 10)
            .empty());
  CHECK(flatten(s, usage_of("SELECT country FROM vendor", s), 10).empty());
}

TEST_CASE("flattening drops foreign keys left dangling") {
  const Schema s = chain(3);
  const auto rws = flatten(s, usage_of("SELECT label FROM t2", s), 10);
  REQUIRE(rws.size() == 2);
  CHECK(rws[0].provenance.find("flattened t0 into t1") == 0);
  CHECK(rws[1].provenance.find("flattened t1 into t2") == 0);
  for (const auto& rw : rws) {
    CHECK_NOTHROW(validate_schema(rw.after));
    for (auto [from, to] : rw.after.foreign_keys) CHECK(rw.after.columns[static_cast<std::size_t>(from)].table_index !=
                                                        rw.after.columns[static_cast<std::size_t>(to)].table_index);
  }
}

TEST_CASE("opaque key removes all, then each, foreign key") {
  const Schema s = chain(4);
  const auto rws = opaque_key(s, 10);
  REQUIRE(rws.size() == 4);
  CHECK(rws[0].after.foreign_keys.empty());
  for (std::size_t i = 1; i < rws.size(); ++i) {
    CHECK(rws[i].after.foreign_keys.size() == 2);
    CHECK(rws[i].after.tables == s.tables);
    CHECK(rws[i].after.columns == s.columns);
    CHECK(rws[i].after.primary_keys == s.primary_keys);
  }
  CHECK(opaque_key(chain(1), 10).empty());
  CHECK(opaque_key(car_vendor(), 10).size() == 1);
  const auto with_pk = opaque_key(car_vendor(), 10, true);
  REQUIRE(with_pk.size() == 2);
  CHECK(with_pk[0].after.primary_keys.empty());
  CHECK_FALSE(with_pk[1].after.primary_keys.empty());
}

TEST_CASE("table shuffle enumerates distinct non-identity orders") {
  CHECK(table_shuffle(chain(1), 10, 1).empty());
  const auto two = table_shuffle(chain(2), 10, 1);
  REQUIRE(two.size() == 1);
  CHECK(two[0].after.tables[0].original_name == "t1");

  const Schema four = chain(4);
  const auto rws = table_shuffle(four, 10, 9);
  CHECK(rws.size() == 10);
  std::set<std::string> seen;
  for (const auto& rw : rws) {
    seen.insert(schema_fingerprint(rw.after));
    CHECK(rw.after != four);
    CHECK(triples(rw.after) == triples(four));
    CHECK(named_fks(rw.after) == named_fks(four));
    CHECK_NOTHROW(validate_schema(rw.after));
  }
  CHECK(seen.size() == 10);
  CHECK(table_shuffle(four, 30, 9).size() == 23);
  const auto again = table_shuffle(four, 10, 9);
  for (std::size_t i = 0; i < rws.size(); ++i) CHECK(again[i].after == rws[i].after);
}

TEST_CASE("column shuffle permutes within one table") {
  const Schema s = make_schema("d", {{"t", {{"a", "text"}, {"b", "text"}}}});
  const auto rws = column_shuffle(s, 10, 1);
  REQUIRE(rws.size() == 1);
  CHECK(column_names(rws[0].after, "t") == std::vector<std::string>{"b", "a"});
  CHECK(rws[0].after.columns[0].original_name == "*");

  CHECK(column_shuffle(make_schema("d", {{"t", {{"a", "text"}}}, {"u", {{"b", "text"}}}}), 10, 1).empty());

  const Schema cv = car_vendor();
  const auto gold = sql::parse_sql("SELECT T1.color FROM car AS T1 JOIN vendor AS T2 ON T1.vendor_id = T2.vendor_id");
  const auto expected = sql::named_usage(sql::bind_and_usage(gold, cv), cv);
  for (const auto& rw : column_shuffle(cv, 10, 4)) {
    CHECK(named_fks(rw.after) == named_fks(cv));
    CHECK(triples(rw.after) == triples(cv));
    CHECK(sql::named_usage(sql::bind_and_usage(gold, rw.after), rw.after) == expected);
  }
}

TEST_CASE("column removal drops unused non-key columns") {
  const Schema s = car_vendor();
  const auto rws = column_remove(s, usage_of("SELECT name FROM car", s), 10);
  std::set<std::string> removed;
  for (const auto& rw : rws) {
    CHECK(rw.after.columns.size() == s.columns.size() - 1);
    CHECK(named_fks(rw.after) == named_fks(s));
    CHECK_NOTHROW(sql::bind_and_usage(sql::parse_sql("SELECT name FROM car"), rw.after));
    removed.insert(rw.provenance);
  }
  CHECK(removed == std::set<std::string>{"removed car.color", "removed vendor.name", "removed vendor.country"});
  CHECK(column_remove(s, usage_of("SELECT * FROM car JOIN vendor ON car.vendor_id = vendor.vendor_id", s), 10)
            .empty());
  CHECK(column_remove(s, usage_of("SELECT name FROM car", s), 2).size() == 2);
}

TEST_CASE("column renaming uses the lexicon and avoids collisions") {
  const Schema s = car_vendor();
  const auto renames = default_rename_lexicon();
  std::vector<std::string> skipped;
  const auto rws = column_rename(s, usage_of("SELECT color FROM car", s), renames, 10, &skipped);
  std::set<std::string> names;
  for (const auto& rw : rws) {
    names.insert(rw.provenance);
    CHECK_NOTHROW(validate_schema(rw.after));
  }
  CHECK(names.count("renamed vendor.country to location"));
  CHECK(names.count("renamed vendor.country to nation"));
  CHECK(names.count("renamed car.name to title"));
  CHECK_FALSE(names.count("renamed car.color to hue"));

  const Schema clash = make_schema("d", {{"t", {{"name", "text"}, {"title", "text"}}}});
  skipped.clear();
  CHECK(column_rename(clash, usage_of("SELECT title FROM t", clash), renames, 10, &skipped).empty());
  CHECK(skipped.size() == 1);

  const Schema upper = make_schema("d", {{"t", {{"Vendor_ID", "number"}, {"x", "text"}}}});
  const auto up = column_rename(upper, usage_of("SELECT x FROM t", upper), renames, 10);
  REQUIRE(up.size() == 1);
  CHECK(up[0].after.columns[1].original_name == "Vendor_IDENTIFIER");
}

TEST_CASE("column insertion draws fresh attributes from the knowledge base") {
  const Schema s = car_vendor();
  const auto kb = default_attribute_kb();
  const auto rws = column_insert(s, kb, 10);
  REQUIRE_FALSE(rws.empty());
  CHECK(rws[0].provenance == "inserted car.engine_id");
  const Schema& a = rws[0].after;
  CHECK(column_names(a, "car").back() == "engine_id");
  CHECK(a.columns[static_cast<std::size_t>(*a.find_column(0, "engine_id"))].col_type == ColType::Number);
  for (const auto& rw : rws) CHECK(rw.provenance != "inserted car.color");

  const Schema upper = make_schema("d", {{"CARS", {{"ID", "number"}}}});
  const auto up = column_insert(upper, kb, 1);
  REQUIRE(up.size() == 1);
  CHECK(up[0].provenance == "inserted CARS.ENGINE_ID");

  CHECK(column_insert(s, AttributeKB{}, 10).empty());
  using Entries = std::map<std::string, std::vector<Attribute>>;
  CHECK_THROWS_AS(AttributeKB(Entries{{"car", {}}}), DataError);
  CHECK_THROWS_AS(AttributeKB(Entries{{"car", {{"bad name", ColType::Text}}}}), DataError);
}

TEST_CASE("schema rewrites keep every schema valid on a synthetic corpus") {
  const auto corpus = make_synthetic_corpus(120, 17);
  const auto renames = default_rename_lexicon();
  const auto kb = default_attribute_kb();
  std::size_t checked = 0;
  for (const auto& ex : corpus.examples) {
    const Schema& s = *find_schema(corpus.schemas, ex.db_id);
    const auto gold = sql::parse_sql(ex.gold_sql);
    const auto u = sql::bind_and_usage(gold, s);
    const auto expected = sql::named_usage(u, s);
    std::vector<SchemaRewrite> all;
    for (auto part : {normalize(s, u, 10, 1), flatten(s, u, 10), opaque_key(s, 10), table_shuffle(s, 10, 2),
                      column_shuffle(s, 10, 3), column_remove(s, u, 10), column_rename(s, u, renames, 10),
                      column_insert(s, kb, 10)}) {
      CHECK(part.size() <= 10);
      all.insert(all.end(), part.begin(), part.end());
    }
    for (const auto& rw : all) {
      CHECK_NOTHROW(validate_schema(rw.after));
      CHECK(rw.after != s);
      if (rw.kind == Mr::TableShuffle || rw.kind == Mr::ColumnShuffle || rw.kind == Mr::OpaqueKey ||
          rw.kind == Mr::ColumnRemoval || rw.kind == Mr::Normalization || rw.kind == Mr::Flattening) {
        CHECK(sql::named_usage(sql::bind_and_usage(gold, rw.after), rw.after) == expected);
      }
      ++checked;
    }
  }
  CHECK(checked > 1000);
}
