#include "teql/synthetic.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "teql/util.hpp"

namespace teql {

namespace {

constexpr std::array<const char*, 16> kEntities = {
    "singer",  "concert", "stadium", "student",  "teacher", "course", "department", "employee",
    "airline", "airport", "flight",  "car",      "movie",   "city",   "country",    "vendor"};

struct Attr {
  const char* name;
  ColType type;
};

constexpr std::array<Attr, 11> kAttrs = {{{"age", ColType::Number},
                                          {"city", ColType::Text},
                                          {"price", ColType::Number},
                                          {"year", ColType::Number},
                                          {"country", ColType::Text},
                                          {"email", ColType::Text},
                                          {"phone", ColType::Text},
                                          {"description", ColType::Text},
                                          {"rating", ColType::Number},
                                          {"capacity", ColType::Number},
                                          {"salary", ColType::Number}}};

struct TableInfo {
  std::string name;
  std::vector<Attr> attrs;  // beyond id/name/link
  std::string link;         // FK column to the previous table, or empty
};

void add_column(Schema& s, int table, const std::string& name, ColType type) {
  Column c;
  c.index = static_cast<int>(s.columns.size());
  c.table_index = table;
  c.original_name = name;
  c.name = name;
  std::replace(c.name.begin(), c.name.end(), '_', ' ');
  c.col_type = type;
  s.columns.push_back(c);
}

std::vector<TableInfo> build_schema(Schema& s, Rng& rng) {
  const std::size_t table_count = 2 + rng.below(3);
  std::vector<std::size_t> picks = rng.choose(kEntities.size(), table_count);
  rng.shuffle(picks);
  std::vector<TableInfo> info;
  s.columns.push_back(Column{0, -1, "*", "*", ColType::Text});
  for (std::size_t t = 0; t < table_count; ++t) {
    TableInfo ti;
    ti.name = kEntities[picks[t]];
    Table table;
    table.index = static_cast<int>(t);
    table.original_name = ti.name;
    table.name = ti.name;
    s.tables.push_back(table);
    const int ti_index = static_cast<int>(t);
    add_column(s, ti_index, ti.name + "_id", ColType::Number);
    s.primary_keys.push_back(static_cast<int>(s.columns.size()) - 1);
    add_column(s, ti_index, "name", ColType::Text);
    for (std::size_t a : rng.choose(kAttrs.size(), 2 + rng.below(3))) {
      ti.attrs.push_back(kAttrs[a]);
      add_column(s, ti_index, kAttrs[a].name, kAttrs[a].type);
    }
    if (t > 0) {
      ti.link = info.back().name + "_id";
      add_column(s, ti_index, ti.link, ColType::Number);
      const int from = static_cast<int>(s.columns.size()) - 1;
      const int to = s.primary_keys[t - 1];
      s.foreign_keys.emplace_back(from, to);
    }
    info.push_back(std::move(ti));
  }
  reindex_tables(s);
  return info;
}

const Attr* pick_attr(const TableInfo& t, Rng& rng, bool numeric) {
  std::vector<const Attr*> pool;
  for (const auto& a : t.attrs) {
    if ((a.type == ColType::Number) == numeric) pool.push_back(&a);
  }
  if (pool.empty()) return nullptr;
  return pool[rng.below(pool.size())];
}

constexpr std::array<const char*, 8> kAsk = {"What is", "What are", "Which are", "Tell me", "Find", "List",
                                             "Return", "Which is"};

Example make_example(const std::vector<TableInfo>& tables, Rng& rng) {
  const std::size_t ti = tables.size() - 1 - rng.below(std::min<std::size_t>(2, tables.size()));
  const TableInfo& t = tables[ti];
  const std::string ask = kAsk[rng.below(kAsk.size())];
  const Attr* num = pick_attr(t, rng, true);
  const Attr* text = pick_attr(t, rng, false);
  Example ex;
  switch (rng.below(8)) {
    case 0:
      ex.utterance = "How many " + t.name + "s are there?";
      ex.gold_sql = "SELECT count(*) FROM " + t.name;
      return ex;
    case 1:
      if (!num) break;
      ex.utterance = ask + " the names of " + t.name + "s whose " + num->name + " is larger than 10?";
      ex.gold_sql = "SELECT name FROM " + t.name + " WHERE " + num->name + " > 10";
      return ex;
    case 2:
      if (!num) break;
      ex.utterance = ask + " the maximum " + std::string(num->name) + " of all " + t.name + "s.";
      ex.gold_sql = "SELECT max(" + std::string(num->name) + ") FROM " + t.name;
      return ex;
    case 3:
      if (!num) break;
      ex.utterance = ask + " the average " + std::string(num->name) + " and the minimum " + num->name + " of " +
                     t.name + "s.";
      ex.gold_sql = "SELECT avg(" + std::string(num->name) + "), min(" + num->name + ") FROM " + t.name;
      return ex;
    case 4:
      if (!text) break;
      ex.utterance = ask + " the number of " + t.name + "s for each " + text->name + ".";
      ex.gold_sql = "SELECT " + std::string(text->name) + ", count(*) FROM " + t.name + " GROUP BY " + text->name;
      return ex;
    case 5:
      if (!num) break;
      ex.utterance = ask + " the name of the " + t.name + " with the highest " + num->name + ".";
      ex.gold_sql = "SELECT name FROM " + t.name + " ORDER BY " + num->name + " DESC LIMIT 1";
      return ex;
    case 6:
      if (t.link.empty()) break;
      {
        const TableInfo& r = tables[ti - 1];
        ex.utterance = ask + " the names of each " + t.name + " and the name of its " + r.name + ".";
        ex.gold_sql = "SELECT T1.name, T2.name FROM " + t.name + " AS T1 JOIN " + r.name + " AS T2 ON T1." + t.link +
                      " = T2." + r.name + "_id";
        return ex;
      }
    case 7:
      if (!text) break;
      ex.utterance = ask + " the distinct " + std::string(text->name) + " values of " + t.name + "s.";
      ex.gold_sql = "SELECT DISTINCT " + std::string(text->name) + " FROM " + t.name;
      return ex;
  }
  ex.utterance = ask + " the names of all " + t.name + "s.";
  ex.gold_sql = "SELECT name FROM " + t.name;
  return ex;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(std::size_t seed_count, std::uint64_t rng_seed, std::size_t seeds_per_schema) {
  if (seeds_per_schema == 0) seeds_per_schema = 1;
  SyntheticCorpus corpus;
  Rng rng(rng_seed);
  std::vector<TableInfo> tables;
  for (std::size_t i = 0; i < seed_count; ++i) {
    if (i % seeds_per_schema == 0) {
      Schema s;
      s.db_id = "synth_" + std::to_string(i / seeds_per_schema);
      tables = build_schema(s, rng);
      validate_schema(s);
      corpus.schemas.push_back(std::move(s));
    }
    Example ex = make_example(tables, rng);
    ex.example_id = "syn" + std::to_string(i);
    ex.db_id = corpus.schemas.back().db_id;
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

}  // namespace teql
