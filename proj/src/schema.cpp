#include "teql/schema.hpp"

#include <algorithm>
#include <set>

#include "teql/util.hpp"

namespace teql {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ColType type) {
  switch (type) {
    case ColType::Text: return "text";
    case ColType::Number: return "number";
    case ColType::Time: return "time";
    case ColType::Boolean: return "boolean";
    case ColType::Others: return "others";
  }
  return "others";
}

ColType parse_col_type(std::string_view text) {
  if (text == "text") return ColType::Text;
  if (text == "number") return ColType::Number;
  if (text == "time") return ColType::Time;
  if (text == "boolean") return ColType::Boolean;
  if (text == "others") return ColType::Others;
  throw DataError("unknown column type '" + std::string(text) + "'");
}

std::optional<int> Schema::find_table(std::string_view original_name) const {
  const std::string want = to_lower(original_name);
  for (const Table& t : tables) {
    if (to_lower(t.original_name) == want) return t.index;
  }
  return std::nullopt;
}

std::optional<int> Schema::find_column(int table_index, std::string_view original_name) const {
  if (table_index < 0 || table_index >= static_cast<int>(tables.size())) return std::nullopt;
  const std::string want = to_lower(original_name);
  for (int c : tables[static_cast<std::size_t>(table_index)].column_indices) {
    if (to_lower(columns[static_cast<std::size_t>(c)].original_name) == want) return c;
  }
  return std::nullopt;
}

bool Schema::is_primary_key(int column) const {
  return std::find(primary_keys.begin(), primary_keys.end(), column) != primary_keys.end();
}

bool Schema::is_foreign_key_endpoint(int column) const {
  return std::any_of(foreign_keys.begin(), foreign_keys.end(),
                     [&](const ForeignKey& fk) { return fk.first == column || fk.second == column; });
}

std::string Schema::qualified_name(int column) const {
  const Column& c = columns.at(static_cast<std::size_t>(column));
  if (c.table_index < 0) return "*";
  return to_lower(tables.at(static_cast<std::size_t>(c.table_index)).original_name) + "." +
         to_lower(c.original_name);
}

namespace {

[[noreturn]] void fail(const Schema& s, const std::string& what) {
  throw DataError("schema '" + s.db_id + "': " + what);
}

}  // namespace

void validate_schema(const Schema& s) {
  const int ncols = static_cast<int>(s.columns.size());
  const int ntables = static_cast<int>(s.tables.size());
  if (ncols == 0 || s.columns[0].table_index != -1 || s.columns[0].original_name != "*") {
    fail(s, "column 0 must be the star column");
  }
  for (int i = 0; i < ncols; ++i) {
    const Column& c = s.columns[static_cast<std::size_t>(i)];
    if (c.index != i) fail(s, "column " + std::to_string(i) + " has index " + std::to_string(c.index));
    if (i > 0 && (c.table_index < 0 || c.table_index >= ntables)) {
      fail(s, "column " + std::to_string(i) + " has invalid table index " + std::to_string(c.table_index));
    }
  }
  std::set<std::string> names;
  for (int t = 0; t < ntables; ++t) {
    const Table& table = s.tables[static_cast<std::size_t>(t)];
    if (table.index != t) fail(s, "table " + std::to_string(t) + " has index " + std::to_string(table.index));
    if (table.column_indices.empty()) fail(s, "table " + std::to_string(t) + " has no columns");
    for (int c : table.column_indices) {
      if (c <= 0 || c >= ncols || s.columns[static_cast<std::size_t>(c)].table_index != t) {
        fail(s, "table " + std::to_string(t) + " references column " + std::to_string(c) + " it does not own");
      }
    }
    if (!names.insert(to_lower(table.original_name)).second) {
      fail(s, "duplicate table name '" + table.original_name + "' at index " + std::to_string(t));
    }
  }
  for (int pk : s.primary_keys) {
    if (pk == 0) fail(s, "primary key is star column");
    if (pk < 0 || pk >= ncols) fail(s, "primary key index " + std::to_string(pk) + " out of range");
  }
  for (std::size_t i = 0; i < s.foreign_keys.size(); ++i) {
    auto [from, to] = s.foreign_keys[i];
    for (int c : {from, to}) {
      if (c == 0) fail(s, "foreign key endpoint is star column (foreign key " + std::to_string(i) + ")");
      if (c < 0 || c >= ncols) {
        fail(s, "foreign key " + std::to_string(i) + " endpoint " + std::to_string(c) + " out of range");
      }
    }
    if (s.columns[static_cast<std::size_t>(from)].table_index == s.columns[static_cast<std::size_t>(to)].table_index) {
      fail(s, "foreign key " + std::to_string(i) + " endpoints in the same table");
    }
  }
}

void reindex_tables(Schema& schema) {
  for (Table& t : schema.tables) t.column_indices.clear();
  for (const Column& c : schema.columns) {
    if (c.table_index >= 0 && c.table_index < static_cast<int>(schema.tables.size())) {
      schema.tables[static_cast<std::size_t>(c.table_index)].column_indices.push_back(c.index);
    }
  }
}

Schema schema_from_json(const json& j) {
  Schema s;
  try {
    s.db_id = j.at("db_id").get<std::string>();
    const auto& tnames = j.at("table_names");
    const auto& tnames_orig = j.at("table_names_original");
    const auto& cnames = j.at("column_names");
    const auto& cnames_orig = j.at("column_names_original");
    const auto& ctypes = j.at("column_types");
    if (tnames.size() != tnames_orig.size()) throw DataError("table_names length mismatch");
    if (cnames.size() != cnames_orig.size() || cnames.size() != ctypes.size()) {
      throw DataError("column arrays length mismatch");
    }
    for (std::size_t i = 0; i < tnames.size(); ++i) {
      s.tables.push_back(Table{static_cast<int>(i), tnames[i].get<std::string>(),
                               tnames_orig[i].get<std::string>(), {}});
    }
    for (std::size_t i = 0; i < cnames.size(); ++i) {
      Column c;
      c.index = static_cast<int>(i);
      c.table_index = cnames[i].at(0).get<int>();
      c.name = cnames[i].at(1).get<std::string>();
      if (cnames_orig[i].at(0).get<int>() != c.table_index) {
        throw DataError("column " + std::to_string(i) + " table index differs between name lists");
      }
      c.original_name = cnames_orig[i].at(1).get<std::string>();
      c.col_type = parse_col_type(ctypes[i].get<std::string>());
      s.columns.push_back(std::move(c));
    }
    for (const auto& pk : j.at("primary_keys")) s.primary_keys.push_back(pk.get<int>());
    for (const auto& fk : j.at("foreign_keys")) {
      s.foreign_keys.emplace_back(fk.at(0).get<int>(), fk.at(1).get<int>());
    }
  } catch (const json::exception& e) {
    throw DataError("schema '" + s.db_id + "': " + e.what());
  } catch (const DataError& e) {
    throw DataError("schema '" + s.db_id + "': " + e.what());
  }
  reindex_tables(s);
  validate_schema(s);
  return s;
}

ordered_json schema_to_json(const Schema& s) {
  ordered_json j;
  ordered_json cnames = ordered_json::array();
  ordered_json cnames_orig = ordered_json::array();
  ordered_json ctypes = ordered_json::array();
  for (const Column& c : s.columns) {
    cnames.push_back(ordered_json::array({c.table_index, c.name}));
    cnames_orig.push_back(ordered_json::array({c.table_index, c.original_name}));
    ctypes.push_back(std::string(to_string(c.col_type)));
  }
  ordered_json fks = ordered_json::array();
  for (auto [a, b] : s.foreign_keys) fks.push_back(ordered_json::array({a, b}));
  ordered_json tnames = ordered_json::array();
  ordered_json tnames_orig = ordered_json::array();
  for (const Table& t : s.tables) {
    tnames.push_back(t.name);
    tnames_orig.push_back(t.original_name);
  }
  j["column_names"] = std::move(cnames);
  j["column_names_original"] = std::move(cnames_orig);
  j["column_types"] = std::move(ctypes);
  j["db_id"] = s.db_id;
  j["foreign_keys"] = std::move(fks);
  j["primary_keys"] = s.primary_keys;
  j["table_names"] = std::move(tnames);
  j["table_names_original"] = std::move(tnames_orig);
  return j;
}

std::string serialize_schema(const Schema& schema) { return schema_to_json(schema).dump(); }

std::string serialize_schemas(const std::vector<Schema>& schemas) {
  ordered_json arr = ordered_json::array();
  for (const Schema& s : schemas) arr.push_back(schema_to_json(s));
  return arr.dump(2) + "\n";
}

std::vector<Schema> parse_schemas(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("schema file parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_array()) throw DataError("schema file must be a JSON array");
  std::vector<Schema> out;
  std::set<std::string> seen;
  for (const auto& item : j) {
    out.push_back(schema_from_json(item));
    if (!seen.insert(out.back().db_id).second) throw DataError("duplicate db_id '" + out.back().db_id + "'");
  }
  return out;
}

std::vector<Schema> load_schemas(const std::filesystem::path& path) {
  return parse_schemas(read_file(path));
}

const Schema* find_schema(const std::vector<Schema>& schemas, std::string_view db_id) {
  for (const Schema& s : schemas) {
    if (s.db_id == db_id) return &s;
  }
  return nullptr;
}

}  // namespace teql
