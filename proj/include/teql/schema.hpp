#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace teql {

enum class ColType { Text, Number, Time, Boolean, Others };

std::string_view to_string(ColType type);
ColType parse_col_type(std::string_view text);

struct Column {
  int index = 0;
  int table_index = -1;  // -1 only for the star column
  std::string name;
  std::string original_name;
  ColType col_type = ColType::Text;

  bool operator==(const Column&) const = default;
};

struct Table {
  int index = 0;
  std::string name;
  std::string original_name;
  std::vector<int> column_indices;

  bool operator==(const Table&) const = default;
};

using ForeignKey = std::pair<int, int>;  // (from column, to column)

/// A relational schema in Spider layout. Column 0 is always the star column.
/// Key lists keep file order so serialization is byte-stable; they are
/// compared as sets where semantics matter.
struct Schema {
  std::string db_id;
  std::vector<Table> tables;
  std::vector<Column> columns;
  std::vector<int> primary_keys;
  std::vector<ForeignKey> foreign_keys;

  bool operator==(const Schema&) const = default;

  std::optional<int> find_table(std::string_view original_name) const;
  /// Column of table `table_index` with the given original name (case-insensitive).
  std::optional<int> find_column(int table_index, std::string_view original_name) const;
  bool is_primary_key(int column) const;
  bool is_foreign_key_endpoint(int column) const;
  bool is_key(int column) const { return is_primary_key(column) || is_foreign_key_endpoint(column); }
  /// "table.column", lowercase original names; "*" for the star column.
  std::string qualified_name(int column) const;
};

/// Throws DataError naming db_id and the offending index on any violation.
void validate_schema(const Schema& schema);

Schema schema_from_json(const nlohmann::json& j);
nlohmann::ordered_json schema_to_json(const Schema& schema);

/// Compact, bit-stable serialization of one schema object.
std::string serialize_schema(const Schema& schema);
/// Pretty-printed array, the tables.json layout.
std::string serialize_schemas(const std::vector<Schema>& schemas);

std::vector<Schema> parse_schemas(std::string_view text);
std::vector<Schema> load_schemas(const std::filesystem::path& path);

const Schema* find_schema(const std::vector<Schema>& schemas, std::string_view db_id);

/// Rebuild tables[].column_indices from columns[].table_index.
void reindex_tables(Schema& schema);

}  // namespace teql
