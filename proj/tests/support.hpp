#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "teql/dataset.hpp"
#include "teql/schema.hpp"
#include "teql/util.hpp"

namespace teql::testing {

inline std::filesystem::path data_dir() { return TEQL_DATA_DIR; }

inline std::filesystem::path tmp_dir(const std::string& name) {
  auto dir = std::filesystem::path(TEQL_TMP_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct Mini {
  std::vector<Schema> schemas;
  std::vector<Example> examples;
};

inline const Mini& mini() {
  static const Mini m = [] {
    Mini out;
    out.schemas = load_schemas(data_dir() / "mini" / "tables.json");
    out.examples = load_examples(data_dir() / "mini" / "dev.json", out.schemas).examples;
    return out;
  }();
  return m;
}

/// Builds a schema from (table, [(column, type)]) lists plus "table.column" keys.
inline Schema make_schema(const std::string& db, const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>& tables,
                          const std::vector<std::string>& pks = {},
                          const std::vector<std::pair<std::string, std::string>>& fks = {}) {
  nlohmann::json j;
  j["db_id"] = db;
  nlohmann::json cols = nlohmann::json::array({nlohmann::json::array({-1, "*"})});
  nlohmann::json types = nlohmann::json::array({"text"});
  nlohmann::json names = nlohmann::json::array();
  std::map<std::string, int> index;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    names.push_back(tables[t].first);
    for (const auto& [c, ty] : tables[t].second) {
      index[tables[t].first + "." + c] = static_cast<int>(cols.size());
      cols.push_back(nlohmann::json::array({static_cast<int>(t), c}));
      types.push_back(ty);
    }
  }
  j["column_names"] = cols;
  j["column_names_original"] = cols;
  j["column_types"] = types;
  j["table_names"] = names;
  j["table_names_original"] = names;
  nlohmann::json pk = nlohmann::json::array();
  for (const auto& p : pks) pk.push_back(index.at(p));
  j["primary_keys"] = pk;
  nlohmann::json fk = nlohmann::json::array();
  for (const auto& [a, b] : fks) fk.push_back(nlohmann::json::array({index.at(a), index.at(b)}));
  j["foreign_keys"] = fk;
  return schema_from_json(j);
}

/// CAR / VENDOR schema in the shape of the running example.
inline Schema car_vendor() {
  return make_schema("car_shop",
                     {{"car", {{"id", "number"}, {"name", "text"}, {"color", "text"}, {"vendor_id", "number"}}},
                      {"vendor", {{"vendor_id", "number"}, {"name", "text"}, {"country", "text"}}}},
                     {"car.id", "vendor.vendor_id"}, {{"car.vendor_id", "vendor.vendor_id"}});
}

}  // namespace teql::testing
