#include "teql/dataset.hpp"

#include "teql/sql.hpp"
#include "teql/util.hpp"

namespace teql {

using nlohmann::json;
using nlohmann::ordered_json;

ExampleLoad parse_examples(std::string_view text, const std::vector<Schema>& schemas, const LoadOptions& options) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("dataset parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_array()) throw DataError("dataset file must be a JSON array");

  ExampleLoad out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& item = j[i];
    Example ex;
    try {
      ex.example_id = item.contains("example_id") ? item.at("example_id").get<std::string>() : std::to_string(i);
      ex.utterance = item.at("question").get<std::string>();
      ex.gold_sql = item.at("query").get<std::string>();
      ex.db_id = item.at("db_id").get<std::string>();
    } catch (const json::exception& e) {
      throw DataError("example " + std::to_string(i) + ": " + e.what());
    }
    if (trim(ex.utterance).empty()) throw DataError("example " + ex.example_id + ": empty question");
    const Schema* schema = find_schema(schemas, ex.db_id);
    if (!schema) throw DataError("example " + ex.example_id + ": unknown db_id '" + ex.db_id + "'");

    std::string reason;
    try {
      sql::bind_and_usage(sql::parse_sql(ex.gold_sql), *schema);
    } catch (const sql::ParseError& e) {
      reason = std::string("unparseable gold SQL: ") + e.what();
    } catch (const sql::BindError& e) {
      reason = std::string("gold SQL does not bind: ") + e.what();
    }
    if (!reason.empty()) {
      if (!options.skip_invalid_sql) throw DataError("example " + ex.example_id + ": " + reason);
      out.skipped.push_back(SkippedExample{ex.example_id, ex.db_id, reason});
      continue;
    }
    out.examples.push_back(std::move(ex));
  }
  return out;
}

ExampleLoad load_examples(const std::filesystem::path& path, const std::vector<Schema>& schemas,
                          const LoadOptions& options) {
  return parse_examples(read_file(path), schemas, options);
}

std::string serialize_examples(const std::vector<Example>& examples) {
  ordered_json arr = ordered_json::array();
  for (const Example& ex : examples) {
    arr.push_back(ordered_json{{"example_id", ex.example_id}, {"db_id", ex.db_id}, {"question", ex.utterance},
                               {"query", ex.gold_sql}});
  }
  return arr.dump(2) + "\n";
}

std::string serialize_skip_report(const std::vector<SkippedExample>& skipped) {
  ordered_json arr = ordered_json::array();
  for (const auto& s : skipped) {
    arr.push_back(ordered_json{{"example_id", s.example_id}, {"db_id", s.db_id}, {"reason", s.reason}});
  }
  return ordered_json{{"skipped_count", skipped.size()}, {"skipped", std::move(arr)}}.dump(2) + "\n";
}

const Example* find_example(const std::vector<Example>& examples, std::string_view example_id) {
  for (const Example& ex : examples) {
    if (ex.example_id == example_id) return &ex;
  }
  return nullptr;
}

}  // namespace teql
