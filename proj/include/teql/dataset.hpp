#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "teql/schema.hpp"

namespace teql {

/// A seed utterance paired with its gold SQL and schema reference.
struct Example {
  std::string example_id;
  std::string db_id;
  std::string utterance;
  std::string gold_sql;

  bool operator==(const Example&) const = default;
};

struct SkippedExample {
  std::string example_id;
  std::string db_id;
  std::string reason;
};

struct ExampleLoad {
  std::vector<Example> examples;
  std::vector<SkippedExample> skipped;
};

struct LoadOptions {
  // When false, an unparseable or unbindable gold query is fatal.
  bool skip_invalid_sql = true;
};

/// Parses a Spider dataset array ({question, query, db_id}). Empty
/// questions and unknown db_ids are always fatal (DataError); gold SQL that
/// fails to parse or bind goes to `skipped` unless skipping is disabled.
ExampleLoad parse_examples(std::string_view text, const std::vector<Schema>& schemas, const LoadOptions& options = {});
ExampleLoad load_examples(const std::filesystem::path& path, const std::vector<Schema>& schemas,
                          const LoadOptions& options = {});

std::string serialize_examples(const std::vector<Example>& examples);
std::string serialize_skip_report(const std::vector<SkippedExample>& skipped);

const Example* find_example(const std::vector<Example>& examples, std::string_view example_id);

}  // namespace teql
