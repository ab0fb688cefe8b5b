#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "teql/generator.hpp"

namespace teql {

/// Settings shared by the CLI subcommands. Relative paths in a config file
/// resolve against the file's directory.
struct AppConfig {
  std::filesystem::path schemas;
  std::filesystem::path examples;
  std::filesystem::path lexicon;          // empty: built-in
  std::filesystem::path rename_lexicon;   // empty: built-in
  std::filesystem::path attribute_kb;     // empty: built-in
  GenerationConfig generation;
  std::string adapter;                    // "cmd:..." or "http:..."
  double timeout_seconds = 30.0;
  int max_inflight = 4;
  double max_failure_rate = 0.5;
  std::string report_format = "json";
  std::filesystem::path output_dir;
  int jobs = 0;
  int ngram_order = 3;
  double ngram_k = 0.1;
};

AppConfig parse_app_config(std::string_view text, const std::filesystem::path& base_dir);
AppConfig load_app_config(const std::filesystem::path& path);
std::string serialize_app_config(const AppConfig& config);
/// Hash of the canonical serialization.
std::string app_config_fingerprint(const AppConfig& config);

/// Checks that every non-empty path exists.
void check_paths(const AppConfig& config);

GenerationResources load_resources(const AppConfig& config);

}  // namespace teql
