#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "teql/dataset.hpp"
#include "teql/lexicon.hpp"
#include "teql/mr.hpp"
#include "teql/schema.hpp"

namespace teql {

struct GenerationConfig {
  std::set<Mr> enabled_mrs{kAllMrs.begin(), kAllMrs.end()};
  int max_variants_per_mr = 10;
  std::uint64_t rng_seed = 0;
  bool include_opaque_synonyms = true;
  bool opaque_key_drop_primary_keys = false;
};

void validate_config(const GenerationConfig& config);

/// Lexicons and KB consulted by the MRs. `attribute_provider`, when set,
/// replaces `kb` for column insertion.
struct GenerationResources {
  UtteranceLexicon lexicon = default_utterance_lexicon();
  RenameLexicon renames = default_rename_lexicon();
  AttributeKB kb = default_attribute_kb();
  const AttributeProvider* attribute_provider = nullptr;

  const AttributeProvider& attributes() const { return attribute_provider ? *attribute_provider : kb; }
};

/// Hash over the config and the content of every lexicon.
std::string config_fingerprint(const GenerationConfig& config, const GenerationResources& resources);

struct TestSuite {
  std::vector<TransformedCase> cases;
  std::map<Mr, int> counts_by_mr;
  int seed_count = 0;
  std::string config_fingerprint;
  std::vector<SkippedExample> skipped;  // seeds whose generation failed

  /// Hash over the serialized cases.
  std::string fingerprint() const;
};

/// All cases for one seed, in MR order then variant order. Throws on a
/// seed whose gold SQL does not parse or bind. `notes` collects rewrites
/// dropped because they broke the gold binding.
std::vector<TransformedCase> generate_for_seed(const Example& seed, const Schema& schema,
                                               const GenerationConfig& config, const GenerationResources& resources,
                                               std::vector<std::string>* notes = nullptr);

/// Parallel over seeds with an order-preserving merge; `jobs` <= 0 uses the
/// OpenMP default. Output is identical for every `jobs` value.
TestSuite generate(const std::vector<Example>& examples, const std::vector<Schema>& schemas,
                   const GenerationConfig& config, const GenerationResources& resources, int jobs = 0);

/// Single-threaded reference for `generate`.
TestSuite generate_serial(const std::vector<Example>& examples, const std::vector<Schema>& schemas,
                          const GenerationConfig& config, const GenerationResources& resources);

// ---- suite files: JSON lines plus a "<suite>.meta.json" sidecar ----

std::string serialize_case(const TransformedCase& c);
TransformedCase parse_case(std::string_view line);
std::string serialize_suite_lines(const TestSuite& suite);
std::string serialize_suite_meta(const TestSuite& suite);
std::filesystem::path meta_path(const std::filesystem::path& suite_path);
void write_suite(const TestSuite& suite, const std::filesystem::path& path);
TestSuite read_suite(const std::filesystem::path& path);

/// Fingerprint of a case's inputs (utterance + serialized schema).
std::string content_fingerprint(const TransformedCase& c);

// ---- validation ----

struct Violation {
  std::string case_id;
  std::string rule;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::size_t cases_checked = 0;
  std::vector<Violation> violations;
  std::map<Mr, int> recount;

  bool ok() const { return violations.empty(); }
};

/// `max_variants` > 0 also enforces the per-(seed, MR) cap.
ValidationReport validate_suite(const TestSuite& suite, const std::vector<Schema>& schemas,
                                const std::vector<Example>& seeds, int max_variants = 0, int jobs = 0);
ValidationReport validate_suite_serial(const TestSuite& suite, const std::vector<Schema>& schemas,
                                       const std::vector<Example>& seeds, int max_variants = 0);
std::string serialize_validation(const ValidationReport& report);

}  // namespace teql
