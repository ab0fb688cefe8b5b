#include "teql/generator.hpp"

#include <omp.h>

#include <algorithm>
#include <optional>
#include <sstream>

#include "teql/mr_schema.hpp"
#include "teql/mr_utterance.hpp"
#include "teql/sql.hpp"
#include "teql/util.hpp"

namespace teql {

using nlohmann::json;
using nlohmann::ordered_json;

void validate_config(const GenerationConfig& config) {
  if (config.enabled_mrs.empty()) throw DataError("generation config enables no metamorphic relation");
  if (config.max_variants_per_mr < 1) throw DataError("max_variants_per_mr must be >= 1");
}

std::string config_fingerprint(const GenerationConfig& config, const GenerationResources& resources) {
  ordered_json j;
  std::vector<std::string> mrs;
  for (Mr mr : config.enabled_mrs) mrs.emplace_back(mr_code(mr));
  j["enabled_mrs"] = mrs;
  j["max_variants_per_mr"] = config.max_variants_per_mr;
  j["rng_seed"] = config.rng_seed;
  j["include_opaque_synonyms"] = config.include_opaque_synonyms;
  j["opaque_key_drop_primary_keys"] = config.opaque_key_drop_primary_keys;
  j["lexicon"] = fingerprint(to_json(resources.lexicon).dump());
  j["renames"] = fingerprint(to_json(resources.renames).dump());
  j["kb"] = resources.attribute_provider ? "external" : fingerprint(to_json(resources.kb).dump());
  return fingerprint(j.dump());
}

std::string content_fingerprint(const TransformedCase& c) {
  return fingerprint(c.utterance + '\x1f' + serialize_schema(c.schema));
}

namespace {

std::string case_id(const std::string& seed_id, Mr mr, std::size_t variant) {
  return seed_id + ":" + std::string(mr_code(mr)) + ":" + std::to_string(variant);
}

std::vector<UtteranceEdit> utterance_edits(Mr mr, const Example& seed, const GenerationConfig& config,
                                           const GenerationResources& res) {
  switch (mr) {
    case Mr::PrefixInsertion: return prefix_insert(seed.utterance, res.lexicon.prefixes);
    case Mr::PrefixRemoval: return prefix_remove(seed.utterance, res.lexicon.prefixes);
    case Mr::PrefixSubstitution: return prefix_substitute(seed.utterance, res.lexicon.prefixes);
    case Mr::SynonymSubstitution:
      return synonym_substitute(seed.utterance, res.lexicon.synonyms, config.include_opaque_synonyms);
    default: return {};
  }
}

std::vector<SchemaRewrite> schema_rewrites(Mr mr, const Schema& schema, const sql::UsageSet& usage,
                                           std::uint64_t seed, const GenerationConfig& config,
                                           const GenerationResources& res, std::vector<std::string>* notes) {
  const int cap = config.max_variants_per_mr;
  switch (mr) {
    case Mr::Normalization: return normalize(schema, usage, cap, seed);
    case Mr::Flattening: return flatten(schema, usage, cap);
    case Mr::OpaqueKey: return opaque_key(schema, cap, config.opaque_key_drop_primary_keys);
    case Mr::TableShuffle: return table_shuffle(schema, cap, seed);
    case Mr::ColumnShuffle: return column_shuffle(schema, cap, seed);
    case Mr::ColumnRemoval: return column_remove(schema, usage, cap);
    case Mr::ColumnRenaming: return column_rename(schema, usage, res.renames, cap, notes);
    case Mr::ColumnInsertion: return column_insert(schema, res.attributes(), cap);
    default: return {};
  }
}

/// Gold SQL still binds and refers to the same named tables and columns.
bool binding_preserved(const sql::Query& gold, const sql::NamedUsage& expected, const Schema& schema,
                       std::string* why) {
  try {
    validate_schema(schema);
    const auto usage = sql::bind_and_usage(gold, schema);
    if (sql::named_usage(usage, schema) == expected) return true;
    if (why) *why = "gold query resolves to different names";
  } catch (const std::exception& e) {
    if (why) *why = e.what();
  }
  return false;
}

}  // namespace

std::vector<TransformedCase> generate_for_seed(const Example& seed, const Schema& schema,
                                               const GenerationConfig& config, const GenerationResources& res,
                                               std::vector<std::string>* notes) {
  const sql::Query gold = sql::parse_sql(seed.gold_sql);
  const sql::UsageSet usage = sql::bind_and_usage(gold, schema);
  const sql::NamedUsage expected = sql::named_usage(usage, schema);
  const std::string seed_schema_text = serialize_schema(schema);
  const std::string seed_fp = fingerprint(seed.utterance + '\x1f' + seed_schema_text);
  const std::size_t cap = static_cast<std::size_t>(config.max_variants_per_mr);

  std::vector<TransformedCase> out;
  for (Mr mr : config.enabled_mrs) {
    std::set<std::string> seen{seed_fp};
    std::size_t produced = 0;
    auto accept = [&](std::string utterance, Schema s, std::string provenance) {
      TransformedCase c;
      c.seed_id = seed.example_id;
      c.mr = mr;
      c.utterance = std::move(utterance);
      c.schema = std::move(s);
      c.gold_sql = seed.gold_sql;
      c.provenance = std::move(provenance);
      if (!seen.insert(content_fingerprint(c)).second) return;
      c.case_id = case_id(seed.example_id, mr, produced++);
      out.push_back(std::move(c));
    };

    if (is_utterance_mr(mr)) {
      for (auto& edit : utterance_edits(mr, seed, config, res)) {
        if (produced >= cap) break;
        if (edit.utterance == seed.utterance) continue;
        accept(std::move(edit.utterance), schema, std::move(edit.provenance));
      }
      continue;
    }

    const std::uint64_t mr_seed = derive_seed(config.rng_seed, seed.example_id, static_cast<std::uint64_t>(mr_order(mr)));
    for (auto& rw : schema_rewrites(mr, schema, usage, mr_seed, config, res, notes)) {
      if (produced >= cap) break;
      std::string why;
      if (!binding_preserved(gold, expected, rw.after, &why)) {
        if (notes) notes->push_back(seed.example_id + " " + std::string(mr_code(mr)) + ": dropped '" + rw.provenance + "': " + why);
        continue;
      }
      accept(seed.utterance, std::move(rw.after), std::move(rw.provenance));
    }
  }
  return out;
}

namespace {

struct SeedResult {
  std::vector<TransformedCase> cases;
  std::optional<SkippedExample> skipped;
};

SeedResult run_seed(const Example& ex, const std::vector<Schema>& schemas, const GenerationConfig& config,
                    const GenerationResources& res) {
  SeedResult r;
  const Schema* schema = find_schema(schemas, ex.db_id);
  if (!schema) {
    r.skipped = SkippedExample{ex.example_id, ex.db_id, "unknown db_id"};
    return r;
  }
  try {
    r.cases = generate_for_seed(ex, *schema, config, res);
  } catch (const std::exception& e) {
    r.skipped = SkippedExample{ex.example_id, ex.db_id, e.what()};
  }
  return r;
}

TestSuite merge(std::vector<SeedResult>& results, const GenerationConfig& config, const GenerationResources& res) {
  TestSuite suite;
  suite.config_fingerprint = config_fingerprint(config, res);
  for (Mr mr : config.enabled_mrs) suite.counts_by_mr[mr] = 0;
  for (auto& r : results) {
    if (r.skipped) {
      suite.skipped.push_back(std::move(*r.skipped));
      continue;
    }
    ++suite.seed_count;
    for (auto& c : r.cases) {
      ++suite.counts_by_mr[c.mr];
      suite.cases.push_back(std::move(c));
    }
  }
  return suite;
}

}  // namespace

TestSuite generate(const std::vector<Example>& examples, const std::vector<Schema>& schemas,
                   const GenerationConfig& config, const GenerationResources& resources, int jobs) {
  validate_config(config);
  std::vector<SeedResult> results(examples.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(examples.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    results[static_cast<std::size_t>(i)] = run_seed(examples[static_cast<std::size_t>(i)], schemas, config, resources);
  }
  return merge(results, config, resources);
}

TestSuite generate_serial(const std::vector<Example>& examples, const std::vector<Schema>& schemas,
                          const GenerationConfig& config, const GenerationResources& resources) {
  validate_config(config);
  std::vector<SeedResult> results;
  results.reserve(examples.size());
  for (const Example& ex : examples) results.push_back(run_seed(ex, schemas, config, resources));
  return merge(results, config, resources);
}

// ---- serialization ----

std::string serialize_case(const TransformedCase& c) {
  ordered_json j;
  j["case_id"] = c.case_id;
  j["seed_id"] = c.seed_id;
  j["mr"] = std::string(mr_code(c.mr));
  j["utterance"] = c.utterance;
  j["db_id"] = c.schema.db_id;
  j["schema"] = schema_to_json(c.schema);
  j["gold_sql"] = c.gold_sql;
  j["provenance"] = c.provenance;
  return j.dump();
}

TransformedCase parse_case(std::string_view line) {
  TransformedCase c;
  try {
    const json j = json::parse(line);
    c.case_id = j.at("case_id").get<std::string>();
    c.seed_id = j.at("seed_id").get<std::string>();
    auto mr = parse_mr(j.at("mr").get<std::string>());
    if (!mr) throw DataError("unknown mr '" + j.at("mr").get<std::string>() + "'");
    c.mr = *mr;
    c.utterance = j.at("utterance").get<std::string>();
    c.schema = schema_from_json(j.at("schema"));
    if (c.schema.db_id != j.at("db_id").get<std::string>()) throw DataError("db_id differs from inline schema");
    c.gold_sql = j.at("gold_sql").get<std::string>();
    c.provenance = j.value("provenance", std::string());
  } catch (const json::exception& e) {
    throw DataError(std::string("suite line: ") + e.what());
  }
  return c;
}

std::string serialize_suite_lines(const TestSuite& suite) {
  std::string out;
  for (const auto& c : suite.cases) {
    out += serialize_case(c);
    out.push_back('\n');
  }
  return out;
}

std::string TestSuite::fingerprint() const { return teql::fingerprint(serialize_suite_lines(*this)); }

std::string serialize_suite_meta(const TestSuite& suite) {
  ordered_json counts = ordered_json::object();
  for (const auto& [mr, n] : suite.counts_by_mr) counts[std::string(mr_code(mr))] = n;
  ordered_json skipped = ordered_json::array();
  for (const auto& s : suite.skipped) {
    skipped.push_back(ordered_json{{"example_id", s.example_id}, {"db_id", s.db_id}, {"reason", s.reason}});
  }
  ordered_json j;
  j["seed_count"] = suite.seed_count;
  j["case_count"] = suite.cases.size();
  j["counts_by_mr"] = std::move(counts);
  j["config_fingerprint"] = suite.config_fingerprint;
  j["suite_fingerprint"] = suite.fingerprint();
  j["skipped"] = std::move(skipped);
  return j.dump(2) + "\n";
}

std::filesystem::path meta_path(const std::filesystem::path& suite_path) {
  return std::filesystem::path(suite_path.string() + ".meta.json");
}

void write_suite(const TestSuite& suite, const std::filesystem::path& path) {
  write_file(path, serialize_suite_lines(suite));
  write_file(meta_path(path), serialize_suite_meta(suite));
}

TestSuite read_suite(const std::filesystem::path& path) {
  TestSuite suite;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      suite.cases.push_back(parse_case(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  const auto meta = meta_path(path);
  if (std::filesystem::exists(meta)) {
    try {
      const json j = json::parse(read_file(meta));
      suite.seed_count = j.value("seed_count", 0);
      suite.config_fingerprint = j.value("config_fingerprint", std::string());
      for (auto it = j.at("counts_by_mr").begin(); it != j.at("counts_by_mr").end(); ++it) {
        if (auto mr = parse_mr(it.key())) suite.counts_by_mr[*mr] = it.value().get<int>();
      }
      for (const auto& s : j.value("skipped", json::array())) {
        suite.skipped.push_back(SkippedExample{s.at("example_id").get<std::string>(), s.at("db_id").get<std::string>(),
                                               s.at("reason").get<std::string>()});
      }
    } catch (const json::exception& e) {
      throw DataError(meta.string() + ": " + e.what());
    }
  } else {
    std::set<std::string> seeds;
    for (const auto& c : suite.cases) {
      ++suite.counts_by_mr[c.mr];
      seeds.insert(c.seed_id);
    }
    suite.seed_count = static_cast<int>(seeds.size());
  }
  return suite;
}

// ---- validation ----

namespace {

struct SeedInfo {
  const Example* example = nullptr;
  const Schema* schema = nullptr;
  std::optional<sql::Query> gold;
  sql::NamedUsage usage;
  std::string schema_text;
  std::string error;
};

std::map<std::string, SeedInfo> seed_index(const std::vector<Schema>& schemas, const std::vector<Example>& seeds) {
  std::map<std::string, SeedInfo> out;
  for (const Example& ex : seeds) {
    SeedInfo info;
    info.example = &ex;
    info.schema = find_schema(schemas, ex.db_id);
    if (!info.schema) {
      info.error = "seed schema '" + ex.db_id + "' not found";
    } else {
      try {
        info.gold = sql::parse_sql(ex.gold_sql);
        info.usage = sql::named_usage(sql::bind_and_usage(*info.gold, *info.schema), *info.schema);
        info.schema_text = serialize_schema(*info.schema);
      } catch (const std::exception& e) {
        info.error = std::string("seed gold SQL invalid: ") + e.what();
      }
    }
    out.emplace(ex.example_id, std::move(info));
  }
  return out;
}

std::vector<Violation> check_case(const TransformedCase& c, const std::map<std::string, SeedInfo>& seeds) {
  std::vector<Violation> v;
  auto add = [&](const char* rule, std::string msg) { v.push_back(Violation{c.case_id, rule, std::move(msg)}); };
  auto it = seeds.find(c.seed_id);
  if (it == seeds.end()) {
    add("seed", "unknown seed '" + c.seed_id + "'");
    return v;
  }
  const SeedInfo& seed = it->second;
  if (!seed.error.empty()) {
    add("seed", seed.error);
    return v;
  }
  try {
    validate_schema(c.schema);
  } catch (const std::exception& e) {
    add("schema", e.what());
    return v;
  }
  if (c.gold_sql != seed.example->gold_sql) add("gold", "gold SQL differs from the seed's");
  if (c.schema.db_id != seed.example->db_id) add("db_id", "db_id differs from the seed's");
  try {
    const auto usage = sql::named_usage(sql::bind_and_usage(*seed.gold, c.schema), c.schema);
    if (!(usage == seed.usage)) add("binding", "gold query resolves to different tables/columns");
  } catch (const std::exception& e) {
    add("binding", std::string("gold query no longer binds: ") + e.what());
  }
  const bool schema_same = serialize_schema(c.schema) == seed.schema_text;
  const bool utterance_same = c.utterance == seed.example->utterance;
  if (is_utterance_mr(c.mr)) {
    if (!schema_same) add("one-side", "utterance MR changed the schema");
    if (utterance_same) add("one-side", "utterance MR left the utterance unchanged");
  } else {
    if (!utterance_same) add("one-side", "schema MR changed the utterance");
    if (schema_same) add("one-side", "schema MR left the schema unchanged");
  }
  return v;
}

ValidationReport finish(const TestSuite& suite, std::vector<std::vector<Violation>>& per_case, int max_variants) {
  ValidationReport report;
  report.cases_checked = suite.cases.size();
  for (auto& v : per_case) {
    for (auto& item : v) report.violations.push_back(std::move(item));
  }
  std::set<std::tuple<std::string, Mr, std::string>> seen;
  std::map<std::pair<std::string, Mr>, int> per_pair;
  for (const auto& c : suite.cases) {
    ++report.recount[c.mr];
    if (!seen.emplace(c.seed_id, c.mr, content_fingerprint(c)).second) {
      report.violations.push_back(Violation{c.case_id, "duplicate", "same seed, MR and content as an earlier case"});
    }
    if (max_variants > 0 && ++per_pair[{c.seed_id, c.mr}] == max_variants + 1) {
      report.violations.push_back(
          Violation{c.case_id, "cap", "more than " + std::to_string(max_variants) + " cases for this seed and MR"});
    }
  }
  if (!suite.counts_by_mr.empty()) {
    for (Mr mr : kAllMrs) {
      auto declared = suite.counts_by_mr.find(mr);
      const int want = declared == suite.counts_by_mr.end() ? 0 : declared->second;
      auto got_it = report.recount.find(mr);
      const int got = got_it == report.recount.end() ? 0 : got_it->second;
      if (want != got) {
        report.violations.push_back(Violation{"", "counts", std::string(mr_code(mr)) + " declared " +
                                                                 std::to_string(want) + " but suite has " +
                                                                 std::to_string(got)});
      }
    }
  }
  return report;
}

}  // namespace

ValidationReport validate_suite(const TestSuite& suite, const std::vector<Schema>& schemas,
                                const std::vector<Example>& seeds, int max_variants, int jobs) {
  const auto index = seed_index(schemas, seeds);
  std::vector<std::vector<Violation>> per_case(suite.cases.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(suite.cases.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    per_case[static_cast<std::size_t>(i)] = check_case(suite.cases[static_cast<std::size_t>(i)], index);
  }
  return finish(suite, per_case, max_variants);
}

ValidationReport validate_suite_serial(const TestSuite& suite, const std::vector<Schema>& schemas,
                                       const std::vector<Example>& seeds, int max_variants) {
  const auto index = seed_index(schemas, seeds);
  std::vector<std::vector<Violation>> per_case;
  per_case.reserve(suite.cases.size());
  for (const auto& c : suite.cases) per_case.push_back(check_case(c, index));
  return finish(suite, per_case, max_variants);
}

std::string serialize_validation(const ValidationReport& report) {
  ordered_json violations = ordered_json::array();
  for (const auto& v : report.violations) {
    violations.push_back(ordered_json{{"case_id", v.case_id}, {"rule", v.rule}, {"message", v.message}});
  }
  ordered_json counts = ordered_json::object();
  for (const auto& [mr, n] : report.recount) counts[std::string(mr_code(mr))] = n;
  ordered_json j;
  j["cases_checked"] = report.cases_checked;
  j["violation_count"] = report.violations.size();
  j["recount_by_mr"] = std::move(counts);
  j["violations"] = std::move(violations);
  return j.dump(2) + "\n";
}

}  // namespace teql
