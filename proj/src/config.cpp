#include "teql/config.hpp"

#include "json.hpp"
#include "teql/lexicon.hpp"
#include "teql/util.hpp"

namespace teql {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::filesystem::path resolve(const json& j, const char* key, const std::filesystem::path& base) {
  if (!j.contains(key)) return {};
  std::filesystem::path p = j.at(key).get<std::string>();
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw DataError("unknown config key '" + where + it.key() + "'");
    }
  }
}

}  // namespace

AppConfig parse_app_config(std::string_view text, const std::filesystem::path& base_dir) {
  AppConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw DataError("config must be a JSON object");
    reject_unknown(j,
                   {"schemas", "examples", "lexicon", "rename_lexicon", "attribute_kb", "generation", "adapter",
                    "report_format", "output_dir", "max_failure_rate", "jobs", "fluency"},
                   "");
    c.schemas = resolve(j, "schemas", base_dir);
    c.examples = resolve(j, "examples", base_dir);
    c.lexicon = resolve(j, "lexicon", base_dir);
    c.rename_lexicon = resolve(j, "rename_lexicon", base_dir);
    c.attribute_kb = resolve(j, "attribute_kb", base_dir);
    c.output_dir = resolve(j, "output_dir", base_dir);
    if (j.contains("generation")) {
      const json& g = j.at("generation");
      reject_unknown(g,
                     {"enabled_mrs", "max_variants_per_mr", "rng_seed", "include_opaque_synonyms",
                      "opaque_key_drop_primary_keys"},
                     "generation.");
      if (g.contains("enabled_mrs")) {
        c.generation.enabled_mrs.clear();
        for (const auto& name : g.at("enabled_mrs")) {
          auto mr = parse_mr(name.get<std::string>());
          if (!mr) throw DataError("unknown MR '" + name.get<std::string>() + "' in config");
          c.generation.enabled_mrs.insert(*mr);
        }
      }
      c.generation.max_variants_per_mr = g.value("max_variants_per_mr", c.generation.max_variants_per_mr);
      c.generation.rng_seed = g.value("rng_seed", c.generation.rng_seed);
      c.generation.include_opaque_synonyms = g.value("include_opaque_synonyms", c.generation.include_opaque_synonyms);
      c.generation.opaque_key_drop_primary_keys =
          g.value("opaque_key_drop_primary_keys", c.generation.opaque_key_drop_primary_keys);
      validate_config(c.generation);
    }
    if (j.contains("adapter")) {
      const json& a = j.at("adapter");
      reject_unknown(a, {"spec", "timeout", "max_inflight"}, "adapter.");
      c.adapter = a.value("spec", c.adapter);
      c.timeout_seconds = a.value("timeout", c.timeout_seconds);
      c.max_inflight = a.value("max_inflight", c.max_inflight);
    }
    if (j.contains("fluency")) {
      const json& f = j.at("fluency");
      reject_unknown(f, {"order", "k"}, "fluency.");
      c.ngram_order = f.value("order", c.ngram_order);
      c.ngram_k = f.value("k", c.ngram_k);
    }
    c.report_format = j.value("report_format", c.report_format);
    c.max_failure_rate = j.value("max_failure_rate", c.max_failure_rate);
    c.jobs = j.value("jobs", c.jobs);
  } catch (const json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return c;
}

AppConfig load_app_config(const std::filesystem::path& path) {
  return parse_app_config(read_file(path), path.parent_path());
}

std::string serialize_app_config(const AppConfig& c) {
  ordered_json g;
  std::vector<std::string> mrs;
  for (Mr mr : c.generation.enabled_mrs) mrs.emplace_back(mr_code(mr));
  g["enabled_mrs"] = mrs;
  g["max_variants_per_mr"] = c.generation.max_variants_per_mr;
  g["rng_seed"] = c.generation.rng_seed;
  g["include_opaque_synonyms"] = c.generation.include_opaque_synonyms;
  g["opaque_key_drop_primary_keys"] = c.generation.opaque_key_drop_primary_keys;
  ordered_json j;
  j["schemas"] = c.schemas.string();
  j["examples"] = c.examples.string();
  j["lexicon"] = c.lexicon.string();
  j["rename_lexicon"] = c.rename_lexicon.string();
  j["attribute_kb"] = c.attribute_kb.string();
  j["generation"] = std::move(g);
  j["adapter"] = ordered_json{{"spec", c.adapter}, {"timeout", c.timeout_seconds}, {"max_inflight", c.max_inflight}};
  j["report_format"] = c.report_format;
  j["output_dir"] = c.output_dir.string();
  j["max_failure_rate"] = c.max_failure_rate;
  j["fluency"] = ordered_json{{"order", c.ngram_order}, {"k", c.ngram_k}};
  return j.dump(2) + "\n";
}

std::string app_config_fingerprint(const AppConfig& config) {
  return fingerprint(serialize_app_config(config));
}

void check_paths(const AppConfig& c) {
  for (const auto* p : {&c.schemas, &c.examples, &c.lexicon, &c.rename_lexicon, &c.attribute_kb}) {
    if (!p->empty() && !std::filesystem::exists(*p)) throw DataError("path does not exist: " + p->string());
  }
}

GenerationResources load_resources(const AppConfig& c) {
  GenerationResources r;
  if (!c.lexicon.empty()) r.lexicon = load_utterance_lexicon(c.lexicon);
  if (!c.rename_lexicon.empty()) r.renames = load_rename_lexicon(c.rename_lexicon);
  if (!c.attribute_kb.empty()) r.kb = load_attribute_kb(c.attribute_kb);
  return r;
}

}  // namespace teql
