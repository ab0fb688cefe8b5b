#include "teql/lexicon.hpp"

#include <algorithm>

#include "teql/util.hpp"

namespace teql {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::pair<sql::Agg, const char*> kAggKeys[] = {
    {sql::Agg::Min, "MIN"}, {sql::Agg::Max, "MAX"}, {sql::Agg::Count, "COUNT"},
    {sql::Agg::Sum, "SUM"}, {sql::Agg::Avg, "AVG"}};

void check_phrase(const std::string& phrase, const char* where) {
  if (phrase.empty()) throw DataError(std::string("empty phrase in ") + where);
  if (normalize_phrase(phrase) != phrase) {
    throw DataError(std::string("phrase '") + phrase + "' in " + where + " is not lowercase/whitespace-normalized");
  }
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  for (const auto& item : j.at(key)) out.push_back(item.get<std::string>());
  return out;
}

}  // namespace

void compute_opaque(SynonymGroups& groups) {
  std::map<std::string, int> membership;
  for (const auto& [agg, phrases] : groups.groups) {
    std::set<std::string> unique(phrases.begin(), phrases.end());
    for (const auto& p : unique) ++membership[p];
  }
  groups.opaque_phrases.clear();
  for (const auto& [phrase, n] : membership) {
    if (n >= 2) groups.opaque_phrases.insert(phrase);
  }
}

void validate_lexicon(const UtteranceLexicon& lex) {
  const std::pair<const std::vector<std::string>*, const char*> sets[] = {
      {&lex.prefixes.common_interrogative, "common_interrogative"},
      {&lex.prefixes.common_declarative, "common_declarative"},
      {&lex.prefixes.special_interrogative, "special_interrogative"},
      {&lex.prefixes.special_declarative, "special_declarative"}};
  std::map<std::string, const char*> owner;
  for (const auto& [phrases, name] : sets) {
    for (const auto& p : *phrases) {
      check_phrase(p, name);
      auto [it, inserted] = owner.emplace(p, name);
      if (!inserted) {
        throw DataError("prefix '" + p + "' appears in both " + it->second + " and " + name);
      }
    }
  }
  SynonymGroups recomputed = lex.synonyms;
  for (const auto& [agg, phrases] : lex.synonyms.groups) {
    if (phrases.empty()) throw DataError("empty synonym group for " + std::string(sql::to_string(agg)));
    for (const auto& p : phrases) check_phrase(p, "synonym groups");
  }
  compute_opaque(recomputed);
  if (recomputed.opaque_phrases != lex.synonyms.opaque_phrases) {
    throw DataError("opaque phrases must be exactly the phrases shared by two or more aggregates");
  }
}

UtteranceLexicon default_utterance_lexicon() {
  UtteranceLexicon lex;
  lex.prefixes.common_interrogative = {"what is", "what are", "which is", "which are"};
  lex.prefixes.common_declarative = {"tell me", "return", "find", "list"};
  lex.prefixes.special_interrogative = {"when", "where", "how many"};
  lex.prefixes.special_declarative = {"count"};
  lex.synonyms.groups = {
      {sql::Agg::Min, {"minimal", "minimum", "lowest", "smallest"}},
      {sql::Agg::Max, {"maximal", "maximum", "highest", "largest"}},
      {sql::Agg::Count,
       {"the number of", "the total number of", "the count of", "the total count of", "the amount of",
        "the total amount of"}},
      {sql::Agg::Sum, {"the sum of", "the total sum of", "the amount of", "the total amount of"}},
      {sql::Agg::Avg, {"the mean of", "the average of"}},
  };
  compute_opaque(lex.synonyms);
  return lex;
}

UtteranceLexicon utterance_lexicon_from_json(const json& j) {
  UtteranceLexicon lex;
  try {
    const json& p = j.at("prefixes");
    lex.prefixes.common_interrogative = string_list(p, "common_interrogative");
    lex.prefixes.common_declarative = string_list(p, "common_declarative");
    lex.prefixes.special_interrogative = string_list(p, "special_interrogative");
    lex.prefixes.special_declarative = string_list(p, "special_declarative");
    const json& aggs = j.at("aggregates");
    for (auto it = aggs.begin(); it != aggs.end(); ++it) {
      const bool known = std::any_of(std::begin(kAggKeys), std::end(kAggKeys),
                                     [&](const auto& k) { return it.key() == k.second; });
      if (!known) throw DataError("unknown aggregate '" + it.key() + "' in lexicon");
    }
    for (const auto& [agg, key] : kAggKeys) {
      if (aggs.contains(key)) lex.synonyms.groups.emplace_back(agg, string_list(aggs, key));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("lexicon: ") + e.what());
  }
  compute_opaque(lex.synonyms);
  validate_lexicon(lex);
  return lex;
}

ordered_json to_json(const UtteranceLexicon& lex) {
  ordered_json prefixes{{"common_interrogative", lex.prefixes.common_interrogative},
                        {"common_declarative", lex.prefixes.common_declarative},
                        {"special_interrogative", lex.prefixes.special_interrogative},
                        {"special_declarative", lex.prefixes.special_declarative}};
  ordered_json aggs = ordered_json::object();
  for (const auto& [agg, phrases] : lex.synonyms.groups) aggs[to_upper(sql::to_string(agg))] = phrases;
  return ordered_json{{"prefixes", std::move(prefixes)}, {"aggregates", std::move(aggs)}};
}

UtteranceLexicon load_utterance_lexicon(const std::filesystem::path& path) {
  try {
    return utterance_lexicon_from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": parse error at byte " + std::to_string(e.byte));
  }
}

RenameLexicon default_rename_lexicon() {
  return RenameLexicon{
      {"address", {"location"}},
      {"age", {"years"}},
      {"city", {"town"}},
      {"country", {"location", "nation"}},
      {"date", {"day"}},
      {"description", {"details"}},
      {"email", {"mail"}},
      {"id", {"identifier"}},
      {"name", {"title"}},
      {"phone", {"telephone"}},
      {"price", {"cost"}},
      {"salary", {"wage"}},
      {"year", {"yr"}},
  };
}

RenameLexicon rename_lexicon_from_json(const json& j) {
  RenameLexicon out;
  if (!j.is_object()) throw DataError("rename lexicon must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = it.key();
    check_phrase(key, "rename lexicon");
    std::vector<std::string> values;
    for (const auto& v : it.value()) {
      values.push_back(v.get<std::string>());
      check_phrase(values.back(), "rename lexicon");
    }
    if (values.empty()) throw DataError("rename lexicon entry '" + key + "' has no synonyms");
    out.emplace(key, std::move(values));
  }
  return out;
}

ordered_json to_json(const RenameLexicon& lexicon) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : lexicon) j[k] = v;
  return j;
}

RenameLexicon load_rename_lexicon(const std::filesystem::path& path) {
  try {
    return rename_lexicon_from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": parse error at byte " + std::to_string(e.byte));
  }
}

AttributeKB::AttributeKB(std::map<std::string, std::vector<Attribute>> entries) : entries_(std::move(entries)) {
  for (const auto& [entity, attrs] : entries_) {
    if (attrs.empty()) throw DataError("attribute KB entry '" + entity + "' is empty");
    for (const auto& [name, type] : attrs) {
      const bool valid = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0])) &&
                         std::all_of(name.begin(), name.end(), [](char c) {
                           return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                         });
      if (!valid) throw DataError("attribute '" + name + "' of '" + entity + "' is not a valid identifier");
    }
  }
}

std::vector<Attribute> AttributeKB::attributes(std::string_view entity) const {
  auto it = entries_.find(std::string(entity));
  return it == entries_.end() ? std::vector<Attribute>{} : it->second;
}

AttributeKB default_attribute_kb() {
  using C = ColType;
  return AttributeKB({
      {"airline", {{"country", C::Text}, {"founded_year", C::Number}}},
      {"airport", {{"country", C::Text}, {"elevation", C::Number}}},
      {"car", {{"engine_id", C::Number}, {"model_year", C::Number}, {"color", C::Text}}},
      {"city", {{"population", C::Number}, {"area", C::Number}}},
      {"concert", {{"ticket_price", C::Number}, {"duration", C::Number}}},
      {"country", {{"continent", C::Text}, {"population", C::Number}}},
      {"course", {{"credits", C::Number}, {"level", C::Text}}},
      {"department", {{"budget", C::Number}, {"location", C::Text}}},
      {"employee", {{"salary", C::Number}, {"hire_date", C::Time}, {"email", C::Text}}},
      {"flight", {{"duration", C::Number}, {"gate", C::Text}}},
      {"movie", {{"genre", C::Text}, {"runtime", C::Number}}},
      {"singer", {{"birth_place", C::Text}, {"height", C::Number}, {"genre", C::Text}}},
      {"stadium", {{"opening_year", C::Number}, {"surface", C::Text}}},
      {"student", {{"gpa", C::Number}, {"major", C::Text}, {"email", C::Text}}},
      {"teacher", {{"office", C::Text}, {"salary", C::Number}}},
      {"vendor", {{"address", C::Text}, {"phone", C::Text}}},
  });
}

AttributeKB attribute_kb_from_json(const json& j) {
  if (!j.is_object()) throw DataError("attribute KB must be a JSON object");
  std::map<std::string, std::vector<Attribute>> entries;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::vector<Attribute> attrs;
      for (const auto& pair : it.value()) {
        attrs.emplace_back(pair.at(0).get<std::string>(), parse_col_type(pair.at(1).get<std::string>()));
      }
      entries.emplace(to_lower(it.key()), std::move(attrs));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("attribute KB: ") + e.what());
  }
  return AttributeKB(std::move(entries));
}

ordered_json to_json(const AttributeKB& kb) {
  ordered_json j = ordered_json::object();
  for (const auto& [entity, attrs] : kb.entries()) {
    ordered_json arr = ordered_json::array();
    for (const auto& [name, type] : attrs) arr.push_back(ordered_json::array({name, std::string(to_string(type))}));
    j[entity] = std::move(arr);
  }
  return j;
}

AttributeKB load_attribute_kb(const std::filesystem::path& path) {
  try {
    return attribute_kb_from_json(json::parse(read_file(path)));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": parse error at byte " + std::to_string(e.byte));
  }
}

std::string singularize(std::string_view noun) {
  std::string s = to_lower(noun);
  auto ends_with = [&](std::string_view suffix) {
    return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with("ies")) return s.substr(0, s.size() - 3) + "y";
  if (ends_with("sses") || ends_with("xes") || ends_with("ches") || ends_with("shes")) return s.substr(0, s.size() - 2);
  if (ends_with("s") && !ends_with("ss") && !ends_with("us") && !ends_with("is")) return s.substr(0, s.size() - 1);
  return s;
}

}  // namespace teql
