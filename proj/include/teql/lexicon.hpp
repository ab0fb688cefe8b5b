#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "teql/schema.hpp"
#include "teql/sql.hpp"

namespace teql {

/// Utterance prefixes by category. Phrases are lowercase and
/// whitespace-normalized; the four sets are pairwise disjoint.
struct PrefixLexicon {
  std::vector<std::string> common_interrogative;
  std::vector<std::string> common_declarative;
  std::vector<std::string> special_interrogative;
  std::vector<std::string> special_declarative;

  bool operator==(const PrefixLexicon&) const = default;
};

/// Aggregate-indicating phrases. A phrase listed under more than one
/// aggregate is opaque (e.g. "the amount of" for COUNT and SUM).
struct SynonymGroups {
  std::vector<std::pair<sql::Agg, std::vector<std::string>>> groups;
  std::set<std::string> opaque_phrases;

  bool operator==(const SynonymGroups&) const = default;
};

struct UtteranceLexicon {
  PrefixLexicon prefixes;
  SynonymGroups synonyms;

  bool operator==(const UtteranceLexicon&) const = default;
};

void validate_lexicon(const UtteranceLexicon& lexicon);
/// Recomputes opaque_phrases from group membership.
void compute_opaque(SynonymGroups& groups);

UtteranceLexicon default_utterance_lexicon();
UtteranceLexicon utterance_lexicon_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const UtteranceLexicon& lexicon);
UtteranceLexicon load_utterance_lexicon(const std::filesystem::path& path);

/// Column-name synonyms: phrase -> replacement phrases. Keys are lowercase,
/// multi-word keys use single spaces.
using RenameLexicon = std::map<std::string, std::vector<std::string>>;

RenameLexicon default_rename_lexicon();
RenameLexicon rename_lexicon_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const RenameLexicon& lexicon);
RenameLexicon load_rename_lexicon(const std::filesystem::path& path);

using Attribute = std::pair<std::string, ColType>;

/// Source of plausible attributes for an entity noun.
class AttributeProvider {
 public:
  virtual ~AttributeProvider() = default;
  virtual std::vector<Attribute> attributes(std::string_view entity) const = 0;
};

/// Static entity -> attributes table backed by a JSON file.
class AttributeKB : public AttributeProvider {
 public:
  AttributeKB() = default;
  explicit AttributeKB(std::map<std::string, std::vector<Attribute>> entries);

  std::vector<Attribute> attributes(std::string_view entity) const override;
  const std::map<std::string, std::vector<Attribute>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::vector<Attribute>> entries_;
};

AttributeKB default_attribute_kb();
AttributeKB attribute_kb_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const AttributeKB& kb);
AttributeKB load_attribute_kb(const std::filesystem::path& path);

/// Naive English singular of a lowercase noun ("vendors" -> "vendor").
std::string singularize(std::string_view noun);

}  // namespace teql
