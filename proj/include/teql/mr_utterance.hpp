#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teql/lexicon.hpp"

namespace teql {

/// A rewritten utterance plus a short description of the edit.
struct UtteranceEdit {
  std::string utterance;
  std::string provenance;

  bool operator==(const UtteranceEdit&) const = default;
};

enum class PrefixKind { CommonInterrogative, CommonDeclarative, SpecialInterrogative, SpecialDeclarative };

struct PrefixMatch {
  PrefixKind kind;
  std::string phrase;
  std::size_t begin = 0;  // offset of the phrase in the utterance
  std::size_t end = 0;    // one past the phrase

  bool is_common() const {
    return kind == PrefixKind::CommonInterrogative || kind == PrefixKind::CommonDeclarative;
  }
};

/// Lowercase word tokens; any non-word character separates tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Case-insensitive match of `phrase` at byte `pos`, tolerant of extra
/// whitespace between words and requiring word boundaries on both ends.
/// Returns the end offset on success.
std::optional<std::size_t> match_phrase_at(std::string_view text, std::size_t pos, std::string_view phrase);

/// Longest prefix of any category at the start of the utterance.
std::optional<PrefixMatch> detect_prefix(std::string_view utterance, const PrefixLexicon& lex);

std::vector<UtteranceEdit> prefix_insert(std::string_view utterance, const PrefixLexicon& lex);
std::vector<UtteranceEdit> prefix_remove(std::string_view utterance, const PrefixLexicon& lex);
std::vector<UtteranceEdit> prefix_substitute(std::string_view utterance, const PrefixLexicon& lex);
std::vector<UtteranceEdit> synonym_substitute(std::string_view utterance, const SynonymGroups& syn,
                                              bool include_opaque = true);

}  // namespace teql
