#include "teql/mr_utterance.hpp"

#include <algorithm>
#include <cctype>

#include "teql/util.hpp"

namespace teql {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

std::size_t skip_space(std::string_view s, std::size_t pos) {
  while (pos < s.size() && is_space(s[pos])) ++pos;
  return pos;
}

/// Body of the utterance after a matched prefix: leading whitespace and
/// commas dropped.
std::string remainder_after(std::string_view u, std::size_t end) {
  while (end < u.size() && (is_space(u[end]) || u[end] == ',')) ++end;
  return std::string(u.substr(end));
}

std::string capitalize_like(std::string_view source, std::string replacement) {
  if (!source.empty() && std::isupper(static_cast<unsigned char>(source[0])) && !replacement.empty()) {
    replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
  }
  return replacement;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (is_word_char(c)) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::optional<std::size_t> match_phrase_at(std::string_view text, std::size_t pos, std::string_view phrase) {
  if (pos > text.size() || phrase.empty()) return std::nullopt;
  if (pos > 0 && is_word_char(text[pos - 1]) && is_word_char(phrase.front())) return std::nullopt;
  std::size_t i = pos;
  for (std::size_t k = 0; k < phrase.size(); ++k) {
    const char p = phrase[k];
    if (p == ' ') {
      if (i >= text.size() || !is_space(text[i])) return std::nullopt;
      i = skip_space(text, i);
      continue;
    }
    if (i >= text.size() ||
        std::tolower(static_cast<unsigned char>(text[i])) != std::tolower(static_cast<unsigned char>(p))) {
      return std::nullopt;
    }
    ++i;
  }
  if (i < text.size() && is_word_char(text[i]) && is_word_char(phrase.back())) return std::nullopt;
  return i;
}

std::optional<PrefixMatch> detect_prefix(std::string_view utterance, const PrefixLexicon& lex) {
  const std::size_t start = skip_space(utterance, 0);
  const std::pair<const std::vector<std::string>*, PrefixKind> sets[] = {
      {&lex.common_interrogative, PrefixKind::CommonInterrogative},
      {&lex.common_declarative, PrefixKind::CommonDeclarative},
      {&lex.special_interrogative, PrefixKind::SpecialInterrogative},
      {&lex.special_declarative, PrefixKind::SpecialDeclarative}};
  std::optional<PrefixMatch> best;
  for (const auto& [phrases, kind] : sets) {
    for (const auto& phrase : *phrases) {
      auto end = match_phrase_at(utterance, start, phrase);
      if (!end) continue;
      if (!best || phrase.size() > best->phrase.size()) best = PrefixMatch{kind, phrase, start, *end};
    }
  }
  return best;
}

std::vector<UtteranceEdit> prefix_insert(std::string_view utterance, const PrefixLexicon& lex) {
  std::vector<UtteranceEdit> out;
  auto match = detect_prefix(utterance, lex);
  if (!match || (match->kind != PrefixKind::CommonInterrogative && match->kind != PrefixKind::SpecialInterrogative)) {
    return out;
  }
  const std::string body = trim(utterance);
  for (const auto& prefix : lex.common_declarative) {
    out.push_back(UtteranceEdit{prefix + " " + body, "inserted prefix '" + prefix + "'"});
  }
  return out;
}

std::vector<UtteranceEdit> prefix_remove(std::string_view utterance, const PrefixLexicon& lex) {
  std::vector<UtteranceEdit> out;
  auto match = detect_prefix(utterance, lex);
  if (!match || !match->is_common()) return out;
  std::string rest = trim(remainder_after(utterance, match->end));
  if (rest.empty()) return out;
  out.push_back(UtteranceEdit{std::move(rest), "removed prefix '" + match->phrase + "'"});
  return out;
}

std::vector<UtteranceEdit> prefix_substitute(std::string_view utterance, const PrefixLexicon& lex) {
  std::vector<UtteranceEdit> out;
  auto match = detect_prefix(utterance, lex);
  if (!match || !match->is_common()) return out;
  const std::string rest = trim(remainder_after(utterance, match->end));
  if (rest.empty()) return out;
  for (const auto* phrases : {&lex.common_interrogative, &lex.common_declarative}) {
    for (const auto& alt : *phrases) {
      if (alt == match->phrase) continue;
      out.push_back(UtteranceEdit{alt + " " + rest, "replaced prefix '" + match->phrase + "' with '" + alt + "'"});
    }
  }
  return out;
}

std::vector<UtteranceEdit> synonym_substitute(std::string_view utterance, const SynonymGroups& syn,
                                              bool include_opaque) {
  std::vector<UtteranceEdit> out;
  std::size_t pos = 0;
  while (pos < utterance.size()) {
    if (pos > 0 && is_word_char(utterance[pos - 1])) {
      ++pos;
      continue;
    }
    // Longest phrase starting here, across all groups.
    std::string best;
    std::size_t best_end = 0;
    for (const auto& [agg, phrases] : syn.groups) {
      for (const auto& phrase : phrases) {
        if (phrase.size() <= best.size()) continue;
        if (auto end = match_phrase_at(utterance, pos, phrase)) {
          best = phrase;
          best_end = *end;
        }
      }
    }
    if (best.empty()) {
      ++pos;
      continue;
    }
    // An opaque source phrase has no single intended aggregate, so it is
    // never rewritten.
    if (!syn.opaque_phrases.count(best)) {
      const std::string_view original = utterance.substr(pos, best_end - pos);
      for (const auto& [agg, phrases] : syn.groups) {
        if (std::find(phrases.begin(), phrases.end(), best) == phrases.end()) continue;
        for (const auto& alt : phrases) {
          if (alt == best) continue;
          if (!include_opaque && syn.opaque_phrases.count(alt)) continue;
          std::string rewritten = std::string(utterance.substr(0, pos)) + capitalize_like(original, alt) +
                                  std::string(utterance.substr(best_end));
          out.push_back(UtteranceEdit{std::move(rewritten), "replaced '" + best + "' with '" + alt + "' (" +
                                                                to_upper(sql::to_string(agg)) + ")"});
        }
      }
    }
    pos = best_end;
  }
  return out;
}

}  // namespace teql
