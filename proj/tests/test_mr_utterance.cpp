#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "teql/lexicon.hpp"
#include "teql/mr_utterance.hpp"

using namespace teql;

namespace {

std::vector<std::string> texts(const std::vector<UtteranceEdit>& edits) {
  std::vector<std::string> out;
  for (const auto& e : edits) out.push_back(e.utterance);
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

const UtteranceLexicon& lex() {
  static const UtteranceLexicon l = default_utterance_lexicon();
  return l;
}

}  // namespace

TEST_CASE("default lexicon holds the published phrase sets") {
  const auto& p = lex().prefixes;
  CHECK(p.common_interrogative == std::vector<std::string>{"what is", "what are", "which is", "which are"});
  CHECK(p.common_declarative == std::vector<std::string>{"tell me", "return", "find", "list"});
  CHECK(p.special_interrogative == std::vector<std::string>{"when", "where", "how many"});
  CHECK(p.special_declarative == std::vector<std::string>{"count"});
  CHECK(lex().synonyms.opaque_phrases == std::set<std::string>{"the amount of", "the total amount of"});
  CHECK_NOTHROW(validate_lexicon(lex()));
}

TEST_CASE("lexicon validation rejects overlaps and bad phrases") {
  auto bad = lex();
  bad.prefixes.common_declarative.push_back("what is");
  CHECK_THROWS_AS(validate_lexicon(bad), DataError);
  bad = lex();
  bad.prefixes.special_declarative.push_back("Count Me");
  CHECK_THROWS_AS(validate_lexicon(bad), DataError);
  bad = lex();
  bad.synonyms.opaque_phrases.insert("the mean of");
  CHECK_THROWS_AS(validate_lexicon(bad), DataError);
}

TEST_CASE("lexicon JSON round-trips and the shipped file equals the built-in") {
  CHECK(utterance_lexicon_from_json(to_json(lex())) == lex());
  CHECK(load_utterance_lexicon(testing::data_dir() / "lexicon.json") == lex());
  CHECK(load_rename_lexicon(testing::data_dir() / "rename_lexicon.json") == default_rename_lexicon());
  CHECK(load_attribute_kb(testing::data_dir() / "attribute_kb.json").entries() == default_attribute_kb().entries());
}

TEST_CASE("prefix insertion") {
  const auto out = texts(prefix_insert("what is the age of all singers?", lex().prefixes));
  CHECK(out.size() == lex().prefixes.common_declarative.size());
  CHECK(contains(out, "tell me what is the age of all singers?"));
  CHECK(prefix_insert("list all singers", lex().prefixes).empty());
  CHECK(texts(prefix_insert("How many singers are there?", lex().prefixes)).front() ==
        "tell me How many singers are there?");
  CHECK(prefix_insert("singers older than 30", lex().prefixes).empty());
}

TEST_CASE("prefix removal") {
  CHECK(texts(prefix_remove("what is the age of all singers?", lex().prefixes)) ==
        std::vector<std::string>{"the age of all singers?"});
  CHECK(prefix_remove("how many singers are there?", lex().prefixes).empty());
  CHECK(prefix_remove("Count the singers", lex().prefixes).empty());
  CHECK(texts(prefix_remove("tell me the names", lex().prefixes)) == std::vector<std::string>{"the names"});
  CHECK(texts(prefix_remove("List, the names", lex().prefixes)) == std::vector<std::string>{"the names"});
  CHECK(prefix_remove("what is", lex().prefixes).empty());
  CHECK(prefix_remove("listing of cars", lex().prefixes).empty());
}

TEST_CASE("prefix substitution") {
  const auto out = texts(prefix_substitute("what is the age of all singers?", lex().prefixes));
  const std::size_t common =
      lex().prefixes.common_interrogative.size() + lex().prefixes.common_declarative.size();
  CHECK(out.size() == common - 1);
  CHECK(contains(out, "tell me the age of all singers?"));
  CHECK_FALSE(contains(out, "what is the age of all singers?"));

  PrefixLexicon tiny;
  tiny.common_interrogative = {"what is"};
  CHECK(prefix_substitute("what is the age?", tiny).empty());
}

TEST_CASE("insert then remove returns the original") {
  for (const char* u : {"what is the age of all singers?", "Which are the  cars?", "where is it?"}) {
    for (const auto& edit : prefix_insert(u, lex().prefixes)) {
      const auto back = prefix_remove(edit.utterance, lex().prefixes);
      REQUIRE(back.size() == 1);
      CHECK(normalize_phrase(back[0].utterance) == normalize_phrase(u));
    }
  }
}

TEST_CASE("synonym substitution") {
  const auto& syn = lex().synonyms;
  CHECK(contains(texts(synonym_substitute("what is the sum of ages?", syn, true)), "what is the amount of ages?"));
  CHECK_FALSE(contains(texts(synonym_substitute("what is the sum of ages?", syn, false)), "what is the amount of ages?"));

  const auto mins = texts(synonym_substitute("minimal age", syn));
  CHECK(mins == std::vector<std::string>{"minimum age", "lowest age", "smallest age"});

  CHECK(synonym_substitute("name all singers", syn).empty());
  CHECK(synonym_substitute("give a summary of the average of ages", syn).size() == 1);
  for (const auto& u : texts(synonym_substitute("give a summary of the average of ages", syn))) {
    CHECK(u.find("summary") != std::string::npos);
  }
  // Capitalization of the first letter carries over.
  CHECK(contains(texts(synonym_substitute("Minimal age", syn)), "Lowest age"));
}

TEST_CASE("opaque phrases are never rewritten as a source") {
  const auto out = synonym_substitute("what is the amount of budget?", lex().synonyms);
  CHECK(out.empty());
}

TEST_CASE("one substitution site per case") {
  const auto out = texts(synonym_substitute("the minimum and the maximum age", lex().synonyms));
  CHECK(out.size() == 6);
  for (const auto& u : out) {
    const bool min_kept = u.find("minimum") != std::string::npos;
    const bool max_kept = u.find("maximum") != std::string::npos;
    CHECK(min_kept != max_kept);
  }
}

TEST_CASE("tokenizer lowercases and splits on punctuation") {
  CHECK(tokenize("What's the AGE, of singers?") == std::vector<std::string>{"what's", "the", "age", "of", "singers"});
  CHECK(tokenize("  ").empty());
}

TEST_CASE("utterance MRs are deterministic") {
  const char* u = "What is the total number of singers?";
  CHECK(synonym_substitute(u, lex().synonyms) == synonym_substitute(u, lex().synonyms));
  CHECK(prefix_substitute(u, lex().prefixes) == prefix_substitute(u, lex().prefixes));
}
