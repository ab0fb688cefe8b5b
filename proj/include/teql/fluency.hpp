#pragma once

#include <array>
#include <chrono>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace teql {

/// log P(token | context), natural log, always finite and <= 0.
class TokenProbabilityModel {
 public:
  virtual ~TokenProbabilityModel() = default;
  virtual double log_prob(const std::string& token, const std::vector<std::string>& context) const = 0;
  virtual std::string describe() const = 0;

  /// Per-token log-probabilities of a whole sequence, each conditioned on its prefix.
  virtual std::vector<double> sequence_log_probs(const std::vector<std::string>& tokens) const;
};

/// Add-k smoothed n-gram model. Contexts are padded with "<s>"; tokens
/// outside the training vocabulary map to "<unk>". A context never seen in
/// training falls back to the next shorter context with factor 1, so every
/// conditional distribution over the vocabulary (including "<unk>") sums to 1.
class NgramModel : public TokenProbabilityModel {
 public:
  static constexpr const char* kUnknown = "<unk>";
  static constexpr const char* kBos = "<s>";

  NgramModel(int order, double k);

  double log_prob(const std::string& token, const std::vector<std::string>& context) const override;
  std::string describe() const override;

  /// Smoothed probability; exposed for normalization checks.
  double prob(const std::string& token, const std::vector<std::string>& context) const;

  int order() const { return order_; }
  double k() const { return k_; }
  /// Vocabulary including "<unk>", sorted.
  const std::vector<std::string>& vocabulary() const { return vocab_list_; }
  double backoff_factor() const { return 1.0; }

 private:
  friend NgramModel train_ngram(const std::vector<std::string>& corpus, int order, double k);

  std::string map_token(const std::string& token) const;

  int order_;
  double k_;
  std::vector<std::string> vocab_list_;
  std::map<std::string, int> vocab_;
  // Key: context tokens joined by '\x1f' (may be empty), then token counts.
  std::map<std::string, std::map<std::string, long>> counts_;
  std::map<std::string, long> context_totals_;
};

NgramModel train_ngram(const std::vector<std::string>& corpus, int order = 3, double k = 0.1);

/// Mean negative log-probability of the utterance's tokens. Throws
/// DataError when the utterance has no tokens.
double entropy(std::string_view utterance, const TokenProbabilityModel& lm);
double entropy_from_log_probs(const std::vector<double>& log_probs);
double fluency_from_entropy(double h);
double fluency(std::string_view utterance, const TokenProbabilityModel& lm);

struct UtteranceScore {
  bool ok = false;
  double entropy = 0.0;
  double fluency = 0.0;
  std::string error;
};

/// Scores distinct utterances once each (cache keyed by content hash), in
/// parallel; `jobs` <= 0 uses the OpenMP default.
std::vector<UtteranceScore> score_corpus(const std::vector<std::string>& utterances, const TokenProbabilityModel& lm,
                                         int jobs = 0);
std::vector<UtteranceScore> score_corpus_serial(const std::vector<std::string>& utterances,
                                                const TokenProbabilityModel& lm);

/// Batch scoring through an external process: JSONL {id, tokens} in,
/// {id, log_probs} out. A missing line or a length mismatch fails only
/// that utterance.
std::vector<UtteranceScore> score_external(const std::vector<std::string>& utterances, const std::string& command,
                                           std::chrono::milliseconds timeout);

struct CorpusSummary {
  std::size_t count = 0;
  std::size_t failed = 0;
  double mean = 0.0;
  double bottom25_mean = 0.0;      // mean of scores at or below the 25th percentile
  std::array<double, 100> cdf{};   // percentile p+1 (nearest rank) at index p
};

CorpusSummary summarize(const std::vector<UtteranceScore>& scores);

struct FluencyReport {
  std::string lm;
  CorpusSummary original;
  CorpusSummary synthetic;
  double relative_delta = 0.0;           // (synthetic - original) / original, on means
  double bottom25_relative_delta = 0.0;
};

FluencyReport corpus_stats(const std::vector<UtteranceScore>& original, const std::vector<UtteranceScore>& synthetic,
                           std::string lm_name);
FluencyReport corpus_stats(const std::vector<std::string>& original, const std::vector<std::string>& synthetic,
                           const TokenProbabilityModel& lm, int jobs = 0);
std::string serialize_fluency_report(const FluencyReport& report);

}  // namespace teql
