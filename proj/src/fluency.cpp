#include "teql/fluency.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "json.hpp"
#include "teql/mr_utterance.hpp"
#include "teql/subprocess.hpp"
#include "teql/util.hpp"

namespace teql {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<double> TokenProbabilityModel::sequence_log_probs(const std::vector<std::string>& tokens) const {
  std::vector<double> out;
  out.reserve(tokens.size());
  std::vector<std::string> context;
  for (const auto& t : tokens) {
    out.push_back(log_prob(t, context));
    context.push_back(t);
  }
  return out;
}

namespace {

std::string join_context(const std::vector<std::string>& tokens, std::size_t begin, std::size_t end) {
  std::string key;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) key.push_back('\x1f');
    key += tokens[i];
  }
  return key;
}

}  // namespace

NgramModel::NgramModel(int order, double k) : order_(order), k_(k) {
  if (order < 1) throw DataError("n-gram order must be >= 1");
  if (!(k > 0.0)) throw DataError("smoothing constant must be > 0");
}

std::string NgramModel::map_token(const std::string& token) const {
  return vocab_.count(token) ? token : std::string(kUnknown);
}

double NgramModel::prob(const std::string& token, const std::vector<std::string>& context) const {
  // Padded, vocabulary-mapped history of at most order-1 tokens.
  std::vector<std::string> hist;
  const std::size_t want = static_cast<std::size_t>(order_ - 1);
  const std::size_t take = std::min(want, context.size());
  for (std::size_t i = take; i < want; ++i) hist.emplace_back(kBos);
  for (std::size_t i = context.size() - take; i < context.size(); ++i) hist.push_back(map_token(context[i]));

  const std::string w = map_token(token);
  const double v = static_cast<double>(vocab_list_.size());
  for (std::size_t start = 0; start <= hist.size(); ++start) {
    const std::string key = join_context(hist, start, hist.size());
    auto total = context_totals_.find(key);
    if (total == context_totals_.end() && start < hist.size()) continue;
    const double ctx_total = total == context_totals_.end() ? 0.0 : static_cast<double>(total->second);
    double c = 0.0;
    auto row = counts_.find(key);
    if (row != counts_.end()) {
      auto cell = row->second.find(w);
      if (cell != row->second.end()) c = static_cast<double>(cell->second);
    }
    return (c + k_) / (ctx_total + k_ * v);
  }
  return 1.0 / v;
}

double NgramModel::log_prob(const std::string& token, const std::vector<std::string>& context) const {
  return std::log(prob(token, context));
}

std::string NgramModel::describe() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "builtin-ngram(order=%d,k=%g,vocab=%zu)", order_, k_, vocab_list_.size());
  return buf;
}

NgramModel train_ngram(const std::vector<std::string>& corpus, int order, double k) {
  if (corpus.empty()) throw DataError("cannot train a language model on an empty corpus");
  NgramModel model(order, k);
  std::vector<std::vector<std::string>> sentences;
  std::set<std::string> vocab{NgramModel::kUnknown};
  for (const auto& u : corpus) {
    sentences.push_back(tokenize(u));
    vocab.insert(sentences.back().begin(), sentences.back().end());
  }
  model.vocab_list_.assign(vocab.begin(), vocab.end());
  for (std::size_t i = 0; i < model.vocab_list_.size(); ++i) model.vocab_[model.vocab_list_[i]] = static_cast<int>(i);

  const std::size_t h = static_cast<std::size_t>(order - 1);
  for (const auto& s : sentences) {
    std::vector<std::string> padded(h, NgramModel::kBos);
    padded.insert(padded.end(), s.begin(), s.end());
    for (std::size_t i = h; i < padded.size(); ++i) {
      for (std::size_t len = 0; len <= h; ++len) {
        const std::string key = join_context(padded, i - len, i);
        ++model.counts_[key][padded[i]];
        ++model.context_totals_[key];
      }
    }
  }
  return model;
}

double entropy_from_log_probs(const std::vector<double>& log_probs) {
  if (log_probs.empty()) throw DataError("entropy of an empty token sequence");
  double sum = 0.0;
  for (double lp : log_probs) sum += lp;
  return -sum / static_cast<double>(log_probs.size());
}

double fluency_from_entropy(double h) { return 1.0 / (1.0 + h); }

double entropy(std::string_view utterance, const TokenProbabilityModel& lm) {
  const auto tokens = tokenize(utterance);
  if (tokens.empty()) throw DataError("utterance has no tokens");
  return entropy_from_log_probs(lm.sequence_log_probs(tokens));
}

double fluency(std::string_view utterance, const TokenProbabilityModel& lm) {
  return fluency_from_entropy(entropy(utterance, lm));
}

namespace {

UtteranceScore score_one(const std::string& u, const TokenProbabilityModel& lm) {
  UtteranceScore s;
  try {
    s.entropy = entropy(u, lm);
    s.fluency = fluency_from_entropy(s.entropy);
    s.ok = true;
  } catch (const std::exception& e) {
    s.error = e.what();
  }
  return s;
}

// Distinct utterances in first-seen order and each input's slot among them.
struct Dedup {
  std::vector<const std::string*> unique;
  std::vector<std::size_t> slot;
};

Dedup dedup(const std::vector<std::string>& utterances) {
  Dedup d;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash;
  d.slot.reserve(utterances.size());
  for (const auto& u : utterances) {
    auto& bucket = by_hash[fnv1a64(u)];
    std::size_t found = d.unique.size();
    for (std::size_t idx : bucket) {
      if (*d.unique[idx] == u) found = idx;
    }
    if (found == d.unique.size()) {
      bucket.push_back(found);
      d.unique.push_back(&u);
    }
    d.slot.push_back(found);
  }
  return d;
}

std::vector<UtteranceScore> expand(const Dedup& d, const std::vector<UtteranceScore>& unique_scores) {
  std::vector<UtteranceScore> out;
  out.reserve(d.slot.size());
  for (std::size_t s : d.slot) out.push_back(unique_scores[s]);
  return out;
}

}  // namespace

std::vector<UtteranceScore> score_corpus(const std::vector<std::string>& utterances, const TokenProbabilityModel& lm,
                                         int jobs) {
  const Dedup d = dedup(utterances);
  std::vector<UtteranceScore> scores(d.unique.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(d.unique.size());
#pragma omp parallel for schedule(dynamic, 32) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    scores[static_cast<std::size_t>(i)] = score_one(*d.unique[static_cast<std::size_t>(i)], lm);
  }
  return expand(d, scores);
}

std::vector<UtteranceScore> score_corpus_serial(const std::vector<std::string>& utterances,
                                                const TokenProbabilityModel& lm) {
  std::vector<UtteranceScore> out;
  out.reserve(utterances.size());
  for (const auto& u : utterances) out.push_back(score_one(u, lm));
  return out;
}

std::vector<UtteranceScore> score_external(const std::vector<std::string>& utterances, const std::string& command,
                                           std::chrono::milliseconds timeout) {
  const Dedup d = dedup(utterances);
  std::vector<std::vector<std::string>> tokens(d.unique.size());
  std::vector<UtteranceScore> scores(d.unique.size());
  std::mutex mu;
  std::map<std::string, std::string> replies;
  {
    Subprocess child(
        command,
        [&](std::string line) {
          json j = json::parse(line, nullptr, false);
          if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) return;
          std::lock_guard lock(mu);
          replies[j["id"].get<std::string>()] = std::move(line);
        },
        {});
    for (std::size_t i = 0; i < d.unique.size(); ++i) {
      tokens[i] = tokenize(*d.unique[i]);
      if (tokens[i].empty()) continue;
      ordered_json req;
      req["id"] = std::to_string(i);
      req["tokens"] = tokens[i];
      if (!child.write_line(req.dump())) break;
    }
    child.close_stdin();
    if (!child.wait_output(timeout)) child.kill();
  }
  for (std::size_t i = 0; i < d.unique.size(); ++i) {
    UtteranceScore& s = scores[i];
    if (tokens[i].empty()) {
      s.error = "utterance has no tokens";
      continue;
    }
    auto it = replies.find(std::to_string(i));
    if (it == replies.end()) {
      s.error = "scorer returned no result";
      continue;
    }
    try {
      const json j = json::parse(it->second);
      const auto lps = j.at("log_probs").get<std::vector<double>>();
      if (lps.size() != tokens[i].size()) {
        s.error = "scorer returned " + std::to_string(lps.size()) + " log-probs for " +
                  std::to_string(tokens[i].size()) + " tokens";
        continue;
      }
      if (std::any_of(lps.begin(), lps.end(), [](double v) { return !std::isfinite(v) || v > 0.0; })) {
        s.error = "scorer returned a log-prob outside (-inf, 0]";
        continue;
      }
      s.entropy = entropy_from_log_probs(lps);
      s.fluency = fluency_from_entropy(s.entropy);
      s.ok = true;
    } catch (const std::exception& e) {
      s.error = std::string("bad scorer reply: ") + e.what();
    }
  }
  return expand(d, scores);
}

CorpusSummary summarize(const std::vector<UtteranceScore>& scores) {
  CorpusSummary s;
  std::vector<double> values;
  for (const auto& sc : scores) {
    if (sc.ok) {
      values.push_back(sc.fluency);
    } else {
      ++s.failed;
    }
  }
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  const double n = static_cast<double>(values.size());
  for (int p = 1; p <= 100; ++p) {
    const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    s.cdf[static_cast<std::size_t>(p - 1)] = values[std::max<std::size_t>(rank, 1) - 1];
  }
  const double q25 = s.cdf[24];
  double bsum = 0.0;
  std::size_t bn = 0;
  for (double v : values) {
    if (v <= q25) {
      bsum += v;
      ++bn;
    }
  }
  s.bottom25_mean = bsum / static_cast<double>(bn);
  return s;
}

FluencyReport corpus_stats(const std::vector<UtteranceScore>& original, const std::vector<UtteranceScore>& synthetic,
                           std::string lm_name) {
  FluencyReport r;
  r.lm = std::move(lm_name);
  r.original = summarize(original);
  r.synthetic = summarize(synthetic);
  if (r.original.count == 0 || r.synthetic.count == 0) throw DataError("fluency statistics need scored utterances on both sides");
  r.relative_delta = (r.synthetic.mean - r.original.mean) / r.original.mean;
  r.bottom25_relative_delta = (r.synthetic.bottom25_mean - r.original.bottom25_mean) / r.original.bottom25_mean;
  return r;
}

FluencyReport corpus_stats(const std::vector<std::string>& original, const std::vector<std::string>& synthetic,
                           const TokenProbabilityModel& lm, int jobs) {
  return corpus_stats(score_corpus(original, lm, jobs), score_corpus(synthetic, lm, jobs), lm.describe());
}

std::string serialize_fluency_report(const FluencyReport& report) {
  auto side = [](const CorpusSummary& s) {
    ordered_json j;
    j["count"] = s.count;
    j["failed"] = s.failed;
    j["mean"] = s.mean;
    j["bottom25_mean"] = s.bottom25_mean;
    ordered_json cdf = ordered_json::array();
    for (std::size_t p = 0; p < s.cdf.size(); ++p) cdf.push_back(ordered_json{{"percentile", p + 1}, {"fluency", s.cdf[p]}});
    j["cdf"] = std::move(cdf);
    return j;
  };
  ordered_json j;
  j["lm"] = report.lm;
  j["relative_delta"] = report.relative_delta;
  j["bottom25_relative_delta"] = report.bottom25_relative_delta;
  j["original"] = side(report.original);
  j["synthetic"] = side(report.synthetic);
  return j.dump(2) + "\n";
}

}  // namespace teql
