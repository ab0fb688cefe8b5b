#include "teql/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "json.hpp"
#include "teql/util.hpp"

namespace teql {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::RS: return "rs";
    case Strategy::SS: return "ss";
    case Strategy::AS: return "as";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  const std::string t = to_lower(text);
  if (t == "rs") return Strategy::RS;
  if (t == "ss") return Strategy::SS;
  if (t == "as") return Strategy::AS;
  throw DataError("unknown sampling strategy '" + std::string(text) + "' (rs, ss, as)");
}

std::map<Mr, std::size_t> availability(const TestSuite& suite) {
  std::map<Mr, std::size_t> out;
  for (const auto& [mr, n] : suite.counts_by_mr) out[mr];
  for (const auto& c : suite.cases) ++out[c.mr];
  return out;
}

SamplingPlan plan_random(std::size_t n, std::uint64_t rng_seed) {
  SamplingPlan plan;
  plan.strategy = Strategy::RS;
  plan.n = n;
  plan.rng_seed = rng_seed;
  return plan;
}

SamplingPlan plan_stratified(const std::map<Mr, std::size_t>& available, std::size_t n, int k,
                             std::uint64_t rng_seed) {
  if (k <= 0) throw DataError("stratified sampling needs k >= 1");
  SamplingPlan plan;
  plan.strategy = Strategy::SS;
  plan.n = n;
  plan.k = k;
  plan.rng_seed = rng_seed;
  const std::size_t share = n / static_cast<std::size_t>(k);
  for (const auto& [mr, m] : available) plan.per_mr_quota[mr] = std::min(m, share);
  return plan;
}

SamplingPlan plan_adaptive(const std::map<Mr, std::size_t>& available, const std::map<Mr, double>& rates,
                           std::size_t n, std::uint64_t rng_seed) {
  double total = 0.0;
  for (const auto& [mr, r] : rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw DataError("adaptive sampling rates must be finite and nonnegative");
    total += r;
  }
  if (total <= 0.0) throw DataError("adaptive sampling rates are all zero; use stratified sampling instead");
  SamplingPlan plan;
  plan.strategy = Strategy::AS;
  plan.n = n;
  plan.k = static_cast<int>(available.size());
  plan.rng_seed = rng_seed;
  std::map<Mr, double> normalized;
  for (const auto& [mr, r] : rates) normalized[mr] = r / total;
  std::size_t assigned = 0;
  for (const auto& [mr, m] : available) {
    auto it = normalized.find(mr);
    const double r = it == normalized.end() ? 0.0 : it->second;
    // The epsilon keeps r*n from landing just under an integer through
    // rounding, e.g. (1/12)*120.
    auto quota = static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9));
    quota = std::min({quota, m, n - assigned});
    plan.per_mr_quota[mr] = quota;
    assigned += quota;
  }
  plan.rates = std::move(normalized);
  return plan;
}

std::vector<TransformedCase> execute_plan(const TestSuite& suite, const SamplingPlan& plan) {
  if (plan.n > suite.cases.size()) {
    throw DataError("cannot sample " + std::to_string(plan.n) + " cases from a suite of " +
                    std::to_string(suite.cases.size()));
  }
  std::map<Mr, std::vector<std::size_t>> by_mr;
  for (std::size_t i = 0; i < suite.cases.size(); ++i) by_mr[suite.cases[i].mr].push_back(i);

  Rng rng(plan.rng_seed);
  std::vector<bool> taken(suite.cases.size(), false);
  std::size_t selected = 0;
  for (const auto& [mr, quota] : plan.per_mr_quota) {
    const auto& pool = by_mr[mr];
    const std::size_t q = std::min(quota, pool.size());
    for (std::size_t pick : rng.choose(pool.size(), q)) taken[pool[pick]] = true;
    selected += q;
  }
  if (selected > plan.n) throw DataError("sampling quotas exceed n");
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < taken.size(); ++i) {
    if (!taken[i]) rest.push_back(i);
  }
  for (std::size_t pick : rng.choose(rest.size(), plan.n - selected)) taken[rest[pick]] = true;

  std::vector<TransformedCase> out;
  out.reserve(plan.n);
  for (std::size_t i = 0; i < taken.size(); ++i) {
    if (taken[i]) out.push_back(suite.cases[i]);
  }
  return out;
}

std::vector<TransformedCase> sample_random(const TestSuite& suite, std::size_t n, std::uint64_t rng_seed) {
  return execute_plan(suite, plan_random(n, rng_seed));
}

std::vector<TransformedCase> sample_stratified(const TestSuite& suite, std::size_t n, int k, std::uint64_t rng_seed) {
  const auto available = availability(suite);
  if (k <= 0) k = static_cast<int>(available.size());
  return execute_plan(suite, plan_stratified(available, n, k, rng_seed));
}

std::vector<TransformedCase> sample_adaptive(const TestSuite& suite, const std::map<Mr, double>& rates, std::size_t n,
                                             std::uint64_t rng_seed) {
  return execute_plan(suite, plan_adaptive(availability(suite), rates, n, rng_seed));
}

std::map<Mr, double> parse_rates(std::string_view json_text) {
  std::map<Mr, double> rates;
  try {
    const json j = json::parse(json_text);
    for (auto it = j.begin(); it != j.end(); ++it) {
      auto mr = parse_mr(it.key());
      if (!mr) throw DataError("unknown MR '" + it.key() + "' in rates");
      rates[*mr] = it.value().get<double>();
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("rates: ") + e.what());
  }
  return rates;
}

// ---- folds ----

FoldSplit make_folds(const std::vector<Example>& dataset, int fold_count, std::uint64_t rng_seed) {
  if (fold_count < 2) throw DataError("fold count must be >= 2");
  if (dataset.size() < static_cast<std::size_t>(fold_count)) throw DataError("fewer examples than folds");
  FoldSplit split;
  split.fold_count = fold_count;
  split.rng_seed = rng_seed;
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(rng_seed);
  rng.shuffle(order);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& id = dataset[order[pos]].example_id;
    if (!split.assignment.emplace(id, static_cast<int>(pos % static_cast<std::size_t>(fold_count))).second) {
      throw DataError("duplicate example_id '" + id + "'");
    }
  }
  return split;
}

std::vector<Example> FoldSplit::fold(const std::vector<Example>& dataset, int index) const {
  std::vector<Example> out;
  for (const auto& ex : dataset) {
    auto it = assignment.find(ex.example_id);
    if (it != assignment.end() && it->second == index) out.push_back(ex);
  }
  return out;
}

std::vector<Example> FoldSplit::complement(const std::vector<Example>& dataset, int index) const {
  std::vector<Example> out;
  for (const auto& ex : dataset) {
    auto it = assignment.find(ex.example_id);
    if (it != assignment.end() && it->second != index) out.push_back(ex);
  }
  return out;
}

std::string serialize_folds(const FoldSplit& split) {
  ordered_json assignment = ordered_json::object();
  for (const auto& [id, f] : split.assignment) assignment[id] = f;
  std::vector<std::size_t> sizes(static_cast<std::size_t>(split.fold_count), 0);
  for (const auto& [id, f] : split.assignment) ++sizes[static_cast<std::size_t>(f)];
  ordered_json j;
  j["fold_count"] = split.fold_count;
  j["rng_seed"] = split.rng_seed;
  j["fold_sizes"] = sizes;
  j["assignment"] = std::move(assignment);
  return j.dump(2) + "\n";
}

std::map<Mr, double> measure_fold_rates(const std::vector<Example>& dataset, const std::vector<Schema>& schemas,
                                        ModelAdapter& adapter, const FoldSplit& split, int validation_fold,
                                        const GenerationConfig& config, const GenerationResources& resources,
                                        const RunOptions& run_options) {
  if (validation_fold < 0 || validation_fold >= split.fold_count) throw DataError("validation fold out of range");
  const auto validation = split.fold(dataset, validation_fold);
  const TestSuite suite = generate(validation, schemas, config, resources);
  const RunResult result = run(adapter, suite, validation, schemas, run_options);
  std::map<Mr, double> rates;
  for (Mr mr : config.enabled_mrs) rates[mr] = 0.0;
  for (const auto& g : inconsistency_rates(result.records, GroupBy::MR)) {
    auto mr = parse_mr(g.group);
    if (mr && g.counted > 0 && config.enabled_mrs.count(*mr)) {
      rates[*mr] = static_cast<double>(g.inconsistent) / g.counted;
    }
  }
  return rates;
}

// ---- augmented output ----

AugmentedSet build_augmented(const std::vector<Example>& original, const std::vector<Schema>& original_schemas,
                             const std::vector<TransformedCase>& sampled, double scale) {
  if (!(scale >= 1.0)) throw DataError("augmentation scale must be >= 1");
  AugmentedSet out;
  out.examples = original;
  out.schemas = original_schemas;
  std::map<std::string, std::string> id_text;  // db_id -> serialized schema
  for (const auto& s : original_schemas) id_text[s.db_id] = serialize_schema(s);

  std::size_t take = sampled.size();
  if (!original.empty()) {
    take = std::min(take, static_cast<std::size_t>(std::floor(scale * static_cast<double>(original.size()) + 1e-9)));
  }
  for (std::size_t i = 0; i < take; ++i) {
    const TransformedCase& c = sampled[i];
    const std::string text = serialize_schema(c.schema);
    std::string db_id = c.schema.db_id;
    auto existing = id_text.find(db_id);
    if (existing == id_text.end() || existing->second != text) {
      const std::string base =
          c.schema.db_id + "__" + to_lower(mr_code(c.mr)) + "__" + fingerprint(text).substr(0, 8);
      db_id = base;
      for (int suffix = 2;; ++suffix) {
        Schema renamed = c.schema;
        renamed.db_id = db_id;
        const std::string renamed_text = serialize_schema(renamed);
        auto hit = id_text.find(db_id);
        if (hit == id_text.end()) {
          id_text.emplace(db_id, renamed_text);
          out.schemas.push_back(std::move(renamed));
          break;
        }
        if (hit->second == renamed_text) break;
        out.notes.push_back("db_id '" + db_id + "' already taken; trying suffix _" + std::to_string(suffix));
        db_id = base + "_" + std::to_string(suffix);
      }
    }
    out.examples.push_back(Example{c.case_id, db_id, c.utterance, c.gold_sql});
  }
  return out;
}

AugmentedSet emit_augmented(const std::vector<Example>& original, const std::vector<Schema>& original_schemas,
                            const std::vector<TransformedCase>& sampled, double scale,
                            const std::filesystem::path& out_dir) {
  AugmentedSet set = build_augmented(original, original_schemas, sampled, scale);
  write_file(out_dir / "train.json", serialize_examples(set.examples));
  write_file(out_dir / "tables.json", serialize_schemas(set.schemas));
  return set;
}

}  // namespace teql
