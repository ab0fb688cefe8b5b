#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teql/dataset.hpp"
#include "teql/generator.hpp"
#include "teql/harness.hpp"
#include "teql/mr.hpp"

namespace teql {

enum class Strategy { RS, SS, AS };
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

struct SamplingPlan {
  Strategy strategy = Strategy::RS;
  std::size_t n = 0;
  int k = 0;
  std::map<Mr, std::size_t> per_mr_quota;
  std::uint64_t rng_seed = 0;
  std::optional<std::map<Mr, double>> rates;  // normalized, AS only
};

/// Cases available per MR; every MR listed in the suite's counts appears,
/// even with zero cases.
std::map<Mr, std::size_t> availability(const TestSuite& suite);

SamplingPlan plan_random(std::size_t n, std::uint64_t rng_seed);
/// Quota min(m_i, floor(n / k)) per available MR.
SamplingPlan plan_stratified(const std::map<Mr, std::size_t>& available, std::size_t n, int k, std::uint64_t rng_seed);
/// Rates are normalized first; quota min(m_i, floor(r_i * n)).
SamplingPlan plan_adaptive(const std::map<Mr, std::size_t>& available, const std::map<Mr, double>& rates,
                           std::size_t n, std::uint64_t rng_seed);

/// Draws each MR's quota, then fills up to n uniformly from the cases not
/// yet selected. Output keeps suite order.
std::vector<TransformedCase> execute_plan(const TestSuite& suite, const SamplingPlan& plan);

std::vector<TransformedCase> sample_random(const TestSuite& suite, std::size_t n, std::uint64_t rng_seed);
/// `k` <= 0 means the number of MRs listed in the suite's counts.
std::vector<TransformedCase> sample_stratified(const TestSuite& suite, std::size_t n, int k, std::uint64_t rng_seed);
std::vector<TransformedCase> sample_adaptive(const TestSuite& suite, const std::map<Mr, double>& rates, std::size_t n,
                                             std::uint64_t rng_seed);

std::map<Mr, double> parse_rates(std::string_view json_text);

struct FoldSplit {
  int fold_count = 10;
  std::uint64_t rng_seed = 0;
  std::map<std::string, int> assignment;  // example_id -> fold

  std::vector<Example> fold(const std::vector<Example>& dataset, int index) const;
  std::vector<Example> complement(const std::vector<Example>& dataset, int index) const;
};

FoldSplit make_folds(const std::vector<Example>& dataset, int fold_count = 10, std::uint64_t rng_seed = 0);
std::string serialize_folds(const FoldSplit& split);

/// Generates cases over the validation fold and returns each MR's
/// inconsistency rate as a fraction (0 for MRs with nothing counted).
std::map<Mr, double> measure_fold_rates(const std::vector<Example>& dataset, const std::vector<Schema>& schemas,
                                        ModelAdapter& adapter, const FoldSplit& split, int validation_fold,
                                        const GenerationConfig& config, const GenerationResources& resources,
                                        const RunOptions& run_options = {});

struct AugmentedSet {
  std::vector<Example> examples;
  std::vector<Schema> schemas;
  std::vector<std::string> notes;  // db_id collisions resolved
};

/// Originals followed by up to floor(scale * |original|) sampled cases (all
/// of them when there are no originals). Schema-side cases get fresh
/// db_ids "<orig>__<mr>__<hash8>".
AugmentedSet build_augmented(const std::vector<Example>& original, const std::vector<Schema>& original_schemas,
                             const std::vector<TransformedCase>& sampled, double scale);
/// Writes `<dir>/train.json` and `<dir>/tables.json`.
AugmentedSet emit_augmented(const std::vector<Example>& original, const std::vector<Schema>& original_schemas,
                            const std::vector<TransformedCase>& sampled, double scale,
                            const std::filesystem::path& out_dir);

}  // namespace teql
