#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teql/adapter.hpp"
#include "teql/dataset.hpp"
#include "teql/generator.hpp"
#include "teql/mr.hpp"
#include "teql/schema.hpp"
#include "teql/sql.hpp"

namespace teql {

enum class Verdict { Consistent, Inconsistent, ModelFailure };
std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view text);

struct ConsistencyRecord {
  std::string case_id;
  std::string seed_id;
  Mr mr = Mr::PrefixInsertion;
  std::string pred_original;
  std::string pred_transformed;
  Verdict verdict = Verdict::ModelFailure;
  sql::Hardness hardness = sql::Hardness::Easy;
  std::string failure;  // why, for ModelFailure

  bool operator==(const ConsistencyRecord&) const = default;
};

struct RunOptions {
  int max_inflight = 4;
  sql::MatchOptions match;
};

struct RunResult {
  std::vector<ConsistencyRecord> records;  // sorted by case_id
  std::size_t adapter_calls = 0;
  std::vector<std::string> protocol_violations;
};

/// Queries the model once per seed referenced by the suite and once per
/// case, at most `max_inflight` at a time, then compares each transformed
/// prediction against its seed's prediction under exact set match.
/// Transport errors never abort the run; they become ModelFailure records.
RunResult run(ModelAdapter& adapter, const TestSuite& suite, const std::vector<Example>& seeds,
              const std::vector<Schema>& schemas, const RunOptions& options = {});

/// EM verdict between two raw predictions, each resolved against its own schema.
Verdict judge(const std::string& pred_original, const Schema& seed_schema, const std::string& pred_transformed,
              const Schema& case_schema, const sql::MatchOptions& options = {}, std::string* why = nullptr);

enum class GroupBy { All, MR, Hardness };

struct GroupRate {
  std::string group;
  int inconsistent = 0;
  int counted = 0;  // Consistent + Inconsistent
  int failures = 0;
  std::optional<double> rate;  // percentage; absent when counted == 0

  bool operator==(const GroupRate&) const = default;
};

/// Fixed group order: "all"; MR codes in canonical order; Easy..Extra.
/// Every group is listed, with `rate` absent when it has nothing counted.
std::vector<GroupRate> inconsistency_rates(const std::vector<ConsistencyRecord>& records, GroupBy group_by);

/// One decimal, or "-" for an absent rate.
std::string format_rate(const std::optional<double>& rate);

}  // namespace teql
