#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "teql/harness.hpp"

namespace teql {

enum class ReportFormat { Json, Csv, Markdown };
ReportFormat parse_report_format(std::string_view text);

struct Report {
  std::vector<ConsistencyRecord> records;
  std::string suite_fingerprint;
  std::string config_fingerprint;
  std::string adapter;
  std::vector<std::string> protocol_violations;
};

/// The three rate tables in fixed order: all, per MR, per hardness.
struct RateTable {
  std::vector<GroupRate> overall;
  std::vector<GroupRate> by_mr;
  std::vector<GroupRate> by_hardness;

  bool operator==(const RateTable&) const = default;
};

RateTable rate_table(const std::vector<ConsistencyRecord>& records);

std::string emit_report(const Report& report, ReportFormat format);

/// Readers for the JSON and CSV forms, used by the `report` subcommand and
/// round-trip checks.
Report parse_json_report(std::string_view text);
RateTable rate_table_from_json(std::string_view text);
RateTable rate_table_from_csv(std::string_view text);

std::string serialize_record(const ConsistencyRecord& record);

}  // namespace teql
