#include "teql/report.hpp"

#include <sstream>

#include "json.hpp"
#include "teql/util.hpp"

namespace teql {

using nlohmann::json;
using nlohmann::ordered_json;

ReportFormat parse_report_format(std::string_view text) {
  const std::string t = to_lower(text);
  if (t == "json") return ReportFormat::Json;
  if (t == "csv") return ReportFormat::Csv;
  if (t == "md" || t == "markdown") return ReportFormat::Markdown;
  throw DataError("unknown report format '" + std::string(text) + "' (json, csv, md)");
}

RateTable rate_table(const std::vector<ConsistencyRecord>& records) {
  return RateTable{inconsistency_rates(records, GroupBy::All), inconsistency_rates(records, GroupBy::MR),
                   inconsistency_rates(records, GroupBy::Hardness)};
}

namespace {

ordered_json group_json(const GroupRate& g) {
  ordered_json j;
  j["group"] = g.group;
  j["inconsistent"] = g.inconsistent;
  j["counted"] = g.counted;
  j["failures"] = g.failures;
  j["rate"] = g.rate ? json(*g.rate) : json(nullptr);
  j["rate_display"] = format_rate(g.rate);
  return j;
}

GroupRate group_from_json(const json& j) {
  GroupRate g;
  g.group = j.at("group").get<std::string>();
  g.inconsistent = j.at("inconsistent").get<int>();
  g.counted = j.at("counted").get<int>();
  g.failures = j.at("failures").get<int>();
  if (!j.at("rate").is_null()) g.rate = j.at("rate").get<double>();
  return g;
}

ordered_json record_json(const ConsistencyRecord& r) {
  ordered_json j;
  j["case_id"] = r.case_id;
  j["seed_id"] = r.seed_id;
  j["mr"] = std::string(mr_code(r.mr));
  j["pred_original"] = r.pred_original;
  j["pred_transformed"] = r.pred_transformed;
  j["verdict"] = std::string(to_string(r.verdict));
  j["hardness"] = std::string(sql::to_string(r.hardness));
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j;
}

ConsistencyRecord record_from_json(const json& j) {
  ConsistencyRecord r;
  r.case_id = j.at("case_id").get<std::string>();
  r.seed_id = j.at("seed_id").get<std::string>();
  auto mr = parse_mr(j.at("mr").get<std::string>());
  if (!mr) throw DataError("unknown mr in record " + r.case_id);
  r.mr = *mr;
  r.pred_original = j.at("pred_original").get<std::string>();
  r.pred_transformed = j.at("pred_transformed").get<std::string>();
  auto verdict = parse_verdict(j.at("verdict").get<std::string>());
  if (!verdict) throw DataError("unknown verdict in record " + r.case_id);
  r.verdict = *verdict;
  const std::string h = j.at("hardness").get<std::string>();
  bool found = false;
  for (auto cand : {sql::Hardness::Easy, sql::Hardness::Medium, sql::Hardness::Hard, sql::Hardness::Extra}) {
    if (sql::to_string(cand) == h) {
      r.hardness = cand;
      found = true;
    }
  }
  if (!found) throw DataError("unknown hardness in record " + r.case_id);
  r.failure = j.value("failure", std::string());
  return r;
}

// Shortest text that reads back to the same double.
std::string exact_double(double v) {
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

const char* kind_name(int kind) {
  static const char* names[] = {"all", "mr", "hardness"};
  return names[kind];
}

std::string emit_json(const Report& report, const RateTable& table) {
  ordered_json j;
  j["no_data"] = report.records.empty();
  j["suite_fingerprint"] = report.suite_fingerprint;
  j["config_fingerprint"] = report.config_fingerprint;
  j["adapter"] = report.adapter;
  j["hardness_rules"] = std::string(sql::kHardnessRuleVersion);
  j["overall"] = group_json(table.overall.front());
  ordered_json by_mr = ordered_json::array();
  for (const auto& g : table.by_mr) by_mr.push_back(group_json(g));
  j["by_mr"] = std::move(by_mr);
  ordered_json by_h = ordered_json::array();
  for (const auto& g : table.by_hardness) by_h.push_back(group_json(g));
  j["by_hardness"] = std::move(by_h);
  j["protocol_violations"] = report.protocol_violations;
  ordered_json records = ordered_json::array();
  for (const auto& r : report.records) records.push_back(record_json(r));
  j["records"] = std::move(records);
  return j.dump(2) + "\n";
}

std::string emit_csv(const Report& report, const RateTable& table) {
  std::ostringstream out;
  out << "# suite_fingerprint=" << report.suite_fingerprint << "\n";
  out << "# config_fingerprint=" << report.config_fingerprint << "\n";
  if (report.records.empty()) out << "# no data\n";
  out << "kind,group,inconsistent,counted,failures,rate,rate_display\n";
  const std::vector<GroupRate>* parts[] = {&table.overall, &table.by_mr, &table.by_hardness};
  for (int kind = 0; kind < 3; ++kind) {
    for (const auto& g : *parts[kind]) {
      out << kind_name(kind) << ',' << g.group << ',' << g.inconsistent << ',' << g.counted << ',' << g.failures << ','
          << (g.rate ? exact_double(*g.rate) : "") << ',' << format_rate(g.rate) << "\n";
    }
  }
  return out.str();
}

std::string emit_markdown(const Report& report, const RateTable& table) {
  std::ostringstream out;
  out << "# Inconsistency report\n\n";
  out << "- suite fingerprint: `" << report.suite_fingerprint << "`\n";
  out << "- config fingerprint: `" << report.config_fingerprint << "`\n";
  if (!report.adapter.empty()) out << "- adapter: `" << report.adapter << "`\n";
  const auto& all = table.overall.front();
  out << "- overall: " << format_rate(all.rate) << "% (" << all.inconsistent << " / " << all.counted << "), "
      << all.failures << " model failures\n\n";
  if (report.records.empty()) {
    out << "_no data_\n";
    return out.str();
  }
  out << "## By MR (%)\n\n|";
  for (const auto& g : table.by_mr) out << ' ' << g.group << " |";
  out << "\n|";
  for (std::size_t i = 0; i < table.by_mr.size(); ++i) out << "---:|";
  out << "\n|";
  for (const auto& g : table.by_mr) out << ' ' << format_rate(g.rate) << " |";
  out << "\n\n## By hardness (%)\n\n| Hardness | Rate | Inconsistent | Counted | Failures |\n|---|---:|---:|---:|---:|\n";
  for (const auto& g : table.by_hardness) {
    out << "| " << g.group << " | " << format_rate(g.rate) << " | " << g.inconsistent << " | " << g.counted << " | "
        << g.failures << " |\n";
  }
  return out.str();
}

}  // namespace

std::string emit_report(const Report& report, ReportFormat format) {
  const RateTable table = rate_table(report.records);
  switch (format) {
    case ReportFormat::Json: return emit_json(report, table);
    case ReportFormat::Csv: return emit_csv(report, table);
    case ReportFormat::Markdown: return emit_markdown(report, table);
  }
  return {};
}

std::string serialize_record(const ConsistencyRecord& record) { return record_json(record).dump(); }

Report parse_json_report(std::string_view text) {
  Report report;
  try {
    const json j = json::parse(text);
    report.suite_fingerprint = j.value("suite_fingerprint", std::string());
    report.config_fingerprint = j.value("config_fingerprint", std::string());
    report.adapter = j.value("adapter", std::string());
    report.protocol_violations = j.value("protocol_violations", std::vector<std::string>{});
    for (const auto& r : j.at("records")) report.records.push_back(record_from_json(r));
  } catch (const json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
  return report;
}

RateTable rate_table_from_json(std::string_view text) {
  RateTable table;
  try {
    const json j = json::parse(text);
    table.overall.push_back(group_from_json(j.at("overall")));
    for (const auto& g : j.at("by_mr")) table.by_mr.push_back(group_from_json(g));
    for (const auto& g : j.at("by_hardness")) table.by_hardness.push_back(group_from_json(g));
  } catch (const json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
  return table;
}

RateTable rate_table_from_csv(std::string_view text) {
  RateTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() == 6) f.emplace_back();
    if (f.size() != 7) throw DataError("csv report: bad row '" + line + "'");
    GroupRate g;
    g.group = f[1];
    g.inconsistent = std::stoi(f[2]);
    g.counted = std::stoi(f[3]);
    g.failures = std::stoi(f[4]);
    if (!f[5].empty()) g.rate = std::strtod(f[5].c_str(), nullptr);
    if (f[0] == "all") {
      table.overall.push_back(g);
    } else if (f[0] == "mr") {
      table.by_mr.push_back(g);
    } else if (f[0] == "hardness") {
      table.by_hardness.push_back(g);
    } else {
      throw DataError("csv report: unknown kind '" + f[0] + "'");
    }
  }
  return table;
}

}  // namespace teql
