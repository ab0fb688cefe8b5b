#include "teql/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include "teql/util.hpp"

namespace teql {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "Consistent";
    case Verdict::Inconsistent: return "Inconsistent";
    case Verdict::ModelFailure: return "ModelFailure";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  for (Verdict v : {Verdict::Consistent, Verdict::Inconsistent, Verdict::ModelFailure}) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

Verdict judge(const std::string& pred_original, const Schema& seed_schema, const std::string& pred_transformed,
              const Schema& case_schema, const sql::MatchOptions& options, std::string* why) {
  sql::CanonicalQuery a;
  sql::CanonicalQuery b;
  try {
    a = sql::canonicalize(sql::parse_sql(pred_original), &seed_schema, options);
  } catch (const std::exception& e) {
    if (why) *why = std::string("original prediction unusable: ") + e.what();
    return Verdict::ModelFailure;
  }
  try {
    b = sql::canonicalize(sql::parse_sql(pred_transformed), &case_schema, options);
  } catch (const std::exception& e) {
    if (why) *why = std::string("transformed prediction unusable: ") + e.what();
    return Verdict::ModelFailure;
  }
  return a == b ? Verdict::Consistent : Verdict::Inconsistent;
}

namespace {

struct Task {
  PredictRequest request;
  Prediction* out;
};

void dispatch(ModelAdapter& adapter, std::vector<Task>& tasks, int max_inflight) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      try {
        *tasks[i].out = adapter.predict(tasks[i].request);
      } catch (const std::exception& e) {
        tasks[i].out->ok = false;
        tasks[i].out->error = e.what();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, max_inflight)), tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace

RunResult run(ModelAdapter& adapter, const TestSuite& suite, const std::vector<Example>& seeds,
              const std::vector<Schema>& schemas, const RunOptions& options) {
  struct SeedState {
    const Example* example = nullptr;
    const Schema* schema = nullptr;
    sql::Hardness hardness = sql::Hardness::Easy;
    Prediction prediction;
  };
  std::map<std::string, SeedState> seed_states;
  for (const auto& c : suite.cases) {
    if (seed_states.count(c.seed_id)) continue;
    const Example* ex = find_example(seeds, c.seed_id);
    if (!ex) throw DataError("case " + c.case_id + " refers to unknown seed '" + c.seed_id + "'");
    const Schema* schema = find_schema(schemas, ex->db_id);
    if (!schema) throw DataError("seed " + ex->example_id + " refers to unknown schema '" + ex->db_id + "'");
    SeedState st;
    st.example = ex;
    st.schema = schema;
    st.hardness = sql::classify_hardness(sql::parse_sql(ex->gold_sql));
    seed_states.emplace(c.seed_id, std::move(st));
  }

  std::vector<Prediction> case_predictions(suite.cases.size());
  std::vector<Task> tasks;
  tasks.reserve(seed_states.size() + suite.cases.size());
  for (auto& [id, st] : seed_states) {
    tasks.push_back(Task{PredictRequest{"seed:" + id, st.example->utterance, st.schema}, &st.prediction});
  }
  for (std::size_t i = 0; i < suite.cases.size(); ++i) {
    const auto& c = suite.cases[i];
    tasks.push_back(Task{PredictRequest{c.case_id, c.utterance, &c.schema}, &case_predictions[i]});
  }
  dispatch(adapter, tasks, options.max_inflight);

  RunResult result;
  result.adapter_calls = tasks.size();
  result.records.reserve(suite.cases.size());
  for (std::size_t i = 0; i < suite.cases.size(); ++i) {
    const auto& c = suite.cases[i];
    const SeedState& st = seed_states.at(c.seed_id);
    const Prediction& orig = st.prediction;
    const Prediction& trans = case_predictions[i];
    ConsistencyRecord r;
    r.case_id = c.case_id;
    r.seed_id = c.seed_id;
    r.mr = c.mr;
    r.hardness = st.hardness;
    r.pred_original = orig.sql;
    r.pred_transformed = trans.sql;
    if (!orig.ok) {
      r.verdict = Verdict::ModelFailure;
      r.failure = "original prediction missing: " + orig.error;
    } else if (!trans.ok) {
      r.verdict = Verdict::ModelFailure;
      r.failure = "transformed prediction missing: " + trans.error;
    } else {
      r.verdict = judge(orig.sql, *st.schema, trans.sql, c.schema, options.match, &r.failure);
    }
    result.records.push_back(std::move(r));
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const ConsistencyRecord& a, const ConsistencyRecord& b) { return a.case_id < b.case_id; });
  result.protocol_violations = adapter.protocol_violations();
  return result;
}

std::vector<GroupRate> inconsistency_rates(const std::vector<ConsistencyRecord>& records, GroupBy group_by) {
  std::vector<GroupRate> groups;
  auto group = [](std::string name) {
    GroupRate g;
    g.group = std::move(name);
    return g;
  };
  auto index_of = [&](const ConsistencyRecord& r) -> std::size_t {
    switch (group_by) {
      case GroupBy::All: return 0;
      case GroupBy::MR: return static_cast<std::size_t>(mr_order(r.mr));
      case GroupBy::Hardness: return static_cast<std::size_t>(r.hardness);
    }
    return 0;
  };
  switch (group_by) {
    case GroupBy::All: groups.push_back(group("all")); break;
    case GroupBy::MR:
      for (Mr mr : kAllMrs) groups.push_back(group(std::string(mr_code(mr))));
      break;
    case GroupBy::Hardness:
      for (auto h : {sql::Hardness::Easy, sql::Hardness::Medium, sql::Hardness::Hard, sql::Hardness::Extra}) {
        groups.push_back(group(std::string(sql::to_string(h))));
      }
      break;
  }
  for (const auto& r : records) {
    GroupRate& g = groups[index_of(r)];
    if (r.verdict == Verdict::ModelFailure) {
      ++g.failures;
      continue;
    }
    ++g.counted;
    if (r.verdict == Verdict::Inconsistent) ++g.inconsistent;
  }
  for (auto& g : groups) {
    if (g.counted > 0) g.rate = 100.0 * g.inconsistent / g.counted;
  }
  return groups;
}

std::string format_rate(const std::optional<double>& rate) {
  if (!rate) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *rate);
  return buf;
}

}  // namespace teql
