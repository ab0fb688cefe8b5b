#include <algorithm>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "teql/augment.hpp"

using namespace teql;
using testing::mini;

namespace {

// Suite with `counts` cases per MR, ids "s<i>:<code>:0".
TestSuite fake_suite(const std::map<Mr, int>& counts) {
  TestSuite s;
  int i = 0;
  for (Mr mr : kAllMrs) {
    auto it = counts.find(mr);
    if (it == counts.end()) continue;
    s.counts_by_mr[mr] = it->second;
    for (int j = 0; j < it->second; ++j) {
      TransformedCase c;
      c.seed_id = "s" + std::to_string(i++);
      c.mr = mr;
      c.case_id = c.seed_id + ":" + std::string(mr_code(mr)) + ":0";
      s.cases.push_back(std::move(c));
    }
  }
  return s;
}

std::map<Mr, std::size_t> tally(const std::vector<TransformedCase>& cases) {
  std::map<Mr, std::size_t> out;
  for (const auto& c : cases) ++out[c.mr];
  return out;
}

bool in_suite_order(const TestSuite& suite, const std::vector<TransformedCase>& picked) {
  std::size_t at = 0;
  for (const auto& c : picked) {
    while (at < suite.cases.size() && suite.cases[at].case_id != c.case_id) ++at;
    if (at == suite.cases.size()) return false;
    ++at;
  }
  return true;
}

const TestSuite& mini_suite() {
  static const TestSuite s = [] {
    GenerationConfig config;
    config.max_variants_per_mr = 3;
    return generate(mini().examples, mini().schemas, config, GenerationResources{});
  }();
  return s;
}

}  // namespace

TEST_CASE("strategy names") {
  CHECK(parse_strategy("SS") == Strategy::SS);
  CHECK(to_string(Strategy::AS) == "as");
  CHECK_THROWS_AS(parse_strategy("xs"), DataError);
}

TEST_CASE("stratified quotas cap at availability and fill the rest") {
  std::map<Mr, int> counts;
  for (Mr mr : kAllMrs) counts[mr] = 40;
  counts[Mr::PrefixRemoval] = 3;
  const TestSuite suite = fake_suite(counts);
  const auto plan = plan_stratified(availability(suite), 120, 12, 7);
  CHECK(plan.per_mr_quota.at(Mr::PrefixRemoval) == 3);
  CHECK(plan.per_mr_quota.at(Mr::OpaqueKey) == 10);
  const auto picked = execute_plan(suite, plan);
  CHECK(picked.size() == 120);
  const auto t = tally(picked);
  CHECK(t.at(Mr::PrefixRemoval) == 3);
  for (Mr mr : kAllMrs) CHECK(t.at(mr) >= std::min<std::size_t>(10, counts[mr]));
  CHECK(in_suite_order(suite, picked));
  CHECK(sample_stratified(suite, 120, 0, 7) == picked);
}

TEST_CASE("adaptive quotas follow normalized rates") {
  std::map<Mr, int> counts;
  for (Mr mr : kAllMrs) counts[mr] = 100;
  counts[Mr::SynonymSubstitution] = 30;
  const TestSuite suite = fake_suite(counts);
  const auto picked = sample_adaptive(suite, {{Mr::SynonymSubstitution, 0.5}, {Mr::PrefixRemoval, 0.5}}, 100, 11);
  const auto t = tally(picked);
  CHECK(picked.size() == 100);
  CHECK(t.at(Mr::SynonymSubstitution) == 30);
  CHECK(t.at(Mr::PrefixRemoval) >= 50);
  std::size_t others = 0;
  for (const auto& [mr, n] : t) {
    if (mr != Mr::SynonymSubstitution && mr != Mr::PrefixRemoval) others += n;
  }
  CHECK(others + t.at(Mr::PrefixRemoval) == 70);

  const auto plan = plan_adaptive(availability(suite), {{Mr::SynonymSubstitution, 2.0}, {Mr::PrefixRemoval, 2.0}}, 100, 1);
  CHECK(plan.rates->at(Mr::SynonymSubstitution) == 0.5);
  CHECK(plan.per_mr_quota.at(Mr::PrefixRemoval) == 50);
  CHECK(plan.per_mr_quota.at(Mr::OpaqueKey) == 0);

  CHECK_THROWS_AS(plan_adaptive(availability(suite), {{Mr::OpaqueKey, 0.0}}, 10, 1), DataError);
  CHECK_THROWS_AS(plan_adaptive(availability(suite), {{Mr::OpaqueKey, -1.0}}, 10, 1), DataError);
}

TEST_CASE("uniform adaptive rates reproduce stratified sampling") {
  std::map<Mr, int> counts;
  for (Mr mr : kAllMrs) counts[mr] = 25;
  const TestSuite suite = fake_suite(counts);
  std::map<Mr, double> uniform;
  for (Mr mr : kAllMrs) uniform[mr] = 1.0;
  for (std::size_t n : {12u, 60u, 120u, 250u}) {
    CHECK(sample_adaptive(suite, uniform, n, 3) == sample_stratified(suite, n, 12, 3));
  }
}

TEST_CASE("random sampling is uniform without replacement") {
  const TestSuite suite = fake_suite({{Mr::OpaqueKey, 50}, {Mr::TableShuffle, 50}});
  const auto a = sample_random(suite, 30, 5);
  CHECK(a.size() == 30);
  std::set<std::string> ids;
  for (const auto& c : a) ids.insert(c.case_id);
  CHECK(ids.size() == 30);
  CHECK(sample_random(suite, 30, 5) == a);
  CHECK(sample_random(suite, 30, 6) != a);
  CHECK(sample_random(suite, 100, 5).size() == 100);
  CHECK_THROWS_AS(sample_random(suite, 101, 5), DataError);
}

TEST_CASE("rates parse from JSON") {
  const auto r = parse_rates(R"({"SS": 0.25, "PR": 0.75})");
  CHECK(r.at(Mr::SynonymSubstitution) == 0.25);
  CHECK(r.at(Mr::PrefixRemoval) == 0.75);
  CHECK_THROWS_AS(parse_rates(R"({"XX": 1})"), DataError);
  CHECK_THROWS_AS(parse_rates("{"), DataError);
}

TEST_CASE("folds partition the dataset") {
  const auto& ex = mini().examples;
  const FoldSplit split = make_folds(ex, 10, 4);
  std::set<std::string> seen;
  for (int f = 0; f < 10; ++f) {
    const auto fold = split.fold(ex, f);
    CHECK(fold.size() == ex.size() / 10);
    CHECK(fold.size() + split.complement(ex, f).size() == ex.size());
    for (const auto& e : fold) CHECK(seen.insert(e.example_id).second);
  }
  CHECK(seen.size() == ex.size());
  CHECK(make_folds(ex, 10, 4).assignment == split.assignment);
  CHECK(make_folds(ex, 10, 5).assignment != split.assignment);
  const auto j = nlohmann::json::parse(serialize_folds(split));
  CHECK(j.at("fold_sizes").size() == 10);
  CHECK_THROWS_AS(make_folds(ex, 1, 0), DataError);
}

TEST_CASE("fold rates come from the validation fold only") {
  const auto& m = mini();
  const FoldSplit split = make_folds(m.examples, 5, 1);
  // Answers with the first table, so only table reordering can disagree.
  FunctionAdapter model([](const std::string&, const Schema& s) {
    return "SELECT count(*) FROM " + s.tables.at(0).original_name;
  });
  GenerationConfig config;
  config.enabled_mrs = {Mr::TableShuffle, Mr::OpaqueKey, Mr::PrefixRemoval};
  const auto rates = measure_fold_rates(m.examples, m.schemas, model, split, 0, config, GenerationResources{});
  CHECK(rates.at(Mr::OpaqueKey) == 0.0);
  CHECK(rates.at(Mr::PrefixRemoval) == 0.0);
  CHECK(rates.at(Mr::TableShuffle) > 0.0);
  CHECK(rates.at(Mr::TableShuffle) <= 1.0);
}

TEST_CASE("augmented sets add transformed cases with fresh schemas") {
  const auto& m = mini();
  const auto sampled = sample_random(mini_suite(), mini_suite().cases.size(), 2);
  const AugmentedSet aug = build_augmented(m.examples, m.schemas, sampled, 1.0);
  CHECK(aug.examples.size() == 2 * m.examples.size());
  CHECK(std::equal(m.examples.begin(), m.examples.end(), aug.examples.begin()));
  std::set<std::string> db_ids;
  for (const auto& s : aug.schemas) {
    CHECK(db_ids.insert(s.db_id).second);
    CHECK_NOTHROW(validate_schema(s));
  }
  for (std::size_t i = m.examples.size(); i < aug.examples.size(); ++i) {
    const auto& e = aug.examples[i];
    const auto& c = *std::find_if(sampled.begin(), sampled.end(), [&](const auto& x) { return x.case_id == e.example_id; });
    const Schema& s = *find_schema(aug.schemas, e.db_id);
    CHECK(serialize_schema(Schema{s}) != "");
    if (is_utterance_mr(c.mr)) {
      CHECK(e.db_id == c.schema.db_id);
    } else {
      CHECK(e.db_id.find(c.schema.db_id + "__" + to_lower(mr_code(c.mr)) + "__") == 0);
    }
    CHECK_NOTHROW(sql::bind_and_usage(sql::parse_sql(e.gold_sql), s));
  }
  CHECK(build_augmented(m.examples, m.schemas, sampled, 3.0).examples.size() == 4 * m.examples.size());
  CHECK_THROWS_AS(build_augmented(m.examples, m.schemas, sampled, 0.5), DataError);
  CHECK(build_augmented({}, {}, std::vector<TransformedCase>(sampled.begin(), sampled.begin() + 5), 1.0)
            .examples.size() == 5);
}

TEST_CASE("augmented sets reload as a dataset") {
  const auto& m = mini();
  const auto dir = testing::tmp_dir("augment_emit");
  const auto sampled = sample_stratified(mini_suite(), 60, 12, 9);
  const AugmentedSet aug = emit_augmented(m.examples, m.schemas, sampled, 1.0, dir);
  const auto schemas = load_schemas(dir / "tables.json");
  const auto load = load_examples(dir / "train.json", schemas);
  CHECK(load.skipped.empty());
  CHECK(load.examples.size() == aug.examples.size());
  CHECK(schemas.size() == aug.schemas.size());
}
