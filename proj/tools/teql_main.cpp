// Command-line entry point. Exit codes: 0 success, 1 usage error, 2 data or
// validation error, 3 adapter/transport error.

#include <omp.h>

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "teql/adapter.hpp"
#include "teql/augment.hpp"
#include "teql/config.hpp"
#include "teql/dataset.hpp"
#include "teql/fluency.hpp"
#include "teql/generator.hpp"
#include "teql/harness.hpp"
#include "teql/lexicon.hpp"
#include "teql/report.hpp"
#include "teql/schema.hpp"
#include "teql/sql.hpp"
#include "teql/util.hpp"

namespace {

using namespace teql;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTransport = 3;

std::string version_text() {
  std::ostringstream out;
  out << "teql 0.1.0\n"
      << "hardness-rules: " << sql::kHardnessRuleVersion << "\n"
      << "lexicon: " << fingerprint(to_json(default_utterance_lexicon()).dump()) << "\n"
      << "rename-lexicon: " << fingerprint(to_json(default_rename_lexicon()).dump()) << "\n"
      << "attribute-kb: " << fingerprint(to_json(default_attribute_kb()).dump());
  return out.str();
}

/// Flags shared by subcommands that read the dataset. Empty values leave the
/// config file (or default) in place.
struct InputFlags {
  std::string config;
  std::string schemas;
  std::string examples;
  std::string lexicon;
  std::string rename_lexicon;
  std::string attribute_kb;
  int jobs = -1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON config file");
    cmd->add_option("--schemas", schemas, "Spider tables.json");
    cmd->add_option("--examples", examples, "Spider dataset JSON");
    cmd->add_option("--lexicon", lexicon, "utterance lexicon JSON");
    cmd->add_option("--rename-lexicon", rename_lexicon, "column rename lexicon JSON");
    cmd->add_option("--attribute-kb", attribute_kb, "attribute knowledge base JSON");
  }

  AppConfig resolve() const {
    AppConfig c = config.empty() ? AppConfig{} : load_app_config(config);
    if (!schemas.empty()) c.schemas = schemas;
    if (!examples.empty()) c.examples = examples;
    if (!lexicon.empty()) c.lexicon = lexicon;
    if (!rename_lexicon.empty()) c.rename_lexicon = rename_lexicon;
    if (!attribute_kb.empty()) c.attribute_kb = attribute_kb;
    if (jobs >= 0) c.jobs = jobs;
    check_paths(c);
    return c;
  }
};

struct Inputs {
  std::vector<Schema> schemas;
  ExampleLoad load;
};

Inputs load_inputs(const AppConfig& c) {
  if (c.schemas.empty() || c.examples.empty()) throw DataError("--schemas and --examples (or a config naming them) are required");
  Inputs in;
  in.schemas = load_schemas(c.schemas);
  in.load = load_examples(c.examples, in.schemas);
  for (const auto& s : in.load.skipped) {
    std::cerr << "skipped example " << s.example_id << " (" << s.db_id << "): " << s.reason << "\n";
  }
  return in;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

std::set<Mr> parse_mr_list(const std::string& text) {
  std::set<Mr> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (item.empty()) continue;
    auto mr = parse_mr(item);
    if (!mr) throw DataError("unknown MR '" + item + "'");
    out.insert(*mr);
  }
  return out;
}

/// Utterances from a Spider dataset array, a suite (utterance-MR cases
/// only) or plain text lines.
std::vector<std::string> read_utterances(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<std::string> out;
  const std::string head = trim(text.substr(0, std::min<std::size_t>(text.size(), 64)));
  if (!head.empty() && head[0] == '[') {
    const json j = json::parse(text);
    for (const auto& item : j) {
      if (item.is_string()) {
        out.push_back(item.get<std::string>());
      } else if (item.contains("question")) {
        out.push_back(item.at("question").get<std::string>());
      } else {
        out.push_back(item.at("utterance").get<std::string>());
      }
    }
    return out;
  }
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (trim(line).empty()) continue;
    if (trim(line)[0] != '{') {
      out.push_back(line);
      continue;
    }
    const json j = json::parse(line);
    if (j.contains("mr")) {
      auto mr = parse_mr(j.at("mr").get<std::string>());
      if (mr && !is_utterance_mr(*mr)) continue;
    }
    out.push_back(j.contains("utterance") ? j.at("utterance").get<std::string>() : j.at("question").get<std::string>());
  }
  return out;
}

int real_main(int argc, char** argv) {
  CLI::App app{"Metamorphic testing for text-to-SQL models"};
  app.set_version_flag("--version", version_text());
  app.require_subcommand(1);
  int jobs = -1;
  app.add_option("--jobs", jobs, "worker threads (default: all cores)");

  // generate
  auto* gen = app.add_subcommand("generate", "generate a test suite from seed examples");
  InputFlags gen_in;
  gen_in.attach(gen);
  std::string gen_out;
  std::string gen_mrs;
  int gen_max = 0;
  std::int64_t gen_seed = -1;
  bool gen_no_opaque = false;
  bool gen_drop_pk = false;
  gen->add_option("--out", gen_out, "suite file (JSON lines)");
  gen->add_option("--mrs", gen_mrs, "comma-separated MR codes to enable");
  gen->add_option("--max-variants", gen_max, "cap per (seed, MR)");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_flag("--no-opaque-synonyms", gen_no_opaque, "never substitute an ambiguous aggregate phrase");
  gen->add_flag("--opaque-key-drop-primary-keys", gen_drop_pk, "opaque-key variants also drop primary keys");

  // validate
  auto* val = app.add_subcommand("validate", "check a suite's invariants against its seeds");
  InputFlags val_in;
  val_in.attach(val);
  std::string val_suite;
  std::string val_out;
  int val_max = 0;
  val->add_option("--suite", val_suite, "suite file")->required();
  val->add_option("--out", val_out, "validation report (default: stdout)");
  val->add_option("--max-variants", val_max, "cap per (seed, MR)");

  // run
  auto* runc = app.add_subcommand("run", "query a model on a suite and report inconsistency rates");
  InputFlags run_in;
  run_in.attach(runc);
  std::string run_suite;
  std::string run_adapter;
  double run_timeout = -1;
  int run_inflight = 0;
  std::string run_report;
  std::string run_format;
  double run_max_fail = -1;
  runc->add_option("--suite", run_suite, "suite file")->required();
  runc->add_option("--adapter", run_adapter, "cmd:<command> or http:<url>");
  runc->add_option("--timeout", run_timeout, "per-request timeout in seconds");
  runc->add_option("--max-inflight", run_inflight, "concurrent requests");
  runc->add_option("--report", run_report, "report path (default: stdout)");
  runc->add_option("--format", run_format, "json, csv or md");
  runc->add_option("--max-failure-rate", run_max_fail, "exit 3 when the fraction of failed cases exceeds this");

  // report
  auto* rep = app.add_subcommand("report", "re-render a JSON run report");
  std::string rep_input;
  std::string rep_format = "md";
  std::string rep_out;
  rep->add_option("--input", rep_input, "JSON report from `run`")->required();
  rep->add_option("--format", rep_format, "json, csv or md");
  rep->add_option("--out", rep_out, "output path (default: stdout)");

  // fluency stats
  auto* flu = app.add_subcommand("fluency", "utterance fluency analytics");
  flu->require_subcommand(1);
  auto* flu_stats = flu->add_subcommand("stats", "compare original and synthetic fluency");
  std::string flu_orig;
  std::string flu_syn;
  std::string flu_lm = "builtin";
  std::string flu_out;
  std::string flu_config;
  int flu_order = 0;
  double flu_k = 0;
  double flu_timeout = 300;
  flu_stats->add_option("--original", flu_orig, "original utterances")->required();
  flu_stats->add_option("--synthetic", flu_syn, "synthetic utterances or suite")->required();
  flu_stats->add_option("--lm", flu_lm, "builtin or cmd:<scorer>");
  flu_stats->add_option("--order", flu_order, "n-gram order for the built-in model");
  flu_stats->add_option("--k", flu_k, "add-k smoothing constant");
  flu_stats->add_option("--timeout", flu_timeout, "external scorer timeout in seconds");
  flu_stats->add_option("--config", flu_config, "JSON config file");
  flu_stats->add_option("--out", flu_out, "report path (default: stdout)");

  // sample
  auto* smp = app.add_subcommand("sample", "sample cases and emit an augmented training set");
  InputFlags smp_in;
  smp_in.attach(smp);
  std::string smp_strategy;
  std::size_t smp_n = 0;
  int smp_k = 0;
  std::string smp_rates;
  std::string smp_suite;
  std::string smp_out;
  std::uint64_t smp_seed = 0;
  double smp_scale = 1.0;
  smp->add_option("--strategy", smp_strategy, "rs, ss or as")->required();
  smp->add_option("--n", smp_n, "sample size")->required();
  smp->add_option("--k", smp_k, "MR count for ss (default: MRs in the suite)");
  smp->add_option("--rates", smp_rates, "per-MR rates for as: a JSON object or a file holding one");
  smp->add_option("--suite", smp_suite, "suite file")->required();
  smp->add_option("--out", smp_out, "output directory")->required();
  smp->add_option("--seed", smp_seed, "RNG seed");
  smp->add_option("--scale", smp_scale, "sampled cases kept per original example");

  // folds
  auto* fld = app.add_subcommand("folds", "split the seed dataset into folds");
  InputFlags fld_in;
  fld_in.attach(fld);
  int fld_k = 10;
  std::uint64_t fld_seed = 0;
  std::string fld_out;
  std::string fld_emit;
  fld->add_option("--k", fld_k, "fold count");
  fld->add_option("--seed", fld_seed, "RNG seed");
  fld->add_option("--out", fld_out, "membership JSON (default: stdout)");
  fld->add_option("--emit-dir", fld_emit, "also write fold_<i>/{train,dev}.json");

  // sql
  auto* sqlc = app.add_subcommand("sql", "SQL utilities");
  sqlc->require_subcommand(1);
  auto* sql_parse = sqlc->add_subcommand("parse", "print the AST of a query as JSON");
  std::string parse_text;
  sql_parse->add_option("query", parse_text, "SQL text")->required();
  auto* sql_match = sqlc->add_subcommand("match", "exact set match of two queries");
  std::string match_a;
  std::string match_b;
  std::string match_schemas;
  std::string match_db;
  bool match_values = false;
  sql_match->add_option("a", match_a, "first query")->required();
  sql_match->add_option("b", match_b, "second query")->required();
  sql_match->add_option("--schemas", match_schemas, "tables.json used to resolve columns");
  sql_match->add_option("--db", match_db, "db_id within --schemas");
  sql_match->add_flag("--compare-values", match_values, "treat literals as significant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (jobs >= 0) {
    for (auto* f : {&gen_in, &val_in, &run_in, &smp_in, &fld_in}) f->jobs = jobs;
  }

  if (gen->parsed()) {
    AppConfig c = gen_in.resolve();
    if (!gen_mrs.empty()) c.generation.enabled_mrs = parse_mr_list(gen_mrs);
    if (gen_max > 0) c.generation.max_variants_per_mr = gen_max;
    if (gen_seed >= 0) c.generation.rng_seed = static_cast<std::uint64_t>(gen_seed);
    if (gen_no_opaque) c.generation.include_opaque_synonyms = false;
    if (gen_drop_pk) c.generation.opaque_key_drop_primary_keys = true;
    if (gen_out.empty()) {
      if (c.output_dir.empty()) throw DataError("generate needs --out or an output_dir in the config");
      gen_out = (c.output_dir / "suite.jsonl").string();
    }
    const Inputs in = load_inputs(c);
    const GenerationResources res = load_resources(c);
    TestSuite suite = generate(in.load.examples, in.schemas, c.generation, res, c.jobs);
    suite.skipped.insert(suite.skipped.begin(), in.load.skipped.begin(), in.load.skipped.end());
    write_suite(suite, gen_out);
    std::cerr << "generated " << suite.cases.size() << " cases from " << suite.seed_count << " seeds";
    for (const auto& [mr, n] : suite.counts_by_mr) std::cerr << ' ' << mr_code(mr) << '=' << n;
    std::cerr << "\n";
    return kExitOk;
  }

  if (val->parsed()) {
    AppConfig c = val_in.resolve();
    const Inputs in = load_inputs(c);
    const TestSuite suite = read_suite(val_suite);
    const int cap = val_max > 0 ? val_max : c.generation.max_variants_per_mr;
    const ValidationReport report = validate_suite(suite, in.schemas, in.load.examples, cap, c.jobs);
    emit(serialize_validation(report), val_out);
    std::cerr << report.cases_checked << " cases checked, " << report.violations.size() << " violations\n";
    return report.ok() ? kExitOk : kExitData;
  }

  if (runc->parsed()) {
    AppConfig c = run_in.resolve();
    if (!run_adapter.empty()) c.adapter = run_adapter;
    if (run_timeout > 0) c.timeout_seconds = run_timeout;
    if (run_inflight > 0) c.max_inflight = run_inflight;
    if (!run_format.empty()) c.report_format = run_format;
    if (run_max_fail >= 0) c.max_failure_rate = run_max_fail;
    if (c.adapter.empty()) throw DataError("run needs --adapter or adapter.spec in the config");
    const ReportFormat format = parse_report_format(c.report_format);
    const Inputs in = load_inputs(c);
    const TestSuite suite = read_suite(run_suite);
    const AdapterSpec spec = parse_adapter_spec(c.adapter, c.timeout_seconds, c.max_inflight);
    auto adapter = make_adapter(spec);
    RunOptions options;
    options.max_inflight = spec.max_inflight;
    const RunResult result = run(*adapter, suite, in.load.examples, in.schemas, options);
    adapter.reset();
    Report report;
    report.records = result.records;
    report.suite_fingerprint = suite.fingerprint();
    report.config_fingerprint = suite.config_fingerprint;
    report.adapter = spec.to_string();
    report.protocol_violations = result.protocol_violations;
    emit(emit_report(report, format), run_report);
    for (const auto& v : result.protocol_violations) std::cerr << "protocol violation: " << v << "\n";
    std::size_t failures = 0;
    for (const auto& r : result.records) failures += r.verdict == Verdict::ModelFailure;
    const auto all = inconsistency_rates(result.records, GroupBy::All).front();
    std::cerr << "overall inconsistency " << format_rate(all.rate) << "% over " << all.counted << " cases, "
              << failures << " model failures\n";
    if (!result.records.empty() &&
        static_cast<double>(failures) / static_cast<double>(result.records.size()) > c.max_failure_rate) {
      std::cerr << "model failures exceed the threshold of " << c.max_failure_rate << "\n";
      return kExitTransport;
    }
    return kExitOk;
  }

  if (rep->parsed()) {
    const Report report = parse_json_report(read_file(rep_input));
    emit(emit_report(report, parse_report_format(rep_format)), rep_out);
    return kExitOk;
  }

  if (flu_stats->parsed()) {
    AppConfig c = flu_config.empty() ? AppConfig{} : load_app_config(flu_config);
    if (flu_order > 0) c.ngram_order = flu_order;
    if (flu_k > 0) c.ngram_k = flu_k;
    if (jobs >= 0) c.jobs = jobs;
    const auto original = read_utterances(flu_orig);
    const auto synthetic = read_utterances(flu_syn);
    FluencyReport report;
    if (flu_lm == "builtin") {
      const NgramModel lm = train_ngram(original, c.ngram_order, c.ngram_k);
      report = corpus_stats(original, synthetic, lm, c.jobs);
    } else if (flu_lm.starts_with("cmd:")) {
      const std::string cmd = flu_lm.substr(4);
      const auto timeout = std::chrono::milliseconds(static_cast<long long>(flu_timeout * 1000));
      report = corpus_stats(score_external(original, cmd, timeout), score_external(synthetic, cmd, timeout), flu_lm);
    } else {
      throw DataError("--lm must be 'builtin' or cmd:<scorer>");
    }
    emit(serialize_fluency_report(report), flu_out);
    return kExitOk;
  }

  if (smp->parsed()) {
    AppConfig c = smp_in.resolve();
    const TestSuite suite = read_suite(smp_suite);
    const Strategy strategy = parse_strategy(smp_strategy);
    std::vector<TransformedCase> picked;
    std::uint64_t seed = smp_seed;
    switch (strategy) {
      case Strategy::RS: picked = sample_random(suite, smp_n, seed); break;
      case Strategy::SS: picked = sample_stratified(suite, smp_n, smp_k, seed); break;
      case Strategy::AS: {
        if (smp_rates.empty()) throw DataError("--rates is required for adaptive sampling");
        const std::string text = trim(smp_rates)[0] == '{' ? smp_rates : read_file(smp_rates);
        picked = sample_adaptive(suite, parse_rates(text), smp_n, seed);
        break;
      }
    }
    TestSuite sampled;
    sampled.cases = picked;
    write_file(std::filesystem::path(smp_out) / "sample.jsonl", serialize_suite_lines(sampled));
    std::vector<Example> originals;
    std::vector<Schema> schemas;
    if (!c.schemas.empty() && !c.examples.empty()) {
      const Inputs in = load_inputs(c);
      originals = in.load.examples;
      schemas = in.schemas;
    }
    const AugmentedSet set = emit_augmented(originals, schemas, picked, smp_scale, smp_out);
    for (const auto& note : set.notes) std::cerr << note << "\n";
    std::cerr << "sampled " << picked.size() << " cases; wrote " << set.examples.size() << " examples and "
              << set.schemas.size() << " schemas\n";
    return kExitOk;
  }

  if (fld->parsed()) {
    AppConfig c = fld_in.resolve();
    const Inputs in = load_inputs(c);
    const FoldSplit split = make_folds(in.load.examples, fld_k, fld_seed);
    emit(serialize_folds(split), fld_out);
    if (!fld_emit.empty()) {
      for (int f = 0; f < split.fold_count; ++f) {
        const auto dir = std::filesystem::path(fld_emit) / ("fold_" + std::to_string(f));
        write_file(dir / "train.json", serialize_examples(split.complement(in.load.examples, f)));
        write_file(dir / "dev.json", serialize_examples(split.fold(in.load.examples, f)));
      }
    }
    return kExitOk;
  }

  if (sql_parse->parsed()) {
    std::cout << sql::to_json(sql::parse_sql(parse_text)).dump(2) << "\n";
    return kExitOk;
  }

  if (sql_match->parsed()) {
    std::vector<Schema> schemas;
    const Schema* schema = nullptr;
    if (!match_schemas.empty()) {
      schemas = load_schemas(match_schemas);
      schema = find_schema(schemas, match_db);
      if (!schema) throw DataError("schema '" + match_db + "' not found in " + match_schemas);
    }
    sql::MatchOptions options;
    options.value_insensitive = !match_values;
    const auto a = sql::canonicalize(sql::parse_sql(match_a), schema, options);
    const auto b = sql::canonicalize(sql::parse_sql(match_b), schema, options);
    const auto result = sql::compare_canonical(a, b);
    std::cout << (result.match ? "match" : "mismatch: " + result.first_difference) << "\n";
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return real_main(argc, argv);
  } catch (const teql::TransportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
