#include "rewritekit/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>

#include "rewritekit/corpusio.hpp"
#include "rewritekit/nliclient.hpp"
#include "rewritekit/parallel.hpp"
#include "rewritekit/preference.hpp"
#include "rewritekit/quality.hpp"
#include "rewritekit/stats.hpp"
#include "rewritekit/synthgen.hpp"
#include "rewritekit/wikiedits.hpp"

namespace rewritekit {

namespace {

// A problem with how the tool was invoked, found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NliFlags {
  std::string endpoint;
  bool stub = false;
  std::string cache;
};

struct Options {
  std::string in, out, format = "markdown", per_record, thresholds, task_keywords, rejects, verdicts, pairs;
  std::string dump, keywords, rewrite_out, markup_report, shots, llm_endpoint, skipped, json, label = "All";
  std::string ratings, dimension = "all", sari_mode = "canonical";
  unsigned jobs = 0;
  unsigned concurrency = 4;
  bool strict = false, no_reference = false, all_pairs = false, check_gradient = false, likert = false;
  double lr = 0.1, init_scale = 0.0;
  int epochs = 500;
  std::uint64_t seed = 0;
  GenerationParams generation;
  NliFlags nli;
};

std::string version_string() {
  return std::string("rewritekit ") + REWRITEKIT_VERSION + " (config schema " + REWRITEKIT_CONFIG_SCHEMA_VERSION + ")";
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("-j,--jobs", o.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  sub->add_flag("--strict", o.strict, "Fail on the first malformed input line");
}

void add_nli(CLI::App* sub, Options& o) {
  auto* endpoint = sub->add_option("--nli-endpoint", o.nli.endpoint, "NLI service URL (default: $NLI_ENDPOINT)");
  auto* stub = sub->add_flag("--nli-stub", o.nli.stub, "Use the deterministic lexical NLI stand-in");
  endpoint->excludes(stub);
  sub->add_option("--nli-cache", o.nli.cache, "JSONL file memoizing NLI scores");
}

void add_format(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"markdown", "md", "tsv"}))
      ->capture_default_str();
}

std::shared_ptr<NliBackend> make_nli(const NliFlags& flags, bool required) {
  std::shared_ptr<NliBackend> backend;
  std::string endpoint = flags.endpoint;
  if (endpoint.empty() && !flags.stub) {
    if (const char* env = std::getenv("NLI_ENDPOINT")) endpoint = env;
  }
  if (flags.stub) {
    backend = std::make_shared<StubNli>();
  } else if (!endpoint.empty()) {
    HttpNliOptions options;
    options.endpoint = endpoint;
    backend = std::make_shared<HttpNli>(options);
  } else if (required) {
    throw UsageError("an NLI scorer is required: pass --nli-endpoint URL, set NLI_ENDPOINT, or use --nli-stub");
  } else {
    if (!flags.cache.empty()) throw UsageError("--nli-cache needs --nli-endpoint or --nli-stub");
    return nullptr;
  }
  if (!flags.cache.empty()) backend = std::make_shared<CachedNli>(backend, flags.cache);
  return backend;
}

void report_line_errors(const std::string& path, const std::vector<LineError>& errors, std::ostream& err) {
  for (const auto& e : errors) err << path << ":" << e.line << ": skipped: " << e.message << "\n";
}

template <class Record>
std::vector<Record> load(const std::string& path, bool strict, std::ostream& err) {
  auto result = read_records<Record>(path, strict);
  report_line_errors(path, result.errors, err);
  return std::move(result.records);
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path);
  file << text;
  if (!file) throw IoError("write failed: " + path);
}

QualityThresholds thresholds_of(const Options& o) {
  return o.thresholds.empty() ? QualityThresholds{} : QualityThresholds::load(o.thresholds);
}

// Per-record failure that is fatal only in strict mode.
void soft_fail(const Options& o, const std::string& message, std::ostream& err) {
  if (o.strict) throw DataError(message);
  err << "skipped: " << message << "\n";
}

// ---- subcommands ------------------------------------------------------------

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto records = load<RewriteRecord>(o.in, o.strict, err);
  const auto nli = make_nli(o.nli, false);
  EvalOptions options;
  options.reference = !o.no_reference;
  options.sari_mode = parse_sari_mode(o.sari_mode);
  options.nli = nli.get();
  options.jobs = o.jobs;
  const EvalReport report = evaluate_records(records, options);
  for (const auto& s : report.skipped) soft_fail(o, s.id + ": " + s.reason, err);
  if (!o.per_record.empty()) {
    JsonlWriter writer(o.per_record);
    for (const auto& row : report.rows) writer.write_json(to_json(row, report.columns));
    writer.close();
  }
  emit(o.out, render_eval(report, parse_report_format(o.format)), out);
  return kExitOk;
}

struct ScoreItem {
  std::string id;
  std::string instruction;
  std::string source;
  std::vector<std::pair<long, std::string>> candidates;  // rank, text
};

int cmd_score(const Options& o, std::ostream&, std::ostream& err) {
  const QualityThresholds thresholds = thresholds_of(o);
  const TaskKeywords keywords = o.task_keywords.empty() ? TaskKeywords::defaults() : TaskKeywords::load(o.task_keywords);
  const auto nli = make_nli(o.nli, true);

  JsonLineReader reader(o.in, o.strict);
  std::vector<ScoreItem> items;
  while (auto j = reader.next()) {
    try {
      ScoreItem item;
      if (j->contains("candidates")) {
        const CandidateSet set = RecordCodec<CandidateSet>::from_json(*j);
        item = {set.id, set.instruction, set.source, {}};
        for (const auto& c : set.candidates) item.candidates.emplace_back(c.rank, c.text);
      } else {
        const RewriteRecord r = RecordCodec<RewriteRecord>::from_json(*j);
        const auto& text = r.prediction ? r.prediction : r.target;
        if (!text) throw DataError("record has neither prediction nor target");
        item = {r.id, r.instruction, r.source, {{0, *text}}};
      }
      items.push_back(std::move(item));
    } catch (const DataError& e) {
      reader.reject_current(e.what());
    }
  }
  report_line_errors(o.in, reader.errors(), err);

  struct Scored {
    std::vector<OrderedJson> verdicts;
    std::string error;
  };
  const auto scored = parallel_map(items, o.jobs, [&](const ScoreItem& item) {
    Scored s;
    const TaskType task = classify_task_type(item.instruction, keywords);
    try {
      for (const auto& [rank, text] : item.candidates) {
        const QualityVerdict v = quality_score(item.source, text, task, thresholds, *nli);
        OrderedJson j;
        j["id"] = item.id;
        j["rank"] = rank;
        j["score"] = v.score;
        j["failed_rule"] = v.failed_rule ? OrderedJson(std::string(to_string(*v.failed_rule))) : OrderedJson(nullptr);
        j["task"] = std::string(to_string(task.kind));
        j["edit_ratio"] = v.measurements.edit_ratio;
        j["nli_fwd"] = v.measurements.nli_fwd;
        j["nli_rev"] = v.measurements.nli_rev;
        j["len_ratio"] = v.measurements.len_ratio;
        s.verdicts.push_back(std::move(j));
      }
    } catch (const std::domain_error&) {
      s.error = item.id + ": source is empty";
      s.verdicts.clear();
    }
    return s;
  });
  JsonlWriter writer(o.out);
  for (const auto& s : scored) {
    if (!s.error.empty()) {
      soft_fail(o, s.error, err);
      continue;
    }
    for (const auto& v : s.verdicts) writer.write_json(v);
  }
  writer.close();
  err << "scored " << writer.count() << " candidates\n";
  return kExitOk;
}

int cmd_filter(const Options& o, std::ostream&, std::ostream& err) {
  const QualityThresholds thresholds = thresholds_of(o);
  const auto nli = make_nli(o.nli, true);
  const auto records = load<RewriteRecord>(o.in, o.strict, err);

  struct Outcome {
    std::optional<FilterOutcome> result;
    std::string error;
  };
  const auto outcomes = parallel_map(records, o.jobs, [&](const RewriteRecord& r) {
    Outcome out;
    try {
      out.result = filter_record(r, thresholds, *nli);
    } catch (const DataError& e) {
      out.error = e.what();
    }
    return out;
  });

  JsonlWriter kept(o.out);
  std::optional<JsonlWriter> rejects;
  if (!o.rejects.empty()) rejects.emplace(o.rejects);
  std::map<std::string, std::size_t> dropped;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Outcome& oc = outcomes[i];
    if (!oc.result) {
      soft_fail(o, oc.error, err);
      continue;
    }
    if (oc.result->keep) {
      kept.write(*oc.result->fixed);
      continue;
    }
    ++dropped[std::string(to_string(oc.result->reason))];
    if (rejects) {
      OrderedJson j;
      j["id"] = records[i].id;
      j["reason"] = std::string(to_string(oc.result->reason));
      j["removed_sentences"] = oc.result->removed;
      j["record"] = RecordCodec<RewriteRecord>::to_json(records[i]);
      rejects->write_json(j);
    }
  }
  kept.close();
  if (rejects) rejects->close();
  err << "kept " << kept.count();
  for (const auto& [reason, n] : dropped) err << ", " << reason << " " << n;
  err << "\n";
  return kExitOk;
}

int cmd_pairs(const Options& o, std::ostream&, std::ostream& err) {
  std::map<std::pair<std::string, long>, int> scores;
  JsonLineReader verdicts(o.verdicts, true);
  while (auto j = verdicts.next()) {
    const std::string where = o.verdicts + ":" + std::to_string(verdicts.line_number()) + ": ";
    if (!j->contains("id") || !j->contains("score") || !(*j)["score"].is_number_integer()) {
      throw DataError(where + "verdict needs id and an integer score");
    }
    const Json& idj = (*j)["id"];
    const std::string id = idj.is_string() ? idj.get<std::string>() : idj.dump();
    const long rank = j->contains("rank") ? (*j)["rank"].get<long>() : 0;
    if (!scores.emplace(std::make_pair(id, rank), (*j)["score"].get<int>()).second) {
      throw DataError(where + "duplicate verdict for " + id + " rank " + std::to_string(rank));
    }
  }

  const auto sets = load<CandidateSet>(o.in, o.strict, err);
  const PairMode mode = o.all_pairs ? PairMode::CrossProduct : PairMode::TopRanked;
  JsonlWriter writer(o.out);
  std::size_t discarded = 0;
  for (const auto& set : sets) {
    const auto problems = validate_candidate_set(set);
    if (!problems.empty()) {
      soft_fail(o, set.id + ": " + problems.front(), err);
      continue;
    }
    std::vector<int> s;
    for (const auto& c : set.candidates) {
      const auto it = scores.find({set.id, c.rank});
      if (it == scores.end()) throw DataError(set.id + ": no verdict for rank " + std::to_string(c.rank));
      s.push_back(it->second);
    }
    const auto pairs = build_pairs(set, s, mode);
    if (pairs.empty()) ++discarded;
    for (const auto& p : pairs) writer.write(p);
  }
  writer.close();
  err << "pairs " << writer.count() << ", sets discarded " << discarded << "\n";
  return kExitOk;
}

int cmd_reward_train(const Options& o, std::ostream&, std::ostream& err) {
  const auto nli = make_nli(o.nli, true);
  const auto pairs = load<ComparisonPair>(o.pairs, o.strict, err);
  if (pairs.empty()) throw DataError(o.pairs + ": no comparison pairs");
  TrainConfig config;
  config.lr = o.lr;
  config.epochs = o.epochs;
  config.seed = o.seed;
  config.init_scale = o.init_scale;
  const FeatureDiffs diffs = pair_feature_diffs(pairs, *nli, o.jobs);
  const TrainResult result = train_on_diffs(diffs, config);
  result.model.save(o.out);
  err << "pairs " << pairs.size() << ", loss " << format_fixed(result.initial_loss, 6) << " -> "
      << format_fixed(result.final_loss, 6) << ", training accuracy "
      << format_fixed(100.0 * pair_accuracy(result.model, diffs)) << "%\n";
  if (o.check_gradient) {
    const double at_start = gradient_check(std::vector<double>(result.model.weights.size(), 0.0), diffs);
    const double at_end = gradient_check(result.model.weights, diffs);
    err << "gradient check: max relative error " << at_start << " (initial), " << at_end << " (final)\n";
    if (at_start > 1e-5 || at_end > 1e-5) throw DataError("gradient check failed");
  }
  return kExitOk;
}

int cmd_extract_wiki(const Options& o, std::ostream&, std::ostream& err) {
  ExtractOptions options;
  if (!o.keywords.empty()) options.keywords = KeywordConfig::load(o.keywords);
  options.jobs = o.jobs;
  const ExtractResult result = extract_wiki(o.dump, options);
  write_records(result.kept, o.out);
  if (!o.rejects.empty()) {
    JsonlWriter writer(o.rejects);
    for (const auto& r : result.rejected) {
      OrderedJson j = RecordCodec<RevisionRecord>::to_json(r.record);
      j["rule"] = std::string(to_string(r.decision.rule));
      j["matched_term"] = r.decision.matched_term ? OrderedJson(*r.decision.matched_term) : OrderedJson(nullptr);
      writer.write_json(j);
    }
    writer.close();
  }
  std::size_t rewrites = 0;
  if (!o.rewrite_out.empty()) rewrites = write_records(wiki_rewrite_records(result.kept, options.keywords), o.rewrite_out);
  if (!o.markup_report.empty()) {
    OrderedJson j;
    j["pages"] = result.pages;
    j["revisions"] = result.revisions;
    j["removed_markup"] = result.markup.counts;
    emit(o.markup_report, j.dump(2) + "\n", err);
  }
  err << "pages " << result.pages << ", revisions " << result.revisions << ", kept " << result.kept.size()
      << ", rejected " << result.rejected.size();
  if (!o.rewrite_out.empty()) err << ", rewrite records " << rewrites;
  err << "\n";
  return kExitOk;
}

int cmd_synth_prompt(const Options& o, std::ostream&, std::ostream& err) {
  const std::vector<CotShot> shots = o.shots.empty() ? default_shots() : load_shots(o.shots);
  build_cot_prompt("probe", shots);  // rejects bad shot files before any work
  const auto records = load<RewriteRecord>(o.in, o.strict, err);
  JsonlWriter writer(o.out);
  for (const auto& r : records) {
    try {
      const CotPrompt p = build_cot_prompt(r.source, shots);
      OrderedJson j;
      j["id"] = r.id;
      j["source"] = r.source;
      j["prompt"] = p.rendered;
      writer.write_json(j);
    } catch (const std::invalid_argument& e) {
      soft_fail(o, r.id + ": " + e.what(), err);
    }
  }
  writer.close();
  err << "prompts " << writer.count() << "\n";
  return kExitOk;
}

int cmd_synth_generate(const Options& o, std::ostream&, std::ostream& err) {
  std::string endpoint = o.llm_endpoint;
  if (endpoint.empty()) {
    if (const char* env = std::getenv("LLM_ENDPOINT")) endpoint = env;
  }
  if (endpoint.empty()) throw UsageError("an LLM endpoint is required: pass --llm-endpoint URL or set LLM_ENDPOINT");

  JsonLineReader reader(o.in, o.strict);
  std::vector<GenerationInput> inputs;
  while (auto j = reader.next()) {
    auto text = [&](const char* key) -> std::optional<std::string> {
      if (!j->contains(key) || !(*j)[key].is_string()) return std::nullopt;
      return (*j)[key].get<std::string>();
    };
    GenerationInput in;
    const auto id = j->contains("id") && (*j)["id"].is_number_integer() ? std::optional((*j)["id"].dump()) : text("id");
    const auto source = text("source");
    if (!id || !source) {
      reader.reject_current("needs string id and source");
      continue;
    }
    in.id = *id;
    in.source = *source;
    if (auto inst = text("instruction"); inst && inst->find_first_not_of(" \t\r\n") != std::string::npos) {
      in.instruction = inst;
    }
    in.cot_prompt = text("prompt");
    inputs.push_back(std::move(in));
  }
  report_line_errors(o.in, reader.errors(), err);

  HttpLlm llm(endpoint, o.generation);
  const GenerationResult result = generate_targets(inputs, llm, std::max(1u, o.concurrency));
  write_records(result.records, o.out);
  if (!o.skipped.empty()) {
    JsonlWriter writer(o.skipped);
    for (const auto& s : result.skipped) {
      OrderedJson j;
      j["id"] = s.id;
      j["reason"] = std::string(to_string(s.reason));
      j["detail"] = s.detail;
      writer.write_json(j);
    }
    writer.close();
  }
  err << "generated " << result.records.size() << ", skipped " << result.skipped.size() << "\n";
  return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out, std::ostream& err) {
  const auto nli = make_nli(o.nli, false);
  std::size_t line_errors = 0;
  const DatasetStats s = dataset_stats_file(o.in, nli.get(), o.jobs, o.strict, &line_errors);
  if (line_errors) err << o.in << ": " << line_errors << " malformed lines skipped\n";
  if (s.skipped_missing_target || s.skipped_empty_source) {
    err << "skipped " << s.skipped_missing_target << " records without target, " << s.skipped_empty_source
        << " with an empty source\n";
  }
  if (!o.json.empty()) emit(o.json, s.to_json().dump(2) + "\n", out);
  emit(o.out, render_stats({{o.label, s}}, parse_report_format(o.format)), out);
  return kExitOk;
}

int cmd_kappa(const Options& o, std::ostream& out, std::ostream&) {
  const RatingMatrix m = RatingMatrix::load(o.ratings);
  std::vector<Dimension> dims;
  if (o.dimension == "all") {
    for (Dimension d : all_dimensions()) {
      for (const auto& r : m.ratings) {
        if (r.dimension == d) {
          dims.push_back(d);
          break;
        }
      }
    }
  } else {
    try {
      dims.push_back(parse_dimension(o.dimension));
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
  }
  if (dims.empty()) throw DataError(o.ratings + ": no ratings");
  std::vector<std::pair<Dimension, KappaResult>> results;
  for (Dimension d : dims) results.emplace_back(d, fleiss_kappa(m, d));
  const ReportFormat format = parse_report_format(o.format);
  std::string text = render_kappa(results, format);
  if (o.likert) text += "\n" + render_likert(likert_summary(m), format);
  emit(o.out, text, out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Rewrite dataset curation and evaluation toolkit", "rewritekit"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against sources and references");
  evaluate->add_option("--in", o.in, "Rewrite records with prediction (and target)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", o.out, "Report file (default: stdout)");
  evaluate->add_option("--per-record", o.per_record, "JSONL file of per-record metric values");
  evaluate->add_flag("--no-reference", o.no_reference, "Only source-relative metrics");
  evaluate->add_option("--sari-mode", o.sari_mode, "SARI deletion scoring")
      ->check(CLI::IsMember({"canonical", "all_f1"}))
      ->capture_default_str();
  add_format(evaluate, o);
  add_nli(evaluate, o);
  add_common(evaluate, o);

  auto* score = app.add_subcommand("score", "Apply Q(x,t) to rewrite records or candidate sets");
  score->add_option("--in", o.in)->required()->check(CLI::ExistingFile);
  score->add_option("--out", o.out, "Verdict JSONL")->required();
  score->add_option("--thresholds", o.thresholds, "Threshold JSON")->check(CLI::ExistingFile);
  score->add_option("--task-keywords", o.task_keywords, "Directory with shorten.txt / elaborate.txt")
      ->check(CLI::ExistingDirectory);
  add_nli(score, o);
  add_common(score, o);

  auto* filter = app.add_subcommand("filter", "Hallucination repair and minimum-difference filtering");
  filter->add_option("--in", o.in)->required()->check(CLI::ExistingFile);
  filter->add_option("--out", o.out, "Kept records")->required();
  filter->add_option("--rejects", o.rejects, "Dropped records with reasons");
  filter->add_option("--thresholds", o.thresholds, "Threshold JSON")->check(CLI::ExistingFile);
  add_nli(filter, o);
  add_common(filter, o);

  auto* pairs = app.add_subcommand("pairs", "Build comparison pairs from scored candidate sets");
  pairs->add_option("--in", o.in, "Candidate sets")->required()->check(CLI::ExistingFile);
  pairs->add_option("--verdicts", o.verdicts, "Output of score")->required()->check(CLI::ExistingFile);
  pairs->add_option("--out", o.out)->required();
  pairs->add_flag("--all-pairs", o.all_pairs, "Every good x bad combination instead of the top-ranked pair");
  add_common(pairs, o);

  auto* train = app.add_subcommand("reward-train", "Fit the linear reward model with the pairwise loss");
  train->add_option("--pairs", o.pairs)->required()->check(CLI::ExistingFile);
  train->add_option("--out", o.out, "Model JSON")->required();
  train->add_option("--lr", o.lr)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--epochs", o.epochs)->capture_default_str()->check(CLI::NonNegativeNumber);
  train->add_option("--seed", o.seed)->capture_default_str();
  train->add_option("--init-scale", o.init_scale, "Std. dev. of random initial weights (0 = zeros)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train->add_flag("--check-gradient", o.check_gradient, "Compare the analytic gradient with finite differences");
  add_nli(train, o);
  add_common(train, o);

  auto* wiki = app.add_subcommand("extract-wiki", "Mine revision edits from a MediaWiki history dump");
  wiki->add_option("--dump", o.dump)->required()->check(CLI::ExistingFile);
  wiki->add_option("--out", o.out, "Kept revision records")->required();
  wiki->add_option("--keywords", o.keywords, "Keyword list directory")->check(CLI::ExistingDirectory);
  wiki->add_option("--rejects", o.rejects, "Filtered revisions with rule labels");
  wiki->add_option("--rewrite-out", o.rewrite_out, "Rewrite records from detailed, verb-initial comments");
  wiki->add_option("--markup-report", o.markup_report, "JSON counts of removed markup");
  add_common(wiki, o);

  auto* prompt = app.add_subcommand("synth-prompt", "Render chain-of-thought instruction prompts");
  prompt->add_option("--in", o.in, "Records with id and source")->required()->check(CLI::ExistingFile);
  prompt->add_option("--shots", o.shots, "Exemplar JSON")->check(CLI::ExistingFile);
  prompt->add_option("--out", o.out)->required();
  add_common(prompt, o);

  auto* generate = app.add_subcommand("synth-generate", "Obtain instructions and targets from an LLM service");
  generate->add_option("--in", o.in, "Prompts or records")->required()->check(CLI::ExistingFile);
  generate->add_option("--out", o.out)->required();
  generate->add_option("--llm-endpoint", o.llm_endpoint, "LLM service URL (default: $LLM_ENDPOINT)");
  generate->add_option("--skipped", o.skipped, "JSONL of inputs that produced no record");
  generate->add_option("--concurrency", o.concurrency, "Requests in flight")->capture_default_str();
  generate->add_option("--max-tokens", o.generation.max_tokens)->capture_default_str();
  generate->add_option("--temperature", o.generation.temperature)->capture_default_str();
  generate->add_option("--top-k", o.generation.top_k)->capture_default_str();
  add_common(generate, o);

  auto* stats = app.add_subcommand("stats", "Dataset statistics table");
  stats->add_option("--in", o.in)->required()->check(CLI::ExistingFile);
  stats->add_option("--out", o.out, "Report file (default: stdout)");
  stats->add_option("--json", o.json, "Full-precision JSON");
  stats->add_option("--label", o.label, "Row label")->capture_default_str();
  add_format(stats, o);
  add_nli(stats, o);
  add_common(stats, o);

  auto* kappa = app.add_subcommand("kappa", "Fleiss kappa and Likert means of human ratings");
  kappa->add_option("--ratings", o.ratings)->required()->check(CLI::ExistingFile);
  kappa->add_option("--dimension", o.dimension, "all or one dimension name")->capture_default_str();
  kappa->add_option("--out", o.out, "Report file (default: stdout)");
  kappa->add_flag("--likert", o.likert, "Append per-system mean ratings");
  add_format(kappa, o);
  add_common(kappa, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (evaluate->parsed()) return cmd_evaluate(o, out, err);
    if (score->parsed()) return cmd_score(o, out, err);
    if (filter->parsed()) return cmd_filter(o, out, err);
    if (pairs->parsed()) return cmd_pairs(o, out, err);
    if (train->parsed()) return cmd_reward_train(o, out, err);
    if (wiki->parsed()) return cmd_extract_wiki(o, out, err);
    if (prompt->parsed()) return cmd_synth_prompt(o, out, err);
    if (generate->parsed()) return cmd_synth_generate(o, out, err);
    if (stats->parsed()) return cmd_stats(o, out, err);
    if (kappa->parsed()) return cmd_kappa(o, out, err);
  } catch (const UsageError& e) {
    err << "rewritekit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "rewritekit: error: " << e.what() << "\n";
    return kExitDataError;
  }
  err << app.help();
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv = {"rewritekit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rewritekit
