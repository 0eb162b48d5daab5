#include "rewritekit/quality.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rewritekit/textops.hpp"

namespace rewritekit {

namespace {

void check_value(const char* name, double v) {
  if (!std::isfinite(v) || v < 0.0) {
    throw DataError(std::string("threshold ") + name + " must be a non-negative number");
  }
}

}  // namespace

void QualityThresholds::validate() const {
  check_value("a", a);
  check_value("b", b);
  check_value("c", c);
  check_value("d1", d1);
  check_value("d2", d2);
  check_value("min_diff", min_diff);
  check_value("sentence_threshold", sentence_threshold);
  if (!(d2 > d1)) throw DataError("threshold d2 must exceed d1");
  if (sentence_threshold > 1.0) throw DataError("threshold sentence_threshold must lie in [0, 1]");
}

QualityThresholds QualityThresholds::from_json(const Json& j) {
  if (!j.is_object()) throw DataError("thresholds must be a JSON object");
  QualityThresholds t;
  const std::pair<const char*, double*> fields[] = {
      {"a", &t.a},   {"b", &t.b},   {"c", &t.c}, {"d1", &t.d1}, {"d2", &t.d2},
      {"min_diff", &t.min_diff}, {"sentence_threshold", &t.sentence_threshold}};
  for (const auto& [key, value] : j.items()) {
    double* slot = nullptr;
    for (const auto& [name, field] : fields) {
      if (key == name) slot = field;
    }
    if (!slot) throw DataError("unknown threshold key '" + key + "'");
    if (!value.is_number()) throw DataError("threshold " + key + " must be a number");
    *slot = value.get<double>();
  }
  t.validate();
  return t;
}

QualityThresholds QualityThresholds::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

OrderedJson QualityThresholds::to_json() const {
  OrderedJson j;
  j["a"] = a;
  j["b"] = b;
  j["c"] = c;
  j["d1"] = d1;
  j["d2"] = d2;
  j["min_diff"] = min_diff;
  j["sentence_threshold"] = sentence_threshold;
  return j;
}

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Shorten: return "SHORTEN";
    case TaskKind::Elaborate: return "ELABORATE";
    case TaskKind::Generic: return "GENERIC";
  }
  return "GENERIC";
}

TaskKeywords TaskKeywords::defaults() {
  return {{"shorten", "shorter", "concise", "summarize", "condense", "trim", "brief"},
          {"elaborate", "expand", "lengthen", "add more", "detail", "describe more"}};
}

TaskKeywords TaskKeywords::load(const std::string& dir) {
  TaskKeywords k = defaults();
  const std::filesystem::path base(dir);
  if (std::filesystem::exists(base / "shorten.txt")) k.shorten = load_word_list((base / "shorten.txt").string());
  if (std::filesystem::exists(base / "elaborate.txt")) {
    k.elaborate = load_word_list((base / "elaborate.txt").string());
  }
  return k;
}

TaskType classify_task_type(std::string_view instruction, const TaskKeywords& keywords) {
  if (auto hit = find_keyword(instruction, keywords.shorten)) return {TaskKind::Shorten, std::move(hit)};
  if (auto hit = find_keyword(instruction, keywords.elaborate)) return {TaskKind::Elaborate, std::move(hit)};
  return {};
}

std::string_view to_string(QualityRule rule) {
  switch (rule) {
    case QualityRule::EditRatio: return "EDIT_RATIO";
    case QualityRule::NliFwd: return "NLI_FWD";
    case QualityRule::NliRev: return "NLI_REV";
    case QualityRule::ShortenLen: return "SHORTEN_LEN";
    case QualityRule::ElaborateLen: return "ELABORATE_LEN";
  }
  return "UNKNOWN";
}

QualityVerdict judge(const QualityMeasurements& m, const TaskType& task, const QualityThresholds& t) {
  QualityVerdict v;
  v.measurements = m;
  if (m.edit_ratio < t.a) {
    v.failed_rule = QualityRule::EditRatio;
  } else if (m.nli_fwd < t.b) {
    v.failed_rule = QualityRule::NliFwd;
  } else if (m.nli_rev < t.c) {
    v.failed_rule = QualityRule::NliRev;
  } else if (task.kind == TaskKind::Shorten && m.len_ratio > t.d1) {
    v.failed_rule = QualityRule::ShortenLen;
  } else if (task.kind == TaskKind::Elaborate && m.len_ratio < t.d2) {
    v.failed_rule = QualityRule::ElaborateLen;
  }
  v.score = v.failed_rule ? 0 : 1;
  return v;
}

QualityMeasurements measure(std::string_view source, std::string_view candidate, NliBackend& nli) {
  const TokenSeq src = tokenize(source);
  const TokenSeq cand = tokenize(candidate);
  QualityMeasurements m;
  m.edit_ratio = edit_ratio(src, cand);
  m.len_ratio = length_ratio(src, cand);
  const auto scores = nli.score_batch({{std::string(source), std::string(candidate)},
                                       {std::string(candidate), std::string(source)}});
  if (scores.size() != 2) throw ProtocolError("NLI backend returned a short batch");
  m.nli_fwd = scores[0].score;
  m.nli_rev = scores[1].score;
  return m;
}

QualityVerdict quality_score(std::string_view source, std::string_view candidate, const TaskType& task,
                             const QualityThresholds& thresholds, NliBackend& nli) {
  return judge(measure(source, candidate, nli), task, thresholds);
}

HallucinationFix fix_hallucination(std::string_view source, std::string_view target, NliBackend& nli,
                                   const QualityThresholds& thresholds) {
  HallucinationFix fix;
  const SentenceSeq sentences = split_sentences(target);
  if (sentences.empty()) {
    fix.fixed_target = std::string(target);
    return fix;
  }
  std::vector<NliPair> pairs;
  for (const auto& s : sentences.sentences) pairs.push_back({std::string(source), s});
  const auto scores = nli.score_batch(pairs);
  if (scores.size() != pairs.size()) throw ProtocolError("NLI backend returned a short batch");

  std::vector<bool> keep(sentences.size());
  std::size_t kept = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    keep[i] = !(scores[i].score < thresholds.sentence_threshold);
    if (keep[i]) {
      ++kept;
    } else {
      fix.removed.push_back(sentences.sentences[i]);
    }
  }
  if (fix.removed.empty()) {
    fix.fixed_target = std::string(target);
    return fix;
  }
  if (kept * 2 < sentences.size()) return fix;

  // Kept sentences keep the whitespace that followed them in the target.
  std::string rebuilt;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (!keep[i]) continue;
    const std::size_t begin = sentences.spans[i].begin;
    const std::size_t end = i + 1 < sentences.size() ? sentences.spans[i + 1].begin : sentences.spans[i].end;
    rebuilt.append(target.substr(begin, end - begin));
  }
  while (!rebuilt.empty() && std::isspace(static_cast<unsigned char>(rebuilt.back()))) rebuilt.pop_back();

  if (nli_score(source, rebuilt, nli).score < thresholds.b) return fix;
  fix.fixed_target = std::move(rebuilt);
  return fix;
}

std::string_view to_string(FilterReason reason) {
  switch (reason) {
    case FilterReason::Ok: return "OK";
    case FilterReason::UnfixableHallucination: return "UNFIXABLE_HALLUCINATION";
    case FilterReason::DiffTooSmall: return "DIFF_TOO_SMALL";
  }
  return "UNKNOWN";
}

FilterOutcome filter_record(const RewriteRecord& r, const QualityThresholds& thresholds, NliBackend& nli) {
  if (!r.target) throw DataError(r.id + ": target missing");
  const TokenSeq src = tokenize(r.source);
  if (src.empty()) throw DataError(r.id + ": source empty");

  FilterOutcome out;
  HallucinationFix fix = fix_hallucination(r.source, *r.target, nli, thresholds);
  out.removed = std::move(fix.removed);
  if (!fix.fixed_target) {
    out.keep = false;
    out.reason = FilterReason::UnfixableHallucination;
    return out;
  }
  out.edit_ratio = edit_ratio(src, tokenize(*fix.fixed_target));
  if (out.edit_ratio < thresholds.min_diff) {
    out.keep = false;
    out.reason = FilterReason::DiffTooSmall;
    return out;
  }
  RewriteRecord kept = r;
  kept.target = std::move(*fix.fixed_target);
  if (!out.removed.empty()) kept.meta["removed_sentences"] = std::to_string(out.removed.size());
  out.fixed = std::move(kept);
  return out;
}

}  // namespace rewritekit
