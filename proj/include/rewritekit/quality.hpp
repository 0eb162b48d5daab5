#ifndef REWRITEKIT_QUALITY_HPP
#define REWRITEKIT_QUALITY_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rewritekit/corpusio.hpp"
#include "rewritekit/nliclient.hpp"

namespace rewritekit {

/// Q(x,t) thresholds plus the post-processing knobs. Every rule fails on a
/// strict inequality, so a measurement equal to its threshold passes.
struct QualityThresholds {
  double a = 1.2;   // minimum edit ratio
  double b = 0.7;   // minimum NLI source -> candidate
  double c = 0.7;   // minimum NLI candidate -> source
  double d1 = 0.6;  // maximum length ratio for shorten tasks
  double d2 = 2.0;  // minimum length ratio for elaborate tasks
  double min_diff = 0.05;
  double sentence_threshold = 0.5;

  /// Throws DataError when a value is negative or non-finite, d2 <= d1, or
  /// sentence_threshold lies outside [0, 1].
  void validate() const;

  /// Keys a, b, c, d1, d2, min_diff, sentence_threshold; absent keys keep
  /// their defaults, unknown keys are rejected.
  static QualityThresholds from_json(const Json& j);
  static QualityThresholds load(const std::string& path);
  OrderedJson to_json() const;
};

enum class TaskKind { Shorten, Elaborate, Generic };

std::string_view to_string(TaskKind kind);

struct TaskType {
  TaskKind kind = TaskKind::Generic;
  std::optional<std::string> matched_keyword;  // set iff kind != Generic
};

struct TaskKeywords {
  std::vector<std::string> shorten;
  std::vector<std::string> elaborate;

  static TaskKeywords defaults();
  /// Reads shorten.txt and elaborate.txt from `dir`; a missing file keeps
  /// the default list.
  static TaskKeywords load(const std::string& dir);
};

/// Keyword scan over the instruction, shorten list first.
TaskType classify_task_type(std::string_view instruction,
                            const TaskKeywords& keywords = TaskKeywords::defaults());

enum class QualityRule { EditRatio, NliFwd, NliRev, ShortenLen, ElaborateLen };

std::string_view to_string(QualityRule rule);

struct QualityMeasurements {
  double edit_ratio = 0.0;
  double nli_fwd = 0.0;
  double nli_rev = 0.0;
  double len_ratio = 0.0;
};

struct QualityVerdict {
  int score = 1;
  std::optional<QualityRule> failed_rule;  // absent iff score == 1
  QualityMeasurements measurements;
};

/// The rule logic of Q(x,t) on precomputed measurements.
QualityVerdict judge(const QualityMeasurements& m, const TaskType& task, const QualityThresholds& t);

/// Edit ratio, both NLI directions and length ratio of `candidate` against
/// `source`. The premise is the source alone. Throws std::domain_error on an
/// empty source.
QualityMeasurements measure(std::string_view source, std::string_view candidate, NliBackend& nli);

QualityVerdict quality_score(std::string_view source, std::string_view candidate, const TaskType& task,
                             const QualityThresholds& thresholds, NliBackend& nli);

struct HallucinationFix {
  std::optional<std::string> fixed_target;
  std::vector<std::string> removed;
};

/// Drops target sentences the source does not entail (score below
/// sentence_threshold). The fix is accepted only when at least half of the
/// sentences survive and the source still entails the result at level b.
HallucinationFix fix_hallucination(std::string_view source, std::string_view target, NliBackend& nli,
                                   const QualityThresholds& thresholds);

enum class FilterReason { Ok, UnfixableHallucination, DiffTooSmall };

std::string_view to_string(FilterReason reason);

struct FilterOutcome {
  bool keep = true;
  FilterReason reason = FilterReason::Ok;
  std::optional<RewriteRecord> fixed;  // set iff keep
  std::vector<std::string> removed;
  double edit_ratio = 0.0;             // source vs final target
};

/// Hallucination fix, then the minimum-difference check. Throws DataError
/// when the record has no target or an empty source.
FilterOutcome filter_record(const RewriteRecord& r, const QualityThresholds& thresholds, NliBackend& nli);

}  // namespace rewritekit

#endif  // REWRITEKIT_QUALITY_HPP
