#ifndef REWRITEKIT_STATS_HPP
#define REWRITEKIT_STATS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rewritekit/corpusio.hpp"
#include "rewritekit/metrics.hpp"
#include "rewritekit/nliclient.hpp"

namespace rewritekit {

/// Corpus statistics, each column averaged per record (macro average).
/// Lengths count tokens as produced by tokenize().
struct DatasetStats {
  std::size_t size = 0;
  double inst_len = 0.0;
  double src_len = 0.0;
  double tar_len = 0.0;
  double len_ratio = 0.0;
  double edit_dist = 0.0;
  double edit_ratio = 0.0;
  double rouge1 = 0.0;  // 0..100, source vs target
  std::optional<double> nli_src_tar;
  std::optional<double> nli_tar_src;
  std::size_t skipped_missing_target = 0;
  std::size_t skipped_empty_source = 0;

  OrderedJson to_json() const;
};

/// One record's contribution; absent when the record is skipped.
struct RecordStats {
  double inst_len = 0, src_len = 0, tar_len = 0, len_ratio = 0, edit_dist = 0, edit_ratio = 0, rouge1 = 0;
  std::optional<double> nli_src_tar, nli_tar_src;
};

/// Sums in the order records are added, so results do not depend on how the
/// per-record work was scheduled.
class StatsAccumulator {
 public:
  explicit StatsAccumulator(bool with_nli) : with_nli_(with_nli) {}
  void add(const RewriteRecord& r, const std::optional<RecordStats>& s);
  DatasetStats finish() const;

 private:
  bool with_nli_;
  DatasetStats sums_;
  double nli_fwd_ = 0.0, nli_rev_ = 0.0;
};

std::optional<RecordStats> record_stats(const RewriteRecord& r, NliBackend* nli);

DatasetStats dataset_stats(const std::vector<RewriteRecord>& records, NliBackend* nli = nullptr,
                           unsigned jobs = 1);

/// Streams a rewrite JSONL file. Malformed lines throw in strict mode and are
/// counted in `line_errors` otherwise.
DatasetStats dataset_stats_file(const std::string& path, NliBackend* nli, unsigned jobs, bool strict,
                                std::size_t* line_errors = nullptr);

// ---- model output evaluation ----------------------------------------------

struct EvalOptions {
  bool reference = true;  // false: source-relative columns only
  SariMode sari_mode = SariMode::Canonical;
  NliBackend* nli = nullptr;
  unsigned jobs = 1;
};

struct EvalRow {
  std::string id;
  std::vector<double> values;  // aligned with EvalReport::columns
  std::vector<std::string> flags;
};

struct EvalSkip {
  std::string id;
  std::string reason;
};

struct EvalReport {
  std::vector<std::string> columns;
  std::vector<EvalRow> rows;
  std::vector<double> means;
  std::vector<EvalSkip> skipped;
};

/// Edit Ratio and Len Ratio of prediction vs source, NLI both ways when a
/// scorer is given, and with a reference (the record's target) SARI, BLEU,
/// GLEU, ROUGE-1, ROUGE-L and Update-R. Records lacking a prediction, a
/// needed target, or source tokens are skipped.
EvalReport evaluate_records(const std::vector<RewriteRecord>& records, const EvalOptions& options);

OrderedJson to_json(const EvalRow& row, const std::vector<std::string>& columns);

// ---- human evaluation -----------------------------------------------------

enum class Dimension { InstructionSuccess, ContentPreservation, Factuality, Coherence, Fluency };

const std::vector<Dimension>& all_dimensions();
std::string_view to_string(Dimension d);
/// Accepts the enum spelling ("CONTENT_PRESERVATION") or the table heading
/// ("Content Preservation"), case-insensitive.
Dimension parse_dimension(std::string_view text);

struct Rating {
  std::string item_id;
  std::string rater_id;
  std::string system;
  Dimension dimension = Dimension::InstructionSuccess;
  int rating = 0;  // 0 bad, 1 medium, 2 good
};

/// A rated unit is (system, item); raters judge units per dimension.
struct RatingMatrix {
  std::vector<Rating> ratings;

  /// JSONL {item_id, rater_id, system, dimension, rating}; `system` may be
  /// omitted. Throws DataError on a bad line or a rating outside 0..2.
  static RatingMatrix load(const std::string& path);
};

struct KappaResult {
  double kappa = 0.0;
  bool degenerate = false;  // expected agreement is 1; kappa reported as 1
  double observed = 0.0;    // mean per-unit agreement
  double expected = 0.0;
  std::size_t units = 0;
  std::size_t raters = 0;
};

/// Fleiss kappa over three categories. Throws DataError listing missing or
/// duplicate cells, or when fewer than two raters or no units exist.
KappaResult fleiss_kappa(const RatingMatrix& m, Dimension d);

struct LikertTable {
  std::vector<Dimension> dimensions;  // present in the data, enum order
  std::vector<std::string> systems;   // sorted
  std::map<std::string, std::vector<double>> means;  // system -> per dimension
  std::map<std::string, double> avg;                 // mean of the dimension means
};

/// Mean rating per system and dimension. Incomplete dimensions throw as in
/// fleiss_kappa.
LikertTable likert_summary(const RatingMatrix& m);

// ---- rendering ------------------------------------------------------------

enum class ReportFormat { Markdown, Tsv };

ReportFormat parse_report_format(std::string_view text);

/// Half-up rounding (away from zero for negatives) to `decimals` places.
std::string format_fixed(double value, int decimals = 2);

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                         ReportFormat format);

/// Size, Inst Len, Src Len, Tar Len, Len Ratio, Edit Dist, Edit Ratio, Rouge1
/// and the NLI columns when present, one row per labelled stats block.
std::string render_stats(const std::vector<std::pair<std::string, DatasetStats>>& rows, ReportFormat format);

std::string render_eval(const EvalReport& report, ReportFormat format, const std::string& label = "All");

std::string render_likert(const LikertTable& table, ReportFormat format);

std::string render_kappa(const std::vector<std::pair<Dimension, KappaResult>>& results, ReportFormat format);

}  // namespace rewritekit

#endif  // REWRITEKIT_STATS_HPP
