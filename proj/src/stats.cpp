#include "rewritekit/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "rewritekit/parallel.hpp"
#include "rewritekit/textops.hpp"

namespace rewritekit {

OrderedJson DatasetStats::to_json() const {
  OrderedJson j;
  j["size"] = size;
  j["inst_len"] = inst_len;
  j["src_len"] = src_len;
  j["tar_len"] = tar_len;
  j["len_ratio"] = len_ratio;
  j["edit_dist"] = edit_dist;
  j["edit_ratio"] = edit_ratio;
  j["rouge1"] = rouge1;
  if (nli_src_tar) j["nli_src_tar"] = *nli_src_tar;
  if (nli_tar_src) j["nli_tar_src"] = *nli_tar_src;
  j["skipped_missing_target"] = skipped_missing_target;
  j["skipped_empty_source"] = skipped_empty_source;
  return j;
}

std::optional<RecordStats> record_stats(const RewriteRecord& r, NliBackend* nli) {
  if (!r.target) return std::nullopt;
  const TokenSeq src = tokenize(r.source);
  if (src.empty()) return std::nullopt;
  const TokenSeq tar = tokenize(*r.target);
  RecordStats s;
  s.inst_len = static_cast<double>(tokenize(r.instruction).size());
  s.src_len = static_cast<double>(src.size());
  s.tar_len = static_cast<double>(tar.size());
  s.len_ratio = length_ratio(src, tar);
  s.edit_dist = static_cast<double>(edit_distance(src, tar));
  s.edit_ratio = edit_ratio(src, tar);
  s.rouge1 = rouge(tar, src, RougeVariant::Rouge1).value;
  if (nli) {
    s.nli_src_tar = nli_score(r.source, *r.target, *nli).score;
    s.nli_tar_src = reversed_nli_score(r.source, *r.target, *nli).score;
  }
  return s;
}

void StatsAccumulator::add(const RewriteRecord& r, const std::optional<RecordStats>& s) {
  if (!s) {
    ++(r.target ? sums_.skipped_empty_source : sums_.skipped_missing_target);
    return;
  }
  ++sums_.size;
  sums_.inst_len += s->inst_len;
  sums_.src_len += s->src_len;
  sums_.tar_len += s->tar_len;
  sums_.len_ratio += s->len_ratio;
  sums_.edit_dist += s->edit_dist;
  sums_.edit_ratio += s->edit_ratio;
  sums_.rouge1 += s->rouge1;
  if (s->nli_src_tar) nli_fwd_ += *s->nli_src_tar;
  if (s->nli_tar_src) nli_rev_ += *s->nli_tar_src;
}

DatasetStats StatsAccumulator::finish() const {
  DatasetStats out = sums_;
  const double n = out.size == 0 ? 1.0 : static_cast<double>(out.size);
  for (double* v : {&out.inst_len, &out.src_len, &out.tar_len, &out.len_ratio, &out.edit_dist, &out.edit_ratio,
                    &out.rouge1}) {
    *v /= n;
  }
  if (with_nli_) {
    out.nli_src_tar = nli_fwd_ / n;
    out.nli_tar_src = nli_rev_ / n;
  }
  return out;
}

DatasetStats dataset_stats(const std::vector<RewriteRecord>& records, NliBackend* nli, unsigned jobs) {
  const auto per_record = parallel_map(records, jobs, [&](const RewriteRecord& r) { return record_stats(r, nli); });
  StatsAccumulator acc(nli != nullptr);
  for (std::size_t i = 0; i < records.size(); ++i) acc.add(records[i], per_record[i]);
  return acc.finish();
}

DatasetStats dataset_stats_file(const std::string& path, NliBackend* nli, unsigned jobs, bool strict,
                                std::size_t* line_errors) {
  RecordReader<RewriteRecord> reader(path, strict);
  StatsAccumulator acc(nli != nullptr);
  parallel_stream([&] { return reader.next(); }, jobs, 256,
                  [&](const RewriteRecord& r) { return record_stats(r, nli); },
                  [&](const RewriteRecord& r, const std::optional<RecordStats>& s) { acc.add(r, s); });
  if (line_errors) *line_errors = reader.errors().size();
  return acc.finish();
}

// ---- evaluation -------------------------------------------------------------

namespace {

struct EvalOutcome {
  std::optional<EvalRow> row;
  std::optional<EvalSkip> skip;
};

}  // namespace

EvalReport evaluate_records(const std::vector<RewriteRecord>& records, const EvalOptions& options) {
  EvalReport report;
  report.columns = {"Edit Ratio", "Len Ratio"};
  if (options.nli) {
    report.columns.push_back("NLI s-p");
    report.columns.push_back("NLI p-s");
  }
  if (options.reference) {
    for (const char* c : {"SARI", "BLEU", "GLEU", "ROUGE-1", "ROUGE-L", "Update-R"}) report.columns.push_back(c);
  }

  const auto outcomes = parallel_map(records, options.jobs, [&](const RewriteRecord& r) {
    EvalOutcome out;
    if (!r.prediction) {
      out.skip = EvalSkip{r.id, "prediction missing"};
      return out;
    }
    if (options.reference && !r.target) {
      out.skip = EvalSkip{r.id, "target missing"};
      return out;
    }
    const TokenSeq src = tokenize(r.source);
    if (src.empty()) {
      out.skip = EvalSkip{r.id, "source empty"};
      return out;
    }
    const TokenSeq pred = tokenize(*r.prediction);
    EvalRow row;
    row.id = r.id;
    row.values = {edit_ratio(src, pred), length_ratio(src, pred)};
    if (options.nli) {
      row.values.push_back(nli_score(r.source, *r.prediction, *options.nli).score);
      row.values.push_back(reversed_nli_score(r.source, *r.prediction, *options.nli).score);
    }
    if (options.reference) {
      const TokenSeq ref = tokenize(*r.target);
      const TokenSeq refs[] = {ref};
      const MetricScore ur = update_rouge(r.source, *r.prediction, *r.target);
      row.values.push_back(sari(src, pred, refs, options.sari_mode).value);
      row.values.push_back(bleu(pred, refs).value);
      row.values.push_back(gleu(src, pred, refs).value);
      row.values.push_back(rouge(pred, ref, RougeVariant::Rouge1).value);
      row.values.push_back(rouge(pred, ref, RougeVariant::RougeL).value);
      row.values.push_back(ur.value);
      for (MetricFlag f : ur.flags) row.flags.emplace_back(to_string(f));
    }
    out.row = std::move(row);
    return out;
  });

  report.means.assign(report.columns.size(), 0.0);
  for (const auto& o : outcomes) {
    if (o.skip) {
      report.skipped.push_back(*o.skip);
      continue;
    }
    for (std::size_t c = 0; c < report.columns.size(); ++c) report.means[c] += o.row->values[c];
    report.rows.push_back(*o.row);
  }
  if (!report.rows.empty()) {
    for (auto& m : report.means) m /= static_cast<double>(report.rows.size());
  }
  return report;
}

OrderedJson to_json(const EvalRow& row, const std::vector<std::string>& columns) {
  OrderedJson j;
  j["id"] = row.id;
  for (std::size_t c = 0; c < columns.size() && c < row.values.size(); ++c) j[columns[c]] = row.values[c];
  if (!row.flags.empty()) j["flags"] = row.flags;
  return j;
}

// ---- human evaluation -------------------------------------------------------

const std::vector<Dimension>& all_dimensions() {
  static const std::vector<Dimension> dims = {Dimension::InstructionSuccess, Dimension::ContentPreservation,
                                              Dimension::Factuality, Dimension::Coherence, Dimension::Fluency};
  return dims;
}

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::InstructionSuccess: return "INSTRUCTION_SUCCESS";
    case Dimension::ContentPreservation: return "CONTENT_PRESERVATION";
    case Dimension::Factuality: return "FACTUALITY";
    case Dimension::Coherence: return "COHERENCE";
    case Dimension::Fluency: return "FLUENCY";
  }
  return "UNKNOWN";
}

namespace {

std::string_view heading(Dimension d) {
  switch (d) {
    case Dimension::InstructionSuccess: return "Instruction Success";
    case Dimension::ContentPreservation: return "Content Preservation";
    case Dimension::Factuality: return "Factuality";
    case Dimension::Coherence: return "Coherence";
    case Dimension::Fluency: return "Fluency";
  }
  return "Unknown";
}

}  // namespace

Dimension parse_dimension(std::string_view text) {
  std::string key;
  for (char c : text) key += c == ' ' || c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Dimension d : all_dimensions()) {
    if (key == to_string(d)) return d;
  }
  throw DataError("unknown dimension '" + std::string(text) + "'");
}

RatingMatrix RatingMatrix::load(const std::string& path) {
  JsonLineReader reader(path, true);
  RatingMatrix m;
  while (auto j = reader.next()) {
    const std::string where = path + ":" + std::to_string(reader.line_number()) + ": ";
    auto text = [&](const char* key, bool required) -> std::string {
      if (!j->contains(key)) {
        if (required) throw DataError(where + "missing " + key);
        return {};
      }
      const Json& v = (*j)[key];
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return v.dump();
      throw DataError(where + key + " must be a string");
    };
    Rating r;
    r.item_id = text("item_id", true);
    r.rater_id = text("rater_id", true);
    r.system = text("system", false);
    try {
      r.dimension = parse_dimension(text("dimension", true));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    if (!j->contains("rating") || !(*j)["rating"].is_number_integer()) {
      throw DataError(where + "rating must be an integer");
    }
    r.rating = (*j)["rating"].get<int>();
    if (r.rating < 0 || r.rating > 2) throw DataError(where + "rating must be 0, 1 or 2");
    m.ratings.push_back(std::move(r));
  }
  return m;
}

namespace {

using Unit = std::pair<std::string, std::string>;  // system, item

struct Cells {
  std::vector<std::string> raters;
  std::map<Unit, std::map<std::string, int>> units;
};

// Complete unit x rater table for one dimension, or DataError.
Cells complete_cells(const RatingMatrix& m, Dimension d) {
  Cells cells;
  std::set<std::string> raters;
  std::vector<std::string> problems;
  for (const auto& r : m.ratings) {
    if (r.dimension != d) continue;
    if (r.rating < 0 || r.rating > 2) throw DataError("rating outside 0..2 for item " + r.item_id);
    raters.insert(r.rater_id);
    auto& row = cells.units[{r.system, r.item_id}];
    if (!row.emplace(r.rater_id, r.rating).second) {
      problems.push_back("duplicate " + r.system + "/" + r.item_id + " by " + r.rater_id);
    }
  }
  cells.raters.assign(raters.begin(), raters.end());
  for (const auto& [unit, row] : cells.units) {
    for (const auto& rater : cells.raters) {
      if (!row.count(rater)) problems.push_back("missing " + unit.first + "/" + unit.second + " by " + rater);
    }
  }
  if (!problems.empty()) {
    std::string msg = std::string(to_string(d)) + ": incomplete ratings (" + std::to_string(problems.size()) + "):";
    for (std::size_t i = 0; i < problems.size() && i < 20; ++i) msg += " " + problems[i] + ";";
    throw DataError(msg);
  }
  return cells;
}

}  // namespace

KappaResult fleiss_kappa(const RatingMatrix& m, Dimension d) {
  const Cells cells = complete_cells(m, d);
  if (cells.units.empty()) throw DataError(std::string(to_string(d)) + ": no ratings");
  if (cells.raters.size() < 2) throw DataError(std::string(to_string(d)) + ": need at least two raters");

  KappaResult k;
  k.units = cells.units.size();
  k.raters = cells.raters.size();
  const double n = static_cast<double>(k.raters);
  double totals[3] = {0, 0, 0};
  double agreement = 0.0;
  for (const auto& [unit, row] : cells.units) {
    double counts[3] = {0, 0, 0};
    for (const auto& [rater, rating] : row) counts[rating] += 1;
    double sq = 0.0;
    for (int j = 0; j < 3; ++j) {
      sq += counts[j] * counts[j];
      totals[j] += counts[j];
    }
    agreement += (sq - n) / (n * (n - 1));
  }
  const double units = static_cast<double>(k.units);
  k.observed = agreement / units;
  for (double t : totals) {
    const double p = t / (units * n);
    k.expected += p * p;
  }
  if (k.expected >= 1.0) {
    k.degenerate = true;
    k.kappa = 1.0;
    return k;
  }
  k.kappa = (k.observed - k.expected) / (1.0 - k.expected);
  return k;
}

LikertTable likert_summary(const RatingMatrix& m) {
  LikertTable t;
  std::set<std::string> systems;
  for (Dimension d : all_dimensions()) {
    const bool present = std::any_of(m.ratings.begin(), m.ratings.end(), [&](const Rating& r) { return r.dimension == d; });
    if (!present) continue;
    complete_cells(m, d);
    t.dimensions.push_back(d);
  }
  for (const auto& r : m.ratings) systems.insert(r.system);
  t.systems.assign(systems.begin(), systems.end());
  for (const auto& s : t.systems) {
    std::vector<double> sums(t.dimensions.size(), 0.0), counts(t.dimensions.size(), 0.0);
    for (const auto& r : m.ratings) {
      if (r.system != s) continue;
      const auto at = std::find(t.dimensions.begin(), t.dimensions.end(), r.dimension) - t.dimensions.begin();
      sums[static_cast<std::size_t>(at)] += r.rating;
      counts[static_cast<std::size_t>(at)] += 1;
    }
    std::vector<double> means(t.dimensions.size(), 0.0);
    double total = 0.0;
    std::size_t rated = 0;
    for (std::size_t i = 0; i < means.size(); ++i) {
      if (counts[i] == 0) continue;
      means[i] = sums[i] / counts[i];
      total += means[i];
      ++rated;
    }
    t.means[s] = means;
    t.avg[s] = rated ? total / static_cast<double>(rated) : 0.0;
  }
  return t;
}

// ---- rendering --------------------------------------------------------------

ReportFormat parse_report_format(std::string_view text) {
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  if (text == "tsv") return ReportFormat::Tsv;
  throw std::invalid_argument("unknown report format '" + std::string(text) + "'");
}

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  const double scale = std::pow(10.0, decimals);
  // The nudge keeps values such as 0.125 (stored as 0.12499999...) rounding up.
  double scaled = std::floor(std::abs(value) * scale + 0.5 + 1e-9);
  if (value < 0 && scaled != 0) scaled = -scaled;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, scaled / scale);
  return buf;
}

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                         ReportFormat format) {
  const std::string sep = format == ReportFormat::Tsv ? "\t" : " | ";
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out = format == ReportFormat::Markdown ? "| " : "";
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? sep : "") + cells[i];
    return out + (format == ReportFormat::Markdown ? " |\n" : "\n");
  };
  std::string out = line(header);
  if (format == ReportFormat::Markdown) {
    out += "|";
    for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? " --- |" : " ---: |";
    out += "\n";
  }
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string render_stats(const std::vector<std::pair<std::string, DatasetStats>>& rows, ReportFormat format) {
  const bool nli = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.second.nli_src_tar.has_value(); });
  std::vector<std::string> header = {"",          "Size",      "Inst Len",   "Src Len", "Tar Len",
                                     "Len Ratio", "Edit Dist", "Edit Ratio", "Rouge1"};
  if (nli) {
    header.push_back("NLI src-tar");
    header.push_back("NLI tar-src");
  }
  std::vector<std::vector<std::string>> cells;
  for (const auto& [label, s] : rows) {
    std::vector<std::string> r = {label,
                                  std::to_string(s.size),
                                  format_fixed(s.inst_len),
                                  format_fixed(s.src_len),
                                  format_fixed(s.tar_len),
                                  format_fixed(s.len_ratio),
                                  format_fixed(s.edit_dist),
                                  format_fixed(s.edit_ratio),
                                  format_fixed(s.rouge1)};
    if (nli) {
      r.push_back(s.nli_src_tar ? format_fixed(*s.nli_src_tar) : "");
      r.push_back(s.nli_tar_src ? format_fixed(*s.nli_tar_src) : "");
    }
    cells.push_back(std::move(r));
  }
  return render_table(header, cells, format);
}

std::string render_eval(const EvalReport& report, ReportFormat format, const std::string& label) {
  std::vector<std::string> header = {"", "N"};
  header.insert(header.end(), report.columns.begin(), report.columns.end());
  std::vector<std::string> row = {label, std::to_string(report.rows.size())};
  for (double m : report.means) row.push_back(format_fixed(m));
  return render_table(header, {row}, format);
}

std::string render_likert(const LikertTable& table, ReportFormat format) {
  std::vector<std::string> header = {"System"};
  for (Dimension d : table.dimensions) header.emplace_back(heading(d));
  header.emplace_back("AVG");
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : table.systems) {
    std::vector<std::string> r = {s.empty() ? "-" : s};
    for (double v : table.means.at(s)) r.push_back(format_fixed(v, 3));
    r.push_back(format_fixed(table.avg.at(s), 3));
    rows.push_back(std::move(r));
  }
  return render_table(header, rows, format);
}

std::string render_kappa(const std::vector<std::pair<Dimension, KappaResult>>& results, ReportFormat format) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [d, k] : results) {
    rows.push_back({std::string(heading(d)), format_fixed(k.kappa, 3), std::to_string(k.units),
                    std::to_string(k.raters), k.degenerate ? "DEGENERATE" : ""});
  }
  return render_table({"Dimension", "Fleiss kappa", "Units", "Raters", "Flag"}, rows, format);
}

}  // namespace rewritekit
