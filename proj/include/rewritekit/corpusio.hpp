#ifndef REWRITEKIT_CORPUSIO_HPP
#define REWRITEKIT_CORPUSIO_HPP

#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rewritekit {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Unreadable input or failed write. Maps to exit code 1 in the CLI.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid data. Maps to exit code 1 in the CLI.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One (instruction, source, target[, prediction]) tuple.
struct RewriteRecord {
  std::string id;
  std::string instruction;
  std::string source;
  std::optional<std::string> target;
  std::optional<std::string> prediction;
  std::map<std::string, std::string> meta;

  friend bool operator==(const RewriteRecord&, const RewriteRecord&) = default;
};

struct Candidate {
  std::string text;
  long rank = 0;  // 0 = highest sampling probability
  std::optional<double> logprob;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// A prompt and the outputs sampled for it.
struct CandidateSet {
  std::string id;
  std::string instruction;
  std::string source;
  std::vector<Candidate> candidates;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

/// (prompt, good output, bad output) drawn from one CandidateSet.
struct ComparisonPair {
  std::string id;
  std::string instruction;
  std::string source;
  std::string t_good;
  std::string t_bad;
  long good_rank = 0;
  long bad_rank = 0;

  friend bool operator==(const ComparisonPair&, const ComparisonPair&) = default;
};

/// One changed block between consecutive snapshots of a wiki page.
struct RevisionRecord {
  std::string page_id;
  std::string rev_id;
  std::string parent_rev_id;
  std::string source_block;
  std::string target_block;
  std::string comment;
  std::string timestamp;

  friend bool operator==(const RevisionRecord&, const RevisionRecord&) = default;
};

enum class Schema { Rewrite, Candidate, Pair, Revision };

std::string_view to_string(Schema schema);
Schema parse_schema(std::string_view text);

/// JSON mapping of each record type. `from_json` throws DataError on
/// structurally invalid objects; unknown fields of a RewriteRecord are kept
/// in its meta map.
template <class Record>
struct RecordCodec;

template <>
struct RecordCodec<RewriteRecord> {
  static constexpr Schema schema = Schema::Rewrite;
  static RewriteRecord from_json(const Json& j);
  static OrderedJson to_json(const RewriteRecord& r);
};

template <>
struct RecordCodec<CandidateSet> {
  static constexpr Schema schema = Schema::Candidate;
  static CandidateSet from_json(const Json& j);
  static OrderedJson to_json(const CandidateSet& r);
};

template <>
struct RecordCodec<ComparisonPair> {
  static constexpr Schema schema = Schema::Pair;
  static ComparisonPair from_json(const Json& j);
  static OrderedJson to_json(const ComparisonPair& r);
};

template <>
struct RecordCodec<RevisionRecord> {
  static constexpr Schema schema = Schema::Revision;
  static RevisionRecord from_json(const Json& j);
  static OrderedJson to_json(const RevisionRecord& r);
};

/// Serialises one record as a single JSON line without the trailing newline.
template <class Record>
std::string to_jsonl_line(const Record& record) {
  return RecordCodec<Record>::to_json(record).dump();
}

struct LineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

/// Line-oriented reader over an untyped JSON object stream. Keeps one line in
/// memory at a time.
class JsonLineReader {
 public:
  /// Throws IoError when the file cannot be opened.
  JsonLineReader(const std::string& path, bool strict);

  /// Next well-formed JSON object, or nullopt at end of file. Blank lines are
  /// skipped. Malformed lines are recorded in errors(), or throw DataError in
  /// strict mode.
  std::optional<Json> next();

  /// Records a schema-level error for the line last returned by next().
  void reject_current(const std::string& message);

  const std::vector<LineError>& errors() const { return errors_; }
  std::size_t line_number() const { return line_; }
  bool strict() const { return strict_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::string buffer_;
  std::size_t line_ = 0;
  bool strict_;
  std::vector<LineError> errors_;
};

/// Streaming typed reader.
template <class Record>
class RecordReader {
 public:
  explicit RecordReader(const std::string& path, bool strict = false) : lines_(path, strict) {}

  std::optional<Record> next() {
    while (auto j = lines_.next()) {
      try {
        return RecordCodec<Record>::from_json(*j);
      } catch (const DataError& e) {
        lines_.reject_current(e.what());
      }
    }
    return std::nullopt;
  }

  const std::vector<LineError>& errors() const { return lines_.errors(); }

 private:
  JsonLineReader lines_;
};

template <class Record>
struct ReadResult {
  std::vector<Record> records;
  std::vector<LineError> errors;
};

/// Reads a whole file. Prefer RecordReader for large corpora.
template <class Record>
ReadResult<Record> read_records(const std::string& path, bool strict = false) {
  RecordReader<Record> reader(path, strict);
  ReadResult<Record> result;
  while (auto r = reader.next()) result.records.push_back(std::move(*r));
  result.errors = reader.errors();
  return result;
}

/// Appends one JSON object per line. Throws IoError (carrying the count
/// written so far) on failure.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path);

  void write_line(std::string_view line);

  template <class Record>
  void write(const Record& record) {
    write_line(to_jsonl_line(record));
  }

  void write_json(const OrderedJson& j) { write_line(j.dump()); }

  std::size_t count() const { return count_; }

  /// Flushes and closes; throws IoError if the stream failed.
  void close();

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t count_ = 0;
};

template <class Range>
std::size_t write_records(const Range& records, const std::string& path) {
  JsonlWriter writer(path);
  for (const auto& r : records) writer.write(r);
  writer.close();
  return writer.count();
}

/// Invariant violations of a RewriteRecord, each "field: rule". Empty when valid.
std::vector<std::string> validate_record(const RewriteRecord& r);

/// Violations of the CandidateSet invariants (non-empty, distinct ranks,
/// logprobs non-increasing in rank).
std::vector<std::string> validate_candidate_set(const CandidateSet& s);

/// Ids occurring more than once, in order of second appearance.
std::vector<std::string> duplicate_ids(const std::vector<RewriteRecord>& records);

}  // namespace rewritekit

#endif  // REWRITEKIT_CORPUSIO_HPP
