#ifndef REWRITEKIT_WIKIEDITS_HPP
#define REWRITEKIT_WIKIEDITS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rewritekit/corpusio.hpp"

namespace rewritekit {

/// Malformed dump XML; `offset` is the byte position reported by the parser.
class XmlError : public DataError {
 public:
  XmlError(const std::string& message, std::uint64_t offset)
      : DataError(message + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Counts of markup constructs removed while flattening wikitext, by kind
/// ("template", "link", "ref", "unbalanced", ...).
struct MarkupReport {
  std::map<std::string, std::size_t> counts;

  void add(const std::string& kind, std::size_t n = 1) { counts[kind] += n; }
  void merge(const MarkupReport& other);
  std::size_t total() const;
};

/// Flattens wikitext to plain paragraphs: templates, tables, refs, comments,
/// files and categories are dropped; links are unwrapped to their surface
/// text; emphasis, headings and list markers are removed; entities decoded.
std::string strip_markup(std::string_view wikitext, MarkupReport* report = nullptr);

struct WikiRevision {
  std::string id;
  std::string parent_id;
  std::string timestamp;
  std::string comment;
  std::string text;
};

struct WikiPage {
  std::string id;
  std::string title;
  std::vector<WikiRevision> revisions;  // ascending timestamp
};

struct DumpOptions {
  bool strip = true;  // false leaves raw wikitext in WikiRevision::text
};

/// Streams pages out of a MediaWiki history export. Throws IoError when the
/// file cannot be read and XmlError on malformed XML.
void parse_history_dump(const std::string& path, const std::function<void(WikiPage&&)>& sink,
                        const DumpOptions& options = {}, MarkupReport* report = nullptr);

std::vector<WikiPage> parse_history_dump(const std::string& path, MarkupReport* report = nullptr);

/// Blank-line delimited paragraphs, trimmed, empty ones dropped.
std::vector<std::string> split_blocks(std::string_view text);

/// One record per maximal run of changed paragraphs. Only source_block and
/// target_block are filled.
std::vector<RevisionRecord> diff_revisions(std::string_view before, std::string_view after);

/// Keyword lists for filtering and the instruction heuristics. Entries
/// match whole comment tokens by prefix ("vandal" matches "vandalism");
/// multi-word entries match consecutive tokens.
struct KeywordConfig {
  std::vector<std::string> low_quality;
  std::vector<std::string> format_only;
  std::vector<std::string> edit_verbs;
  std::vector<std::string> comment_stopwords;

  static KeywordConfig defaults();

  /// Reads low_quality.txt, format_only.txt, edit_verbs.txt and
  /// comment_stopwords.txt from `dir`; a missing file keeps the default list.
  static KeywordConfig load(const std::string& dir);
};

enum class FilterRule { None, LowQualityKeyword, FormatOnlyKeyword, TooFewSentences };

std::string_view to_string(FilterRule rule);

struct FilterDecision {
  bool kept = true;
  FilterRule rule = FilterRule::None;
  std::optional<std::string> matched_term;
};

/// Edit summary with "/* section */" markers removed.
std::string clean_comment(std::string_view comment);

FilterDecision filter_revision(const RevisionRecord& r, const KeywordConfig& config);

bool is_detailed_instruction(std::string_view comment, std::string_view source,
                             std::string_view target, const KeywordConfig& config);

bool starts_with_edit_verb(std::string_view comment, const KeywordConfig& config);

/// Numeric-aware ordering for wiki ids.
bool natural_less(const std::string& a, const std::string& b);

struct ExtractOptions {
  KeywordConfig keywords = KeywordConfig::defaults();
  unsigned jobs = 1;
  std::size_t pages_per_batch = 16;
};

struct RejectedRevision {
  RevisionRecord record;
  FilterDecision decision;
};

struct ExtractResult {
  std::vector<RevisionRecord> kept;           // sorted by (page_id, rev_id)
  std::vector<RejectedRevision> rejected;     // same order
  std::size_t pages = 0;
  std::size_t revisions = 0;
  MarkupReport markup;
};

/// Parse, diff consecutive revisions, filter. Output is independent of jobs.
ExtractResult extract_wiki(const std::string& dump_path, const ExtractOptions& options);

/// Verb-initial, detailed records as rewrite records (instruction = comment).
std::vector<RewriteRecord> wiki_rewrite_records(const std::vector<RevisionRecord>& kept,
                                                const KeywordConfig& config);

}  // namespace rewritekit

#endif  // REWRITEKIT_WIKIEDITS_HPP
