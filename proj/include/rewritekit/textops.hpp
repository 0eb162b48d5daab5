#ifndef REWRITEKIT_TEXTOPS_HPP
#define REWRITEKIT_TEXTOPS_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace rewritekit {

/// Half-open byte range [begin, end) into the text a sequence was built from.
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

/// Lowercased word tokens plus the byte spans they came from.
///
/// All word-level quantities in the toolkit (lengths, edit distance, n-grams)
/// are computed over this sequence. Tokenization is case-insensitive: the
/// only transformation applied to a token is lowercasing.
struct TokenSeq {
  std::vector<std::string> tokens;
  std::vector<ByteSpan> original_spans;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }
  auto begin() const { return tokens.begin(); }
  auto end() const { return tokens.end(); }

  /// Builds a sequence from already-tokenized words; spans are left synthetic.
  static TokenSeq from_tokens(std::vector<std::string> words);
};

struct SentenceSeq {
  std::vector<std::string> sentences;
  std::vector<ByteSpan> spans;
  std::vector<std::string> normalized;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

/// Splits on whitespace, then peels leading and trailing punctuation off each
/// chunk as single-character tokens. Dashes and ellipses split a chunk
/// anywhere. Word-internal punctuation ("don't", "e.g", "3.5") stays.
TokenSeq tokenize(std::string_view text);

/// Rule-based sentence segmentation. A sentence ends at `.`, `!` or `?`
/// (plus any closing quotes or brackets) when followed by whitespace and
/// then an uppercase letter or digit, unless the word carrying the period is
/// a known abbreviation. Blank lines always end a sentence.
SentenceSeq split_sentences(std::string_view text);

/// Whitespace-collapsed, lowercased, trimmed form of `text`.
std::string normalize_whitespace_lower(std::string_view text);

/// Lowercases ASCII plus the Latin-1, Greek and Cyrillic capital ranges.
/// Byte length is preserved.
std::string to_lower_utf8(std::string_view text);

/// True when `token` contains no letter or digit.
bool is_punctuation_token(std::string_view token);

/// Abbreviations (lowercase, with trailing period) that never end a sentence.
const std::vector<std::string>& default_abbreviations();

/// Unit-cost Levenshtein distance, O(|a||b|) time and O(min(|a|,|b|)) space.
template <class Seq>
std::size_t levenshtein(const Seq& a, const Seq& b) {
  const Seq* longer = &a;
  const Seq* shorter = &b;
  if (std::size(a) < std::size(b)) std::swap(longer, shorter);
  const std::size_t n = std::size(*shorter);
  std::vector<std::size_t> row(n + 1);
  for (std::size_t j = 0; j <= n; ++j) row[j] = j;
  std::size_t i = 0;
  for (const auto& x : *longer) {
    std::size_t diagonal = row[0];
    row[0] = ++i;
    std::size_t j = 1;
    for (const auto& y : *shorter) {
      const std::size_t above = row[j];
      row[j] = std::min({above + 1, row[j - 1] + 1, diagonal + (x == y ? 0 : 1)});
      diagonal = above;
      ++j;
    }
  }
  return row[n];
}

/// Length of the longest common subsequence, O(min) space.
template <class Seq>
std::size_t lcs_length(const Seq& a, const Seq& b) {
  const Seq* longer = &a;
  const Seq* shorter = &b;
  if (std::size(a) < std::size(b)) std::swap(longer, shorter);
  const std::size_t n = std::size(*shorter);
  std::vector<std::size_t> row(n + 1, 0);
  for (const auto& x : *longer) {
    std::size_t diagonal = 0;
    std::size_t j = 1;
    for (const auto& y : *shorter) {
      const std::size_t above = row[j];
      row[j] = (x == y) ? diagonal + 1 : std::max(above, row[j - 1]);
      diagonal = above;
      ++j;
    }
  }
  return row[n];
}

std::size_t edit_distance(const TokenSeq& a, const TokenSeq& b);

/// edit_distance(source, other) / |source|. Throws std::domain_error on an
/// empty source.
double edit_ratio(const TokenSeq& source, const TokenSeq& other);

/// |other| / |source|. Throws std::domain_error on an empty source.
double length_ratio(const TokenSeq& source, const TokenSeq& other);

/// Word list loaded from a config file: one entry per line, `#` starts a
/// comment, surrounding whitespace ignored, entries lowercased.
std::vector<std::string> parse_word_list(std::string_view contents);
std::vector<std::string> load_word_list(const std::string& path);

/// Tokens carrying a letter or digit and absent from `stopwords`.
std::vector<std::string> content_words(const TokenSeq& tokens,
                                       const std::unordered_set<std::string>& stopwords);

/// First entry of `keywords` occurring in `text`. Entries match whole tokens
/// by prefix ("vandal" matches "vandalism"); multi-word entries must match
/// consecutive tokens. Entries are tried in list order.
std::optional<std::string> find_keyword(std::string_view text, const std::vector<std::string>& keywords);

}  // namespace rewritekit

#endif  // REWRITEKIT_TEXTOPS_HPP
