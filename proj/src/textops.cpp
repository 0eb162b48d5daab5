#include "rewritekit/textops.hpp"

#include <fstream>
#include <sstream>

namespace rewritekit {

namespace {

struct CodePoint {
  char32_t value = 0;
  std::size_t length = 1;
};

// Lenient decoder: malformed bytes decode as single-byte code points so that
// spans always advance and raw bytes survive untouched.
CodePoint decode_at(std::string_view text, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  auto continuation = [&](std::size_t k) {
    return pos + k < text.size() &&
           (static_cast<unsigned char>(text[pos + k]) & 0xC0) == 0x80;
  };
  auto bits = [&](std::size_t k) {
    return static_cast<char32_t>(static_cast<unsigned char>(text[pos + k]) & 0x3F);
  };
  if (lead < 0x80) return {lead, 1};
  if ((lead & 0xE0) == 0xC0 && continuation(1)) {
    return {(static_cast<char32_t>(lead & 0x1F) << 6) | bits(1), 2};
  }
  if ((lead & 0xF0) == 0xE0 && continuation(1) && continuation(2)) {
    return {(static_cast<char32_t>(lead & 0x0F) << 12) | (bits(1) << 6) | bits(2), 3};
  }
  if ((lead & 0xF8) == 0xF0 && continuation(1) && continuation(2) && continuation(3)) {
    return {(static_cast<char32_t>(lead & 0x07) << 18) | (bits(1) << 12) | (bits(2) << 6) |
                bits(3),
            4};
  }
  return {lead, 1};
}

bool is_space(char32_t c) {
  switch (c) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x00A0: case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  switch (c) {
    case 0x00A1: case 0x00A7: case 0x00AB: case 0x00B6: case 0x00B7: case 0x00BB: case 0x00BF:
      return true;
    default:
      return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
             (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011) ||
             (c >= 0xFF01 && c <= 0xFF0F);
  }
}

// Dashes and the ellipsis character separate words even without spaces.
bool splits_anywhere(char32_t c) { return (c >= 0x2012 && c <= 0x2015) || c == 0x2026; }

bool is_upper(char32_t c) {
  return (c >= U'A' && c <= U'Z') || (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) ||
         (c >= 0x0391 && c <= 0x03A9) || (c >= 0x0400 && c <= 0x042F);
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_closing(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == 0x201D || c == 0x2019 ||
         c == 0x00BB;
}

bool is_opening(char32_t c) {
  return c == U'"' || c == U'\'' || c == U'(' || c == U'[' || c == 0x201C || c == 0x2018 ||
         c == 0x00AB;
}

void push_token(TokenSeq& seq, std::string_view text, std::size_t begin, std::size_t end) {
  if (begin >= end) return;
  seq.tokens.push_back(to_lower_utf8(text.substr(begin, end - begin)));
  seq.original_spans.push_back({begin, end});
}

// Peels leading/trailing punctuation off [begin, end) and emits the pieces.
void tokenize_piece(TokenSeq& seq, std::string_view text, std::size_t begin, std::size_t end) {
  std::size_t pos = begin;
  while (pos < end) {
    const CodePoint cp = decode_at(text, pos);
    if (!is_punct(cp.value)) break;
    push_token(seq, text, pos, pos + cp.length);
    pos += cp.length;
  }
  if (pos >= end) return;

  std::vector<ByteSpan> trailing;
  std::size_t stop = end;
  while (stop > pos) {
    std::size_t start = stop - 1;
    while (start > pos && (static_cast<unsigned char>(text[start]) & 0xC0) == 0x80) --start;
    const CodePoint cp = decode_at(text, start);
    if (start + cp.length != stop || !is_punct(cp.value)) break;
    trailing.push_back({start, stop});
    stop = start;
  }
  push_token(seq, text, pos, stop);
  for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) {
    push_token(seq, text, it->begin, it->end);
  }
}

void tokenize_chunk(TokenSeq& seq, std::string_view text, std::size_t begin, std::size_t end) {
  std::size_t piece = begin;
  std::size_t pos = begin;
  while (pos < end) {
    const CodePoint cp = decode_at(text, pos);
    if (splits_anywhere(cp.value)) {
      tokenize_piece(seq, text, piece, pos);
      push_token(seq, text, pos, pos + cp.length);
      piece = pos + cp.length;
    }
    pos += cp.length;
  }
  tokenize_piece(seq, text, piece, end);
}

bool is_blank_line_at(std::string_view text, std::size_t pos, std::size_t& after) {
  if (text[pos] != '\n') return false;
  std::size_t k = pos + 1;
  while (k < text.size() && (text[k] == ' ' || text[k] == '\t' || text[k] == '\r')) ++k;
  if (k < text.size() && text[k] == '\n') {
    after = k + 1;
    return true;
  }
  return false;
}

std::string_view trim_view(std::string_view text, std::size_t& offset) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e) {
    const CodePoint cp = decode_at(text, b);
    if (!is_space(cp.value)) break;
    b += cp.length;
  }
  while (e > b) {
    std::size_t s = e - 1;
    while (s > b && (static_cast<unsigned char>(text[s]) & 0xC0) == 0x80) --s;
    const CodePoint cp = decode_at(text, s);
    if (!is_space(cp.value)) break;
    e = s;
  }
  offset += b;
  return text.substr(b, e - b);
}

class SentenceBuilder {
 public:
  explicit SentenceBuilder(std::string_view text) : text_(text) {}

  void emit(std::size_t begin, std::size_t end) {
    std::size_t offset = begin;
    const std::string_view slice = trim_view(text_.substr(begin, end - begin), offset);
    if (slice.empty()) return;
    out_.sentences.emplace_back(slice);
    out_.spans.push_back({offset, offset + slice.size()});
    out_.normalized.push_back(normalize_whitespace_lower(slice));
  }

  SentenceSeq take() { return std::move(out_); }

 private:
  std::string_view text_;
  SentenceSeq out_;
};

bool is_abbreviation(std::string_view text, std::size_t period_pos) {
  std::size_t start = period_pos;
  while (start > 0) {
    const auto c = static_cast<unsigned char>(text[start - 1]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '(' || c == '[' || c == '"') break;
    --start;
  }
  const std::string word = to_lower_utf8(text.substr(start, period_pos - start + 1));
  const auto& list = default_abbreviations();
  return std::find(list.begin(), list.end(), word) != list.end();
}

void split_paragraph(SentenceBuilder& builder, std::string_view text, std::size_t begin,
                     std::size_t end) {
  std::size_t sentence_start = begin;
  std::size_t pos = begin;
  while (pos < end) {
    const char c = text[pos];
    if (c != '.' && c != '!' && c != '?') {
      pos += decode_at(text, pos).length;
      continue;
    }
    const std::size_t terminator = pos;
    std::size_t j = pos + 1;
    while (j < end && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
    while (j < end) {
      const CodePoint cp = decode_at(text, j);
      if (!is_closing(cp.value)) break;
      j += cp.length;
    }
    std::size_t k = j;
    while (k < end) {
      const CodePoint cp = decode_at(text, k);
      if (!is_space(cp.value)) break;
      k += cp.length;
    }
    if (k == j || k >= end) {
      pos = j;
      continue;
    }
    std::size_t m = k;
    while (m < end) {
      const CodePoint cp = decode_at(text, m);
      if (!is_opening(cp.value)) break;
      m += cp.length;
    }
    const bool capital_next = m < end && (is_upper(decode_at(text, m).value) ||
                                          is_digit(decode_at(text, m).value));
    const bool abbreviation = text[terminator] == '.' && j == terminator + 1 &&
                              is_abbreviation(text, terminator);
    if (capital_next && !abbreviation) {
      builder.emit(sentence_start, j);
      sentence_start = k;
    }
    pos = k;
  }
  builder.emit(sentence_start, end);
}

}  // namespace

TokenSeq TokenSeq::from_tokens(std::vector<std::string> words) {
  TokenSeq seq;
  std::size_t offset = 0;
  seq.original_spans.reserve(words.size());
  for (const auto& w : words) {
    seq.original_spans.push_back({offset, offset + w.size()});
    offset += w.size() + 1;
  }
  seq.tokens = std::move(words);
  return seq;
}

std::string to_lower_utf8(std::string_view text) {
  std::string out(text);
  std::size_t pos = 0;
  while (pos < out.size()) {
    const CodePoint cp = decode_at(out, pos);
    if (cp.value >= U'A' && cp.value <= U'Z') {
      out[pos] = static_cast<char>(out[pos] + 32);
    } else if (cp.length == 2) {
      char32_t lower = cp.value;
      if ((cp.value >= 0x00C0 && cp.value <= 0x00DE && cp.value != 0x00D7) ||
          (cp.value >= 0x0391 && cp.value <= 0x03A9 && cp.value != 0x03A2) ||
          (cp.value >= 0x0410 && cp.value <= 0x042F)) {
        lower = cp.value + 0x20;
      } else if (cp.value >= 0x0400 && cp.value <= 0x040F) {
        lower = cp.value + 0x50;
      }
      if (lower != cp.value) {
        out[pos] = static_cast<char>(0xC0 | (lower >> 6));
        out[pos + 1] = static_cast<char>(0x80 | (lower & 0x3F));
      }
    }
    pos += cp.length;
  }
  return out;
}

bool is_punctuation_token(std::string_view token) {
  std::size_t pos = 0;
  while (pos < token.size()) {
    const CodePoint cp = decode_at(token, pos);
    if (!is_punct(cp.value)) return false;
    pos += cp.length;
  }
  return true;
}

TokenSeq tokenize(std::string_view text) {
  TokenSeq seq;
  std::size_t pos = 0;
  std::size_t chunk = std::string_view::npos;
  while (pos < text.size()) {
    const CodePoint cp = decode_at(text, pos);
    if (is_space(cp.value)) {
      if (chunk != std::string_view::npos) tokenize_chunk(seq, text, chunk, pos);
      chunk = std::string_view::npos;
    } else if (chunk == std::string_view::npos) {
      chunk = pos;
    }
    pos += cp.length;
  }
  if (chunk != std::string_view::npos) tokenize_chunk(seq, text, chunk, text.size());
  return seq;
}

std::string normalize_whitespace_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const CodePoint cp = decode_at(text, pos);
    if (is_space(cp.value)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.append(text.substr(pos, cp.length));
    }
    pos += cp.length;
  }
  return to_lower_utf8(out);
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> list = {
      "mr.",   "mrs.", "ms.",   "dr.",   "prof.", "sr.",  "jr.",  "st.",   "mt.",  "vs.",
      "e.g.",  "i.e.", "cf.",   "al.",   "approx.", "inc.", "ltd.", "co.", "corp.", "no.",
      "nos.",  "vol.", "fig.",  "figs.", "pp.",   "ed.",  "eds.", "gen.",  "col.", "lt.",
      "sgt.",  "capt.", "gov.", "sen.",  "rep.",  "rev.", "hon.", "jan.",  "feb.", "mar.",
      "apr.",  "jun.", "jul.",  "aug.",  "sep.",  "sept.", "oct.", "nov.", "dec.", "ca.",
      "u.s.",  "u.k."};
  return list;
}

SentenceSeq split_sentences(std::string_view text) {
  SentenceBuilder builder(text);
  std::size_t paragraph = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t after = 0;
    if (is_blank_line_at(text, pos, after)) {
      split_paragraph(builder, text, paragraph, pos);
      paragraph = after;
      pos = after;
      continue;
    }
    ++pos;
  }
  split_paragraph(builder, text, paragraph, text.size());
  return builder.take();
}

std::size_t edit_distance(const TokenSeq& a, const TokenSeq& b) {
  return levenshtein(a.tokens, b.tokens);
}

double edit_ratio(const TokenSeq& source, const TokenSeq& other) {
  if (source.empty()) throw std::domain_error("undefined ratio: empty source");
  return static_cast<double>(edit_distance(source, other)) / static_cast<double>(source.size());
}

double length_ratio(const TokenSeq& source, const TokenSeq& other) {
  if (source.empty()) throw std::domain_error("undefined ratio: empty source");
  return static_cast<double>(other.size()) / static_cast<double>(source.size());
}

std::vector<std::string> parse_word_list(std::string_view contents) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    std::size_t eol = contents.find('\n', pos);
    if (eol == std::string_view::npos) eol = contents.size();
    std::string_view line = contents.substr(pos, eol - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    std::size_t offset = 0;
    line = trim_view(line, offset);
    if (!line.empty()) words.push_back(normalize_whitespace_lower(line));
    pos = eol + 1;
  }
  return words;
}

std::vector<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read word list: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_word_list(buffer.str());
}

std::vector<std::string> content_words(const TokenSeq& tokens,
                                       const std::unordered_set<std::string>& stopwords) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (is_punctuation_token(t) || stopwords.count(t) != 0) continue;
    out.push_back(t);
  }
  return out;
}

namespace {

bool token_has_prefix(const std::string& token, std::string_view prefix) {
  return token.size() >= prefix.size() && token.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

std::optional<std::string> find_keyword(std::string_view text, const std::vector<std::string>& keywords) {
  const TokenSeq tokens = tokenize(text);
  for (const auto& keyword : keywords) {
    const TokenSeq parts = tokenize(keyword);
    if (parts.empty() || parts.size() > tokens.size()) continue;
    for (std::size_t p = 0; p + parts.size() <= tokens.size(); ++p) {
      bool all = true;
      for (std::size_t k = 0; k < parts.size() && all; ++k) {
        all = token_has_prefix(tokens[p + k], parts[k]);
      }
      if (all) return keyword;
    }
  }
  return std::nullopt;
}

}  // namespace rewritekit
