#include "rewritekit/wikiedits.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <exception>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <expat.h>

#include "rewritekit/parallel.hpp"
#include "rewritekit/textops.hpp"

namespace rewritekit {

void MarkupReport::merge(const MarkupReport& other) {
  for (const auto& [k, v] : other.counts) counts[k] += v;
}

std::size_t MarkupReport::total() const {
  std::size_t n = 0;
  for (const auto& [k, v] : counts) n += v;
  return n;
}

namespace {

bool starts_at(std::string_view s, std::size_t i, std::string_view prefix) {
  return s.size() >= i + prefix.size() && s.compare(i, prefix.size(), prefix) == 0;
}

bool starts_at_ci(std::string_view s, std::size_t i, std::string_view prefix) {
  if (s.size() < i + prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (std::tolower(static_cast<unsigned char>(s[i + k])) !=
        std::tolower(static_cast<unsigned char>(prefix[k]))) {
      return false;
    }
  }
  return true;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (is_space(s.front()) || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (is_space(s.back()) || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

// Index just past the close token balancing the open token at i, or npos.
std::size_t find_matching(std::string_view s, std::size_t i, std::string_view open,
                          std::string_view close) {
  int depth = 0;
  std::size_t j = i;
  while (j < s.size()) {
    if (starts_at(s, j, open)) {
      ++depth;
      j += open.size();
    } else if (starts_at(s, j, close)) {
      --depth;
      j += close.size();
      if (depth == 0) return j;
    } else {
      ++j;
    }
  }
  return std::string_view::npos;
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

const std::unordered_map<std::string, unsigned long>& named_entities() {
  static const std::unordered_map<std::string, unsigned long> table = {
      {"nbsp", ' '},      {"amp", '&'},       {"lt", '<'},        {"gt", '>'},
      {"quot", '"'},      {"apos", '\''},     {"ndash", 0x2013},  {"mdash", 0x2014},
      {"hellip", 0x2026}, {"minus", 0x2212},  {"times", 0xD7},    {"thinsp", ' '},
      {"ensp", ' '},      {"emsp", ' '},      {"laquo", 0xAB},    {"raquo", 0xBB},
      {"lsquo", 0x2018},  {"rsquo", 0x2019},  {"ldquo", 0x201C},  {"rdquo", 0x201D},
      {"copy", 0xA9},     {"reg", 0xAE},      {"deg", 0xB0},      {"middot", 0xB7},
      {"eacute", 0xE9},   {"egrave", 0xE8},   {"aacute", 0xE1},   {"ouml", 0xF6},
      {"uuml", 0xFC},     {"auml", 0xE4},     {"szlig", 0xDF},    {"pound", 0xA3},
      {"euro", 0x20AC},   {"frac12", 0xBD},   {"plusmn", 0xB1},   {"bull", 0x2022}};
  return table;
}

// Tags whose content is not prose.
bool drops_content(const std::string& tag) {
  static const std::unordered_set<std::string> tags = {
      "ref", "gallery", "math", "timeline", "references", "syntaxhighlight", "source",
      "score", "imagemap", "templatedata", "chem", "graph", "mapframe", "hiero"};
  return tags.count(tag) != 0;
}

bool is_external_scheme(std::string_view s, std::size_t i) {
  return starts_at_ci(s, i, "http://") || starts_at_ci(s, i, "https://") ||
         starts_at_ci(s, i, "ftp://") || starts_at(s, i, "//") || starts_at_ci(s, i, "mailto:");
}

class Flattener {
 public:
  explicit Flattener(MarkupReport* report) : report_(report) {}

  // Markup-free text with original line structure; empty lines that held
  // only removed constructs are dropped, block-level separators become blank
  // lines.
  std::string run(std::string_view s) {
    std::string out;
    std::size_t line_begin_out = 0;
    bool line_start = true;
    bool line_consumed = false;  // current input line had non-blank content
    std::size_t i = 0;
    const std::size_t n = s.size();

    auto end_line = [&] {
      const std::string_view line(out.data() + line_begin_out, out.size() - line_begin_out);
      if (line_consumed && trim_view(line).empty()) {
        out.resize(line_begin_out);
      } else {
        out += '\n';
      }
      line_begin_out = out.size();
      line_start = true;
      line_consumed = false;
    };
    auto block_break = [&] {
      out.resize(line_begin_out);
      out += '\n';
      line_begin_out = out.size();
    };

    while (i < n) {
      const char c = s[i];
      if (c == '\n') {
        end_line();
        ++i;
        continue;
      }
      if (!is_space(c)) line_consumed = true;

      if (line_start) {
        if (c == '=') {
          const std::size_t eol = std::min(s.find('\n', i), n);
          const std::string_view line = trim_view(s.substr(i, eol - i));
          if (line.size() >= 2 && line.back() == '=') {
            note("heading");
            block_break();
            line_consumed = false;
            i = eol;
            continue;
          }
        }
        if (starts_at(s, i, "----")) {
          note("horizontal_rule");
          block_break();
          line_consumed = false;
          i = std::min(s.find('\n', i), n);
          continue;
        }
        if (starts_at(s, i, "{|")) {
          const std::size_t j = find_matching(s, i, "{|", "|}");
          note(j == std::string_view::npos ? "unbalanced" : "table");
          block_break();
          line_consumed = false;
          i = j == std::string_view::npos ? n : j;
          line_start = false;
          continue;
        }
        if (c == '*' || c == '#' || c == ':' || c == ';') {
          while (i < n && (s[i] == '*' || s[i] == '#' || s[i] == ':' || s[i] == ';')) ++i;
          while (i < n && is_space(s[i])) ++i;
          note("list");
          line_start = false;
          continue;
        }
      }
      line_start = false;

      if (starts_at(s, i, "<!--")) {
        const std::size_t j = s.find("-->", i + 4);
        note("comment");
        i = j == std::string_view::npos ? n : j + 3;
        continue;
      }
      if (starts_at(s, i, "{{")) {
        const std::size_t j = find_matching(s, i, "{{", "}}");
        if (j == std::string_view::npos) {
          note("unbalanced");
          i += 2;
        } else {
          note("template");
          i = j;
        }
        continue;
      }
      if (starts_at(s, i, "[[")) {
        const std::size_t j = find_matching(s, i, "[[", "]]");
        if (j == std::string_view::npos) {
          note("unbalanced");
          i += 2;
        } else {
          link(s.substr(i + 2, j - i - 4), out);
          i = j;
        }
        continue;
      }
      if (c == '[' && is_external_scheme(s, i + 1)) {
        const std::size_t j = s.find_first_of("]\n", i);
        if (j != std::string_view::npos && s[j] == ']') {
          const std::string_view inner = s.substr(i + 1, j - i - 1);
          const std::size_t space = inner.find_first_of(" \t");
          if (space != std::string_view::npos) out += Flattener(report_).inline_text(inner.substr(space + 1));
          note("external_link");
          i = j + 1;
          continue;
        }
      }
      if (c == '\'' && starts_at(s, i, "''")) {
        std::size_t k = 0;
        while (i + k < n && s[i + k] == '\'') ++k;
        if (k == 2) {
          note("italic");
        } else if (k == 3) {
          note("bold");
        } else if (k == 4) {
          out += '\'';
          note("bold");
        } else {
          out.append(k - 5, '\'');
          note("bold");
          note("italic");
        }
        i += k;
        continue;
      }
      if (c == '<') {
        if (const std::size_t j = tag(s, i, out); j != i) {
          i = j;
          continue;
        }
      }
      if (c == '&') {
        if (const std::size_t j = entity(s, i, out); j != i) {
          i = j;
          continue;
        }
      }
      if (starts_at(s, i, "__")) {
        std::size_t j = i + 2;
        while (j < n && std::isupper(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i + 2 && starts_at(s, j, "__")) {
          note("magic_word");
          i = j + 2;
          continue;
        }
      }
      if (starts_at(s, i, "}}") || starts_at(s, i, "]]") || starts_at(s, i, "|}")) {
        note("unbalanced");
        i += 2;
        continue;
      }
      out += c;
      ++i;
    }
    end_line();
    return out;
  }

  // Flattened text on a single line (link captions and the like).
  std::string inline_text(std::string_view s) {
    std::string flat = run(s);
    for (auto& ch : flat) {
      if (ch == '\n') ch = ' ';
    }
    return std::string(trim_view(flat));
  }

 private:
  void note(const char* kind) {
    if (report_) report_->add(kind);
  }

  void link(std::string_view inner, std::string& out) {
    std::string_view t = inner;
    const bool leading_colon = !t.empty() && t.front() == ':';
    if (leading_colon) t.remove_prefix(1);
    const std::size_t colon = t.find(':');
    const std::size_t pipe = t.find('|');
    if (!leading_colon && colon != std::string_view::npos && (pipe == std::string_view::npos || colon < pipe)) {
      const std::string ns = ascii_lower(trim_view(t.substr(0, colon)));
      if (ns == "file" || ns == "image" || ns == "media") {
        note("file");
        return;
      }
      if (ns == "category") {
        note("category");
        return;
      }
      const bool language_code =
          (ns.size() == 2 || ns.size() == 3) &&
          std::all_of(ns.begin(), ns.end(), [](char ch) { return ch >= 'a' && ch <= 'z'; }) &&
          t.substr(0, colon) == ns;
      if (language_code) {
        note("interlanguage");
        return;
      }
    }
    std::string_view surface = pipe == std::string_view::npos ? t : t.substr(pipe + 1);
    if (pipe != std::string_view::npos && trim_view(surface).empty()) surface = t.substr(0, pipe);
    if (!surface.empty() && surface.front() == '#') surface.remove_prefix(1);
    note("link");
    out += Flattener(report_).inline_text(surface);
  }

  // Returns the index after a recognised tag, or i when '<' is literal.
  std::size_t tag(std::string_view s, std::size_t i, std::string& out) {
    std::size_t j = i + 1;
    const bool closing = j < s.size() && s[j] == '/';
    if (closing) ++j;
    const std::size_t name_begin = j;
    while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
    if (j == name_begin || !std::isalpha(static_cast<unsigned char>(s[name_begin]))) return i;
    if (j < s.size() && !(s[j] == '>' || s[j] == '/' || is_space(s[j]) || s[j] == '\n')) return i;
    const std::size_t gt = s.find('>', j);
    if (gt == std::string_view::npos) return i;
    const std::string name = ascii_lower(s.substr(name_begin, j - name_begin));
    const bool self_closing = s[gt - 1] == '/';
    if (!closing && !self_closing && drops_content(name)) {
      std::size_t k = gt + 1;
      while (k < s.size()) {
        k = s.find("</", k);
        if (k == std::string_view::npos) break;
        if (starts_at_ci(s, k + 2, name)) {
          const std::size_t end = s.find('>', k);
          note(name == "ref" ? "ref" : "html_block");
          return end == std::string_view::npos ? s.size() : end + 1;
        }
        k += 2;
      }
      note("unbalanced");
      return gt + 1;
    }
    if (name == "ref" || drops_content(name)) {
      note(name == "ref" ? "ref" : "html_block");
    } else {
      note("html_tag");
      if (name == "br") out += ' ';
    }
    return gt + 1;
  }

  std::size_t entity(std::string_view s, std::size_t i, std::string& out) {
    const std::size_t semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10 || semi == i + 1) return i;
    const std::string_view body = s.substr(i + 1, semi - i - 1);
    unsigned long cp = 0;
    if (body.front() == '#') {
      const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
      const std::string_view digits = body.substr(hex ? 2 : 1);
      if (digits.empty()) return i;
      for (char d : digits) {
        if (!std::isxdigit(static_cast<unsigned char>(d)) || (!hex && !std::isdigit(static_cast<unsigned char>(d)))) {
          return i;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(std::isdigit(static_cast<unsigned char>(d)) ? d - '0' : std::tolower(d) - 'a' + 10);
        if (cp > 0x10FFFF) return i;
      }
    } else {
      if (!std::all_of(body.begin(), body.end(), [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)); })) {
        return i;
      }
      const auto it = named_entities().find(std::string(body));
      if (it == named_entities().end()) {
        note("unknown_entity");
        return i;
      }
      cp = it->second;
    }
    note("entity");
    append_utf8(out, cp);
    return semi + 1;
  }

  MarkupReport* report_;
};

// Collapses intra-line whitespace and normalises paragraph separators to a
// single blank line.
std::string tidy(const std::string& flat) {
  std::string out;
  bool pending_break = false;
  std::size_t start = 0;
  while (start <= flat.size()) {
    std::size_t end = flat.find('\n', start);
    if (end == std::string::npos) end = flat.size();
    std::string line;
    bool space = false;
    for (std::size_t k = start; k < end; ++k) {
      const char ch = flat[k];
      if (is_space(ch)) {
        space = !line.empty();
      } else {
        if (space) line += ' ';
        space = false;
        line += ch;
      }
    }
    if (line.empty()) {
      pending_break = !out.empty();
    } else {
      if (!out.empty()) out += pending_break ? "\n\n" : "\n";
      out += line;
      pending_break = false;
    }
    start = end + 1;
  }
  return out;
}

}  // namespace

std::string strip_markup(std::string_view wikitext, MarkupReport* report) {
  return tidy(Flattener(report).run(wikitext));
}

namespace {

struct DumpState {
  XML_Parser parser = nullptr;
  const std::function<void(WikiPage&&)>* sink = nullptr;
  DumpOptions options;
  MarkupReport* report = nullptr;
  std::vector<std::string> stack;
  WikiPage page;
  WikiRevision revision;
  std::string buffer;
  bool capturing = false;
  std::exception_ptr error;

  const std::string& parent() const {
    static const std::string none;
    return stack.size() >= 2 ? stack[stack.size() - 2] : none;
  }
};

bool captured(const std::string& name, const std::string& parent) {
  if (parent == "page") return name == "title" || name == "id";
  if (parent == "revision") {
    return name == "id" || name == "parentid" || name == "timestamp" || name == "comment" ||
           name == "text";
  }
  return false;
}

void finish_page(DumpState& st) {
  std::stable_sort(st.page.revisions.begin(), st.page.revisions.end(),
                   [](const WikiRevision& a, const WikiRevision& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return natural_less(a.id, b.id);
                   });
  if (st.options.strip) {
    for (auto& r : st.page.revisions) r.text = strip_markup(r.text, st.report);
  }
  (*st.sink)(std::move(st.page));
  st.page = WikiPage{};
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char**) {
  auto& st = *static_cast<DumpState*>(data);
  st.stack.emplace_back(name);
  const std::string& n = st.stack.back();
  if (n == "page" && st.parent() != "revision") {
    st.page = WikiPage{};
  } else if (n == "revision") {
    st.revision = WikiRevision{};
  }
  st.capturing = captured(n, st.parent());
  if (st.capturing) st.buffer.clear();
}

void XMLCALL on_end(void* data, const XML_Char*) {
  auto& st = *static_cast<DumpState*>(data);
  if (st.error) return;
  try {
    const std::string name = st.stack.back();
    const std::string parent = st.parent();
    if (st.capturing) {
      if (parent == "page") {
        (name == "title" ? st.page.title : st.page.id) = st.buffer;
      } else if (name == "id") {
        st.revision.id = st.buffer;
      } else if (name == "parentid") {
        st.revision.parent_id = st.buffer;
      } else if (name == "timestamp") {
        st.revision.timestamp = st.buffer;
      } else if (name == "comment") {
        st.revision.comment = st.buffer;
      } else if (name == "text") {
        st.revision.text = std::move(st.buffer);
        st.buffer.clear();
      }
      st.capturing = false;
    } else if (name == "revision") {
      st.page.revisions.push_back(std::move(st.revision));
    } else if (name == "page") {
      finish_page(st);
    }
    st.stack.pop_back();
  } catch (...) {
    st.error = std::current_exception();
    XML_StopParser(st.parser, XML_FALSE);
  }
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
  auto& st = *static_cast<DumpState*>(data);
  if (st.capturing) st.buffer.append(s, static_cast<std::size_t>(len));
}

}  // namespace

void parse_history_dump(const std::string& path, const std::function<void(WikiPage&&)>& sink,
                        const DumpOptions& options, MarkupReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  DumpState st;
  st.sink = &sink;
  st.options = options;
  st.report = report;
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw std::bad_alloc();
  st.parser = parser.get();
  XML_SetUserData(st.parser, &st);
  XML_SetElementHandler(st.parser, on_start, on_end);
  XML_SetCharacterDataHandler(st.parser, on_text);

  std::vector<char> chunk(1 << 16);
  for (;;) {
    in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    const std::streamsize got = in.gcount();
    if (in.bad()) throw IoError("read failure in " + path);
    const bool last = got < static_cast<std::streamsize>(chunk.size());
    if (XML_Parse(st.parser, chunk.data(), static_cast<int>(got), last ? XML_TRUE : XML_FALSE) ==
        XML_STATUS_ERROR) {
      if (st.error) std::rethrow_exception(st.error);
      throw XmlError(path + ": " + XML_ErrorString(XML_GetErrorCode(st.parser)) + " (line " +
                         std::to_string(XML_GetCurrentLineNumber(st.parser)) + ")",
                     static_cast<std::uint64_t>(XML_GetCurrentByteIndex(st.parser)));
    }
    if (last) break;
  }
}

std::vector<WikiPage> parse_history_dump(const std::string& path, MarkupReport* report) {
  std::vector<WikiPage> pages;
  parse_history_dump(
      path, [&](WikiPage&& p) { pages.push_back(std::move(p)); }, DumpOptions{}, report);
  return pages;
}

std::vector<std::string> split_blocks(std::string_view text) {
  std::vector<std::string> blocks;
  std::string current;
  std::size_t start = 0;
  auto flush = [&] {
    const std::string_view t = trim_view(current);
    if (!t.empty()) blocks.emplace_back(t);
    current.clear();
  };
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    if (trim_view(line).empty()) {
      flush();
    } else {
      if (!current.empty()) current += '\n';
      current += line;
    }
    start = end + 1;
  }
  flush();
  return blocks;
}

namespace {

std::string join_blocks(const std::vector<std::string>& blocks, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t k = from; k < to; ++k) {
    if (k > from) out += "\n\n";
    out += blocks[k];
  }
  return out;
}

}  // namespace

std::vector<RevisionRecord> diff_revisions(std::string_view before, std::string_view after) {
  const std::vector<std::string> a = split_blocks(before);
  const std::vector<std::string> b = split_blocks(after);
  std::vector<std::string> ka, kb;
  for (const auto& x : a) ka.push_back(normalize_whitespace_lower(x));
  for (const auto& x : b) kb.push_back(normalize_whitespace_lower(x));

  // dp[i][j] = LCS of ka[i..] and kb[j..].
  const std::size_t n = ka.size(), m = kb.size();
  std::vector<std::vector<std::uint32_t>> dp(n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      dp[i][j] = ka[i] == kb[j] ? dp[i + 1][j + 1] + 1 : std::max(dp[i + 1][j], dp[i][j + 1]);
    }
  }

  std::vector<RevisionRecord> out;
  std::size_t i = 0, j = 0, run_i = 0, run_j = 0;
  auto emit = [&] {
    if (run_i == i && run_j == j) return;
    RevisionRecord r;
    r.source_block = join_blocks(a, run_i, i);
    r.target_block = join_blocks(b, run_j, j);
    if (r.source_block != r.target_block) out.push_back(std::move(r));
  };
  while (i < n || j < m) {
    if (i < n && j < m && ka[i] == kb[j]) {
      emit();
      ++i;
      ++j;
      run_i = i;
      run_j = j;
    } else if (j == m || (i < n && dp[i + 1][j] >= dp[i][j + 1])) {
      ++i;
    } else {
      ++j;
    }
  }
  emit();
  return out;
}

namespace {

const std::vector<std::string> kLowQuality = {"revert", "rv", "rvv", "undo", "undid", "vandal",
                                              "rollback", "spam", "nonsense", "hoax"};
const std::vector<std::string> kFormatOnly = {"bold", "italic", "hyperlink", "link", "wikilink",
                                              "wikify", "delink", "unlink", "format", "reformat",
                                              "markup", "whitespace", "indent"};
const std::vector<std::string> kEditVerbs = {
    "make", "rewrite", "reword", "rephrase", "paraphrase", "add", "remove", "delete", "shorten",
    "expand", "elaborate", "clarify", "fix", "simplify", "improve", "update", "correct",
    "condense", "trim", "summarize", "restructure", "reorganize", "merge", "split", "copyedit",
    "tighten", "cut", "change", "replace", "move", "polish", "streamline", "explain", "mention",
    "include", "adjust", "revise", "edit", "clean", "rework", "combine", "reduce", "extend"};
const std::vector<std::string> kCommentStopwords = {
    "a", "an", "the", "and", "or", "but", "if", "of", "to", "in", "on", "at", "by", "for",
    "with", "from", "as", "into", "about", "is", "are", "was", "were", "be", "been", "being",
    "it", "its", "this", "that", "these", "those", "i", "we", "you", "he", "she", "they",
    "me", "my", "our", "your", "his", "her", "their", "them", "some", "any", "all", "more",
    "most", "other", "such", "no", "not", "only", "so", "than", "too", "very", "can", "will",
    "just", "do", "does", "did", "has", "have", "had", "per", "via", "also", "there", "here"};

std::vector<std::string> list_or_default(const std::string& dir, const char* file,
                                         const std::vector<std::string>& fallback) {
  const std::string path = dir + "/" + file;
  if (!std::ifstream(path)) return fallback;
  return load_word_list(path);
}

}  // namespace

KeywordConfig KeywordConfig::defaults() {
  return {kLowQuality, kFormatOnly, kEditVerbs, kCommentStopwords};
}

KeywordConfig KeywordConfig::load(const std::string& dir) {
  return {list_or_default(dir, "low_quality.txt", kLowQuality),
          list_or_default(dir, "format_only.txt", kFormatOnly),
          list_or_default(dir, "edit_verbs.txt", kEditVerbs),
          list_or_default(dir, "comment_stopwords.txt", kCommentStopwords)};
}

std::string_view to_string(FilterRule rule) {
  switch (rule) {
    case FilterRule::None: return "NONE";
    case FilterRule::LowQualityKeyword: return "LOW_QUALITY_KEYWORD";
    case FilterRule::FormatOnlyKeyword: return "FORMAT_ONLY_KEYWORD";
    case FilterRule::TooFewSentences: return "TOO_FEW_SENTENCES";
  }
  return "UNKNOWN";
}

std::string clean_comment(std::string_view comment) {
  std::string out;
  std::size_t i = 0;
  while (i < comment.size()) {
    if (starts_at(comment, i, "/*")) {
      const std::size_t end = comment.find("*/", i + 2);
      if (end != std::string_view::npos) {
        i = end + 2;
        out += ' ';
        continue;
      }
    }
    out += comment[i++];
  }
  std::string collapsed;
  for (char c : out) {
    if (is_space(c) || c == '\n') {
      if (!collapsed.empty() && collapsed.back() != ' ') collapsed += ' ';
    } else {
      collapsed += c;
    }
  }
  return std::string(trim_view(collapsed));
}

FilterDecision filter_revision(const RevisionRecord& r, const KeywordConfig& config) {
  const std::string comment = clean_comment(r.comment);
  if (auto term = find_keyword(comment, config.low_quality)) {
    return {false, FilterRule::LowQualityKeyword, term};
  }
  if (auto term = find_keyword(comment, config.format_only)) {
    return {false, FilterRule::FormatOnlyKeyword, term};
  }
  if (split_sentences(r.source_block).sentences.size() <= 2) {
    return {false, FilterRule::TooFewSentences, std::nullopt};
  }
  return {};
}

bool is_detailed_instruction(std::string_view comment, std::string_view source,
                             std::string_view target, const KeywordConfig& config) {
  const std::unordered_set<std::string> stop(config.comment_stopwords.begin(),
                                             config.comment_stopwords.end());
  const auto words = content_words(tokenize(clean_comment(comment)), stop);
  if (words.empty()) return false;
  std::unordered_map<std::string, long> balance;
  for (const auto& t : tokenize(source)) ++balance[t];
  for (const auto& t : tokenize(target)) --balance[t];
  for (const auto& w : words) {
    const auto it = balance.find(w);
    if (it != balance.end() && it->second != 0) return true;
  }
  return false;
}

bool starts_with_edit_verb(std::string_view comment, const KeywordConfig& config) {
  const std::string cleaned = clean_comment(comment);
  const std::size_t end = cleaned.find(' ');
  std::string_view first = std::string_view(cleaned).substr(0, end);
  auto edge = [](char c) { return !std::isalnum(static_cast<unsigned char>(c)) && !(static_cast<unsigned char>(c) & 0x80); };
  while (!first.empty() && edge(first.front())) first.remove_prefix(1);
  while (!first.empty() && edge(first.back())) first.remove_suffix(1);
  if (first.empty()) return false;
  const std::string word = to_lower_utf8(first);
  return std::find(config.edit_verbs.begin(), config.edit_verbs.end(), word) != config.edit_verbs.end();
}

bool natural_less(const std::string& a, const std::string& b) {
  auto numeric = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  if (numeric(a) && numeric(b)) {
    const auto strip = [](const std::string& s) {
      const std::size_t nz = s.find_first_not_of('0');
      return nz == std::string::npos ? std::string_view("0") : std::string_view(s).substr(nz);
    };
    const std::string_view x = strip(a), y = strip(b);
    if (x.size() != y.size()) return x.size() < y.size();
    if (x != y) return x < y;
  }
  return a < b;
}

namespace {

struct PageOutput {
  std::vector<RevisionRecord> records;
  std::vector<FilterDecision> decisions;
  MarkupReport markup;
  std::size_t revisions = 0;
};

PageOutput process_page(const WikiPage& page, const KeywordConfig& config) {
  PageOutput out;
  out.revisions = page.revisions.size();
  std::vector<std::string> texts;
  texts.reserve(page.revisions.size());
  for (const auto& r : page.revisions) texts.push_back(strip_markup(r.text, &out.markup));
  for (std::size_t k = 1; k < page.revisions.size(); ++k) {
    const auto& rev = page.revisions[k];
    for (auto& rec : diff_revisions(texts[k - 1], texts[k])) {
      rec.page_id = page.id;
      rec.rev_id = rev.id;
      rec.parent_rev_id = page.revisions[k - 1].id;
      rec.comment = rev.comment;
      rec.timestamp = rev.timestamp;
      out.decisions.push_back(filter_revision(rec, config));
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace

ExtractResult extract_wiki(const std::string& dump_path, const ExtractOptions& options) {
  ExtractResult result;
  std::vector<WikiPage> batch;
  auto flush = [&] {
    const auto outputs = parallel_map(batch, options.jobs, [&](const WikiPage& p) {
      return process_page(p, options.keywords);
    });
    for (const auto& o : outputs) {
      result.revisions += o.revisions;
      result.markup.merge(o.markup);
      for (std::size_t k = 0; k < o.records.size(); ++k) {
        if (o.decisions[k].kept) {
          result.kept.push_back(o.records[k]);
        } else {
          result.rejected.push_back({o.records[k], o.decisions[k]});
        }
      }
    }
    result.pages += batch.size();
    batch.clear();
  };
  parse_history_dump(
      dump_path,
      [&](WikiPage&& page) {
        batch.push_back(std::move(page));
        if (batch.size() >= std::max<std::size_t>(1, options.pages_per_batch)) flush();
      },
      DumpOptions{false});
  if (!batch.empty()) flush();

  auto by_ids = [](const RevisionRecord& a, const RevisionRecord& b) {
    if (a.page_id != b.page_id) return natural_less(a.page_id, b.page_id);
    if (a.rev_id != b.rev_id) return natural_less(a.rev_id, b.rev_id);
    return false;
  };
  std::stable_sort(result.kept.begin(), result.kept.end(), by_ids);
  std::stable_sort(result.rejected.begin(), result.rejected.end(),
                   [&](const RejectedRevision& a, const RejectedRevision& b) { return by_ids(a.record, b.record); });
  return result;
}

std::vector<RewriteRecord> wiki_rewrite_records(const std::vector<RevisionRecord>& kept,
                                                const KeywordConfig& config) {
  std::vector<RewriteRecord> out;
  std::map<std::pair<std::string, std::string>, int> seen;
  for (const auto& r : kept) {
    const int index = seen[{r.page_id, r.rev_id}]++;
    if (!starts_with_edit_verb(r.comment, config)) continue;
    if (!is_detailed_instruction(r.comment, r.source_block, r.target_block, config)) continue;
    RewriteRecord rec;
    rec.id = r.page_id + ":" + r.rev_id + ":" + std::to_string(index);
    rec.instruction = clean_comment(r.comment);
    rec.source = r.source_block;
    rec.target = r.target_block;
    rec.meta = {{"origin", "wiki"}, {"page_id", r.page_id}, {"rev_id", r.rev_id},
                {"parent_rev_id", r.parent_rev_id}, {"timestamp", r.timestamp}};
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace rewritekit
