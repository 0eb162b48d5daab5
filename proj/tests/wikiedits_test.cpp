#include <doctest.h>

#include <random>

#include "rewritekit/textops.hpp"
#include "rewritekit/wikiedits.hpp"
#include "test_support.hpp"

using namespace rewritekit;

namespace {

std::string fixture(const std::string& name) { return std::string(REWRITEKIT_TEST_DATA) + "/wiki/" + name; }

std::string paragraphs(std::initializer_list<const char*> ps) {
  std::string out;
  for (const char* p : ps) {
    if (!out.empty()) out += "\n\n";
    out += p;
  }
  return out;
}

}  // namespace

TEST_CASE("strip_markup: links, templates, emphasis") {
  CHECK(strip_markup("[[Paris|the city]]") == "the city");
  CHECK(strip_markup("See [[Paris]] and [[London]]s.") == "See Paris and Londons.");
  CHECK(strip_markup("A {{cite web|url=x|title={{nested}}}} B") == "A B");
  CHECK(strip_markup("'''Bold''' and ''italic'' and '''''both'''''") == "Bold and italic and both");
  CHECK(strip_markup("Fact.<ref name=\"a\">{{cite book}}</ref> Next.<ref name=\"a\"/>") == "Fact. Next.");
  CHECK(strip_markup("[[File:X.jpg|thumb|A [[cat]] sitting]]Text") == "Text");
  CHECK(strip_markup("Text [[Category:Towns]]") == "Text");
  CHECK(strip_markup("[https://example.org the site] and [http://bare.org]") == "the site and");
  CHECK(strip_markup("a &amp; b&nbsp;c &#8212; &#x41;") == "a & b c \xe2\x80\x94 A");
  CHECK(strip_markup("x <!-- hidden --> y") == "x y");
  CHECK(strip_markup("line<br/>break <small>tiny</small>") == "line break tiny");
  CHECK(strip_markup("__NOTOC__Start") == "Start");
}

TEST_CASE("strip_markup: block structure") {
  const std::string text =
      "== History ==\nFirst para line one.\nline two.\n{{Infobox}}\nstill first.\n\n"
      "{| class=\"wikitable\"\n|-\n| cell\n|}\nSecond para.\n* item one\n* item two\n----\nThird.";
  MarkupReport report;
  const std::string flat = strip_markup(text, &report);
  CHECK(flat == "First para line one.\nline two.\nstill first.\n\nSecond para.\nitem one\nitem two\n\nThird.");
  CHECK(report.counts["heading"] == 1);
  CHECK(report.counts["table"] == 1);
  CHECK(report.counts["template"] == 1);
  CHECK(report.counts["list"] == 2);
}

TEST_CASE("strip_markup: unbalanced constructs are removed and counted") {
  MarkupReport report;
  CHECK(strip_markup("open {{ never closed and ]] stray", &report) == "open never closed and stray");
  CHECK(report.counts["unbalanced"] == 2);
  CHECK(strip_markup("a < b and c > d") == "a < b and c > d");
}

TEST_CASE("parse_history_dump: pages and sorted revisions") {
  MarkupReport report;
  const auto pages = parse_history_dump(fixture("basic.xml"), &report);
  REQUIRE(pages.size() == 1);
  const auto& p = pages[0];
  CHECK(p.id == "7");
  CHECK(p.title == "Paris");
  REQUIRE(p.revisions.size() == 3);
  CHECK(p.revisions[0].id == "10");
  CHECK(p.revisions[1].id == "11");
  CHECK(p.revisions[2].id == "12");
  CHECK(p.revisions[2].parent_id == "11");
  CHECK(p.revisions[2].comment == "expand intro");
  CHECK(p.revisions[2].text ==
        "Paris is the capital of France. It is known as the city of light.\n\nTourism is a major industry.");
  CHECK(report.counts["link"] == 3);
  CHECK(report.counts["template"] == 1);
}

TEST_CASE("parse_history_dump: errors") {
  try {
    parse_history_dump(fixture("malformed.xml"));
    FAIL("expected XmlError");
  } catch (const XmlError& e) {
    CHECK(e.offset() > 0);
    CHECK(std::string(e.what()).find("at byte") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_history_dump(fixture("absent.xml")), IoError);

  testing_support::TempDir dir;
  testing_support::write_file(dir.file("empty.xml"), "<mediawiki></mediawiki>");
  CHECK(parse_history_dump(dir.file("empty.xml")).empty());
}

TEST_CASE("diff_revisions") {
  const std::string five = paragraphs({"One.", "Two.", "Three.", "Four.", "Five."});
  CHECK(diff_revisions(five, five).empty());
  CHECK(diff_revisions("", "").empty());

  const auto edited = diff_revisions(five, paragraphs({"One.", "Two.", "Three, changed.", "Four.", "Five."}));
  REQUIRE(edited.size() == 1);
  CHECK(edited[0].source_block == "Three.");
  CHECK(edited[0].target_block == "Three, changed.");

  const auto inserted = diff_revisions(five, paragraphs({"One.", "Two.", "New.", "Three.", "Four.", "Five."}));
  REQUIRE(inserted.size() == 1);
  CHECK(inserted[0].source_block.empty());
  CHECK(inserted[0].target_block == "New.");

  const auto two_runs = diff_revisions(five, paragraphs({"One!", "Two.", "Three.", "4.", "5."}));
  REQUIRE(two_runs.size() == 2);
  CHECK(two_runs[0].source_block == "One.");
  CHECK(two_runs[1].source_block == "Four.\n\nFive.");
  CHECK(two_runs[1].target_block == "4.\n\n5.");

  // Whitespace and case only changes do not count.
  CHECK(diff_revisions("A  b.\n\nC.", "a b.\n\n\n\nc.").empty());
}

TEST_CASE("diff_revisions properties on random paragraph lists") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    auto words = testing_support::random_words(rng, 7, 5);
    auto other = testing_support::random_words(rng, 7, 5);
    const std::string a = testing_support::join(words, "\n\n");
    const std::string b = testing_support::join(other, "\n\n");
    CHECK(diff_revisions(a, a).empty());
    std::size_t changed_src = 0, changed_tgt = 0;
    for (const auto& r : diff_revisions(a, b)) {
      CHECK(r.source_block != r.target_block);
      changed_src += split_blocks(r.source_block).size();
      changed_tgt += split_blocks(r.target_block).size();
    }
    // Unchanged blocks form a common subsequence of maximal length.
    CHECK(words.size() - changed_src == other.size() - changed_tgt);
    CHECK(words.size() - changed_src == lcs_length(words, other));
  }
}

TEST_CASE("filter_revision rules") {
  const KeywordConfig cfg = KeywordConfig::defaults();
  RevisionRecord r;
  r.source_block = "One sentence here. Another one follows. And a third.";
  r.comment = "revert vandalism by IP";
  auto d = filter_revision(r, cfg);
  CHECK_FALSE(d.kept);
  CHECK(d.rule == FilterRule::LowQualityKeyword);
  CHECK(d.matched_term == std::optional<std::string>("revert"));

  r.comment = "fixed bold facing";
  d = filter_revision(r, cfg);
  CHECK(d.rule == FilterRule::FormatOnlyKeyword);
  CHECK(d.matched_term == std::optional<std::string>("bold"));

  r.comment = "improve the flow";
  CHECK(filter_revision(r, cfg).kept);
  CHECK(filter_revision(r, cfg).rule == FilterRule::None);

  r.source_block = "Only one. And two.";
  d = filter_revision(r, cfg);
  CHECK(d.rule == FilterRule::TooFewSentences);
  CHECK_FALSE(d.matched_term.has_value());

  // Earlier rules win.
  r.comment = "rv formatting";
  CHECK(filter_revision(r, cfg).rule == FilterRule::LowQualityKeyword);
  // Section names are not part of the summary.
  r.source_block = "One sentence here. Another one follows. And a third.";
  r.comment = "/* External links */ tighten prose";
  CHECK(filter_revision(r, cfg).kept);
}

TEST_CASE("keyword matching") {
  CHECK(find_keyword("Reverted edits by X", {"revert"}) == std::optional<std::string>("revert"));
  CHECK(find_keyword("preverted", {"revert"}) == std::nullopt);
  CHECK(find_keyword("add more detail", {"more detail", "add more"}) == std::optional<std::string>("more detail"));
  CHECK(find_keyword("more", {"more detail"}) == std::nullopt);
  CHECK(clean_comment("/* Early life */  fix   typo ") == "fix typo");
}

TEST_CASE("instruction heuristics") {
  const KeywordConfig cfg = KeywordConfig::defaults();
  CHECK(is_detailed_instruction("fix spelling of receive", "I recieve mail.", "I receive mail.", cfg));
  CHECK_FALSE(is_detailed_instruction("copyedit", "The cat sat.", "A dog sat.", cfg));
  CHECK_FALSE(is_detailed_instruction("", "a", "b", cfg));

  CHECK(starts_with_edit_verb("make the text easier to read", cfg));
  CHECK(starts_with_edit_verb("Simplify: the lead", cfg));
  CHECK(starts_with_edit_verb("/* Lead */ Rewrite intro", cfg));
  CHECK_FALSE(starts_with_edit_verb("grammar", cfg));
  CHECK_FALSE(starts_with_edit_verb("", cfg));
}

TEST_CASE("natural_less") {
  CHECK(natural_less("9", "10"));
  CHECK_FALSE(natural_less("10", "9"));
  CHECK(natural_less("007", "10"));
  CHECK(natural_less("a", "b"));
  CHECK_FALSE(natural_less("5", "5"));
}

TEST_CASE("extract_wiki on the 12-revision filter fixture") {
  ExtractOptions options;
  const ExtractResult result = extract_wiki(fixture("filter12.xml"), options);
  CHECK(result.pages == 2);
  CHECK(result.revisions == 12);

  std::vector<std::string> kept;
  for (const auto& r : result.kept) kept.push_back(r.rev_id);
  CHECK(kept == std::vector<std::string>{"3007", "4003", "4005"});

  struct Expect {
    const char* rev;
    FilterRule rule;
    const char* term;
  };
  const std::vector<Expect> expected = {
      {"3002", FilterRule::LowQualityKeyword, "revert"},
      {"3003", FilterRule::LowQualityKeyword, "vandal"},
      {"3004", FilterRule::FormatOnlyKeyword, "bold"},
      {"3005", FilterRule::FormatOnlyKeyword, "hyperlink"},
      {"3006", FilterRule::TooFewSentences, ""},
      {"4002", FilterRule::LowQualityKeyword, "undid"},
      {"4004", FilterRule::TooFewSentences, ""},
  };
  REQUIRE(result.rejected.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CAPTURE(expected[i].rev);
    CHECK(result.rejected[i].record.rev_id == expected[i].rev);
    CHECK(result.rejected[i].decision.rule == expected[i].rule);
    CHECK(result.rejected[i].decision.matched_term.value_or("") == expected[i].term);
  }

  for (const auto& r : result.kept) {
    CHECK(split_sentences(r.source_block).sentences.size() >= 3);
    CHECK(r.source_block != r.target_block);
  }
  CHECK(result.kept[0].comment == "/* History */ rewrite the opening for flow");
  CHECK(result.kept[0].parent_rev_id == "3006");
  CHECK(result.kept[2].source_block ==
        "The flood of 1953 destroyed the lower bridge. Several houses were lost. The council rebuilt the bridge in stone.");

  const auto rewrites = wiki_rewrite_records(result.kept, options.keywords);
  REQUIRE(rewrites.size() == 1);
  CHECK(rewrites[0].id == "302:4005:0");
  CHECK(rewrites[0].instruction == "expand on the heavy rain near the quay");
}

TEST_CASE("extract_wiki output does not depend on worker count") {
  ExtractOptions serial;
  ExtractOptions parallel;
  parallel.jobs = 8;
  parallel.pages_per_batch = 1;
  const auto a = extract_wiki(fixture("filter12.xml"), serial);
  const auto b = extract_wiki(fixture("filter12.xml"), parallel);
  CHECK(a.kept == b.kept);
  CHECK(a.markup.counts == b.markup.counts);
}

TEST_CASE("keyword config loads from a directory") {
  testing_support::TempDir dir;
  testing_support::write_file(dir.file("low_quality.txt"), "# custom\nBOGUS\n");
  const auto cfg = KeywordConfig::load(dir.file(""));
  CHECK(cfg.low_quality == std::vector<std::string>{"bogus"});
  CHECK(cfg.format_only == KeywordConfig::defaults().format_only);
}

TEST_CASE("shipped keyword files match the built-in defaults") {
  const auto shipped = KeywordConfig::load(std::string(REWRITEKIT_SOURCE_DIR) + "/config/keywords");
  const auto builtin = KeywordConfig::defaults();
  CHECK(shipped.low_quality == builtin.low_quality);
  CHECK(shipped.format_only == builtin.format_only);
  CHECK(shipped.edit_verbs == builtin.edit_verbs);
  CHECK(shipped.comment_stopwords == builtin.comment_stopwords);
}
