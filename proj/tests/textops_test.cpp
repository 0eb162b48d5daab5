#include <doctest.h>

#include <random>

#include "oracle/sequence_oracle.hpp"
#include "rewritekit/textops.hpp"
#include "test_support.hpp"

using namespace rewritekit;
using Words = std::vector<std::string>;

TEST_CASE("tokenize separates edge punctuation and lowercases") {
  CHECK(tokenize("The cat sat.").tokens == Words{"the", "cat", "sat", "."});
  CHECK(tokenize("").tokens.empty());
  CHECK(tokenize("   \n\t ").tokens.empty());
  // The em dash splits its chunk even without surrounding spaces.
  CHECK(tokenize("don't stop\xE2\x80\x94now").tokens == Words{"don't", "stop", "\xE2\x80\x94", "now"});
  CHECK(tokenize("(Hello), \"world\"!").tokens ==
        Words{"(", "hello", ")", ",", "\"", "world", "\"", "!"});
  CHECK(tokenize("e.g. 3.5 well-known").tokens == Words{"e.g", ".", "3.5", "well-known"});
  CHECK(tokenize("\xC3\x89t\xC3\xA9 \xD0\x9C\xD0\xB8\xD1\x80").tokens ==
        Words{"\xC3\xA9t\xC3\xA9", "\xD0\xBC\xD0\xB8\xD1\x80"});
}

TEST_CASE("tokenize spans point back into the original text") {
  const std::string text = "  Big  dog, ran.";
  const TokenSeq seq = tokenize(text);
  REQUIRE(seq.tokens.size() == seq.original_spans.size());
  std::size_t last_end = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto span = seq.original_spans[i];
    CHECK(span.begin >= last_end);
    CHECK(span.end > span.begin);
    CHECK(to_lower_utf8(text.substr(span.begin, span.end - span.begin)) == seq.tokens[i]);
    last_end = span.end;
  }
}

TEST_CASE("tokenize is idempotent on its joined output") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> pieces = {"Word", "don't", "(x)", "a.b.", "...", "\"Q\"",
                                           "\xE2\x80\x94", "end!", "3.14", "'tis", "-", "Ab-Cd,"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const int n = static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) text += pieces[pick(rng)] + (rng() % 3 == 0 ? "" : " ");
    const Words first = tokenize(text).tokens;
    CHECK(tokenize(testing_support::join(first)).tokens == first);
  }
}

TEST_CASE("split_sentences") {
  CHECK(split_sentences("A. B? C!").size() == 3);
  CHECK(split_sentences("").size() == 0);
  CHECK(split_sentences("   ").size() == 0);

  const SentenceSeq abbrev = split_sentences("See e.g. the dog. It ran.");
  REQUIRE(abbrev.size() == 2);
  CHECK(abbrev.sentences[0] == "See e.g. the dog.");
  CHECK(abbrev.sentences[1] == "It ran.");

  CHECK(split_sentences("Dr. Smith arrived. He sat.").size() == 2);
  CHECK(split_sentences("It cost 3.5 dollars. 4 people paid.").size() == 2);
  CHECK(split_sentences("no capital. next one").size() == 1);
  CHECK(split_sentences("He said \"Stop.\" Then left.").size() == 2);
  CHECK(split_sentences("First paragraph without period\n\nsecond paragraph").size() == 2);
}

TEST_CASE("split_sentences slices reconstruct the input") {
  const std::string text = "One  two.   Three!\n\nFour? five six.";
  const SentenceSeq seq = split_sentences(text);
  REQUIRE(seq.size() == 3);
  CHECK(seq.normalized[0] == "one two.");
  std::size_t last = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto span = seq.spans[i];
    CHECK(text.substr(span.begin, span.end - span.begin) == seq.sentences[i]);
    for (std::size_t k = last; k < span.begin; ++k) {
      CHECK(std::isspace(static_cast<unsigned char>(text[k])));
    }
    last = span.end;
  }
  CHECK(last == text.size());
}

TEST_CASE("split_sentences counts periods in A. B. C. style input") {
  for (int n = 1; n <= 12; ++n) {
    std::string text;
    for (int i = 0; i < n; ++i) text += std::string(1, static_cast<char>('K' + i)) + "x. ";
    CHECK(split_sentences(text).size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("edit_distance examples") {
  auto seq = [](Words w) { return TokenSeq::from_tokens(std::move(w)); };
  CHECK(edit_distance(seq({"a", "b", "c"}), seq({"a", "b", "c"})) == 0);
  CHECK(edit_distance(seq({}), seq({"x", "y"})) == 2);
  const Words left = {"the", "cat", "sat"};
  const Words right = {"the", "dog", "sat", "down"};
  REQUIRE(oracle::edit_distance(left, right) == 2);
  CHECK(edit_distance(seq(left), seq(right)) == 2);
}

TEST_CASE("edit_ratio and length_ratio") {
  auto seq = [](Words w) { return TokenSeq::from_tokens(std::move(w)); };
  CHECK(edit_ratio(seq({"a", "b"}), seq({"a", "b"})) == 0.0);
  const Words source = {"the", "cat", "sat"};
  const Words other = {"the", "dog", "sat", "down"};
  const double expected = static_cast<double>(oracle::edit_distance(source, other)) / 3.0;
  CHECK(edit_ratio(seq(source), seq(other)) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(edit_ratio(seq(source), seq(other)) == doctest::Approx(0.6667).epsilon(1e-4));
  CHECK(edit_ratio(seq({"a", "b", "c", "d"}), seq({})) == 1.0);
  CHECK_THROWS_AS(edit_ratio(seq({}), seq({"a"})), std::domain_error);

  CHECK(length_ratio(seq({"a", "b"}), seq({"c", "d"})) == 1.0);
  CHECK(length_ratio(seq({"a", "b", "c"}), seq({"1", "2", "3", "4", "5", "6"})) == 2.0);
  CHECK(length_ratio(seq({"a", "b", "c", "d", "e"}), seq({})) == 0.0);
  CHECK_THROWS_AS(length_ratio(seq({}), seq({})), std::domain_error);
}

TEST_CASE("edit_distance is a metric and matches the brute-force oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const Words a = testing_support::random_words(rng, 7, 4);
    const Words b = testing_support::random_words(rng, 7, 4);
    const Words c = testing_support::random_words(rng, 7, 4);
    const auto ta = TokenSeq::from_tokens(a);
    const auto tb = TokenSeq::from_tokens(b);
    const auto tc = TokenSeq::from_tokens(c);
    const std::size_t ab = edit_distance(ta, tb);
    REQUIRE(ab == oracle::edit_distance(a, b));
    CHECK(ab == edit_distance(tb, ta));
    CHECK((ab == 0) == (a == b));
    CHECK(edit_distance(ta, tc) <= ab + edit_distance(tb, tc));
    CHECK(ab <= std::max(a.size(), b.size()));
    CHECK(ab >= (a.size() > b.size() ? a.size() - b.size() : b.size() - a.size()));
  }
}

TEST_CASE("lcs_length matches the enumeration oracle") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const Words a = testing_support::random_words(rng, 9, 4);
    const Words b = testing_support::random_words(rng, 9, 4);
    CHECK(lcs_length(a, b) == oracle::lcs_length(a, b));
  }
}

TEST_CASE("word lists and content words") {
  const auto words = parse_word_list("# comment\nRevert\n  rv  # trailing\n\nadd   more\n");
  CHECK(words == Words{"revert", "rv", "add more"});
  const std::unordered_set<std::string> stop = {"of", "a"};
  CHECK(content_words(tokenize("Fix spelling of a word."), stop) == Words{"fix", "spelling", "word"});
  CHECK(is_punctuation_token("\xE2\x80\x94"));
  CHECK_FALSE(is_punctuation_token("a."));
}
