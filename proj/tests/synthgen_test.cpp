#include <doctest.h>

#include <mutex>

#include <json.hpp>

#include "fake_server.hpp"
#include "rewritekit/synthgen.hpp"
#include "test_support.hpp"

using namespace rewritekit;

namespace {

std::size_t occurrences(const std::string& hay, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
  return n;
}

// Scripted client: returns canned text per prompt, records calls.
class ScriptedLlm : public LlmClient {
 public:
  std::function<std::string(const std::string&)> reply;
  std::string generate(const std::string& prompt) override {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      prompts.push_back(prompt);
    }
    return reply(prompt);
  }
  std::vector<std::string> prompts;

 private:
  std::mutex mutex_;
};

std::vector<GenerationInput> inputs(int n) {
  std::vector<GenerationInput> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({"g" + std::to_string(i), "Source number " + std::to_string(i) + ".",
                   std::string("Make it formal."), std::nullopt, {}});
  }
  return out;
}

}  // namespace

TEST_CASE("build_cot_prompt renders both questions for every block") {
  const CotPrompt p = build_cot_prompt("A query paragraph about rivers.", default_shots());
  CHECK(occurrences(p.rendered, "What kind of text is the following") == 4);
  CHECK(occurrences(p.rendered, "What is a relevant writing prompt or edit instruction for text") == 4);
  CHECK(p.shots.size() == 3);
  CHECK(p.rendered.find("Text: A query paragraph about rivers.") != std::string::npos);
  CHECK(p.rendered.substr(p.rendered.size() - 9) == "Answer 2:");
  CHECK(build_cot_prompt("A query paragraph about rivers.", default_shots()).rendered == p.rendered);
}

TEST_CASE("build_cot_prompt rejects bad shots") {
  auto two = default_shots();
  two.pop_back();
  CHECK_THROWS_AS(build_cot_prompt("q", two), std::invalid_argument);
  auto four = default_shots();
  four.push_back(four.front());
  CHECK_THROWS_AS(build_cot_prompt("q", four), std::invalid_argument);
  auto incomplete = default_shots();
  incomplete[1].instruction = " ";
  CHECK_THROWS_AS(build_cot_prompt("q", incomplete), std::invalid_argument);
  CHECK_THROWS_AS(build_cot_prompt("text with Answer 2: inside", default_shots()), std::invalid_argument);
}

TEST_CASE("parse_cot_response") {
  const auto both = parse_cot_response(" A recipe.\nQuestion 2: What is a relevant writing prompt or edit instruction for text?\nAnswer 2: Make it shorter.\n");
  CHECK(both.instruction == std::optional<std::string>("Make it shorter."));
  CHECK_FALSE(both.truncated);

  const auto first_only = parse_cot_response("Answer 1: A poem.\n");
  CHECK_FALSE(first_only.instruction.has_value());
  CHECK(first_only.text_description == std::optional<std::string>("A poem."));

  const auto two_lines = parse_cot_response("Answer 1: A poem.\nAnswer 2: Rewrite it as prose.\nKeep the rhyme.\n");
  CHECK(two_lines.instruction == std::optional<std::string>("Rewrite it as prose."));
  CHECK(two_lines.truncated);

  CHECK_FALSE(parse_cot_response("Answer 2:   \n").instruction.has_value());
  CHECK_FALSE(parse_cot_response("").instruction.has_value());

  // A continuation that starts a new example stops at its marker.
  const auto runs_on = parse_cot_response("Answer 2: Simplify.\n\nText: another");
  CHECK(runs_on.instruction == std::optional<std::string>("Simplify."));
  CHECK_FALSE(runs_on.truncated);
}

TEST_CASE("parse inverts render for known answers") {
  std::vector<CotShot> shots = default_shots();
  for (const auto& s : shots) {
    const CotPrompt p = build_cot_prompt(s.text, shots);
    // An echoing model that fills in the blank answers.
    const std::string response = p.rendered.substr(0, p.rendered.size() - std::string("Answer 2:").size()) +
                                 "Answer 2: " + s.instruction;
    std::string filled = response;
    const std::size_t a1 = filled.rfind("Answer 1:");
    filled.insert(a1 + 9, " " + s.text_description);
    const auto parsed = parse_cot_response(filled);
    CHECK(parsed.instruction == std::optional<std::string>(s.instruction));
    CHECK(parsed.text_description == std::optional<std::string>(s.text_description));
  }
}

TEST_CASE("shipped shots file matches the built-in exemplars") {
  const auto shipped = load_shots(std::string(REWRITEKIT_SOURCE_DIR) + "/config/shots.json");
  REQUIRE(shipped.size() == default_shots().size());
  for (std::size_t i = 0; i < shipped.size(); ++i) {
    CHECK(shipped[i].text == default_shots()[i].text);
    CHECK(shipped[i].text_description == default_shots()[i].text_description);
    CHECK(shipped[i].instruction == default_shots()[i].instruction);
  }
}

TEST_CASE("generate_targets: healthy, empty and failing clients") {
  ScriptedLlm healthy;
  healthy.reply = [](const std::string& prompt) { return "Rewritten: " + prompt.substr(prompt.rfind('\n') + 1); };
  const auto ok = generate_targets(inputs(10), healthy, 4);
  REQUIRE(ok.records.size() == 10);
  CHECK(ok.skipped.empty());
  for (int i = 0; i < 10; ++i) {
    CHECK(ok.records[static_cast<std::size_t>(i)].id == "g" + std::to_string(i));
    CHECK(ok.records[static_cast<std::size_t>(i)].target == "Rewritten: Source number " + std::to_string(i) + ".");
  }

  ScriptedLlm empty;
  empty.reply = [](const std::string&) { return std::string("  \n"); };
  const auto none = generate_targets(inputs(1), empty);
  CHECK(none.records.empty());
  REQUIRE(none.skipped.size() == 1);
  CHECK(none.skipped[0].reason == SkipReason::EmptyOutput);

  ScriptedLlm flaky;
  flaky.reply = [](const std::string& prompt) -> std::string {
    if (prompt.find("number 2.") != std::string::npos) throw RemoteUnavailable("down");
    return "fine";
  };
  const auto partial = generate_targets(inputs(5), flaky, 3);
  CHECK(partial.records.size() == 4);
  REQUIRE(partial.skipped.size() == 1);
  CHECK(partial.skipped[0].id == "g2");
  CHECK(partial.skipped[0].reason == SkipReason::ClientError);
  CHECK(partial.records[2].id == "g3");
}

TEST_CASE("generate_targets: instruction from a CoT prompt") {
  ScriptedLlm llm;
  llm.reply = [](const std::string& prompt) -> std::string {
    if (prompt.find("Question 2:") != std::string::npos) return "Answer 1: A note.\nAnswer 2: Make it polite.";
    return "Polite version.";
  };
  GenerationInput in{"c1", "Give me the report.", std::nullopt,
                     build_cot_prompt("Give me the report.", default_shots()).rendered, {}};
  const auto r = generate_targets({in}, llm);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].instruction == "Make it polite.");
  CHECK(r.records[0].target == "Polite version.");
  CHECK(r.records[0].meta.at("text_description") == "A note.");
  CHECK(llm.prompts.back() == "Make it polite.\n\nGive me the report.");

  ScriptedLlm mute;
  mute.reply = [](const std::string&) { return std::string("Answer 1: something"); };
  const auto skipped = generate_targets({in}, mute);
  REQUIRE(skipped.skipped.size() == 1);
  CHECK(skipped.skipped[0].reason == SkipReason::NoInstruction);
}

TEST_CASE("HttpLlm wire format") {
  nlohmann::json seen;
  std::mutex m;
  testing_support::FakeServer server("/v1/generate", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard<std::mutex> lock(m);
    seen = nlohmann::json::parse(req.body);
    res.set_content(R"({"text":"done"})", "application/json");
  });
  RetryPolicy retry;
  retry.initial_backoff = std::chrono::milliseconds(1);
  HttpLlm llm(server.url(), GenerationParams{}, retry);
  CHECK(llm.generate("hello") == "done");
  CHECK(seen["prompt"] == "hello");
  CHECK(seen["temperature"] == 0.5);
  CHECK(seen["top_k"] == 40);
  CHECK(seen["max_tokens"] == 512);

  testing_support::FakeServer bad("/v1/generate", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"output":"x"})", "application/json");
  });
  HttpLlm broken(bad.url(), GenerationParams{}, retry);
  CHECK_THROWS_AS(broken.generate("x"), ProtocolError);
}
