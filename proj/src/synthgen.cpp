#include "rewritekit/synthgen.hpp"

#include <variant>

#include "rewritekit/parallel.hpp"

namespace rewritekit {

namespace {

constexpr std::string_view kTextLabel = "Text:";
constexpr std::string_view kQ1Label = "Question 1:";
constexpr std::string_view kA1Label = "Answer 1:";
constexpr std::string_view kQ2Label = "Question 2:";
constexpr std::string_view kA2Label = "Answer 2:";

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
  const std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void reject_markers(std::string_view text, const char* what) {
  for (std::string_view marker : {kTextDescriptionQuestion, kInstructionQuestion, kA1Label, kA2Label}) {
    if (text.find(marker) != std::string_view::npos) {
      throw std::invalid_argument(std::string(what) + " contains the prompt marker '" +
                                  std::string(marker) + "'");
    }
  }
}

void render_block(std::string& out, std::string_view text, std::string_view description,
                  std::string_view instruction) {
  out += kTextLabel;
  out += ' ';
  out += text;
  out += '\n';
  out += kQ1Label;
  out += ' ';
  out += kTextDescriptionQuestion;
  out += '\n';
  out += kA1Label;
  if (!description.empty()) {
    out += ' ';
    out += description;
  }
  out += '\n';
  out += kQ2Label;
  out += ' ';
  out += kInstructionQuestion;
  out += '\n';
  out += kA2Label;
  if (!instruction.empty()) {
    out += ' ';
    out += instruction;
  }
}

// Text following `label` up to the next block marker.
std::string_view answer_after(std::string_view raw, std::size_t label_pos, std::size_t label_size) {
  const std::size_t begin = label_pos + label_size;
  std::size_t end = raw.size();
  for (std::string_view marker : {kTextLabel, kQ1Label, kA1Label, kQ2Label, kA2Label}) {
    const std::size_t at = raw.find(marker, begin);
    if (at != std::string_view::npos && at < end) end = at;
  }
  return raw.substr(begin, end - begin);
}

}  // namespace

CotPrompt build_cot_prompt(std::string_view query_text, const std::vector<CotShot>& shots) {
  if (shots.size() != 3) {
    throw std::invalid_argument("CoT prompt needs exactly 3 shots, got " + std::to_string(shots.size()));
  }
  for (const auto& s : shots) {
    if (blank(s.text) || blank(s.text_description) || blank(s.instruction)) {
      throw std::invalid_argument("CoT shot is incomplete");
    }
    reject_markers(s.text, "shot text");
    reject_markers(s.text_description, "shot description");
    reject_markers(s.instruction, "shot instruction");
    if (s.instruction.find('\n') != std::string::npos || s.text_description.find('\n') != std::string::npos) {
      throw std::invalid_argument("CoT shot answers must be single-line");
    }
  }
  reject_markers(query_text, "query text");

  CotPrompt p;
  p.shots = shots;
  p.query_text = std::string(query_text);
  for (const auto& s : shots) {
    render_block(p.rendered, s.text, s.text_description, s.instruction);
    p.rendered += "\n\n";
  }
  render_block(p.rendered, query_text, {}, {});
  return p;
}

const std::vector<CotShot>& default_shots() {
  static const std::vector<CotShot> shots = {
      {"The city council voted on Tuesday to extend library opening hours through the summer, "
       "citing strong demand from students and families.",
       "A short local news report.",
       "Rewrite this news snippet in a more formal tone."},
      {"Hey team, just a heads up that the quarterly review got pushed to next Thursday, so "
       "please update your slides before then.",
       "An informal workplace message.",
       "Make this message more concise."},
      {"Photosynthesis converts light energy into chemical energy, which plants store as sugars "
       "and use to grow.",
       "An explanatory sentence from a science textbook.",
       "Elaborate on this passage with an example for young readers."}};
  return shots;
}

std::vector<CotShot> load_shots(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  const Json& list = j.is_object() && j.contains("shots") ? j["shots"] : j;
  if (!list.is_array()) throw DataError(path + ": expected a 'shots' array");
  std::vector<CotShot> shots;
  for (const auto& s : list) {
    if (!s.is_object()) throw DataError(path + ": shot must be an object");
    CotShot shot;
    try {
      shot.text = s.at("text").get<std::string>();
      shot.text_description = s.at("text_description").get<std::string>();
      shot.instruction = s.at("instruction").get<std::string>();
    } catch (const Json::exception& e) {
      throw DataError(path + ": " + e.what());
    }
    shots.push_back(std::move(shot));
  }
  return shots;
}

LlmResponse parse_cot_response(std::string_view raw) {
  LlmResponse r;
  r.raw = std::string(raw);
  const std::size_t a2 = raw.rfind(kA2Label);
  const std::size_t a1 = raw.rfind(kA1Label, a2 == std::string_view::npos ? std::string_view::npos : a2);
  if (a1 != std::string_view::npos) {
    const std::string_view d = trim(answer_after(raw, a1, kA1Label.size()));
    if (!d.empty()) r.text_description = std::string(d.substr(0, d.find('\n')));
  }
  if (a2 == std::string_view::npos) return r;
  const std::string_view answer = trim(answer_after(raw, a2, kA2Label.size()));
  if (answer.empty()) return r;
  const std::size_t nl = answer.find('\n');
  r.instruction = std::string(trim(answer.substr(0, nl)));
  r.truncated = nl != std::string_view::npos && !blank(answer.substr(nl));
  return r;
}

HttpLlm::HttpLlm(std::string endpoint, GenerationParams params, RetryPolicy retry)
    : endpoint_(std::move(endpoint)), params_(params), retry_(retry) {
  if (endpoint_.empty()) throw std::invalid_argument("LLM endpoint is empty");
}

std::string HttpLlm::generate(const std::string& prompt) {
  OrderedJson body;
  body["prompt"] = prompt;
  body["max_tokens"] = params_.max_tokens;
  body["temperature"] = params_.temperature;
  body["top_k"] = params_.top_k;
  const HttpResponse res = post_json(endpoint_, "/v1/generate", body.dump(), retry_);
  Json parsed;
  try {
    parsed = Json::parse(res.body);
  } catch (const Json::parse_error& e) {
    throw ProtocolError(std::string("LLM response is not JSON: ") + e.what());
  }
  if (!parsed.is_object() || !parsed.contains("text") || !parsed["text"].is_string()) {
    throw ProtocolError("LLM response lacks a string 'text' field");
  }
  return parsed["text"].get<std::string>();
}

std::string rewrite_prompt(std::string_view instruction, std::string_view source) {
  std::string out(trim(instruction));
  out += "\n\n";
  out += source;
  return out;
}

std::string_view to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::EmptyOutput: return "EMPTY_OUTPUT";
    case SkipReason::ClientError: return "CLIENT_ERROR";
    case SkipReason::NoInstruction: return "NO_INSTRUCTION";
  }
  return "UNKNOWN";
}

GenerationResult generate_targets(const std::vector<GenerationInput>& inputs, LlmClient& client,
                                  unsigned concurrency) {
  using Outcome = std::variant<RewriteRecord, SkipEntry>;
  const auto outcomes = parallel_map(inputs, std::max(1u, concurrency), [&](const GenerationInput& in) -> Outcome {
    RewriteRecord rec;
    rec.id = in.id;
    rec.source = in.source;
    rec.meta = in.meta;
    try {
      if (in.instruction) {
        rec.instruction = *in.instruction;
      } else {
        if (!in.cot_prompt) return SkipEntry{in.id, SkipReason::NoInstruction, "no instruction or CoT prompt"};
        const LlmResponse parsed = parse_cot_response(client.generate(*in.cot_prompt));
        if (!parsed.instruction) {
          return SkipEntry{in.id, SkipReason::NoInstruction, "second answer missing"};
        }
        rec.instruction = *parsed.instruction;
        if (parsed.text_description) rec.meta["text_description"] = *parsed.text_description;
        if (parsed.truncated) rec.meta["instruction_truncated"] = "true";
      }
      const std::string target = client.generate(rewrite_prompt(rec.instruction, in.source));
      if (blank(target)) return SkipEntry{in.id, SkipReason::EmptyOutput, "empty completion"};
      rec.target = std::string(trim(target));
      return rec;
    } catch (const std::exception& e) {
      return SkipEntry{in.id, SkipReason::ClientError, e.what()};
    }
  });
  GenerationResult result;
  for (const auto& o : outcomes) {
    if (const auto* rec = std::get_if<RewriteRecord>(&o)) {
      result.records.push_back(*rec);
    } else {
      result.skipped.push_back(std::get<SkipEntry>(o));
    }
  }
  return result;
}

}  // namespace rewritekit
