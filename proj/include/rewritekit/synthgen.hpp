#ifndef REWRITEKIT_SYNTHGEN_HPP
#define REWRITEKIT_SYNTHGEN_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rewritekit/corpusio.hpp"
#include "rewritekit/http.hpp"

namespace rewritekit {

inline constexpr std::string_view kTextDescriptionQuestion = "What kind of text is the following?";
inline constexpr std::string_view kInstructionQuestion =
    "What is a relevant writing prompt or edit instruction for text?";

struct CotShot {
  std::string text;
  std::string text_description;
  std::string instruction;
};

struct CotPrompt {
  std::vector<CotShot> shots;
  std::string query_text;
  std::string rendered;
};

/// Renders the three exemplars, then the query with blank answers. Throws
/// std::invalid_argument unless exactly three complete shots are given or
/// when any text contains a prompt marker.
CotPrompt build_cot_prompt(std::string_view query_text, const std::vector<CotShot>& shots);

/// Placeholder exemplars; same content as config/shots.json.
const std::vector<CotShot>& default_shots();

/// Reads {"shots":[{text, text_description, instruction}, ...]}.
std::vector<CotShot> load_shots(const std::string& path);

struct LlmResponse {
  std::string raw;
  std::optional<std::string> text_description;
  std::optional<std::string> instruction;
  bool truncated = false;  // the second answer ran over several lines
};

/// Pulls the answers out of a model continuation. The last "Answer 2:" wins,
/// so echoed prompts parse too.
LlmResponse parse_cot_response(std::string_view raw);

struct GenerationParams {
  int max_tokens = 512;
  double temperature = 0.5;
  int top_k = 40;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  /// Returns the completion text; throws on transport or protocol failure.
  virtual std::string generate(const std::string& prompt) = 0;
};

/// POST /v1/generate {"prompt", "max_tokens", "temperature", "top_k"} -> {"text"}.
class HttpLlm : public LlmClient {
 public:
  HttpLlm(std::string endpoint, GenerationParams params = {}, RetryPolicy retry = {});
  std::string generate(const std::string& prompt) override;

 private:
  std::string endpoint_;
  GenerationParams params_;
  RetryPolicy retry_;
};

/// Prompt used to obtain a rewrite: the instruction, a blank line, the source.
std::string rewrite_prompt(std::string_view instruction, std::string_view source);

/// One unit of generation work. When `instruction` is absent, `cot_prompt`
/// is sent first and the parsed second answer becomes the instruction.
struct GenerationInput {
  std::string id;
  std::string source;
  std::optional<std::string> instruction;
  std::optional<std::string> cot_prompt;
  std::map<std::string, std::string> meta;
};

enum class SkipReason { EmptyOutput, ClientError, NoInstruction };

std::string_view to_string(SkipReason reason);

struct SkipEntry {
  std::string id;
  SkipReason reason;
  std::string detail;
};

struct GenerationResult {
  std::vector<RewriteRecord> records;  // input order
  std::vector<SkipEntry> skipped;      // input order
};

/// Requests a target for every input with at most `concurrency` calls in
/// flight. Failures never abort the run; they become skip entries.
GenerationResult generate_targets(const std::vector<GenerationInput>& inputs, LlmClient& client,
                                  unsigned concurrency = 4);

}  // namespace rewritekit

#endif  // REWRITEKIT_SYNTHGEN_HPP
