#ifndef REWRITEKIT_NLICLIENT_HPP
#define REWRITEKIT_NLICLIENT_HPP

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rewritekit/http.hpp"

namespace rewritekit {

enum class NliOrigin { Remote, Cache, Stub };

std::string_view to_string(NliOrigin origin);

struct NliPair {
  std::string premise;
  std::string hypothesis;
};

struct NliScore {
  std::string premise;
  std::string hypothesis;
  double score = 0.0;  // P(premise entails hypothesis)
  NliOrigin origin = NliOrigin::Stub;
};

/// An entailment scorer. Implementations must be safe to call from several
/// threads at once.
class NliBackend {
 public:
  virtual ~NliBackend() = default;

  /// Identity of the underlying model; part of every cache key.
  virtual std::string scorer_id() = 0;

  /// One score per pair, same order.
  virtual std::vector<NliScore> score_batch(const std::vector<NliPair>& pairs) = 0;
};

NliScore nli_score(std::string_view premise, std::string_view hypothesis, NliBackend& backend);

/// nli_score with premise and hypothesis swapped.
NliScore reversed_nli_score(std::string_view premise, std::string_view hypothesis,
                            NliBackend& backend);

/// Stopwords ignored by the lexical stub. Deliberately short; determiners count.
const std::vector<std::string>& default_nli_stopwords();

/// Deterministic lexical stand-in: share of the hypothesis' distinct content
/// words that occur in the premise; 1.0 when the hypothesis has none.
class StubNli : public NliBackend {
 public:
  StubNli();
  explicit StubNli(const std::vector<std::string>& stopwords);

  std::string scorer_id() override { return "stub-lexical-v1"; }
  std::vector<NliScore> score_batch(const std::vector<NliPair>& pairs) override;

  double containment(std::string_view premise, std::string_view hypothesis) const;

 private:
  std::unordered_set<std::string> stopwords_;
};

struct HttpNliOptions {
  std::string endpoint;
  std::size_t batch_size = 32;
  RetryPolicy retry;
};

/// Client for POST /v1/nli {"pairs":[{premise,hypothesis}]} -> {"scores":[...]}.
class HttpNli : public NliBackend {
 public:
  explicit HttpNli(HttpNliOptions options);

  /// Taken from the X-Scorer-Id response header; the first call issues an
  /// empty batch when no request has been made yet.
  std::string scorer_id() override;
  std::vector<NliScore> score_batch(const std::vector<NliPair>& pairs) override;

  std::size_t requests_sent() const;

 private:
  std::vector<double> request(const std::vector<NliPair>& pairs);

  HttpNliOptions options_;
  mutable std::mutex mutex_;
  std::optional<std::string> scorer_id_;
  std::size_t requests_ = 0;
};

/// 64-bit FNV-1a, hex encoded. Used for cache keys.
std::string fnv1a_hex(std::string_view text);

/// Memoizing wrapper. Entries are keyed by (scorer id, hash of premise, hash
/// of hypothesis) and, when a path is given, appended to a JSONL sidecar that
/// is reloaded on construction.
class CachedNli : public NliBackend {
 public:
  explicit CachedNli(std::shared_ptr<NliBackend> inner, std::string sidecar_path = {});

  std::string scorer_id() override { return inner_->scorer_id(); }
  std::vector<NliScore> score_batch(const std::vector<NliPair>& pairs) override;

  std::size_t hits() const;
  std::size_t misses() const;
  std::size_t size() const;

 private:
  std::string key(const std::string& scorer, const NliPair& pair) const;

  std::shared_ptr<NliBackend> inner_;
  std::string sidecar_path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, double> entries_;
  std::ofstream sidecar_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace rewritekit

#endif  // REWRITEKIT_NLICLIENT_HPP
