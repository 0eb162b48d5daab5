#ifndef REWRITEKIT_METRICS_HPP
#define REWRITEKIT_METRICS_HPP

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rewritekit/textops.hpp"

namespace rewritekit {

enum class MetricName { Sari, Gleu, Bleu, Rouge1, RougeL, UpdateRouge };
enum class SariMode { Canonical, AllF1 };
enum class RougeVariant { Rouge1, RougeL };

enum class MetricFlag {
  EmptyUpdate,           // prediction changed no sentence but the reference did
  EmptyReferenceUpdate,  // prediction changed sentences the reference kept
};

std::string_view to_string(MetricName name);
std::string_view to_string(MetricFlag flag);
std::string_view to_string(SariMode mode);
SariMode parse_sari_mode(std::string_view text);

/// A metric value on the 0..100 scale plus its [0, 1] sub-scores.
struct MetricScore {
  MetricName name = MetricName::Sari;
  double value = 0.0;
  std::map<std::string, double> components;
  std::vector<MetricFlag> flags;

  bool has_flag(MetricFlag flag) const;
  double component(const std::string& key) const { return components.at(key); }
};

/// Multiset of the order-n n-grams of a token sequence.
class NGramMultiset {
 public:
  NGramMultiset(const TokenSeq& tokens, int order);

  int order() const { return order_; }
  std::size_t total() const { return total_; }
  std::size_t count(const std::string& key) const;
  const std::map<std::string, std::size_t>& counts() const { return counts_; }

  /// Sum over n-grams of min(count here, count in other).
  std::size_t clipped_overlap(const NGramMultiset& other) const;

  /// Encoded key for an n-gram; length-prefixed so token boundaries are unambiguous.
  static std::string key_of(std::span<const std::string> gram);

 private:
  int order_;
  std::size_t total_ = 0;
  std::map<std::string, std::size_t> counts_;
};

inline constexpr int kMaxNGramOrder = 4;

/// SARI over n = 1..4. Components (averaged over orders): keep, delete, add and
/// their _precision/_recall parts. `Canonical` scores deletion by precision,
/// `AllF1` by F1. Throws std::invalid_argument when `references` is empty.
MetricScore sari(const TokenSeq& source, const TokenSeq& prediction,
                 std::span<const TokenSeq> references, SariMode mode = SariMode::Canonical);

/// Source-penalised BLEU. For each reference and order n,
///   p_n = max(0, m(pred,ref) - max(0, m(pred,src) - m(pred,ref))) / #pred n-grams
/// with clipped matches m. Scores are averaged over references.
MetricScore gleu(const TokenSeq& source, const TokenSeq& prediction,
                 std::span<const TokenSeq> references);

/// BLEU-4 with clipped precision and the closest-reference brevity penalty.
MetricScore bleu(const TokenSeq& prediction, std::span<const TokenSeq> references);

/// F1 ROUGE-1 or ROUGE-L. Both empty scores 100, one empty scores 0.
MetricScore rouge(const TokenSeq& prediction, const TokenSeq& reference, RougeVariant variant);

/// Maximum over references.
MetricScore rouge(const TokenSeq& prediction, std::span<const TokenSeq> references,
                  RougeVariant variant);

/// ROUGE-L restricted to the sentences of prediction and reference whose
/// normalised form does not occur among the source's sentences.
MetricScore update_rouge(std::string_view source, std::string_view prediction,
                         std::string_view reference);

}  // namespace rewritekit

#endif  // REWRITEKIT_METRICS_HPP
