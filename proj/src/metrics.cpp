#include "rewritekit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace rewritekit {

std::string_view to_string(MetricName name) {
  switch (name) {
    case MetricName::Sari: return "SARI";
    case MetricName::Gleu: return "GLEU";
    case MetricName::Bleu: return "BLEU";
    case MetricName::Rouge1: return "ROUGE1";
    case MetricName::RougeL: return "ROUGEL";
    case MetricName::UpdateRouge: return "UPDATE_ROUGE";
  }
  return "UNKNOWN";
}

std::string_view to_string(MetricFlag flag) {
  switch (flag) {
    case MetricFlag::EmptyUpdate: return "EMPTY_UPDATE";
    case MetricFlag::EmptyReferenceUpdate: return "EMPTY_REFERENCE_UPDATE";
  }
  return "UNKNOWN";
}

std::string_view to_string(SariMode mode) {
  return mode == SariMode::Canonical ? "canonical" : "all_f1";
}

SariMode parse_sari_mode(std::string_view text) {
  if (text == "canonical") return SariMode::Canonical;
  if (text == "all_f1") return SariMode::AllF1;
  throw std::invalid_argument("unknown SARI mode: " + std::string(text));
}

bool MetricScore::has_flag(MetricFlag flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

std::string NGramMultiset::key_of(std::span<const std::string> gram) {
  std::string key;
  for (const auto& token : gram) {
    key += std::to_string(token.size());
    key += ':';
    key += token;
  }
  return key;
}

NGramMultiset::NGramMultiset(const TokenSeq& tokens, int order) : order_(order) {
  if (order < 1) throw std::invalid_argument("n-gram order must be positive");
  const auto n = static_cast<std::size_t>(order);
  if (tokens.size() < n) return;
  const std::span<const std::string> all(tokens.tokens);
  for (std::size_t i = 0; i + n <= all.size(); ++i) {
    ++counts_[key_of(all.subspan(i, n))];
    ++total_;
  }
}

std::size_t NGramMultiset::count(const std::string& key) const {
  const auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

std::size_t NGramMultiset::clipped_overlap(const NGramMultiset& other) const {
  std::size_t overlap = 0;
  for (const auto& [key, c] : counts_) overlap += std::min(c, other.count(key));
  return overlap;
}

namespace {

void require_references(std::span<const TokenSeq> references, const char* metric) {
  if (references.empty()) {
    throw std::invalid_argument(std::string(metric) + ": at least one reference required");
  }
}

double f1(double precision, double recall) {
  return (precision > 0.0 || recall > 0.0) ? 2.0 * precision * recall / (precision + recall)
                                           : 0.0;
}

struct SariOrderScores {
  double keep_p = 1.0, keep_r = 1.0;
  double del_p = 1.0, del_r = 1.0;
  double add_p = 1.0, add_r = 1.0;
};

// One n-gram order of SARI. Source and prediction counts are replicated by
// the number of references so they compare against the pooled reference counts.
SariOrderScores sari_order(const NGramMultiset& src, const NGramMultiset& pred,
                           const std::map<std::string, std::size_t>& refs, std::size_t num_refs) {
  auto ref_count = [&](const std::string& key) -> std::size_t {
    const auto it = refs.find(key);
    return it == refs.end() ? 0 : it->second;
  };
  SariOrderScores out;

  double keep_ratio_sum = 0.0;
  std::size_t keep_kinds = 0;
  std::size_t keep_good_total = 0;
  std::size_t keep_all_total = 0;
  std::size_t keep_all_kinds = 0;

  double del_ratio_sum = 0.0;
  double del_recall_sum = 0.0;
  std::size_t del_kinds = 0;
  std::size_t del_all_kinds = 0;

  for (const auto& [key, s_count] : src.counts()) {
    const std::size_t s_rep = s_count * num_refs;
    const std::size_t c_rep = pred.count(key) * num_refs;
    const std::size_t r = ref_count(key);

    if (c_rep > 0) {
      const std::size_t kept = std::min(s_rep, c_rep);
      const std::size_t good = std::min(kept, r);
      keep_ratio_sum += static_cast<double>(good) / static_cast<double>(kept);
      keep_good_total += good;
      ++keep_kinds;
    }
    if (r > 0) {
      keep_all_total += std::min(s_rep, r);
      ++keep_all_kinds;
    }

    const std::size_t del_all = s_rep > r ? s_rep - r : 0;
    if (del_all > 0) ++del_all_kinds;
    if (s_rep > c_rep) {
      const std::size_t deleted = s_rep - c_rep;
      const std::size_t good = deleted > r ? deleted - r : 0;
      del_ratio_sum += static_cast<double>(good) / static_cast<double>(deleted);
      if (good > 0) del_recall_sum += static_cast<double>(good) / static_cast<double>(del_all);
      ++del_kinds;
    }
  }
  if (keep_kinds > 0) out.keep_p = keep_ratio_sum / static_cast<double>(keep_kinds);
  if (keep_all_kinds > 0) {
    out.keep_r = static_cast<double>(keep_good_total) / static_cast<double>(keep_all_total);
  }
  if (del_kinds > 0) out.del_p = del_ratio_sum / static_cast<double>(del_kinds);
  if (del_all_kinds > 0) out.del_r = del_recall_sum / static_cast<double>(del_all_kinds);

  std::size_t added = 0;
  std::size_t added_good = 0;
  for (const auto& [key, c_count] : pred.counts()) {
    if (src.count(key) > 0) continue;
    ++added;
    if (ref_count(key) > 0) ++added_good;
  }
  std::size_t addable = 0;
  for (const auto& [key, r_count] : refs) {
    if (r_count > 0 && src.count(key) == 0) ++addable;
  }
  if (added > 0) out.add_p = static_cast<double>(added_good) / static_cast<double>(added);
  if (addable > 0) out.add_r = static_cast<double>(added_good) / static_cast<double>(addable);
  return out;
}

// Geometric mean of the modified precisions over orders 1..min(4, |pred|).
// A zero-match order n >= 2 is smoothed to 1 / (total + 1); a zero unigram
// numerator makes the whole score zero.
struct PrecisionProduct {
  double log_sum = 0.0;
  int orders = 0;
  bool zero = false;

  void add(int order, std::size_t numerator, std::size_t total) {
    if (zero) return;
    if (numerator == 0 && order == 1) {
      zero = true;
      return;
    }
    const double p = numerator > 0 ? static_cast<double>(numerator) / static_cast<double>(total)
                                   : 1.0 / static_cast<double>(total + 1);
    log_sum += std::log(p);
    ++orders;
  }

  double geometric_mean() const {
    if (zero || orders == 0) return 0.0;
    return std::exp(log_sum / orders);
  }
};

double brevity_penalty(std::size_t candidate_len, std::size_t reference_len) {
  if (candidate_len > reference_len) return 1.0;
  if (candidate_len == 0) return 0.0;
  return std::exp(1.0 - static_cast<double>(reference_len) / static_cast<double>(candidate_len));
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

MetricScore sari(const TokenSeq& source, const TokenSeq& prediction,
                 std::span<const TokenSeq> references, SariMode mode) {
  require_references(references, "sari");
  const std::size_t num_refs = references.size();
  double keep = 0, keep_p = 0, keep_r = 0;
  double del = 0, del_p = 0, del_r = 0;
  double add = 0, add_p = 0, add_r = 0;
  for (int n = 1; n <= kMaxNGramOrder; ++n) {
    const NGramMultiset src(source, n);
    const NGramMultiset pred(prediction, n);
    std::map<std::string, std::size_t> pooled;
    for (const auto& ref : references) {
      const NGramMultiset grams(ref, n);
      for (const auto& [key, c] : grams.counts()) pooled[key] += c;
    }
    const SariOrderScores s = sari_order(src, pred, pooled, num_refs);
    keep_p += s.keep_p;
    keep_r += s.keep_r;
    keep += f1(s.keep_p, s.keep_r);
    del_p += s.del_p;
    del_r += s.del_r;
    del += mode == SariMode::Canonical ? s.del_p : f1(s.del_p, s.del_r);
    add_p += s.add_p;
    add_r += s.add_r;
    add += f1(s.add_p, s.add_r);
  }
  const double orders = kMaxNGramOrder;
  MetricScore score;
  score.name = MetricName::Sari;
  score.components = {
      {"keep", keep / orders},       {"keep_precision", keep_p / orders},
      {"keep_recall", keep_r / orders}, {"delete", del / orders},
      {"delete_precision", del_p / orders}, {"delete_recall", del_r / orders},
      {"add", add / orders},         {"add_precision", add_p / orders},
      {"add_recall", add_r / orders},
  };
  const double mean = (keep / orders + del / orders + add / orders) / 3.0;
  score.value = std::clamp(mean * 100.0, 0.0, 100.0);
  return score;
}

MetricScore gleu(const TokenSeq& source, const TokenSeq& prediction,
                 std::span<const TokenSeq> references) {
  require_references(references, "gleu");
  std::vector<double> per_reference;
  std::vector<double> precision_sums(kMaxNGramOrder, 0.0);
  double bp_sum = 0.0;
  for (const auto& ref : references) {
    PrecisionProduct product;
    for (int n = 1; n <= std::min<int>(kMaxNGramOrder, static_cast<int>(prediction.size())); ++n) {
      const NGramMultiset pred(prediction, n);
      const std::size_t with_ref = pred.clipped_overlap(NGramMultiset(ref, n));
      const std::size_t with_src = pred.clipped_overlap(NGramMultiset(source, n));
      const std::size_t penalty = with_src > with_ref ? with_src - with_ref : 0;
      const std::size_t numerator = with_ref > penalty ? with_ref - penalty : 0;
      precision_sums[n - 1] +=
          static_cast<double>(numerator) / static_cast<double>(pred.total());
      product.add(n, numerator, pred.total());
    }
    const double bp = brevity_penalty(prediction.size(), ref.size());
    bp_sum += bp;
    per_reference.push_back(100.0 * bp * product.geometric_mean());
  }
  // Sorted summation keeps the mean bit-identical under reference reordering.
  std::sort(per_reference.begin(), per_reference.end());
  double total = 0.0;
  for (double v : per_reference) total += v;
  const double refs = static_cast<double>(references.size());

  MetricScore score;
  score.name = MetricName::Gleu;
  score.value = std::clamp(total / refs, 0.0, 100.0);
  score.components["brevity_penalty"] = clamp_unit(bp_sum / refs);
  for (int n = 1; n <= std::min<int>(kMaxNGramOrder, static_cast<int>(prediction.size())); ++n) {
    score.components["p" + std::to_string(n)] = clamp_unit(precision_sums[n - 1] / refs);
  }
  return score;
}

MetricScore bleu(const TokenSeq& prediction, std::span<const TokenSeq> references) {
  require_references(references, "bleu");
  MetricScore score;
  score.name = MetricName::Bleu;
  if (prediction.empty()) {
    score.components["brevity_penalty"] = 0.0;
    return score;
  }
  PrecisionProduct product;
  for (int n = 1; n <= std::min<int>(kMaxNGramOrder, static_cast<int>(prediction.size())); ++n) {
    const NGramMultiset pred(prediction, n);
    std::map<std::string, std::size_t> max_ref;
    for (const auto& ref : references) {
      const NGramMultiset grams(ref, n);
      for (const auto& [key, c] : grams.counts()) max_ref[key] = std::max(max_ref[key], c);
    }
    std::size_t matches = 0;
    for (const auto& [key, c] : pred.counts()) {
      const auto it = max_ref.find(key);
      if (it != max_ref.end()) matches += std::min(c, it->second);
    }
    score.components["p" + std::to_string(n)] =
        static_cast<double>(matches) / static_cast<double>(pred.total());
    product.add(n, matches, pred.total());
  }
  // Closest reference length; ties go to the shorter reference.
  std::size_t closest = references.front().size();
  for (const auto& ref : references) {
    const auto diff = [&](std::size_t len) {
      return len > prediction.size() ? len - prediction.size() : prediction.size() - len;
    };
    if (diff(ref.size()) < diff(closest) ||
        (diff(ref.size()) == diff(closest) && ref.size() < closest)) {
      closest = ref.size();
    }
  }
  const double bp = brevity_penalty(prediction.size(), closest);
  score.components["brevity_penalty"] = bp;
  score.value = std::clamp(100.0 * bp * product.geometric_mean(), 0.0, 100.0);
  return score;
}

MetricScore rouge(const TokenSeq& prediction, const TokenSeq& reference, RougeVariant variant) {
  MetricScore score;
  score.name = variant == RougeVariant::Rouge1 ? MetricName::Rouge1 : MetricName::RougeL;
  if (prediction.empty() || reference.empty()) {
    const double v = (prediction.empty() && reference.empty()) ? 1.0 : 0.0;
    score.value = 100.0 * v;
    score.components = {{"precision", v}, {"recall", v}, {"f1", v}};
    return score;
  }
  const std::size_t overlap =
      variant == RougeVariant::Rouge1
          ? NGramMultiset(prediction, 1).clipped_overlap(NGramMultiset(reference, 1))
          : lcs_length(prediction.tokens, reference.tokens);
  const double o = static_cast<double>(overlap);
  const double p = static_cast<double>(prediction.size());
  const double r = static_cast<double>(reference.size());
  // 2PR/(P+R) reduces to 2o/(p+r), which is exactly symmetric in its inputs.
  const double f = 2.0 * o / (p + r);
  score.components = {{"precision", o / p}, {"recall", o / r}, {"f1", f}};
  score.value = std::clamp(100.0 * f, 0.0, 100.0);
  return score;
}

MetricScore rouge(const TokenSeq& prediction, std::span<const TokenSeq> references,
                  RougeVariant variant) {
  require_references(references, "rouge");
  MetricScore best = rouge(prediction, references.front(), variant);
  for (std::size_t i = 1; i < references.size(); ++i) {
    MetricScore candidate = rouge(prediction, references[i], variant);
    if (candidate.value > best.value) best = std::move(candidate);
  }
  return best;
}

MetricScore update_rouge(std::string_view source, std::string_view prediction,
                         std::string_view reference) {
  const SentenceSeq src = split_sentences(source);
  const std::unordered_set<std::string> source_sentences(src.normalized.begin(),
                                                        src.normalized.end());
  auto updated_tokens = [&](std::string_view text, std::size_t& count) {
    const SentenceSeq seq = split_sentences(text);
    TokenSeq tokens;
    count = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (source_sentences.count(seq.normalized[i]) != 0) continue;
      ++count;
      TokenSeq piece = tokenize(seq.sentences[i]);
      tokens.tokens.insert(tokens.tokens.end(), piece.tokens.begin(), piece.tokens.end());
    }
    return tokens;
  };
  std::size_t pred_updates = 0;
  std::size_t ref_updates = 0;
  const TokenSeq pred_tokens = updated_tokens(prediction, pred_updates);
  const TokenSeq ref_tokens = updated_tokens(reference, ref_updates);

  MetricScore score;
  score.name = MetricName::UpdateRouge;
  if (pred_updates == 0 && ref_updates == 0) {
    score.value = 100.0;
    score.components = {{"precision", 1.0}, {"recall", 1.0}, {"f1", 1.0}};
    return score;
  }
  if (pred_updates == 0) {
    score.value = 0.0;
    score.components = {{"precision", 0.0}, {"recall", 0.0}, {"f1", 0.0}};
    score.flags.push_back(MetricFlag::EmptyUpdate);
    return score;
  }
  MetricScore inner = rouge(pred_tokens, ref_tokens, RougeVariant::RougeL);
  score.value = inner.value;
  score.components = std::move(inner.components);
  if (ref_updates == 0) score.flags.push_back(MetricFlag::EmptyReferenceUpdate);
  return score;
}

}  // namespace rewritekit
