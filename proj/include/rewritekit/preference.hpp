#ifndef REWRITEKIT_PREFERENCE_HPP
#define REWRITEKIT_PREFERENCE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rewritekit/corpusio.hpp"
#include "rewritekit/nliclient.hpp"
#include "rewritekit/quality.hpp"

namespace rewritekit {

enum class PairMode {
  TopRanked,     // one pair per set: best-ranked good vs best-ranked bad
  CrossProduct,  // every good x every bad
};

/// Comparison pairs from one scored candidate set. `scores[i]` is the 0/1
/// quality of `set.candidates[i]`. Sets that are all good or all bad yield
/// nothing; selection is by rank (ties broken by text), never by position.
/// Throws DataError when the sizes differ or a score is not 0 or 1.
std::vector<ComparisonPair> build_pairs(const CandidateSet& set, const std::vector<int>& scores,
                                        PairMode mode = PairMode::TopRanked);

std::vector<ComparisonPair> build_pairs(const CandidateSet& set, const std::vector<QualityVerdict>& verdicts,
                                        PairMode mode = PairMode::TopRanked);

/// -log sigmoid(r_good - r_bad), stable for large differences.
double pairwise_loss(double r_good, double r_bad);

const std::vector<std::string>& reward_feature_names();

/// [edit_ratio, len_ratio, nli_fwd, nli_rev, sari_vs_source/100,
///  rouge1_vs_source/100, 1]. The instruction does not enter the features.
std::vector<double> reward_features(std::string_view instruction, std::string_view source,
                                    std::string_view candidate, NliBackend& nli);

struct LinearRewardModel {
  std::vector<std::string> feature_names = reward_feature_names();
  std::vector<double> weights = std::vector<double>(reward_feature_names().size(), 0.0);

  double score(const std::vector<double>& features) const;

  OrderedJson to_json() const;
  static LinearRewardModel from_json(const Json& j);
  void save(const std::string& path) const;
  static LinearRewardModel load(const std::string& path);
};

struct TrainConfig {
  double lr = 0.1;
  int epochs = 500;
  std::uint64_t seed = 0;
  double init_scale = 0.0;  // > 0: weights start from N(0, init_scale^2) drawn with `seed`
};

struct TrainResult {
  LinearRewardModel model;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> loss_history;  // mean loss before each epoch's step, then the final loss
};

/// Row i is features(good_i) - features(bad_i).
using FeatureDiffs = std::vector<std::vector<double>>;

double mean_pairwise_loss(const std::vector<double>& weights, const FeatureDiffs& diffs);

/// Gradient of mean_pairwise_loss with respect to the weights.
std::vector<double> loss_gradient(const std::vector<double>& weights, const FeatureDiffs& diffs);

/// Largest relative disagreement between loss_gradient and central finite
/// differences with step `h`, over all weights.
double gradient_check(const std::vector<double>& weights, const FeatureDiffs& diffs, double h = 1e-5);

/// Full-batch gradient descent on the mean pairwise loss. Throws
/// std::runtime_error with the epoch and weights when the loss goes
/// non-finite, std::invalid_argument on empty input.
TrainResult train_on_diffs(const FeatureDiffs& diffs, const TrainConfig& config);

/// Feature extraction (parallel over pairs) followed by train_on_diffs.
TrainResult train_linear_reward(const std::vector<ComparisonPair>& pairs, NliBackend& nli,
                                const TrainConfig& config, unsigned jobs = 1);

FeatureDiffs pair_feature_diffs(const std::vector<ComparisonPair>& pairs, NliBackend& nli, unsigned jobs = 1);

/// Share of rows with a strictly positive model margin.
double pair_accuracy(const LinearRewardModel& model, const FeatureDiffs& diffs);

}  // namespace rewritekit

#endif  // REWRITEKIT_PREFERENCE_HPP
