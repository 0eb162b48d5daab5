#include "rewritekit/preference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "rewritekit/metrics.hpp"
#include "rewritekit/parallel.hpp"
#include "rewritekit/textops.hpp"

namespace rewritekit {

namespace {

bool rank_before(const Candidate& x, const Candidate& y) {
  if (x.rank != y.rank) return x.rank < y.rank;
  return x.text < y.text;
}

ComparisonPair make_pair(const CandidateSet& set, const Candidate& good, const Candidate& bad, std::string id) {
  return {std::move(id), set.instruction, set.source, good.text, bad.text, good.rank, bad.rank};
}

// softplus(-z) = -log sigmoid(z)
double neg_log_sigmoid(double z) {
  return z >= 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

// sigmoid(-z)
double sigmoid_neg(double z) {
  if (z >= 0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

Eigen::MatrixXd to_matrix(const FeatureDiffs& diffs) {
  if (diffs.empty()) throw std::invalid_argument("no feature rows");
  const auto cols = static_cast<Eigen::Index>(diffs.front().size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(diffs.size()), cols);
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (static_cast<Eigen::Index>(diffs[i].size()) != cols) throw std::invalid_argument("ragged feature rows");
    m.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(diffs[i].data(), cols);
  }
  return m;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double mean_loss(const Eigen::VectorXd& w, const Eigen::MatrixXd& x) {
  const Eigen::VectorXd z = x * w;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) sum += neg_log_sigmoid(z(i));
  return sum / static_cast<double>(z.size());
}

Eigen::VectorXd gradient(const Eigen::VectorXd& w, const Eigen::MatrixXd& x) {
  const Eigen::VectorXd z = x * w;
  Eigen::VectorXd coeff(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) coeff(i) = -sigmoid_neg(z(i));
  return x.transpose() * coeff / static_cast<double>(z.size());
}

std::string describe(const Eigen::VectorXd& w) {
  std::ostringstream out;
  out << '[';
  for (Eigen::Index i = 0; i < w.size(); ++i) out << (i ? ", " : "") << w(i);
  out << ']';
  return out.str();
}

}  // namespace

std::vector<ComparisonPair> build_pairs(const CandidateSet& set, const std::vector<int>& scores, PairMode mode) {
  if (scores.size() != set.candidates.size()) {
    throw DataError(set.id + ": " + std::to_string(scores.size()) + " verdicts for " +
                    std::to_string(set.candidates.size()) + " candidates");
  }
  std::vector<Candidate> good, bad;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] != 0 && scores[i] != 1) throw DataError(set.id + ": score must be 0 or 1");
    (scores[i] == 1 ? good : bad).push_back(set.candidates[i]);
  }
  std::vector<ComparisonPair> pairs;
  if (good.empty() || bad.empty()) return pairs;
  std::sort(good.begin(), good.end(), rank_before);
  std::sort(bad.begin(), bad.end(), rank_before);
  if (mode == PairMode::TopRanked) {
    if (good.front().text != bad.front().text) pairs.push_back(make_pair(set, good.front(), bad.front(), set.id));
    return pairs;
  }
  for (const auto& g : good) {
    for (const auto& b : bad) {
      if (g.text == b.text) continue;
      pairs.push_back(make_pair(set, g, b, set.id + ":" + std::to_string(g.rank) + "-" + std::to_string(b.rank)));
    }
  }
  return pairs;
}

std::vector<ComparisonPair> build_pairs(const CandidateSet& set, const std::vector<QualityVerdict>& verdicts,
                                        PairMode mode) {
  std::vector<int> scores;
  scores.reserve(verdicts.size());
  for (const auto& v : verdicts) scores.push_back(v.score);
  return build_pairs(set, scores, mode);
}

double pairwise_loss(double r_good, double r_bad) { return neg_log_sigmoid(r_good - r_bad); }

const std::vector<std::string>& reward_feature_names() {
  static const std::vector<std::string> names = {"edit_ratio", "len_ratio",      "nli_fwd", "nli_rev",
                                                 "sari_vs_source", "rouge1_vs_source", "bias"};
  return names;
}

std::vector<double> reward_features(std::string_view, std::string_view source, std::string_view candidate,
                                    NliBackend& nli) {
  const QualityMeasurements m = measure(source, candidate, nli);
  const TokenSeq src = tokenize(source);
  const TokenSeq cand = tokenize(candidate);
  const TokenSeq refs[] = {src};
  return {m.edit_ratio,
          m.len_ratio,
          m.nli_fwd,
          m.nli_rev,
          sari(src, cand, refs).value / 100.0,
          rouge(cand, src, RougeVariant::Rouge1).value / 100.0,
          1.0};
}

double LinearRewardModel::score(const std::vector<double>& features) const {
  if (features.size() != weights.size()) throw std::invalid_argument("feature vector size mismatch");
  return to_vector(weights).dot(to_vector(features));
}

OrderedJson LinearRewardModel::to_json() const {
  OrderedJson j;
  j["feature_names"] = feature_names;
  j["weights"] = weights;
  return j;
}

LinearRewardModel LinearRewardModel::from_json(const Json& j) {
  LinearRewardModel m;
  try {
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.weights = j.at("weights").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw DataError(std::string("reward model: ") + e.what());
  }
  if (m.feature_names.size() != m.weights.size()) throw DataError("reward model: names and weights differ in size");
  return m;
}

void LinearRewardModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << to_json().dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

LinearRewardModel LinearRewardModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

double mean_pairwise_loss(const std::vector<double>& weights, const FeatureDiffs& diffs) {
  return mean_loss(to_vector(weights), to_matrix(diffs));
}

std::vector<double> loss_gradient(const std::vector<double>& weights, const FeatureDiffs& diffs) {
  return from_vector(gradient(to_vector(weights), to_matrix(diffs)));
}

double gradient_check(const std::vector<double>& weights, const FeatureDiffs& diffs, double h) {
  const Eigen::MatrixXd x = to_matrix(diffs);
  const Eigen::VectorXd w = to_vector(weights);
  const Eigen::VectorXd analytic = gradient(w, x);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    Eigen::VectorXd plus = w, minus = w;
    plus(k) += h;
    minus(k) -= h;
    const double numeric = (mean_loss(plus, x) - mean_loss(minus, x)) / (2 * h);
    const double scale = std::max({std::abs(analytic(k)), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic(k) - numeric) / scale);
  }
  return worst;
}

TrainResult train_on_diffs(const FeatureDiffs& diffs, const TrainConfig& config) {
  const Eigen::MatrixXd x = to_matrix(diffs);
  if (config.epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  if (config.init_scale > 0) {
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, config.init_scale);
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = normal(rng);
  }
  TrainResult result;
  for (int epoch = 0;; ++epoch) {
    const double loss = mean_loss(w, x);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) + ", weights " + describe(w));
    }
    result.loss_history.push_back(loss);
    if (epoch == config.epochs) break;
    w -= config.lr * gradient(w, x);
  }
  result.initial_loss = result.loss_history.front();
  result.final_loss = result.loss_history.back();
  result.model.weights = from_vector(w);
  if (result.model.weights.size() != result.model.feature_names.size()) {
    result.model.feature_names.clear();
    for (std::size_t k = 0; k < result.model.weights.size(); ++k) result.model.feature_names.push_back("f" + std::to_string(k));
  }
  return result;
}

FeatureDiffs pair_feature_diffs(const std::vector<ComparisonPair>& pairs, NliBackend& nli, unsigned jobs) {
  return parallel_map(pairs, jobs, [&](const ComparisonPair& p) {
    const auto good = reward_features(p.instruction, p.source, p.t_good, nli);
    const auto bad = reward_features(p.instruction, p.source, p.t_bad, nli);
    std::vector<double> d(good.size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = good[k] - bad[k];
    return d;
  });
}

TrainResult train_linear_reward(const std::vector<ComparisonPair>& pairs, NliBackend& nli,
                                const TrainConfig& config, unsigned jobs) {
  if (pairs.empty()) throw std::invalid_argument("no comparison pairs to train on");
  return train_on_diffs(pair_feature_diffs(pairs, nli, jobs), config);
}

double pair_accuracy(const LinearRewardModel& model, const FeatureDiffs& diffs) {
  if (diffs.empty()) return 0.0;
  std::size_t right = 0;
  for (const auto& d : diffs) right += model.score(d) > 0 ? 1 : 0;
  return static_cast<double>(right) / static_cast<double>(diffs.size());
}

}  // namespace rewritekit
