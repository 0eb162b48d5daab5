#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "rewritekit/metrics.hpp"
#include "rewritekit/preference.hpp"
#include "rewritekit/textops.hpp"
#include "test_support.hpp"

using namespace rewritekit;

namespace {

CandidateSet four(const std::vector<long>& ranks) {
  CandidateSet s{"s1", "Rewrite.", "source text", {}};
  for (long r : ranks) s.candidates.push_back({"cand " + std::to_string(r), r, std::nullopt});
  return s;
}

FeatureDiffs separable(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> noise(-0.1, 0.1), signal(0.5, 1.0);
  FeatureDiffs rows;
  for (int i = 0; i < n; ++i) {
    std::vector<double> d(7);
    for (auto& v : d) v = noise(rng);
    d[2] = signal(rng);
    d[6] = 0.0;
    rows.push_back(d);
  }
  return rows;
}

}  // namespace

TEST_CASE("build_pairs examples") {
  CHECK(build_pairs(four({0, 1, 2, 3}), std::vector<int>{1, 1, 1, 1}).empty());
  CHECK(build_pairs(four({0, 1, 2, 3}), std::vector<int>{0, 0, 0, 0}).empty());

  const auto p = build_pairs(four({0, 1, 2, 3}), std::vector<int>{1, 0, 1, 0});
  REQUIRE(p.size() == 1);
  CHECK(p[0].good_rank == 0);
  CHECK(p[0].bad_rank == 1);
  CHECK(p[0].t_good == "cand 0");
  CHECK(p[0].id == "s1");

  const auto q = build_pairs(four({0, 1}), std::vector<int>{0, 1});
  REQUIRE(q.size() == 1);
  CHECK(q[0].good_rank == 1);
  CHECK(q[0].bad_rank == 0);

  const auto all = build_pairs(four({0, 1, 2, 3}), std::vector<int>{1, 0, 1, 0}, PairMode::CrossProduct);
  CHECK(all.size() == 4);
  for (const auto& pair : all) CHECK(pair.t_good != pair.t_bad);

  CHECK_THROWS_AS(build_pairs(four({0, 1}), std::vector<int>{1}), DataError);
  CHECK_THROWS_AS(build_pairs(four({0, 1}), std::vector<int>{1, 2}), DataError);
}

TEST_CASE("build_pairs is invariant to candidate order") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    CandidateSet s = four({0, 1, 2, 3, 4, 5});
    std::vector<int> scores(6);
    for (auto& v : scores) v = static_cast<int>(rng() % 2);
    const auto expected = build_pairs(s, scores);
    std::vector<std::size_t> order = {0, 1, 2, 3, 4, 5};
    std::shuffle(order.begin(), order.end(), rng);
    CandidateSet shuffled = s;
    std::vector<int> shuffled_scores(6);
    for (std::size_t i = 0; i < 6; ++i) {
      shuffled.candidates[i] = s.candidates[order[i]];
      shuffled_scores[i] = scores[order[i]];
    }
    CHECK(build_pairs(shuffled, shuffled_scores) == expected);
  }
}

TEST_CASE("pairwise_loss values and stability") {
  CHECK(pairwise_loss(0.3, 0.3) == std::log(2.0));
  CHECK(pairwise_loss(2.0, 0.0) == doctest::Approx(0.1269280110429725).epsilon(1e-12));
  CHECK(pairwise_loss(0.0, 2.0) == doctest::Approx(2.1269280110429725).epsilon(1e-12));
  CHECK(pairwise_loss(1000.0, 0.0) >= 0.0);
  CHECK(pairwise_loss(1000.0, 0.0) < 1e-300);
  CHECK(pairwise_loss(0.0, 1000.0) == doctest::Approx(1000.0));
  CHECK(std::isfinite(pairwise_loss(-1000.0, 1000.0)));

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 1000; ++i) {
    const double g = u(rng), b = u(rng), k = u(rng);
    CHECK(std::abs(pairwise_loss(g + k, b + k) - pairwise_loss(g, b)) < 1e-12 + 1e-12 * pairwise_loss(g, b));
  }
  double last = pairwise_loss(-30, 0);
  for (double d = -29.5; d <= 30; d += 0.5) {
    const double cur = pairwise_loss(d, 0);
    CHECK(cur < last);
    last = cur;
  }
}

TEST_CASE("reward_features") {
  StubNli stub;
  const auto same = reward_features("Rewrite.", "the quick fox jumps", "the quick fox jumps", stub);
  REQUIRE(same.size() == reward_feature_names().size());
  CHECK(same[0] == 0.0);
  CHECK(same[1] == 1.0);
  CHECK(same[5] == 1.0);
  CHECK(same[6] == 1.0);

  CHECK(reward_features("", "the quick fox", "", stub)[1] == 0.0);

  const std::string src = "The river floods every spring near the old mill.";
  const std::string cand = "Each spring the river near the mill floods its banks.";
  const auto f = reward_features("Paraphrase.", src, cand, stub);
  const TokenSeq s = tokenize(src), c = tokenize(cand);
  const TokenSeq refs[] = {s};
  CHECK(f[0] == edit_ratio(s, c));
  CHECK(f[1] == length_ratio(s, c));
  CHECK(f[2] == nli_score(src, cand, stub).score);
  CHECK(f[3] == nli_score(cand, src, stub).score);
  CHECK(f[4] == sari(s, c, refs).value / 100.0);
  CHECK(f[5] == rouge(c, s, RougeVariant::Rouge1).value / 100.0);
}

TEST_CASE("gradient matches finite differences") {
  std::mt19937 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureDiffs rows(8, std::vector<double>(7));
    for (auto& r : rows) for (auto& v : r) v = n(rng);
    std::vector<double> w(7);
    for (auto& v : w) v = n(rng);
    CHECK(gradient_check(w, rows) <= 1e-5);
  }
}

TEST_CASE("training") {
  std::mt19937 rng(9);
  const FeatureDiffs train = separable(rng, 40);
  const FeatureDiffs held_out = separable(rng, 40);

  TrainConfig cfg;
  cfg.lr = 0.5;
  cfg.epochs = 1000;
  const TrainResult r = train_on_diffs(train, cfg);
  CHECK(r.initial_loss == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(r.final_loss < r.initial_loss);
  CHECK(r.model.weights[2] > 0.0);
  CHECK(pair_accuracy(r.model, held_out) == 1.0);
  CHECK(r.loss_history.size() == 1001);

  // Deterministic.
  CHECK(train_on_diffs(train, cfg).model.weights == r.model.weights);

  const TrainResult single = train_on_diffs({train.front()}, TrainConfig{});
  for (std::size_t i = 1; i < single.loss_history.size(); ++i) {
    CHECK(single.loss_history[i] <= single.loss_history[i - 1]);
  }

  TrainConfig seeded;
  seeded.init_scale = 0.1;
  seeded.seed = 4;
  seeded.epochs = 0;
  CHECK(train_on_diffs(train, seeded).model.weights == train_on_diffs(train, seeded).model.weights);
  CHECK(train_on_diffs(train, seeded).initial_loss != std::log(2.0));

  TrainConfig wild;
  wild.lr = 1e308;
  wild.epochs = 5;
  FeatureDiffs big = {{1e10, 0, 0, 0, 0, 0, 0}, {-2e10, 0, 0, 0, 0, 0, 0}};
  CHECK_THROWS_AS(train_on_diffs(big, wild), std::runtime_error);
  CHECK_THROWS_AS(train_on_diffs({}, cfg), std::invalid_argument);
}

TEST_CASE("train_linear_reward end to end and model round trip") {
  StubNli stub;
  std::vector<ComparisonPair> pairs;
  for (int i = 0; i < 6; ++i) {
    const std::string src = "Ships dock at harbour " + std::to_string(i) + " before dawn each day.";
    pairs.push_back({"p" + std::to_string(i), "Rewrite.", src,
                     "Before dawn each day, ships dock at harbour " + std::to_string(i) + ".",
                     "Cats sleep all afternoon.", 0, 1});
  }
  TrainConfig cfg;
  const TrainResult one = train_linear_reward(pairs, stub, cfg, 1);
  const TrainResult many = train_linear_reward(pairs, stub, cfg, 4);
  CHECK(one.model.weights == many.model.weights);
  CHECK(one.final_loss < std::log(2.0));
  CHECK(pair_accuracy(one.model, pair_feature_diffs(pairs, stub)) == 1.0);

  const auto path = std::filesystem::temp_directory_path() / "rewritekit_model_test.json";
  one.model.save(path.string());
  const auto loaded = LinearRewardModel::load(path.string());
  CHECK(loaded.feature_names == reward_feature_names());
  CHECK(loaded.weights == one.model.weights);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(LinearRewardModel::from_json(Json::parse(R"({"feature_names":["a"],"weights":[]})")), DataError);
}
