#ifndef REWRITEKIT_TESTS_QUALITY_CASES_HPP
#define REWRITEKIT_TESTS_QUALITY_CASES_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "rewritekit/quality.hpp"

namespace testing_support {

struct BoundaryCase {
  const char* name;
  rewritekit::QualityMeasurements m;
  rewritekit::TaskKind task;
  int score;
  std::optional<rewritekit::QualityRule> rule;
};

// Cases sit on, or one ulp past, each default threshold.
inline std::vector<BoundaryCase> boundary_cases() {
  using rewritekit::QualityRule;
  using rewritekit::TaskKind;
  const double below_a = std::nextafter(1.2, 0.0);
  const double below_07 = std::nextafter(0.7, 0.0);
  const double above_d1 = std::nextafter(0.6, 1.0);
  const double below_d2 = std::nextafter(2.0, 0.0);
  return {
      {"edit ratio equal to a", {1.2, 0.9, 0.9, 1.0}, TaskKind::Generic, 1, std::nullopt},
      {"edit ratio one ulp below a", {below_a, 0.9, 0.9, 1.0}, TaskKind::Generic, 0, QualityRule::EditRatio},
      {"nli_fwd equal to b", {1.5, 0.7, 0.9, 1.0}, TaskKind::Generic, 1, std::nullopt},
      {"nli_fwd one ulp below b", {1.5, below_07, 0.9, 1.0}, TaskKind::Generic, 0, QualityRule::NliFwd},
      {"nli_rev equal to c", {1.5, 0.9, 0.7, 1.0}, TaskKind::Generic, 1, std::nullopt},
      {"nli_rev one ulp below c", {1.5, 0.9, below_07, 1.0}, TaskKind::Generic, 0, QualityRule::NliRev},
      {"shorten len equal to d1", {1.5, 0.9, 0.9, 0.6}, TaskKind::Shorten, 1, std::nullopt},
      {"shorten len one ulp above d1", {1.5, 0.9, 0.9, above_d1}, TaskKind::Shorten, 0, QualityRule::ShortenLen},
      {"elaborate len equal to d2", {1.5, 0.9, 0.9, 2.0}, TaskKind::Elaborate, 1, std::nullopt},
      {"elaborate len one ulp below d2", {1.5, 0.9, 0.9, below_d2}, TaskKind::Elaborate, 0, QualityRule::ElaborateLen},
      {"generic ignores a long output", {1.5, 0.9, 0.9, 5.0}, TaskKind::Generic, 1, std::nullopt},
      {"generic ignores a short output", {1.5, 0.9, 0.9, 0.1}, TaskKind::Generic, 1, std::nullopt},
      {"shorten len 0.8", {1.5, 0.9, 0.9, 0.8}, TaskKind::Shorten, 0, QualityRule::ShortenLen},
      {"shorten len 0.5", {1.5, 0.9, 0.9, 0.5}, TaskKind::Shorten, 1, std::nullopt},
      {"edit ratio 1.0", {1.0, 0.9, 0.9, 1.0}, TaskKind::Generic, 0, QualityRule::EditRatio},
      {"edit ratio checked before nli", {1.0, 0.1, 0.1, 1.0}, TaskKind::Generic, 0, QualityRule::EditRatio},
      {"nli_fwd checked before nli_rev", {1.5, 0.5, 0.5, 1.0}, TaskKind::Generic, 0, QualityRule::NliFwd},
      {"nli_rev checked before length", {1.5, 0.9, 0.69, 0.9}, TaskKind::Shorten, 0, QualityRule::NliRev},
      {"elaborate ignores d1", {1.5, 0.9, 0.9, 0.6}, TaskKind::Elaborate, 0, QualityRule::ElaborateLen},
      {"elaborate len 2.5", {1.5, 0.9, 0.9, 2.5}, TaskKind::Elaborate, 1, std::nullopt},
  };
}

}  // namespace testing_support

#endif  // REWRITEKIT_TESTS_QUALITY_CASES_HPP
