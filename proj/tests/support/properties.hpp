#pragma once

#include "gradarg/semantics.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gradarg::test {

enum class Property {
  Stability,
  Neutrality,
  Franklin,
  Monotony,
  Directionality,
  Resilience,
  Duality,
  WeakeningStrengthening,
  Determinism,
  IterativeAgreement,
  OracleAgreement,
};

std::string_view to_string(Property p) noexcept;
const std::vector<Property>& all_properties();

struct PropertyResult {
  std::size_t frameworks = 0;
  std::size_t checks = 0;  // individual assertions made
  std::size_t failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0 && checks > 0; }
};

/// Checks one property on `frameworks` random acyclic frameworks with at most 15 arguments.
PropertyResult check_property(Property p, SemanticsKind kind, std::size_t frameworks, std::uint64_t seed);

struct DiscriminationResult {
  std::size_t applicable = 0;
  std::size_t attempts = 0;
  std::size_t counterexamples = 0;
  std::string first_counterexample;
};

/// Draws random single-argument additions until `cases` of them meet the
/// preconditions, and counts those that do not strictly widen the gap.
DiscriminationResult check_addition_cases(SemanticsKind kind, std::size_t cases, std::uint64_t seed);
/// Same for single base-score changes.
DiscriminationResult check_basescore_cases(SemanticsKind kind, std::size_t cases, std::uint64_t seed);

}  // namespace gradarg::test
