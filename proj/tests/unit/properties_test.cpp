#include "properties.hpp"

#include <gtest/gtest.h>

#include <tuple>

using namespace gradarg;
using gradarg::test::Property;

namespace {

constexpr std::size_t kFrameworks = 1000;
constexpr std::uint64_t kSeed = 0x5eed;

class SemanticsProperty : public ::testing::TestWithParam<std::tuple<Property, SemanticsKind>> {};

bool known_violation(Property p, SemanticsKind kind) {
  return p == Property::Duality && kind == SemanticsKind::EulerBased;
}

}  // namespace

TEST_P(SemanticsProperty, HoldsOnRandomFrameworks) {
  const auto [p, kind] = GetParam();
  if (known_violation(p, kind)) GTEST_SKIP() << "covered by EulerBasedIsNotSelfDual";
  const auto r = test::check_property(p, kind, kFrameworks, kSeed);
  EXPECT_EQ(r.frameworks, kFrameworks);
  EXPECT_GT(r.checks, 0u);
  EXPECT_EQ(r.failures, 0u) << r.first_failure;
}

INSTANTIATE_TEST_SUITE_P(
    All, SemanticsProperty,
    ::testing::Combine(::testing::ValuesIn(test::all_properties()),
                       ::testing::Values(SemanticsKind::QuadraticEnergy, SemanticsKind::DFQuAD,
                                         SemanticsKind::EulerBased)),
    [](const auto& info) {
      return std::string(test::to_string(std::get<0>(info.param))) + "_" +
             std::string(to_string(std::get<1>(info.param)));
    });

TEST(SemanticsProperty, EulerBasedIsNotSelfDual) {
  // Flipping the edges into an argument and mirroring its base score does not mirror its strength.
  const auto r = test::check_property(Property::Duality, SemanticsKind::EulerBased, kFrameworks, kSeed);
  EXPECT_GT(r.failures, 0u);
  const double tau = 0.3, e = 0.4;
  const double sigma = influence_euler(tau, e);
  const double mirrored = influence_euler(1 - tau, -e);
  EXPECT_GT(std::abs(mirrored - (1 - sigma)), 1e-3);
}
