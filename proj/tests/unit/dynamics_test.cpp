#include "properties.hpp"
#include "test_support.hpp"

#include "gradarg/dynamics.hpp"
#include "gradarg/error.hpp"
#include "gradarg/resolver.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <random>
#include <sstream>

using namespace gradarg;

namespace {

Argument task(const std::string& id, double tau = 0.5) {
  Argument a;
  a.id = id;
  a.kind = ArgumentKind::Task;
  a.base_score = tau;
  a.active = true;
  return a;
}

ErrorCode code_of(const Framework& f, const EditPayload& e) {
  try {
    apply_edit(f, e);
  } catch (const Error& err) {
    return err.code();
  }
  ADD_FAILURE() << "edit accepted";
  return ErrorCode::InvalidArgument;
}

// The active part of the fall-risk starting point, without T1 or T3.
Framework fall_risk_base() { return active_subframework(test::fall_risk_initial()); }

}  // namespace

TEST(ApplyEdit, AddingRiskArgumentChangesSelection) {
  const auto before = fall_risk_base();
  const auto after =
      apply_edit(before, AddArgument{task("T1"), {{"T1", "R", Polarity::Attack}, {"T1", "not_R", Polarity::Support}}});
  EXPECT_EQ(*mupcr(before, SemanticsKind::QuadraticEnergy, {}).selected, "R");
  // T1 alone ties the options; its supporter T3 tips the balance.
  const auto tied = mupcr(after, SemanticsKind::QuadraticEnergy, {});
  EXPECT_TRUE(tied.tie);
  const auto with_t3 = apply_edit(after, AddArgument{task("T3"), {{"T3", "T1", Polarity::Support}}});
  EXPECT_EQ(*mupcr(with_t3, SemanticsKind::QuadraticEnergy, {}).selected, "not_R");
  EXPECT_EQ(before, fall_risk_base());
}

TEST(ApplyEdit, LoweringCaregiverScore) {
  const auto after = apply_edit(test::schedule_initial(), SetBaseScore{"CG1", 0.6});
  const auto s = evaluate(after);
  EXPECT_NEAR(s.at("R"), 0.505, 1e-3);
  EXPECT_NEAR(s.at("not_R"), 0.495, 1e-3);
}

TEST(ApplyEdit, Errors) {
  const auto f = test::scenario1();
  EXPECT_EQ(code_of(f, AddArgument{task("X"), {{"X", "CG1", Polarity::Attack}, {"CG1", "X", Polarity::Support}}}),
            ErrorCode::WouldCreateCycle);
  EXPECT_EQ(code_of(f, AddArgument{task("T2"), {}}), ErrorCode::DuplicateId);
  EXPECT_EQ(code_of(f, AddArgument{task("X"), {{"X", "ghost", Polarity::Attack}}}), ErrorCode::UnknownArgument);
  EXPECT_EQ(code_of(f, AddArgument{task("X"), {{"CG1", "R", Polarity::Attack}}}), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of(f, AddArgument{task("bad id"), {}}), ErrorCode::InvalidId);
  EXPECT_EQ(code_of(f, AddArgument{task("X", 1.5), {}}), ErrorCode::BadScore);
  EXPECT_EQ(code_of(f, RemoveArgument{"R"}), ErrorCode::OptionEditForbidden);
  EXPECT_EQ(code_of(f, SetActive{"not_R", false}), ErrorCode::OptionEditForbidden);
  EXPECT_EQ(code_of(f, RemoveArgument{"ghost"}), ErrorCode::UnknownArgument);
  EXPECT_EQ(code_of(f, SetBaseScore{"CG1", -0.1}), ErrorCode::BadScore);
  EXPECT_EQ(code_of(f, SetPreference{"nobody", "R", PreferenceSign::Positive}), ErrorCode::UnknownUser);
  EXPECT_EQ(code_of(f, SetPreference{"cg", "CG1", PreferenceSign::Positive}), ErrorCode::NotAnOption);
}

TEST(ApplyEdit, RemovalDropsIncidentRelations) {
  const auto f = apply_edit(test::scenario1(), RemoveArgument{"T1"});
  EXPECT_FALSE(f.contains("T1"));
  for (const auto& r : f.relations()) {
    EXPECT_NE(r.source, "T1");
    EXPECT_NE(r.target, "T1");
  }
}

TEST(ApplyEdit, PreferenceEdit) {
  const auto f = apply_edit(test::scenario1(), SetPreference{"cg", "R", PreferenceSign::Positive});
  EXPECT_EQ(f.total_preferences().sign("cg", "R"), PreferenceSign::Positive);
}

TEST(Replay, ReproducesTheFinalFramework) {
  std::mt19937_64 rng(3);
  const auto initial = test::scenario2();
  std::vector<ArgumentId> ids;
  for (const auto& [id, a] : initial.arguments()) {
    if (a.kind != ArgumentKind::Option) ids.push_back(id);
  }
  std::vector<EditEvent> events;
  Framework current = initial;
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto& id = ids[rng() % ids.size()];
    EditPayload p = rng() % 2 ? EditPayload{SetActive{id, rng() % 2 == 0}}
                              : EditPayload{SetBaseScore{id, test::uniform(rng, 0, 1)}};
    current = apply_edit(current, p);
    events.push_back({i + 1, p});
  }
  EXPECT_EQ(replay(initial, events), current);

  std::stringstream log;
  write_event_log(log, events);
  EXPECT_EQ(read_event_log(log), events);
}

TEST(EventJson, RoundTripsEveryKind) {
  AddArgument add{task("N", 0.25), {{"N", "R", Polarity::Support}}};
  add.argument.label = "new";
  add.argument.derived_active_from = {"T2"};
  const std::vector<EditEvent> events{{1, add},
                                      {2, RemoveArgument{"CG1"}},
                                      {3, SetBaseScore{"CR2", 0.125}},
                                      {4, SetActive{"T3", true}},
                                      {5, SetPreference{"cg", "R", PreferenceSign::Negative}}};
  for (const auto& e : events) EXPECT_EQ(event_from_json(to_json(e)), e);
  EXPECT_EQ(to_json(events[3])["type"], "set_active");
}

TEST(EventJson, MalformedInput) {
  using nlohmann::json;
  EXPECT_THROW(event_from_json(json{{"type", "teleport"}}), Error);
  EXPECT_THROW(event_from_json(json{{"type", "set_active"}}), Error);
  EXPECT_THROW(event_from_json(json{{"type", "set_active"}, {"id", "A"}, {"active", "yes"}}), Error);
  std::stringstream bad("{not json}\n");
  EXPECT_THROW(read_event_log(bad), Error);
  const auto r = relation_from_json(json{{"source", "a"}, {"target", "b"}, {"polarity", "sup"}});
  EXPECT_EQ(r.polarity, Polarity::Support);
}

TEST(Discrimination, FallRiskTwoSteps) {
  const auto step0 = fall_risk_base();
  const auto step1 =
      apply_edit(step0, AddArgument{task("T1"), {{"T1", "R", Polarity::Attack}, {"T1", "not_R", Polarity::Support}}});
  const auto step2 = apply_edit(step1, AddArgument{task("T3"), {{"T3", "T1", Polarity::Support}}});
  const auto first = check_addition_discrimination(step0, step1, "not_R", "R", SemanticsKind::QuadraticEnergy);
  const auto second = check_addition_discrimination(step1, step2, "not_R", "R", SemanticsKind::QuadraticEnergy);
  EXPECT_TRUE(first.applicable) << first.reason;
  EXPECT_TRUE(second.applicable) << second.reason;
  EXPECT_TRUE(first.widened);
  EXPECT_TRUE(second.widened);
  // In terms of sigma(R) - sigma(not_R): 0.200 -> -0.010.
  EXPECT_NEAR(-first.gap_before, 0.200, 1e-3);
  EXPECT_NEAR(-second.gap_after, -0.010, 1e-3);
}

TEST(Discrimination, ZeroBaseScoreNotApplicable) {
  const auto before = fall_risk_base();
  const auto after = apply_edit(before, AddArgument{task("Z", 0.0), {{"Z", "R", Polarity::Support}}});
  const auto r = check_addition_discrimination(before, after, "R", "not_R", SemanticsKind::QuadraticEnergy);
  EXPECT_FALSE(r.applicable);
  EXPECT_EQ(r.gap_before, r.gap_after);
}

TEST(Discrimination, MixedParityNotApplicable) {
  const auto before = fall_risk_base();
  const auto after = apply_edit(
      before, AddArgument{task("M"), {{"M", "R", Polarity::Support}, {"M", "not_R", Polarity::Support}}});
  const auto r = check_addition_discrimination(before, after, "R", "not_R", SemanticsKind::QuadraticEnergy);
  EXPECT_FALSE(r.applicable);
}

TEST(Discrimination, ShapeMismatch) {
  const auto f = fall_risk_base();
  EXPECT_THROW(check_addition_discrimination(f, f, "R", "not_R", SemanticsKind::QuadraticEnergy), Error);
  auto two = apply_edit(f, SetBaseScore{"CG4", 0.1});
  two = apply_edit(two, SetBaseScore{"CG5", 0.1});
  EXPECT_THROW(check_basescore_discrimination(f, two, "R", "not_R", SemanticsKind::QuadraticEnergy), Error);
}

TEST(Discrimination, ScheduleReliefLoweringCaregiver) {
  const auto before = test::schedule_initial();
  const auto after = apply_edit(before, SetBaseScore{"CG1", 0.6});
  const auto r = check_basescore_discrimination(before, after, "R", "not_R", SemanticsKind::QuadraticEnergy);
  EXPECT_TRUE(r.applicable) << r.reason;
  EXPECT_TRUE(r.widened);
  EXPECT_NEAR(r.gap_before, 0.481 - 0.519, 1e-3);
  EXPECT_NEAR(r.gap_after, 0.505 - 0.495, 1e-3);
}

TEST(Discrimination, UnchangedScoreLeavesGap) {
  const auto f = test::schedule_initial();
  const auto r = check_basescore_discrimination(f, f, "R", "not_R", SemanticsKind::QuadraticEnergy);
  EXPECT_FALSE(r.applicable);
  EXPECT_EQ(r.gap_before, r.gap_after);
}

class DiscriminationStatistics : public ::testing::TestWithParam<SemanticsKind> {};

TEST_P(DiscriminationStatistics, AdditionWidensGap) {
  const auto r = test::check_addition_cases(GetParam(), 2000, 17);
  EXPECT_EQ(r.applicable, 2000u);
  EXPECT_EQ(r.counterexamples, 0u) << r.first_counterexample;
}

TEST_P(DiscriminationStatistics, BaseScoreWidensGap) {
  const auto r = test::check_basescore_cases(GetParam(), 2000, 17);
  EXPECT_EQ(r.applicable, 2000u);
  EXPECT_EQ(r.counterexamples, 0u) << r.first_counterexample;
}

INSTANTIATE_TEST_SUITE_P(All, DiscriminationStatistics,
                         ::testing::Values(SemanticsKind::QuadraticEnergy, SemanticsKind::DFQuAD,
                                           SemanticsKind::EulerBased),
                         [](const auto& info) { return std::string(to_string(info.param)); });
