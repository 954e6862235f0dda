#include "test_support.hpp"

#include "gradarg/analysis.hpp"
#include "gradarg/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace gradarg;

namespace {

void expect_row(const DistributionTable& t, std::uint64_t n, double r, double nr, double tie) {
  EXPECT_EQ(t.n, n);
  EXPECT_NEAR(t.pct("R"), r, 1.0);
  EXPECT_NEAR(t.pct("not_R"), nr, 1.0);
  EXPECT_NEAR(t.pct_tie(), tie, 1.0);
}

DistributionTable run(const Scenario& s, ScenarioFilter filter, unsigned jobs = 1) {
  EnumerateOptions opts;
  opts.filter = filter;
  opts.jobs = jobs;
  return enumerate_decisions(s, SemanticsKind::QuadraticEnergy, {}, opts);
}

Framework full_scenario2() {
  const auto s = test::scenario2_enumeration();
  return test::with_active(s.framework, {s.toggles.begin(), s.toggles.end()});
}

const AttributionTable& full_attribution() {
  static const AttributionTable t = [] {
    AttributionOptions opts;
    opts.samples = 20000;
    opts.seed = 42;
    return relation_attribution(full_scenario2(), SemanticsKind::QuadraticEnergy, opts);
  }();
  return t;
}

}  // namespace

TEST(Enumerate, ScenarioOneRows) {
  const auto s = test::scenario1_enumeration();
  expect_row(run(s, ScenarioFilter::All), 128, 1.6, 92.2, 6.2);
  expect_row(run(s, ScenarioFilter::RootActive), 120, 0.0, 96.7, 3.3);
  expect_row(run(s, ScenarioFilter::RiskRemoved), 4, 25, 25, 50);
}

TEST(Enumerate, ScenarioTwoRows) {
  const auto s = test::scenario2_enumeration();
  expect_row(run(s, ScenarioFilter::All), 262144, 13.4, 83.2, 3.4);
  expect_row(run(s, ScenarioFilter::RootActive), 245760, 11.7, 85.4, 2.9);
  expect_row(run(s, ScenarioFilter::RiskRemoved), 8192, 39.2, 49.5, 11.3);
}

TEST(Enumerate, MatchesPerAssignmentOracle) {
  const auto s = test::scenario1_enumeration();
  for (bool root : {false, true}) {
    const auto want = test::naive_enumerate(s, SemanticsKind::QuadraticEnergy, root);
    const auto got = run(s, root ? ScenarioFilter::RootActive : ScenarioFilter::All);
    EXPECT_EQ(got.n, want.n);
    EXPECT_EQ(got.ties, want.ties);
    EXPECT_EQ(got.wins, want.wins);
  }
}

TEST(Enumerate, RandomScenariosMatchOracle) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 40; ++i) {
    test::GenSpec spec;
    spec.max_args = 8;
    const auto f = test::random_acyclic(rng, spec);
    Scenario s;
    s.name = "random";
    s.framework = f;
    for (const auto& [id, a] : f.arguments()) {
      if (a.kind != ArgumentKind::Option) s.toggles.push_back(id);
    }
    s.risk = {s.toggles.front()};
    for (auto kind : {SemanticsKind::QuadraticEnergy, SemanticsKind::DFQuAD, SemanticsKind::EulerBased}) {
      const auto want = test::naive_enumerate(s, kind, false);
      const auto got = enumerate_decisions(s, kind);
      ASSERT_EQ(got.n, want.n);
      ASSERT_EQ(got.ties, want.ties);
      ASSERT_EQ(got.wins, want.wins);
    }
  }
}

TEST(Enumerate, ChunkedRunsMergeIdentically) {
  const auto s = test::scenario2_enumeration();
  const auto one = run(s, ScenarioFilter::All, 1);
  for (unsigned jobs : {2u, 3u, 8u}) {
    const auto many = run(s, ScenarioFilter::All, jobs);
    EXPECT_EQ(many.n, one.n);
    EXPECT_EQ(many.wins, one.wins);
    EXPECT_EQ(many.ties, one.ties);
  }
}

TEST(Enumerate, ToggleOrderDoesNotMatter) {
  auto s = test::scenario1_enumeration();
  const auto a = run(s, ScenarioFilter::All);
  std::reverse(s.toggles.begin(), s.toggles.end());
  const auto b = run(s, ScenarioFilter::All);
  EXPECT_EQ(a.wins, b.wins);
  EXPECT_EQ(a.ties, b.ties);
}

TEST(Enumerate, TooManyToggles) {
  auto s = test::scenario2_enumeration();
  std::vector<Argument> args = s.framework.argument_list();
  for (int i = 0; i < 8; ++i) {
    Argument a;
    a.id = "X" + std::to_string(i);
    args.push_back(a);
    s.toggles.push_back(a.id);
  }
  s.framework = Framework(args, s.framework.relations(), s.framework.options(), s.framework.users(),
                          s.framework.preferences());
  try {
    run(s, ScenarioFilter::All);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyToggles);
  }
}

TEST(Enumerate, RiskRemovalKeepsInertWhenAsked) {
  const auto s = test::scenario1_enumeration();
  EXPECT_EQ(remove_risk(s, false).toggles.size(), 2u);  // CG1, CR2
  const auto kept = remove_risk(s, true);
  EXPECT_FALSE(kept.framework.contains("T1"));
  EXPECT_EQ(kept.toggles.size(), 7u);
  EnumerateOptions opts;
  opts.filter = ScenarioFilter::RiskRemoved;
  opts.keep_inert = true;
  EXPECT_EQ(enumerate_decisions(s, SemanticsKind::QuadraticEnergy, {}, opts).n, 128u);
}

TEST(Enumerate, FilterNames) {
  EXPECT_EQ(parse_filter("root_active"), ScenarioFilter::RootActive);
  EXPECT_EQ(to_string(ScenarioFilter::RiskRemoved), "risk_removed");
  EXPECT_THROW(parse_filter("some"), Error);
}

TEST(Attribution, ExactMatchesBruteForce) {
  std::mt19937_64 rng(21);
  int checked = 0;
  while (checked < 40) {
    test::GenSpec spec;
    spec.max_args = 5;
    spec.edge_prob = 0.4;
    const auto f = test::random_acyclic(rng, spec);
    if (f.relations().size() < 2 || f.relations().size() > 7) continue;
    ++checked;
    for (auto kind : {SemanticsKind::QuadraticEnergy, SemanticsKind::DFQuAD, SemanticsKind::EulerBased}) {
      AttributionOptions opts;
      opts.method = AttributionMethod::ExactShapley;
      const auto t = relation_attribution(f, kind, opts);
      const auto want = test::brute_force_shapley(f, kind);
      for (const auto& e : t.entries) {
        for (const auto& o : f.options()) {
          ASSERT_NEAR(e.contribution.at(o), want.at({e.relation.source, e.relation.target}).at(o), 1e-12);
        }
      }
    }
  }
}

TEST(Attribution, SingleRelation) {
  Argument r, a;
  r.id = "R";
  r.kind = ArgumentKind::Option;
  a.id = "A";
  a.active = true;
  a.base_score = 0.8;
  const Framework f({r, a}, {{"A", "R", Polarity::Attack}}, {"R"}, {}, {});
  const auto t = relation_attribution(f, SemanticsKind::QuadraticEnergy);
  ASSERT_EQ(t.entries.size(), 1u);
  EXPECT_DOUBLE_EQ(t.entries[0].contribution.at("R"), influence_qe(0.5, -0.8) - 0.5);
  EXPECT_EQ(t.method, AttributionMethod::ExactShapley);
}

TEST(Attribution, ExactEfficiency) {
  const auto f = active_subframework(test::schedule_initial());
  const auto t = relation_attribution(f, SemanticsKind::QuadraticEnergy);
  EXPECT_EQ(t.entries.size(), 4u);
  for (const auto& o : t.options) {
    double sum = 0;
    for (const auto& e : t.entries) sum += e.contribution.at(o);
    EXPECT_NEAR(sum, t.strength.at(o) - t.base.at(o), 1e-12);
  }
}

TEST(Attribution, FullScenarioDirectEdges) {
  const auto& t = full_attribution();
  EXPECT_EQ(t.method, AttributionMethod::PermutationSampling);
  EXPECT_EQ(t.entries.size(), 26u);
  struct Row {
    const char* src;
    const char* dst;
    double to_r;
    double to_nr;
  };
  const Row rows[] = {
      {"T1", "R", -0.15, 0.0},   {"CR3", "R", -0.14, 0.0},  {"CR6", "R", -0.12, 0.0},  {"CR7", "R", -0.11, 0.0},
      {"CG3", "R", 0.12, 0.0},   {"CG4", "R", 0.11, 0.0},   {"CG5", "R", 0.11, 0.0},   {"CG3", "not_R", 0.0, -0.12},
      {"CG4", "not_R", 0.0, -0.11}, {"CG5", "not_R", 0.0, -0.11}, {"T1", "not_R", 0.0, 0.15},
      {"CR3", "not_R", 0.0, 0.14}, {"CR6", "not_R", 0.0, 0.12}, {"CR7", "not_R", 0.0, 0.11},
  };
  for (const auto& row : rows) {
    const auto& e = t.at(row.src, row.dst);
    EXPECT_NEAR(e.contribution.at("R"), row.to_r, 0.03) << row.src << "->" << row.dst;
    EXPECT_NEAR(e.contribution.at("not_R"), row.to_nr, 0.03) << row.src << "->" << row.dst;
  }
  // Edges into one option have no path to the other.
  EXPECT_EQ(t.at("T1", "R").contribution.at("not_R"), 0.0);
  EXPECT_EQ(t.at("CG5", "not_R").contribution.at("R"), 0.0);
  EXPECT_NEAR(t.strength.at("R"), 0.23, 0.005);
}

TEST(Attribution, ZeroRuleForEveryEdgeWithoutPath) {
  const auto& t = full_attribution();
  const auto f = active_subframework(full_scenario2());
  for (const auto& e : t.entries) {
    for (const auto& o : t.options) {
      const auto anc = ancestors(f, o);
      if (!anc.count(e.relation.target) && e.relation.target != o) EXPECT_EQ(e.contribution.at(o), 0.0);
    }
  }
}

TEST(Attribution, SampledEfficiencyWithinTwoStandardErrors) {
  const auto& t = full_attribution();
  for (const auto& o : t.options) {
    double sum = 0, var = 0;
    for (const auto& e : t.entries) {
      sum += e.contribution.at(o);
      var += e.stderr_.at(o) * e.stderr_.at(o);
    }
    // Each sampled permutation telescopes, so the total is exact up to rounding.
    EXPECT_NEAR(sum, t.strength.at(o) - t.base.at(o), std::max(2 * std::sqrt(var), 1e-9));
  }
}

TEST(Attribution, DirectEdgesDominateDistantOnes) {
  const auto& t = full_attribution();
  double min_direct = 1, max_far = 0;
  for (const auto& e : t.entries) {
    const bool direct = e.relation.target == "R" || e.relation.target == "not_R";
    double mag = 0;
    for (const auto& o : t.options) mag = std::max(mag, std::abs(e.contribution.at(o)));
    if (direct) {
      min_direct = std::min(min_direct, mag);
    } else {
      max_far = std::max(max_far, mag);
    }
  }
  EXPECT_GT(min_direct, max_far);
}

TEST(Attribution, SeededSamplingIsReproducibleAcrossJobs) {
  AttributionOptions opts;
  opts.samples = 2000;
  opts.seed = 9;
  const auto a = relation_attribution(full_scenario2(), SemanticsKind::QuadraticEnergy, opts);
  opts.jobs = 4;
  const auto b = relation_attribution(full_scenario2(), SemanticsKind::QuadraticEnergy, opts);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(a.entries[i].contribution, b.entries[i].contribution);
    EXPECT_EQ(a.entries[i].stderr_, b.entries[i].stderr_);
  }
  opts.seed = 10;
  const auto c = relation_attribution(full_scenario2(), SemanticsKind::QuadraticEnergy, opts);
  EXPECT_NE(a.at("T1", "R").contribution, c.at("T1", "R").contribution);
}

TEST(Attribution, ExactModeLimit) {
  AttributionOptions opts;
  opts.method = AttributionMethod::ExactShapley;
  try {
    relation_attribution(full_scenario2(), SemanticsKind::QuadraticEnergy, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyRelations);
  }
}

TEST(Sweep, MeanGapFallsWithRiskScore) {
  const auto s = test::scenario1_enumeration();
  const auto grid = linear_grid(0, 1, 11);
  const auto sweep = base_score_sweep(s, "T1", grid, SemanticsKind::QuadraticEnergy);
  EXPECT_EQ(sweep.points.size(), 33u);
  for (const char* group : {"all", "active"}) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const auto& prev = sweep.point(grid[i - 1], group);
      const auto& cur = sweep.point(grid[i], group);
      EXPECT_LE(cur.mean_gap, prev.mean_gap + 1e-12) << group << " " << grid[i];
      EXPECT_LE(cur.pct.at("R"), prev.pct.at("R") + 1e-12) << group << " " << grid[i];
    }
  }
  EXPECT_EQ(sweep.point(1.0, "active").pct.at("R"), 0.0);
  const auto& lo = sweep.point(0.0, "inactive");
  const auto& hi = sweep.point(1.0, "inactive");
  EXPECT_EQ(lo.mean_gap, hi.mean_gap);
  EXPECT_EQ(lo.n, 8u);
}

TEST(Sweep, SinglePointReproducesEnumeration) {
  const auto s = test::scenario1_enumeration();
  const auto sweep = base_score_sweep(s, "T1", {0.5}, SemanticsKind::QuadraticEnergy);
  const auto table = run(s, ScenarioFilter::All);
  const auto& p = sweep.point(0.5, "all");
  EXPECT_EQ(p.n, table.n);
  EXPECT_DOUBLE_EQ(p.pct.at("R"), table.pct("R"));
  EXPECT_DOUBLE_EQ(p.pct.at("not_R"), table.pct("not_R"));
  EXPECT_DOUBLE_EQ(p.pct_tie, table.pct_tie());
}

TEST(Sweep, StdIsPopulationStdAcrossCombinations) {
  const auto s = test::scenario1_enumeration();
  const auto sweep = base_score_sweep(s, "T1", {0.5}, SemanticsKind::QuadraticEnergy);
  double sum = 0, sq = 0;
  const std::uint64_t total = 1u << s.toggles.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::set<ArgumentId> on;
    for (std::size_t i = 0; i < s.toggles.size(); ++i) {
      if (mask >> i & 1) on.insert(s.toggles[i]);
    }
    const auto sigma = test::naive_strengths(test::with_active(s.framework, on), SemanticsKind::QuadraticEnergy);
    const double gap = sigma.at("R") - sigma.at("not_R");
    sum += gap;
    sq += gap * gap;
  }
  const double mean = sum / total;
  const auto& p = sweep.point(0.5, "all");
  EXPECT_NEAR(p.mean_gap, mean, 1e-12);
  EXPECT_NEAR(p.std_gap, std::sqrt(sq / total - mean * mean), 1e-9);
}

TEST(Sweep, Errors) {
  const auto s = test::scenario1_enumeration();
  EXPECT_THROW(base_score_sweep(s, "ghost", {0.5}, SemanticsKind::QuadraticEnergy), Error);
  EXPECT_THROW(base_score_sweep(s, "T1", {0.5, 0.5}, SemanticsKind::QuadraticEnergy), Error);
  EXPECT_THROW(base_score_sweep(s, "T1", {1.5}, SemanticsKind::QuadraticEnergy), Error);
  EXPECT_EQ(linear_grid(0, 1, 3), (std::vector<double>{0, 0.5, 1}));
}

TEST(Csv, Headers) {
  const auto s = test::scenario1_enumeration();
  std::ostringstream d;
  write_distribution_csv(d, {run(s, ScenarioFilter::All)}, 3);
  EXPECT_EQ(d.str().substr(0, d.str().find('\n')), "scenario,filter,n,pct_r,pct_nr,pct_tie");
  EXPECT_NE(d.str().find(",all,128,1.562,92.188,6.250"), std::string::npos) << d.str();

  std::ostringstream a;
  write_attribution_csv(a, relation_attribution(active_subframework(test::schedule_initial()),
                                                SemanticsKind::QuadraticEnergy));
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "polarity,source,target,contrib_r,contrib_nr,stderr_r,stderr_nr");

  std::ostringstream w;
  write_sweep_csv(w, base_score_sweep(s, "T1", {0.5}, SemanticsKind::QuadraticEnergy));
  EXPECT_EQ(w.str().substr(0, w.str().find('\n')), "tau,group,mean_gap,std_gap,pct_r,pct_nr,pct_tie");
}
