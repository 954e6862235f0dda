#pragma once

#include "gradarg/model.hpp"
#include "gradarg/semantics.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace gradarg {

inline constexpr std::size_t kMaxToggles = 24;
inline constexpr std::size_t kMaxExactRelations = 20;

/// A framework plus the arguments that are switched on and off during enumeration.
struct Scenario {
  std::string name;
  Framework framework;
  std::vector<ArgumentId> toggles;
  /// Root arguments dropped by the RiskRemoved filter; the first one also
  /// defines the RootActive filter and the sweep grouping.
  std::vector<ArgumentId> risk;
};

enum class ScenarioFilter { All, RootActive, RiskRemoved };
std::string_view to_string(ScenarioFilter filter) noexcept;
ScenarioFilter parse_filter(std::string_view text);

struct EnumerateOptions {
  ScenarioFilter filter = ScenarioFilter::All;
  /// RiskRemoved only: keep non-option arguments left without a path to an
  /// option in the toggle set instead of pruning them.
  bool keep_inert = false;
  unsigned jobs = 1;
  double tie_epsilon = 1e-9;
};

struct DistributionTable {
  std::string scenario;
  std::string filter;
  std::vector<OptionId> options;
  std::uint64_t n = 0;
  std::map<OptionId, std::uint64_t> wins;
  std::uint64_t ties = 0;

  double pct(const OptionId& option) const;
  double pct_tie() const;
};

/// Runs every on/off assignment of the toggles (after the filter), applies
/// derived activation, evaluates, and counts which option is strongest.
/// Throws TooManyToggles above kMaxToggles.
DistributionTable enumerate_decisions(const Scenario& scenario, SemanticsKind kind, const EvalConfig& config = {},
                                      const EnumerateOptions& options = {});

/// The scenario the RiskRemoved filter enumerates.
Scenario remove_risk(const Scenario& scenario, bool keep_inert);

enum class AttributionMethod { Auto, ExactShapley, PermutationSampling };
std::string_view to_string(AttributionMethod method) noexcept;

struct AttributionOptions {
  AttributionMethod method = AttributionMethod::Auto;
  std::size_t samples = 20000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct AttributionEntry {
  Relation relation;
  std::map<OptionId, double> contribution;
  std::map<OptionId, double> stderr_;  // zero for exact values
};

struct AttributionTable {
  std::vector<OptionId> options;
  std::vector<AttributionEntry> entries;  // in relation order
  std::map<OptionId, double> strength;    // with every relation present
  std::map<OptionId, double> base;        // with no relation present
  AttributionMethod method = AttributionMethod::ExactShapley;
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  const AttributionEntry& at(const ArgumentId& source, const ArgumentId& target) const;
};

/// Shapley value of each relation of the active sub-framework towards each
/// option's strength. A missing relation means the edge is absent; arguments stay.
/// Exact mode throws TooManyRelations above kMaxExactRelations.
AttributionTable relation_attribution(const Framework& framework, SemanticsKind kind,
                                      const AttributionOptions& options = {}, const EvalConfig& config = {});

struct SweepPoint {
  double tau = 0.0;
  std::string group;  // "all", "active", "inactive"
  std::uint64_t n = 0;
  double mean_gap = 0.0;
  double std_gap = 0.0;
  std::map<OptionId, double> pct;
  double pct_tie = 0.0;
};

struct SweepResult {
  ArgumentId target;
  std::vector<OptionId> options;
  std::vector<double> grid;
  std::vector<SweepPoint> points;  // grid-major, groups in the order all/active/inactive

  const SweepPoint& point(double tau, std::string_view group) const;
};

std::vector<double> linear_grid(double lo, double hi, std::size_t count);

/// Re-enumerates the scenario with the target's base score set to each grid
/// value. The gap is sigma(options[0]) - sigma(options[1]); population std over combinations.
/// Throws UnknownArgument, InvalidArgument for a grid that is not strictly increasing in [0,1].
SweepResult base_score_sweep(const Scenario& scenario, const ArgumentId& target, const std::vector<double>& grid,
                             SemanticsKind kind, const EvalConfig& config = {}, const EnumerateOptions& options = {});

// CSV writers; the header line comes first.
void write_distribution_csv(std::ostream& out, const std::vector<DistributionTable>& tables, int precision = 6);
void write_attribution_csv(std::ostream& out, const AttributionTable& table, int precision = 6);
void write_sweep_csv(std::ostream& out, const SweepResult& result, int precision = 6);

}  // namespace gradarg
