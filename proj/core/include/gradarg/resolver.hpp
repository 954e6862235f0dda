#pragma once

#include "gradarg/dynamics.hpp"
#include "gradarg/model.hpp"
#include "gradarg/semantics.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

namespace gradarg {

inline constexpr double kDefaultTieEpsilon = 1e-9;
inline constexpr int kDefaultMaxRounds = 5;

enum class TieBreakKind { Lexicographic, Interactive, ExternalRank };

std::string_view to_string(TieBreakKind kind) noexcept;
TieBreakKind parse_tie_break(std::string_view text);

/// The tie-breaking function g.
struct TieBreakStrategy {
  TieBreakKind kind = TieBreakKind::Lexicographic;
  /// ExternalRank only: most preferred first. Options not listed rank last, by id.
  std::vector<OptionId> rank;

  static TieBreakStrategy lexicographic() { return {}; }
  static TieBreakStrategy interactive() { return {TieBreakKind::Interactive, {}}; }
  static TieBreakStrategy external_rank(std::vector<OptionId> order) {
    return {TieBreakKind::ExternalRank, std::move(order)};
  }
};

enum class Branch { C, NC1, NC2, NC3 };
std::string_view to_string(Branch branch) noexcept;

enum class DecisionStatus { Selected, AwaitingArguments };
std::string_view to_string(DecisionStatus status) noexcept;

struct Decision {
  std::optional<OptionId> selected;  // empty while awaiting arguments
  Branch branch = Branch::C;
  std::set<OptionId> eligible;       // the branch's option set before the max
  std::set<OptionId> candidate_set;  // options passed to g
  StrengthMap strengths;
  bool tie = false;
  int rounds = 0;
  bool resolved = false;  // candidate_set was a singleton
  DecisionStatus status = DecisionStatus::Selected;
  bool fallback = false;  // interactive rounds ran out and Lexicographic decided
};

/// Options whose strength lies within tie_epsilon of the best among them.
/// Throws Error(EmptyCandidates) for an empty input, UnknownArgument for missing strengths.
std::set<OptionId> max_strength_set(const std::set<OptionId>& options, const StrengthMap& strengths,
                                    double tie_epsilon = kDefaultTieEpsilon);

/// Applies g to a candidate set. Returns nothing for Interactive with more than one candidate.
std::optional<OptionId> apply_tie_break(const TieBreakStrategy& strategy, const std::set<OptionId>& candidates);

/// One pass of the selection algorithm on the extended preference profile.
/// Throws NoEligibleOption when the branch's option set is empty and
/// UnclassifiedProfile when no condition describes the profile.
Decision mupcr(const Framework& framework, SemanticsKind kind, const TieBreakStrategy& strategy,
               const EvalConfig& config = {}, double tie_epsilon = kDefaultTieEpsilon);

/// Applies the users' new arguments. Throws InvalidArgument unless there is a tie.
Framework interactive_round(const Framework& framework, const std::set<OptionId>& candidates,
                            const std::vector<AddArgument>& new_arguments);

/// Called on each tie; returns the arguments users contribute this round.
using ArgumentProvider = std::function<std::vector<AddArgument>(const Framework&, const Decision&)>;

struct InteractiveOutcome {
  Decision decision;
  Framework framework;  // after all rounds
};

/// Re-runs mupcr after each round of new arguments until the tie breaks or
/// max_rounds rounds have been spent, then falls back to Lexicographic.
InteractiveOutcome resolve_interactive(const Framework& framework, SemanticsKind kind, const ArgumentProvider& provider,
                                       const EvalConfig& config = {}, int max_rounds = kDefaultMaxRounds,
                                       double tie_epsilon = kDefaultTieEpsilon);

/// True iff one option is strictly stronger (by more than tie_epsilon) than every other.
bool conflict_resolved(const StrengthMap& strengths, const std::vector<OptionId>& options,
                       double tie_epsilon = kDefaultTieEpsilon);

}  // namespace gradarg
