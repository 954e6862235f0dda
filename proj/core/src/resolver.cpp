#include "gradarg/resolver.hpp"

#include "gradarg/error.hpp"

#include <algorithm>
#include <limits>

namespace gradarg {

std::string_view to_string(TieBreakKind kind) noexcept {
  switch (kind) {
    case TieBreakKind::Lexicographic: return "lexicographic";
    case TieBreakKind::Interactive: return "interactive";
    case TieBreakKind::ExternalRank: return "external_rank";
  }
  return "?";
}

TieBreakKind parse_tie_break(std::string_view text) {
  if (text == "lexicographic" || text == "lex") return TieBreakKind::Lexicographic;
  if (text == "interactive") return TieBreakKind::Interactive;
  if (text == "external_rank" || text == "rank") return TieBreakKind::ExternalRank;
  throw Error(ErrorCode::InvalidArgument, "unknown tie-break strategy '" + std::string(text) + "'");
}

std::string_view to_string(Branch branch) noexcept {
  switch (branch) {
    case Branch::C: return "C";
    case Branch::NC1: return "NC1";
    case Branch::NC2: return "NC2";
    case Branch::NC3: return "NC3";
  }
  return "?";
}

std::string_view to_string(DecisionStatus status) noexcept {
  return status == DecisionStatus::Selected ? "selected" : "awaiting_arguments";
}

std::set<OptionId> max_strength_set(const std::set<OptionId>& options, const StrengthMap& strengths,
                                    double tie_epsilon) {
  if (options.empty()) throw Error(ErrorCode::EmptyCandidates, "no options to choose from");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& o : options) best = std::max(best, strengths.at(o));
  std::set<OptionId> out;
  for (const auto& o : options) {
    if (best - strengths.at(o) <= tie_epsilon) out.insert(o);
  }
  return out;
}

std::optional<OptionId> apply_tie_break(const TieBreakStrategy& strategy, const std::set<OptionId>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyCandidates, "no candidates for the tie-break");
  if (candidates.size() == 1) return *candidates.begin();
  switch (strategy.kind) {
    case TieBreakKind::Lexicographic: return *candidates.begin();
    case TieBreakKind::Interactive: return std::nullopt;
    case TieBreakKind::ExternalRank:
      for (const auto& o : strategy.rank) {
        if (candidates.count(o)) return o;
      }
      return *candidates.begin();
  }
  return std::nullopt;
}

namespace {

struct BranchChoice {
  Branch branch;
  std::set<OptionId> eligible;
};

BranchChoice choose_branch(const Framework& f) {
  const auto total = f.total_preferences();
  const auto cls = classify(total);
  if (cls.overall == Overall::Conflict) {
    return {Branch::C, std::set<OptionId>(f.options().begin(), f.options().end())};
  }
  const auto sets = preference_sets(total);
  if (cls.has(ConflictLabel::NC1)) {
    if (!sets.positive.empty()) return {Branch::NC1, sets.positive};
    if (!sets.indifferent.empty()) return {Branch::NC1, sets.indifferent};
    return {Branch::NC1, sets.negative};
  }
  if (cls.has(ConflictLabel::NC2)) return {Branch::NC2, sets.positive};
  if (cls.has(ConflictLabel::NC3)) {
    std::set<OptionId> eligible;
    std::set_difference(sets.indifferent.begin(), sets.indifferent.end(), sets.negative.begin(), sets.negative.end(),
                        std::inserter(eligible, eligible.end()));
    return {Branch::NC3, eligible};
  }
  throw Error(ErrorCode::UnclassifiedProfile, "the preference profile satisfies none of the conflict conditions");
}

}  // namespace

Decision mupcr(const Framework& f, SemanticsKind kind, const TieBreakStrategy& strategy, const EvalConfig& config,
               double tie_epsilon) {
  if (f.options().empty()) throw Error(ErrorCode::EmptyCandidates, "framework has no options");
  Decision d;
  d.strengths = evaluate(f, kind, config);
  auto [branch, eligible] = choose_branch(f);
  d.branch = branch;
  if (eligible.empty()) {
    throw Error(ErrorCode::NoEligibleOption,
                "branch " + std::string(to_string(branch)) + " leaves no eligible option");
  }
  d.eligible = std::move(eligible);
  d.candidate_set = max_strength_set(d.eligible, d.strengths, tie_epsilon);
  d.tie = d.candidate_set.size() > 1;
  d.resolved = !d.tie;
  d.selected = apply_tie_break(strategy, d.candidate_set);
  d.status = d.selected ? DecisionStatus::Selected : DecisionStatus::AwaitingArguments;
  return d;
}

Framework interactive_round(const Framework& f, const std::set<OptionId>& candidates,
                            const std::vector<AddArgument>& new_arguments) {
  if (candidates.size() < 2) throw Error(ErrorCode::InvalidArgument, "an interactive round needs a tie");
  Framework next = f;
  for (const auto& add : new_arguments) next = apply_edit(next, EditPayload{add});
  return next;
}

InteractiveOutcome resolve_interactive(const Framework& framework, SemanticsKind kind, const ArgumentProvider& provider,
                                       const EvalConfig& config, int max_rounds, double tie_epsilon) {
  Framework current = framework;
  for (int round = 0;; ++round) {
    Decision d = mupcr(current, kind, TieBreakStrategy::interactive(), config, tie_epsilon);
    d.rounds = round;
    if (d.selected) return {std::move(d), std::move(current)};
    if (round >= max_rounds) {
      d.selected = apply_tie_break(TieBreakStrategy::lexicographic(), d.candidate_set);
      d.status = DecisionStatus::Selected;
      d.fallback = true;
      return {std::move(d), std::move(current)};
    }
    current = interactive_round(current, d.candidate_set, provider ? provider(current, d) : std::vector<AddArgument>{});
  }
}

bool conflict_resolved(const StrengthMap& strengths, const std::vector<OptionId>& options, double tie_epsilon) {
  if (options.empty()) throw Error(ErrorCode::EmptyCandidates, "no options");
  const std::set<OptionId> all(options.begin(), options.end());
  return max_strength_set(all, strengths, tie_epsilon).size() == 1;
}

}  // namespace gradarg
