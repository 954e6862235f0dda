#pragma once

#include "gradarg/model.hpp"
#include "gradarg/semantics.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gradarg {

struct AddArgument {
  Argument argument;
  std::vector<Relation> relations;  // each must have the new argument as an endpoint
  bool operator==(const AddArgument&) const = default;
};
struct RemoveArgument {
  ArgumentId id;
  bool operator==(const RemoveArgument&) const = default;
};
struct SetBaseScore {
  ArgumentId id;
  double base_score = 0.5;
  bool operator==(const SetBaseScore&) const = default;
};
struct SetActive {
  ArgumentId id;
  bool active = true;
  bool operator==(const SetActive&) const = default;
};
struct SetPreference {
  UserId user;
  OptionId option;
  PreferenceSign sign = PreferenceSign::Indifferent;
  bool operator==(const SetPreference&) const = default;
};

using EditPayload = std::variant<AddArgument, RemoveArgument, SetBaseScore, SetActive, SetPreference>;

struct EditEvent {
  std::uint64_t sequence = 0;
  EditPayload payload;
  bool operator==(const EditEvent&) const = default;
};

/// Applies one edit and returns the new framework; the input is untouched.
/// Errors: UnknownArgument, DuplicateId, WouldCreateCycle, OptionEditForbidden,
/// BadScore, UnknownUser, NotAnOption, InvalidArgument.
Framework apply_edit(const Framework& framework, const EditEvent& event);
Framework apply_edit(const Framework& framework, const EditPayload& payload);

/// Folds apply_edit over the events in order.
Framework replay(const Framework& initial, const std::vector<EditEvent>& events);

// JSON encoding shared by the event log and the HTTP API.
nlohmann::json to_json(const Argument& argument);
Argument argument_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Relation& relation);
Relation relation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EditEvent& event);
/// Throws Error(InvalidArgument) for malformed objects.
EditEvent event_from_json(const nlohmann::json& j);

/// One JSON object per line.
void write_event_log(std::ostream& out, const std::vector<EditEvent>& events);
std::vector<EditEvent> read_event_log(std::istream& in);

struct GapReport {
  OptionId o1;
  OptionId o2;
  double gap_before = 0.0;
  double gap_after = 0.0;
  bool widened = false;
  bool applicable = true;
  std::string reason;  // why the preconditions are not met; empty when applicable
};

/// Checks the gap sigma(o1) - sigma(o2) when `after` is `before` plus one
/// argument. Throws Error(ShapeMismatch) otherwise. Arguments that reach an
/// option through both attack parities are screened out as not applicable.
GapReport check_addition_discrimination(const Framework& before, const Framework& after, const OptionId& o1,
                                        const OptionId& o2, SemanticsKind kind, const EvalConfig& config = {});

/// Same check when exactly one base score differs. A raised score is expected
/// to widen the gap for pro(o1)/con(o2) arguments; a lowered score for
/// con(o1)/pro(o2) arguments.
GapReport check_basescore_discrimination(const Framework& before, const Framework& after, const OptionId& o1,
                                         const OptionId& o2, SemanticsKind kind, const EvalConfig& config = {});

}  // namespace gradarg
