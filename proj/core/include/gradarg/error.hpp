#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gradarg {

enum class ErrorCode {
  UnknownArgument,
  UnknownUser,
  UnknownReference,
  UnknownCorpus,
  DuplicateId,
  DuplicateRelation,
  InvalidId,
  BadScore,
  NotAnOption,
  ConflictingSign,
  OptionHasOutgoing,
  Cycle,
  WouldCreateCycle,
  OptionEditForbidden,
  ShapeMismatch,
  EmptyCandidates,
  NoEligibleOption,
  UnclassifiedProfile,
  MaxRoundsExceeded,
  TooManyToggles,
  TooManyRelations,
  InvalidArgument,
  InvalidAf,
  Forbidden,
  OutOfRange,
  NotFound,
  Syntax,
};

/// Stable upper-snake name used in reports, CSV, and JSON error bodies.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace gradarg
