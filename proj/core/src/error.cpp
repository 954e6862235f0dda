#include "gradarg/error.hpp"

namespace gradarg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownArgument: return "UNKNOWN_ARGUMENT";
    case ErrorCode::UnknownUser: return "UNKNOWN_USER";
    case ErrorCode::UnknownReference: return "UNKNOWN_REFERENCE";
    case ErrorCode::UnknownCorpus: return "UNKNOWN_CORPUS";
    case ErrorCode::DuplicateId: return "DUPLICATE_ID";
    case ErrorCode::DuplicateRelation: return "DUPLICATE_RELATION";
    case ErrorCode::InvalidId: return "INVALID_ID";
    case ErrorCode::BadScore: return "BAD_SCORE";
    case ErrorCode::NotAnOption: return "NOT_AN_OPTION";
    case ErrorCode::ConflictingSign: return "CONFLICTING_SIGN";
    case ErrorCode::OptionHasOutgoing: return "OPTION_HAS_OUTGOING";
    case ErrorCode::Cycle: return "CYCLE";
    case ErrorCode::WouldCreateCycle: return "WOULD_CREATE_CYCLE";
    case ErrorCode::OptionEditForbidden: return "OPTION_EDIT_FORBIDDEN";
    case ErrorCode::ShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::EmptyCandidates: return "EMPTY_CANDIDATES";
    case ErrorCode::NoEligibleOption: return "NO_ELIGIBLE_OPTION";
    case ErrorCode::UnclassifiedProfile: return "UNCLASSIFIED_PROFILE";
    case ErrorCode::MaxRoundsExceeded: return "MAX_ROUNDS_EXCEEDED";
    case ErrorCode::TooManyToggles: return "TOO_MANY_TOGGLES";
    case ErrorCode::TooManyRelations: return "TOO_MANY_RELATIONS";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::InvalidAf: return "INVALID_AF";
    case ErrorCode::Forbidden: return "FORBIDDEN";
    case ErrorCode::OutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::Syntax: return "SYNTAX";
  }
  return "UNKNOWN";
}

}  // namespace gradarg
