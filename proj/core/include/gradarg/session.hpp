#pragma once

#include "gradarg/analysis.hpp"
#include "gradarg/dynamics.hpp"
#include "gradarg/resolver.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gradarg {

inline constexpr const char* kRobotRole = "robot";

struct TiePrompt {
  std::set<OptionId> candidates;
  int round = 1;
};

struct DecisionRequest {
  SemanticsKind kind = SemanticsKind::QuadraticEnergy;
  TieBreakStrategy strategy;
};

struct DecisionRecord {
  Decision decision;
  DecisionRequest request;
  std::size_t event_count = 0;  // events applied when the decision was made
  Framework framework;          // snapshot the decision was made on
};

struct DecisionOutcome {
  std::optional<DecisionRecord> decision;
  std::optional<TiePrompt> tie_prompt;
};

struct CreateSessionRequest {
  std::string corpus;       // bundled corpus name or alias
  std::string af_document;  // used instead of `corpus` when non-empty
  /// participant -> user id, or "robot". Empty: one participant per user plus "robot".
  std::map<std::string, std::string> participants;
};

struct Explanation {
  std::size_t index = 0;
  DecisionRecord record;
  AttributionTable attribution;
};

/// Snapshot of one session; safe to hand out while the session keeps changing.
struct SessionView {
  std::string id;
  std::string corpus;
  std::map<std::string, std::string> participants;
  Framework framework;
  std::vector<EditEvent> events;
  std::vector<DecisionRecord> decisions;
  std::optional<TiePrompt> pending_tie;
};

/// Interactive sessions over a corpus framework. Each session is an event
/// log; the framework is always the fold of apply_edit over it. With a
/// storage directory, sessions are written as JSON lines and rebuilt by
/// replay when the manager starts.
class SessionManager {
public:
  explicit SessionManager(std::string storage_dir = {}, std::string corpus_dir = {});
  ~SessionManager();

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  /// Throws UnknownCorpus, InvalidAf, DuplicateId (two participants bound to
  /// one user), UnknownUser.
  SessionView create_session(const CreateSessionRequest& request);

  /// Applies one edit on behalf of `actor`. User arguments may only be edited
  /// by their owner, task arguments by the robot. Throws Forbidden, NotFound,
  /// and every apply_edit error; the session is unchanged on error.
  SessionView post_event(const std::string& session_id, const EditPayload& payload, const std::string& actor);

  /// Runs the selection. With the Interactive strategy an unresolved tie
  /// returns a prompt; after kDefaultMaxRounds prompts the tie falls back to
  /// Lexicographic and the decision is flagged.
  DecisionOutcome request_decision(const std::string& session_id, const DecisionRequest& request);

  /// Throws OutOfRange for a bad index.
  Explanation get_explanation(const std::string& session_id, long long index,
                              const AttributionOptions& options = {}) const;

  SessionView get(const std::string& session_id) const;
  StrengthMap strengths(const std::string& session_id, SemanticsKind kind = SemanticsKind::QuadraticEnergy) const;
  std::vector<std::string> session_ids() const;

  /// The session's persisted form: a header line, then one line per event or decision request.
  std::string export_log(const std::string& session_id) const;
  /// Rebuilds a session from an exported log under a new id.
  SessionView import_log(const std::string& log_text);

  const std::string& corpus_directory() const noexcept { return corpus_dir_; }

private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<Session> build(const std::string& id, const CreateSessionRequest& request) const;
  std::shared_ptr<Session> replay_log(const std::string& id, const std::string& text) const;
  void persist(const Session& session, const nlohmann::json& line) const;
  std::string fresh_id();

  std::string storage_dir_;
  std::string corpus_dir_;
  mutable std::shared_mutex index_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

nlohmann::json to_json(const SessionView& view, SemanticsKind kind = SemanticsKind::QuadraticEnergy);
nlohmann::json to_json(const TiePrompt& prompt);
nlohmann::json to_json(const DecisionRecord& record);
nlohmann::json to_json(const Explanation& explanation);
DecisionRequest decision_request_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DecisionRequest& request);

}  // namespace gradarg
