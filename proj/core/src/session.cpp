#include "gradarg/session.hpp"

#include "gradarg/corpus.hpp"
#include "gradarg/error.hpp"
#include "gradarg/json_io.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace gradarg {

namespace fs = std::filesystem;
using nlohmann::json;

struct SessionManager::Session {
  std::string id;
  std::string corpus;
  std::string af_document;
  std::map<std::string, std::string> participants;
  Framework initial;
  Framework framework;
  std::vector<EditEvent> events;
  std::vector<DecisionRecord> decisions;
  std::optional<TiePrompt> pending_tie;
  std::vector<std::string> log;
  mutable std::mutex mutex;

  SessionView view() const {
    return {id, corpus, participants, framework, events, decisions, pending_tie};
  }
};

namespace {

void authorize(const Framework& f, const std::map<std::string, std::string>& participants, const EditPayload& payload,
               const std::string& actor) {
  auto it = participants.find(actor);
  if (it == participants.end()) throw Error(ErrorCode::Forbidden, "'" + actor + "' is not a participant");
  const bool robot = it->second == kRobotRole;
  const auto& user = it->second;
  auto may_edit = [&](const Argument& a) {
    if (a.kind == ArgumentKind::User) {
      if (robot || !a.owner || *a.owner != user) {
        throw Error(ErrorCode::Forbidden, "'" + actor + "' may not edit argument '" + a.id + "' owned by " +
                                              (a.owner ? *a.owner : std::string("nobody")));
      }
    } else if (!robot) {
      throw Error(ErrorCode::Forbidden, "only the robot may edit " + std::string(to_string(a.kind)) + " argument '" +
                                            a.id + "'");
    }
  };
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, AddArgument>) {
          may_edit(e.argument);
        } else if constexpr (std::is_same_v<T, SetPreference>) {
          if (robot || user != e.user) {
            throw Error(ErrorCode::Forbidden, "'" + actor + "' may not set preferences of user '" + e.user + "'");
          }
        } else {
          may_edit(f.at(e.id));
        }
      },
      payload);
}

DecisionOutcome decide(std::vector<DecisionRecord>& history, std::optional<TiePrompt>& pending, const Framework& f,
                       std::size_t event_count, const DecisionRequest& request) {
  Decision d = mupcr(f, request.kind, request.strategy);
  if (d.status == DecisionStatus::AwaitingArguments) {
    if (!pending || pending->round < kDefaultMaxRounds) {
      pending = TiePrompt{d.candidate_set, pending ? pending->round + 1 : 1};
      return {std::nullopt, pending};
    }
    d.selected = apply_tie_break(TieBreakStrategy::lexicographic(), d.candidate_set);
    d.status = DecisionStatus::Selected;
    d.fallback = true;
  }
  d.rounds = pending ? pending->round : 0;
  pending.reset();
  history.push_back({std::move(d), request, event_count, f});
  return {history.back(), std::nullopt};
}

std::string hex_token(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(12, '0');
  for (int i = 11; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace

SessionManager::SessionManager(std::string storage_dir, std::string corpus_dir)
    : storage_dir_(std::move(storage_dir)), corpus_dir_(corpus_dir.empty() ? gradarg::corpus_dir() : corpus_dir) {
  if (storage_dir_.empty()) return;
  fs::create_directories(storage_dir_);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(storage_dir_)) {
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path);
    std::ostringstream text;
    text << in.rdbuf();
    const auto id = path.stem().string();
    sessions_[id] = replay_log(id, text.str());
  }
}

SessionManager::~SessionManager() = default;

std::string SessionManager::fresh_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  for (;;) {
    auto id = "s" + std::to_string(++counter_) + "-" + hex_token(rng());
    if (!sessions_.count(id)) return id;
  }
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(index_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  return it->second;
}

std::shared_ptr<SessionManager::Session> SessionManager::build(const std::string& id,
                                                               const CreateSessionRequest& request) const {
  auto s = std::make_shared<Session>();
  s->id = id;
  if (!request.af_document.empty()) {
    auto entry = corpus_from_document({request.af_document, "<upload>"});
    s->corpus = "upload";
    s->af_document = request.af_document;
    s->initial = std::move(entry.framework);
  } else {
    auto entry = load_corpus(request.corpus, corpus_dir_);
    s->corpus = entry.name;
    s->initial = std::move(entry.framework);
  }
  if (request.participants.empty()) {
    for (const auto& u : s->initial.users()) s->participants[u] = u;
    s->participants[kRobotRole] = kRobotRole;
  } else {
    std::set<std::string> bound;
    for (const auto& [name, binding] : request.participants) {
      if (name.empty()) throw Error(ErrorCode::InvalidArgument, "participant names must be non-empty");
      if (binding == kRobotRole) continue;
      if (!s->initial.users().count(binding)) throw Error(ErrorCode::UnknownUser, "unknown user '" + binding + "'");
      if (!bound.insert(binding).second) {
        throw Error(ErrorCode::DuplicateId, "user '" + binding + "' is bound to more than one participant");
      }
    }
    s->participants = request.participants;
  }
  s->framework = s->initial;
  json header{{"type", "session"}, {"id", id}, {"corpus", s->corpus}, {"participants", s->participants}};
  if (!s->af_document.empty()) header["af_document"] = s->af_document;
  s->log.push_back(header.dump());
  return s;
}

std::shared_ptr<SessionManager::Session> SessionManager::replay_log(const std::string& id,
                                                                    const std::string& text) const {
  std::istringstream in(text);
  std::string line;
  std::shared_ptr<Session> s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("malformed session log line: ") + e.what());
    }
    const auto type = j.value("type", "");
    if (!s) {
      if (type != "session") throw Error(ErrorCode::InvalidArgument, "session log must start with a header");
      CreateSessionRequest req;
      req.corpus = j.value("corpus", "");
      req.af_document = j.value("af_document", "");
      req.participants = j.value("participants", std::map<std::string, std::string>{});
      s = build(id, req);
      continue;
    }
    if (type == "event") {
      auto event = event_from_json(j.at("event"));
      const auto actor = j.value("actor", "");
      authorize(s->framework, s->participants, event.payload, actor);
      s->framework = apply_edit(s->framework, event);
      s->events.push_back(std::move(event));
    } else if (type == "decision_request") {
      decide(s->decisions, s->pending_tie, s->framework, s->events.size(),
             decision_request_from_json(j.at("request")));
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown session log entry '" + type + "'");
    }
    s->log.push_back(line);
  }
  if (!s) throw Error(ErrorCode::InvalidArgument, "empty session log");
  return s;
}

void SessionManager::persist(const Session& s, const json& line) const {
  if (storage_dir_.empty()) return;
  std::ofstream out(fs::path(storage_dir_) / (s.id + ".jsonl"), std::ios::app);
  out << line.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write session log for '" + s.id + "'");
}

SessionView SessionManager::create_session(const CreateSessionRequest& request) {
  std::unique_lock lock(index_mutex_);
  const auto id = fresh_id();
  auto s = build(id, request);
  if (!storage_dir_.empty()) {
    std::ofstream out(fs::path(storage_dir_) / (id + ".jsonl"), std::ios::trunc);
    out << s->log.front() << '\n';
  }
  sessions_[id] = s;
  return s->view();
}

SessionView SessionManager::post_event(const std::string& session_id, const EditPayload& payload,
                                       const std::string& actor) {
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);
  authorize(s->framework, s->participants, payload, actor);
  EditEvent event{s->events.size() + 1, payload};
  Framework next = apply_edit(s->framework, event);
  json line{{"type", "event"}, {"actor", actor}, {"event", to_json(event)}};
  persist(*s, line);
  s->framework = std::move(next);
  s->events.push_back(std::move(event));
  s->log.push_back(line.dump());
  return s->view();
}

DecisionOutcome SessionManager::request_decision(const std::string& session_id, const DecisionRequest& request) {
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);
  auto history = s->decisions;
  auto pending = s->pending_tie;
  auto outcome = decide(history, pending, s->framework, s->events.size(), request);
  json line{{"type", "decision_request"}, {"request", to_json(request)}};
  persist(*s, line);
  s->decisions = std::move(history);
  s->pending_tie = std::move(pending);
  s->log.push_back(line.dump());
  return outcome;
}

Explanation SessionManager::get_explanation(const std::string& session_id, long long index,
                                            const AttributionOptions& options) const {
  auto s = find(session_id);
  DecisionRecord record;
  {
    std::lock_guard guard(s->mutex);
    if (index < 0 || static_cast<std::size_t>(index) >= s->decisions.size()) {
      throw Error(ErrorCode::OutOfRange, "decision index " + std::to_string(index) + " out of range (have " +
                                             std::to_string(s->decisions.size()) + ")");
    }
    record = s->decisions[static_cast<std::size_t>(index)];
  }
  Explanation e;
  e.index = static_cast<std::size_t>(index);
  e.attribution = relation_attribution(record.framework, record.request.kind, options);
  e.record = std::move(record);
  return e;
}

SessionView SessionManager::get(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);
  return s->view();
}

StrengthMap SessionManager::strengths(const std::string& session_id, SemanticsKind kind) const {
  return evaluate(get(session_id).framework, kind);
}

std::vector<std::string> SessionManager::session_ids() const {
  std::shared_lock lock(index_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

std::string SessionManager::export_log(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard guard(s->mutex);
  std::string out;
  for (const auto& line : s->log) out += line + '\n';
  return out;
}

SessionView SessionManager::import_log(const std::string& log_text) {
  std::unique_lock lock(index_mutex_);
  const auto id = fresh_id();
  auto s = replay_log(id, log_text);
  if (!storage_dir_.empty()) {
    std::ofstream out(fs::path(storage_dir_) / (id + ".jsonl"), std::ios::trunc);
    for (const auto& line : s->log) out << line << '\n';
  }
  sessions_[id] = s;
  return s->view();
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const TiePrompt& p) { return json{{"candidates", p.candidates}, {"round", p.round}}; }

json to_json(const DecisionRequest& r) {
  json j{{"semantics", std::string(to_string(r.kind))}, {"strategy", std::string(to_string(r.strategy.kind))}};
  if (!r.strategy.rank.empty()) j["rank"] = r.strategy.rank;
  return j;
}

DecisionRequest decision_request_from_json(const json& j) {
  DecisionRequest r;
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "decision request must be an object");
  try {
    if (j.contains("semantics")) r.kind = parse_semantics(j.at("semantics").get<std::string>());
    if (j.contains("strategy")) r.strategy.kind = parse_tie_break(j.at("strategy").get<std::string>());
    if (j.contains("rank")) {
      for (const auto& o : j.at("rank").get<std::vector<std::string>>()) r.strategy.rank.push_back(normalize_id(o));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed decision request: ") + e.what());
  }
  return r;
}

json to_json(const DecisionRecord& r) {
  auto j = to_json(r.decision);
  j["request"] = to_json(r.request);
  j["event_count"] = r.event_count;
  return j;
}

json to_json(const Explanation& e) {
  return json{{"index", e.index}, {"trace", to_json(e.record)}, {"attribution", to_json(e.attribution)}};
}

json to_json(const SessionView& v, SemanticsKind kind) {
  json decisions = json::array();
  for (const auto& d : v.decisions) decisions.push_back(to_json(d));
  json events = json::array();
  for (const auto& e : v.events) events.push_back(to_json(e));
  const auto active = effective_active(v.framework);
  std::vector<ArgumentId> togglable;
  for (const auto& [id, a] : v.framework.arguments()) {
    if (a.kind != ArgumentKind::Option) togglable.push_back(id);
  }
  return json{{"id", v.id},
              {"corpus", v.corpus},
              {"participants", v.participants},
              {"framework", to_json(v.framework)},
              {"togglable", togglable},
              {"active", active},
              {"strengths", to_json(evaluate(v.framework, kind))},
              {"semantics", std::string(to_string(kind))},
              {"event_log", std::move(events)},
              {"decision_history", std::move(decisions)},
              {"pending_tie", v.pending_tie ? to_json(*v.pending_tie) : json(nullptr)}};
}

}  // namespace gradarg
