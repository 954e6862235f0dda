#include "gradarg/dynamics.hpp"

#include "gradarg/error.hpp"

#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

namespace gradarg {

using nlohmann::json;

namespace {

[[noreturn]] void option_forbidden(const ArgumentId& id, const char* what) {
  throw Error(ErrorCode::OptionEditForbidden, std::string("cannot ") + what + " option '" + id + "'");
}

Framework with_arguments(const Framework& f, std::vector<Argument> args) {
  return Framework(std::move(args), f.relations(), f.options(), f.users(), f.preferences());
}

Framework add_argument(const Framework& f, const AddArgument& add) {
  const auto& a = add.argument;
  if (!is_valid_id(a.id)) throw Error(ErrorCode::InvalidId, "invalid argument id '" + a.id + "'");
  if (f.contains(a.id)) throw Error(ErrorCode::DuplicateId, "argument '" + a.id + "' already exists");
  if (a.kind == ArgumentKind::Option) option_forbidden(a.id, "add");
  if (!(a.base_score >= 0.0 && a.base_score <= 1.0)) {
    throw Error(ErrorCode::BadScore, "base score of '" + a.id + "' outside [0,1]");
  }
  for (const auto& r : add.relations) {
    if (r.source != a.id && r.target != a.id) {
      throw Error(ErrorCode::InvalidArgument,
                  "relation " + r.source + " -> " + r.target + " is not incident to '" + a.id + "'");
    }
    const auto& other = r.source == a.id ? r.target : r.source;
    if (other != a.id && !f.contains(other)) {
      throw Error(ErrorCode::UnknownArgument, "relation names unknown argument '" + other + "'");
    }
  }
  auto args = f.argument_list();
  args.push_back(a);
  auto rels = f.relations();
  rels.insert(rels.end(), add.relations.begin(), add.relations.end());
  Framework next(std::move(args), std::move(rels), f.options(), f.users(), f.preferences());
  const auto report = validate_structure(next);
  if (report.has_error("CYCLE")) {
    throw Error(ErrorCode::WouldCreateCycle, "adding '" + a.id + "' would create a cycle");
  }
  if (report.has_error("OPTION_HAS_OUTGOING")) {
    throw Error(ErrorCode::OptionHasOutgoing, "adding '" + a.id + "' would give an option an outgoing relation");
  }
  return next;
}

struct EditVisitor {
  const Framework& f;

  Framework operator()(const AddArgument& e) const { return add_argument(f, e); }

  Framework operator()(const RemoveArgument& e) const {
    if (f.at(e.id).kind == ArgumentKind::Option) option_forbidden(e.id, "remove");
    return without_arguments(f, {e.id});
  }

  Framework operator()(const SetBaseScore& e) const {
    f.at(e.id);
    if (!(e.base_score >= 0.0 && e.base_score <= 1.0)) {
      throw Error(ErrorCode::BadScore, "base score for '" + e.id + "' outside [0,1]");
    }
    auto args = f.argument_list();
    for (auto& a : args) {
      if (a.id == e.id) a.base_score = e.base_score;
    }
    return with_arguments(f, std::move(args));
  }

  Framework operator()(const SetActive& e) const {
    if (f.at(e.id).kind == ArgumentKind::Option) option_forbidden(e.id, "toggle");
    auto args = f.argument_list();
    for (auto& a : args) {
      if (a.id == e.id) a.active = e.active;
    }
    return with_arguments(f, std::move(args));
  }

  Framework operator()(const SetPreference& e) const {
    if (!f.users().count(e.user)) throw Error(ErrorCode::UnknownUser, "unknown user '" + e.user + "'");
    if (!f.is_option(e.option)) throw Error(ErrorCode::NotAnOption, "'" + e.option + "' is not an option");
    auto prefs = f.preferences();
    prefs.set(e.user, e.option, e.sign);
    return Framework(f.argument_list(), f.relations(), f.options(), f.users(), std::move(prefs));
  }
};

}  // namespace

Framework apply_edit(const Framework& f, const EditPayload& payload) { return std::visit(EditVisitor{f}, payload); }

Framework apply_edit(const Framework& f, const EditEvent& event) { return apply_edit(f, event.payload); }

Framework replay(const Framework& initial, const std::vector<EditEvent>& events) {
  Framework current = initial;
  for (const auto& e : events) current = apply_edit(current, e);
  return current;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::InvalidArgument, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "' has the wrong type");
  }
}

ArgumentKind parse_kind(const std::string& s) {
  if (s == "user") return ArgumentKind::User;
  if (s == "task") return ArgumentKind::Task;
  if (s == "option") return ArgumentKind::Option;
  throw Error(ErrorCode::InvalidArgument, "unknown argument kind '" + s + "'");
}

}  // namespace

json to_json(const Argument& a) {
  json j{{"id", a.id},
         {"label", a.label},
         {"kind", std::string(to_string(a.kind))},
         {"base_score", a.base_score},
         {"active", a.active}};
  if (a.owner) j["owner"] = *a.owner;
  if (!a.derived_active_from.empty()) j["derived_active_from"] = a.derived_active_from;
  return j;
}

Argument argument_from_json(const json& j) {
  Argument a;
  a.id = normalize_id(field<std::string>(j, "id"));
  if (j.contains("label")) a.label = field<std::string>(j, "label");
  a.kind = parse_kind(field<std::string>(j, "kind"));
  if (j.contains("owner") && !j.at("owner").is_null()) a.owner = field<std::string>(j, "owner");
  if (j.contains("base_score")) a.base_score = field<double>(j, "base_score");
  if (j.contains("active")) a.active = field<bool>(j, "active");
  if (j.contains("derived_active_from")) {
    for (const auto& s : field<std::vector<std::string>>(j, "derived_active_from")) {
      a.derived_active_from.push_back(normalize_id(s));
    }
  }
  return a;
}

json to_json(const Relation& r) {
  return json{{"source", r.source},
              {"target", r.target},
              {"polarity", r.polarity == Polarity::Attack ? "attack" : "support"}};
}

Relation relation_from_json(const json& j) {
  Relation r;
  r.source = normalize_id(field<std::string>(j, "source"));
  r.target = normalize_id(field<std::string>(j, "target"));
  const auto p = field<std::string>(j, "polarity");
  if (p == "attack" || p == "att") {
    r.polarity = Polarity::Attack;
  } else if (p == "support" || p == "sup") {
    r.polarity = Polarity::Support;
  } else {
    throw Error(ErrorCode::InvalidArgument, "polarity must be attack or support");
  }
  return r;
}

namespace {

struct EventEncoder {
  json& j;
  void operator()(const AddArgument& e) const {
    j["type"] = "add_argument";
    j["argument"] = to_json(e.argument);
    j["relations"] = json::array();
    for (const auto& r : e.relations) j["relations"].push_back(to_json(r));
  }
  void operator()(const RemoveArgument& e) const {
    j["type"] = "remove_argument";
    j["id"] = e.id;
  }
  void operator()(const SetBaseScore& e) const {
    j["type"] = "set_base_score";
    j["id"] = e.id;
    j["base_score"] = e.base_score;
  }
  void operator()(const SetActive& e) const {
    j["type"] = "set_active";
    j["id"] = e.id;
    j["active"] = e.active;
  }
  void operator()(const SetPreference& e) const {
    j["type"] = "set_preference";
    j["user"] = e.user;
    j["option"] = e.option;
    j["sign"] = std::string(1, to_char(e.sign));
  }
};

}  // namespace

json to_json(const EditEvent& event) {
  json j{{"seq", event.sequence}};
  std::visit(EventEncoder{j}, event.payload);
  return j;
}

EditEvent event_from_json(const json& j) {
  EditEvent e;
  if (j.contains("seq")) e.sequence = field<std::uint64_t>(j, "seq");
  const auto type = field<std::string>(j, "type");
  if (type == "add_argument") {
    AddArgument add;
    add.argument = argument_from_json(field<json>(j, "argument"));
    if (j.contains("relations")) {
      for (const auto& r : field<json>(j, "relations")) add.relations.push_back(relation_from_json(r));
    }
    e.payload = std::move(add);
  } else if (type == "remove_argument") {
    e.payload = RemoveArgument{normalize_id(field<std::string>(j, "id"))};
  } else if (type == "set_base_score") {
    e.payload = SetBaseScore{normalize_id(field<std::string>(j, "id")), field<double>(j, "base_score")};
  } else if (type == "set_active") {
    e.payload = SetActive{normalize_id(field<std::string>(j, "id")), field<bool>(j, "active")};
  } else if (type == "set_preference") {
    e.payload = SetPreference{field<std::string>(j, "user"), normalize_id(field<std::string>(j, "option")),
                              parse_sign(field<std::string>(j, "sign"))};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown event type '" + type + "'");
  }
  return e;
}

void write_event_log(std::ostream& out, const std::vector<EditEvent>& events) {
  for (const auto& e : events) out << to_json(e).dump() << '\n';
}

std::vector<EditEvent> read_event_log(std::istream& in) {
  std::vector<EditEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::InvalidArgument, std::string("malformed event line: ") + ex.what());
    }
    events.push_back(event_from_json(j));
  }
  return events;
}

// ---------------------------------------------------------------------------
// Discrimination checks

namespace {

bool interior(double v) { return v > 0.0 && v < 1.0; }

GapReport gaps(const StrengthMap& before, const StrengthMap& after, const OptionId& o1, const OptionId& o2) {
  GapReport r;
  r.o1 = o1;
  r.o2 = o2;
  r.gap_before = before.at(o1) - before.at(o2);
  r.gap_after = after.at(o1) - after.at(o2);
  r.widened = r.gap_after > r.gap_before;
  return r;
}

void not_applicable(GapReport& r, std::string reason) {
  if (r.applicable) {
    r.applicable = false;
    r.reason = std::move(reason);
  }
}

void check_options(const Framework& f, const OptionId& o1, const OptionId& o2) {
  if (!f.is_option(o1)) throw Error(ErrorCode::NotAnOption, "'" + o1 + "' is not an option");
  if (!f.is_option(o2)) throw Error(ErrorCode::NotAnOption, "'" + o2 + "' is not an option");
}

}  // namespace

GapReport check_addition_discrimination(const Framework& before, const Framework& after, const OptionId& o1,
                                        const OptionId& o2, SemanticsKind kind, const EvalConfig& config) {
  check_options(before, o1, o2);
  const auto shape_error = [](const std::string& why) {
    throw Error(ErrorCode::ShapeMismatch, "after is not before plus one argument: " + why);
  };
  if (after.arguments().size() != before.arguments().size() + 1) shape_error("argument count");
  if (after.options() != before.options() || after.users() != before.users() ||
      after.preferences() != before.preferences()) {
    shape_error("options, users or preferences differ");
  }
  ArgumentId alpha;
  for (const auto& [id, a] : after.arguments()) {
    auto it = before.arguments().find(id);
    if (it == before.arguments().end()) {
      alpha = id;
    } else if (!(it->second == a)) {
      shape_error("argument '" + id + "' changed");
    }
  }
  for (const auto& r : before.relations()) {
    const Relation* match = after.find_relation(r.source, r.target);
    if (!match || !(*match == r)) shape_error("relation " + r.source + " -> " + r.target + " changed");
  }
  for (const auto& r : after.relations()) {
    if (!before.find_relation(r.source, r.target) && r.source != alpha && r.target != alpha) {
      shape_error("new relation " + r.source + " -> " + r.target + " not incident to '" + alpha + "'");
    }
  }

  const auto s_before = evaluate(before, kind, config);
  const auto s_after = evaluate(after, kind, config);
  GapReport report = gaps(s_before, s_after, o1, o2);

  auto active_before = effective_active(before);
  auto active_after = effective_active(after);
  active_before.insert(alpha);
  if (active_before != active_after) not_applicable(report, "addition changes the activation of other arguments");
  if (!(after.at(alpha).base_score > 0.0)) not_applicable(report, "base score of the new argument is 0");
  if (!interior(s_before.at(o1)) || !interior(s_before.at(o2))) {
    not_applicable(report, "option strength not in (0,1)");
  }
  const Framework sub = active_subframework(after);
  const auto pc1 = pro_con(sub, o1);
  const auto pc2 = pro_con(sub, o2);
  if (!pc1.pro.count(alpha) && !pc2.con.count(alpha)) not_applicable(report, "argument is neither pro o1 nor con o2");
  if (pc1.con.count(alpha) || pc2.pro.count(alpha)) not_applicable(report, "argument has paths of mixed parity");
  bool target_ok = false;
  for (const auto& r : sub.relations()) {
    if (r.source == alpha && s_before.contains(r.target) && interior(s_before.at(r.target))) target_ok = true;
  }
  if (!target_ok) not_applicable(report, "no direct target with strength in (0,1)");
  return report;
}

GapReport check_basescore_discrimination(const Framework& before, const Framework& after, const OptionId& o1,
                                         const OptionId& o2, SemanticsKind kind, const EvalConfig& config) {
  check_options(before, o1, o2);
  const auto shape_error = [](const std::string& why) {
    throw Error(ErrorCode::ShapeMismatch, "frameworks differ beyond one base score: " + why);
  };
  if (after.relations() != before.relations() || after.options() != before.options() ||
      after.users() != before.users() || after.preferences() != before.preferences() ||
      after.arguments().size() != before.arguments().size()) {
    shape_error("structure");
  }
  std::vector<ArgumentId> changed;
  for (const auto& [id, a] : after.arguments()) {
    auto it = before.arguments().find(id);
    if (it == before.arguments().end()) shape_error("argument '" + id + "' added");
    Argument probe = it->second;
    probe.base_score = a.base_score;
    if (!(probe == a)) shape_error("argument '" + id + "' changed beyond its base score");
    if (it->second.base_score != a.base_score) changed.push_back(id);
  }
  if (changed.size() > 1) shape_error("more than one base score changed");

  const auto s_before = evaluate(before, kind, config);
  const auto s_after = evaluate(after, kind, config);
  GapReport report = gaps(s_before, s_after, o1, o2);
  if (changed.empty()) {
    not_applicable(report, "no base score changed");
    return report;
  }
  const auto& alpha = changed.front();
  const bool raised = after.at(alpha).base_score > before.at(alpha).base_score;

  if (!s_before.contains(alpha)) not_applicable(report, "changed argument is inactive");
  if (!interior(s_before.at(o1)) || !interior(s_before.at(o2))) {
    not_applicable(report, "option strength not in (0,1)");
  }
  const Framework sub = active_subframework(before);
  const auto pc1 = pro_con(sub, o1);
  const auto pc2 = pro_con(sub, o2);
  // Raising helps o1 through pro(o1)/con(o2); lowering through con(o1)/pro(o2).
  const auto& helps1 = raised ? pc1.pro : pc1.con;
  const auto& hurts1 = raised ? pc1.con : pc1.pro;
  const auto& helps2 = raised ? pc2.con : pc2.pro;
  const auto& hurts2 = raised ? pc2.pro : pc2.con;
  if (!helps1.count(alpha) && !helps2.count(alpha)) {
    not_applicable(report, raised ? "argument is neither pro o1 nor con o2" : "argument is neither con o1 nor pro o2");
  }
  if (hurts1.count(alpha) || hurts2.count(alpha)) not_applicable(report, "argument has paths of mixed parity");
  return report;
}

}  // namespace gradarg
