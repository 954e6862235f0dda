#include "gradarg/model.hpp"

#include "gradarg/error.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>

namespace gradarg {

std::string_view to_string(ArgumentKind kind) noexcept {
  switch (kind) {
    case ArgumentKind::Option: return "option";
    case ArgumentKind::User: return "user";
    case ArgumentKind::Task: return "task";
  }
  return "?";
}

std::string_view to_string(Polarity polarity) noexcept {
  return polarity == Polarity::Attack ? "att" : "sup";
}

bool is_valid_id(std::string_view id) noexcept {
  if (id.empty() || !std::isalpha(static_cast<unsigned char>(id.front()))) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string normalize_id(std::string_view raw) {
  static constexpr std::string_view kNot = "\xC2\xAC";  // U+00AC
  std::string out;
  out.reserve(raw.size() + 4);
  for (std::size_t i = 0; i < raw.size();) {
    if (raw.substr(i, kNot.size()) == kNot) {
      out += "not_";
      i += kNot.size();
    } else {
      out += raw[i++];
    }
  }
  return out;
}

bool relation_key_less(const Relation& a, const Relation& b) noexcept {
  if (a.source != b.source) return a.source < b.source;
  return a.target < b.target;
}

Framework::Framework(std::vector<Argument> arguments, std::vector<Relation> relations,
                     std::vector<ArgumentId> options, std::set<UserId> users, PreferenceProfile preferences)
    : relations_(std::move(relations)),
      options_(std::move(options)),
      users_(std::move(users)),
      preferences_(std::move(preferences)) {
  for (const auto& u : users_) {
    if (!is_valid_id(u)) throw Error(ErrorCode::InvalidId, "invalid user id '" + u + "'");
  }
  for (auto& a : arguments) {
    if (!is_valid_id(a.id)) throw Error(ErrorCode::InvalidId, "invalid argument id '" + a.id + "'");
    if (!(a.base_score >= 0.0 && a.base_score <= 1.0)) {
      throw Error(ErrorCode::BadScore, "base score of '" + a.id + "' outside [0,1]");
    }
    if (a.kind == ArgumentKind::User) {
      if (!a.owner) throw Error(ErrorCode::InvalidArgument, "user argument '" + a.id + "' needs an owner");
      if (!users_.count(*a.owner)) {
        throw Error(ErrorCode::UnknownUser, "owner '" + *a.owner + "' of '" + a.id + "' is not a user");
      }
    } else if (a.owner) {
      throw Error(ErrorCode::InvalidArgument, "only user arguments carry an owner ('" + a.id + "')");
    }
    if (a.kind == ArgumentKind::Option) a.active = true;
    auto id = a.id;
    if (!arguments_.emplace(id, std::move(a)).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate argument id '" + id + "'");
    }
  }
  for (const auto& [id, a] : arguments_) {
    for (const auto& s : a.derived_active_from) {
      if (!arguments_.count(s)) {
        throw Error(ErrorCode::UnknownArgument, "'" + id + "' derives activation from unknown '" + s + "'");
      }
    }
  }

  std::set<ArgumentId> option_set;
  for (const auto& o : options_) {
    auto it = arguments_.find(o);
    if (it == arguments_.end()) throw Error(ErrorCode::UnknownArgument, "unknown option '" + o + "'");
    if (it->second.kind != ArgumentKind::Option) {
      throw Error(ErrorCode::NotAnOption, "'" + o + "' is listed as option but is not option-kind");
    }
    if (!option_set.insert(o).second) throw Error(ErrorCode::DuplicateId, "option '" + o + "' listed twice");
  }
  for (const auto& [id, a] : arguments_) {
    if (a.kind == ArgumentKind::Option && !option_set.count(id)) {
      throw Error(ErrorCode::NotAnOption, "option-kind argument '" + id + "' missing from the option list");
    }
  }

  std::sort(relations_.begin(), relations_.end(), relation_key_less);
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const auto& r = relations_[i];
    if (!arguments_.count(r.source)) throw Error(ErrorCode::UnknownArgument, "unknown relation source '" + r.source + "'");
    if (!arguments_.count(r.target)) throw Error(ErrorCode::UnknownArgument, "unknown relation target '" + r.target + "'");
    if (r.source == r.target) throw Error(ErrorCode::Cycle, "self relation on '" + r.source + "'");
    if (i > 0 && relations_[i - 1].source == r.source && relations_[i - 1].target == r.target) {
      throw Error(ErrorCode::DuplicateRelation, "duplicate relation " + r.source + " -> " + r.target);
    }
  }

  for (const auto& [key, sign] : preferences_.entries()) {
    if (!users_.count(key.first)) throw Error(ErrorCode::UnknownUser, "preference for unknown user '" + key.first + "'");
    if (!option_set.count(key.second)) {
      throw Error(ErrorCode::NotAnOption, "preference on '" + key.second + "', which is not an option");
    }
  }
}

bool Framework::is_option(const ArgumentId& id) const {
  return std::find(options_.begin(), options_.end(), id) != options_.end();
}

const Argument& Framework::at(const ArgumentId& id) const {
  auto it = arguments_.find(id);
  if (it == arguments_.end()) throw Error(ErrorCode::UnknownArgument, "unknown argument '" + id + "'");
  return it->second;
}

const Relation* Framework::find_relation(const ArgumentId& source, const ArgumentId& target) const {
  Relation probe{source, target, Polarity::Attack};
  auto it = std::lower_bound(relations_.begin(), relations_.end(), probe, relation_key_less);
  if (it != relations_.end() && it->source == source && it->target == target) return &*it;
  return nullptr;
}

std::vector<Argument> Framework::argument_list() const {
  std::vector<Argument> out;
  out.reserve(arguments_.size());
  for (const auto& [_, a] : arguments_) out.push_back(a);
  return out;
}

TotalProfile Framework::total_preferences() const { return extend(preferences_, options_, users_); }

bool ValidationReport::has_error(std::string_view code) const {
  return std::any_of(errors.begin(), errors.end(), [&](const auto& e) { return e.code == code; });
}

bool ValidationReport::has_warning(std::string_view code, std::string_view subject) const {
  return std::any_of(warnings.begin(), warnings.end(), [&](const auto& w) {
    return w.code == code && (subject.empty() || w.subject == subject);
  });
}

namespace {

std::map<ArgumentId, std::vector<const Relation*>> incoming_index(const Framework& f) {
  std::map<ArgumentId, std::vector<const Relation*>> in;
  for (const auto& r : f.relations()) in[r.target].push_back(&r);
  return in;
}

// Tarjan's strongly connected components; returns ids lying on some cycle.
std::set<ArgumentId> cyclic_arguments(const Framework& f) {
  std::map<ArgumentId, std::vector<ArgumentId>> out;
  for (const auto& r : f.relations()) out[r.source].push_back(r.target);

  std::map<ArgumentId, int> index, low;
  std::vector<ArgumentId> stack;
  std::set<ArgumentId> on_stack, cyclic;
  int counter = 0;

  std::function<void(const ArgumentId&)> connect = [&](const ArgumentId& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : out[v]) {
      if (!index.count(w)) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<ArgumentId> component;
      ArgumentId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        component.push_back(w);
      } while (w != v);
      if (component.size() > 1) cyclic.insert(component.begin(), component.end());
    }
  };
  for (const auto& [id, _] : f.arguments()) {
    if (!index.count(id)) connect(id);
  }
  return cyclic;
}

}  // namespace

ValidationReport validate_structure(const Framework& f) {
  ValidationReport report;
  for (const auto& r : f.relations()) {
    if (f.is_option(r.source)) {
      report.errors.push_back({"OPTION_HAS_OUTGOING", r.source + "->" + r.target,
                               "option '" + r.source + "' has an outgoing relation to '" + r.target + "'"});
    }
  }
  for (const auto& id : cyclic_arguments(f)) {
    report.errors.push_back({"CYCLE", id, "argument '" + id + "' has a path to itself"});
  }

  std::set<ArgumentId> reaching;
  for (const auto& o : f.options()) {
    auto up = ancestors(f, o);
    reaching.insert(up.begin(), up.end());
  }
  for (const auto& [id, a] : f.arguments()) {
    if (a.kind == ArgumentKind::Option || reaching.count(id)) continue;
    report.warnings.push_back({"NO_PATH_TO_OPTION", id, "argument '" + id + "' has no path to any option"});
  }
  return report;
}

std::set<ArgumentId> effective_active(const Framework& f, const std::map<ArgumentId, bool>& overrides) {
  for (const auto& [id, _] : overrides) {
    if (!f.contains(id)) throw Error(ErrorCode::UnknownArgument, "override names unknown argument '" + id + "'");
  }
  auto flag = [&](const Argument& a) {
    if (a.kind == ArgumentKind::Option) return true;
    auto it = overrides.find(a.id);
    return it != overrides.end() ? it->second : a.active;
  };

  // Least fixpoint: explicit flags first, then propagate along derived rules.
  std::set<ArgumentId> active;
  std::vector<const Argument*> derived;
  for (const auto& [id, a] : f.arguments()) {
    if (a.kind != ArgumentKind::Option && !a.derived_active_from.empty()) {
      derived.push_back(&a);
    } else if (flag(a)) {
      active.insert(id);
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto* a : derived) {
      if (active.count(a->id)) continue;
      for (const auto& s : a->derived_active_from) {
        if (active.count(s)) {
          active.insert(a->id);
          changed = true;
          break;
        }
      }
    }
  }
  return active;
}

Framework without_arguments(const Framework& f, const std::set<ArgumentId>& removed) {
  std::vector<Argument> args;
  for (const auto& [id, a] : f.arguments()) {
    if (removed.count(id)) continue;
    Argument copy = a;
    std::erase_if(copy.derived_active_from, [&](const ArgumentId& s) { return removed.count(s) != 0; });
    args.push_back(std::move(copy));
  }
  std::vector<Relation> rels;
  for (const auto& r : f.relations()) {
    if (!removed.count(r.source) && !removed.count(r.target)) rels.push_back(r);
  }
  std::vector<ArgumentId> options;
  for (const auto& o : f.options()) {
    if (!removed.count(o)) options.push_back(o);
  }
  PreferenceProfile prefs;
  for (const auto& [key, sign] : f.preferences().entries()) {
    if (!removed.count(key.second)) prefs.set(key.first, key.second, sign);
  }
  return Framework(std::move(args), std::move(rels), std::move(options), f.users(), std::move(prefs));
}

Framework active_subframework(const Framework& f, const std::map<ArgumentId, bool>& overrides) {
  const auto active = effective_active(f, overrides);
  std::set<ArgumentId> removed;
  for (const auto& [id, _] : f.arguments()) {
    if (!active.count(id)) removed.insert(id);
  }
  Framework pruned = without_arguments(f, removed);
  std::vector<Argument> args = pruned.argument_list();
  for (auto& a : args) a.active = true;
  return Framework(std::move(args), pruned.relations(), pruned.options(), pruned.users(), pruned.preferences());
}

ProCon pro_con(const Framework& f, const ArgumentId& option) {
  if (!f.is_option(option)) throw Error(ErrorCode::NotAnOption, "'" + option + "' is not an option");
  const auto in = incoming_index(f);
  // Breadth-first search over (argument, attack parity) along reversed edges.
  std::set<std::pair<ArgumentId, int>> seen;
  std::deque<std::pair<ArgumentId, int>> queue{{option, 0}};
  ProCon result;
  while (!queue.empty()) {
    auto [node, parity] = queue.front();
    queue.pop_front();
    auto it = in.find(node);
    if (it == in.end()) continue;
    for (const Relation* r : it->second) {
      int p = parity ^ (r->polarity == Polarity::Attack ? 1 : 0);
      if (!seen.insert({r->source, p}).second) continue;
      (p == 0 ? result.pro : result.con).insert(r->source);
      queue.emplace_back(r->source, p);
    }
  }
  return result;
}

std::set<ArgumentId> ancestors(const Framework& f, const ArgumentId& target) {
  const auto in = incoming_index(f);
  std::set<ArgumentId> seen;
  std::deque<ArgumentId> queue{target};
  while (!queue.empty()) {
    auto node = queue.front();
    queue.pop_front();
    auto it = in.find(node);
    if (it == in.end()) continue;
    for (const Relation* r : it->second) {
      if (seen.insert(r->source).second) queue.push_back(r->source);
    }
  }
  return seen;
}

bool ConsistencyReport::consistent() const {
  return std::all_of(per_option.begin(), per_option.end(), [](const auto& c) { return c.consistent; });
}

ConsistencyReport check_user_consistency(const Framework& f, const UserId& user) {
  if (!f.users().count(user)) throw Error(ErrorCode::UnknownUser, "unknown user '" + user + "'");
  const auto total = f.total_preferences();
  std::set<ArgumentId> owned;
  for (const auto& [id, a] : f.arguments()) {
    if (a.kind == ArgumentKind::User && a.owner == user) owned.insert(id);
  }
  ConsistencyReport report{user, {}};
  for (const auto& o : f.options()) {
    const auto pc = pro_con(f, o);
    OptionConsistency c;
    c.option = o;
    c.sign = total.sign(user, o);
    c.has_pro = std::any_of(owned.begin(), owned.end(), [&](const auto& a) { return pc.pro.count(a) != 0; });
    c.has_con = std::any_of(owned.begin(), owned.end(), [&](const auto& a) { return pc.con.count(a) != 0; });
    switch (c.sign) {
      case PreferenceSign::Positive: c.consistent = c.has_pro; break;
      case PreferenceSign::Negative: c.consistent = c.has_con; break;
      case PreferenceSign::Indifferent: c.consistent = c.has_pro == c.has_con; break;
    }
    report.per_option.push_back(c);
  }
  return report;
}

}  // namespace gradarg
