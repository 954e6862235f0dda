#pragma once

#include "gradarg/preferences.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace gradarg {

using ArgumentId = std::string;

enum class ArgumentKind { Option, User, Task };
enum class Polarity { Attack, Support };

std::string_view to_string(ArgumentKind kind) noexcept;
std::string_view to_string(Polarity polarity) noexcept;

/// Ids are `[A-Za-z][A-Za-z0-9_]*` once the negation sign has been rewritten.
bool is_valid_id(std::string_view id) noexcept;
/// Rewrites every "¬" as "not_", so "¬R" and "not_R" name the same argument.
std::string normalize_id(std::string_view raw);

struct Argument {
  ArgumentId id;
  std::string label;
  ArgumentKind kind = ArgumentKind::Task;
  std::optional<UserId> owner;
  double base_score = 0.5;
  bool active = false;
  /// Derived activation: when non-empty the argument is active iff at least
  /// one listed argument is active, regardless of its own flag.
  std::vector<ArgumentId> derived_active_from;

  bool operator==(const Argument&) const = default;
};

struct Relation {
  ArgumentId source;
  ArgumentId target;
  Polarity polarity = Polarity::Attack;

  bool operator==(const Relation&) const = default;
};

/// Orders relations by (source, target); polarity is not part of the key.
bool relation_key_less(const Relation& a, const Relation& b) noexcept;

/// A MUP-QBAF: arguments with base scores, polarized relations, options,
/// users, and their (partial) preferences. Immutable once constructed.
class Framework {
public:
  Framework() = default;

  /// Checks referential integrity: unique ids, relation endpoints exist,
  /// (source, target) unique, no self relation, base scores in [0,1],
  /// options are exactly the Option-kind arguments, owners are users,
  /// preference entries name users and options. Throws Error on violation.
  /// Structural (path/cycle) conditions are left to validate_structure().
  Framework(std::vector<Argument> arguments, std::vector<Relation> relations, std::vector<ArgumentId> options,
            std::set<UserId> users, PreferenceProfile preferences);

  const std::map<ArgumentId, Argument>& arguments() const noexcept { return arguments_; }
  /// Sorted by (source, target).
  const std::vector<Relation>& relations() const noexcept { return relations_; }
  /// Declaration order.
  const std::vector<ArgumentId>& options() const noexcept { return options_; }
  const std::set<UserId>& users() const noexcept { return users_; }
  const PreferenceProfile& preferences() const noexcept { return preferences_; }

  bool contains(const ArgumentId& id) const { return arguments_.count(id) != 0; }
  bool is_option(const ArgumentId& id) const;
  /// Throws Error(UnknownArgument).
  const Argument& at(const ArgumentId& id) const;
  const Relation* find_relation(const ArgumentId& source, const ArgumentId& target) const;

  std::vector<Argument> argument_list() const;
  TotalProfile total_preferences() const;

  bool operator==(const Framework&) const = default;

private:
  std::map<ArgumentId, Argument> arguments_;
  std::vector<Relation> relations_;
  std::vector<ArgumentId> options_;
  std::set<UserId> users_;
  PreferenceProfile preferences_;
};

struct ValidationIssue {
  std::string code;
  std::string subject;
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;

  bool valid() const noexcept { return errors.empty(); }
  bool has_error(std::string_view code) const;
  bool has_warning(std::string_view code, std::string_view subject = {}) const;
};

/// Structural conditions on the whole framework (active or not): options have
/// no outgoing relations, no argument reaches itself (errors); every
/// non-option reaches some option (warning NO_PATH_TO_OPTION otherwise).
ValidationReport validate_structure(const Framework& framework);

/// Effective activation after applying overrides and the derived-activation
/// rule. Options are always active. Throws Error(UnknownArgument) for unknown keys.
std::set<ArgumentId> effective_active(const Framework& framework, const std::map<ArgumentId, bool>& overrides = {});

/// The framework induced by the effectively active arguments. Relations with an
/// inactive endpoint are dropped; kept arguments have active=true.
Framework active_subframework(const Framework& framework, const std::map<ArgumentId, bool>& overrides = {});

/// Drops the given arguments together with their incident relations.
/// Derived-activation lists and preference entries are pruned accordingly.
Framework without_arguments(const Framework& framework, const std::set<ArgumentId>& removed);

struct ProCon {
  std::set<ArgumentId> pro;
  std::set<ArgumentId> con;
};

/// pro: arguments with a path to the option crossing an even number of
/// attacks; con: odd. Throws Error(NotAnOption).
ProCon pro_con(const Framework& framework, const ArgumentId& option);

/// Arguments with at least one path to `target`.
std::set<ArgumentId> ancestors(const Framework& framework, const ArgumentId& target);

struct OptionConsistency {
  OptionId option;
  PreferenceSign sign = PreferenceSign::Indifferent;
  bool has_pro = false;
  bool has_con = false;
  bool consistent = false;
};

struct ConsistencyReport {
  UserId user;
  std::vector<OptionConsistency> per_option;

  bool consistent() const;
};

/// Consistency of a user's owned arguments with their (extended) preferences.
/// Throws Error(UnknownUser).
ConsistencyReport check_user_consistency(const Framework& framework, const UserId& user);

}  // namespace gradarg
