#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gradarg {

using UserId = std::string;
using OptionId = std::string;

enum class PreferenceSign { Positive, Negative, Indifferent };

char to_char(PreferenceSign sign) noexcept;
/// Accepts '+', '-' and '0'; throws Error(Syntax) otherwise.
PreferenceSign parse_sign(std::string_view text);

struct PreferenceEntry {
  UserId user;
  OptionId option;
  PreferenceSign sign;

  bool operator==(const PreferenceEntry&) const = default;
};

/// The partial preference map: at most one sign per (user, option).
class PreferenceProfile {
public:
  using Key = std::pair<UserId, OptionId>;

  PreferenceProfile() = default;
  /// Throws Error(ConflictingSign) if a pair is mapped to two different signs.
  explicit PreferenceProfile(const std::vector<PreferenceEntry>& entries);

  /// Inserts or confirms an entry. Conflicting re-assignment throws.
  void add(const UserId& user, const OptionId& option, PreferenceSign sign);
  /// Unconditional assignment, used by preference edits.
  void set(const UserId& user, const OptionId& option, PreferenceSign sign);

  const std::map<Key, PreferenceSign>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  bool operator==(const PreferenceProfile&) const = default;

private:
  std::map<Key, PreferenceSign> entries_;
};

/// p-hat: one sign for every (user, option).
struct TotalProfile {
  std::vector<OptionId> options;
  std::map<UserId, std::map<OptionId, PreferenceSign>> signs;

  PreferenceSign sign(const UserId& user, const OptionId& option) const;
  bool operator==(const TotalProfile&) const = default;
};

TotalProfile extend(const PreferenceProfile& profile, const std::vector<OptionId>& options,
                    const std::set<UserId>& users);
/// Entry-list overload; reports CONFLICTING_SIGN for doubly-mapped pairs.
TotalProfile extend(const std::vector<PreferenceEntry>& entries, const std::vector<OptionId>& options,
                    const std::set<UserId>& users);

enum class ConflictLabel { NC1, NC2, NC3, C1, C2, C3 };
std::string_view to_string(ConflictLabel label) noexcept;

enum class Overall { NoConflict, Conflict };

struct ConflictClass {
  std::set<ConflictLabel> labels;
  Overall overall = Overall::NoConflict;

  bool has(ConflictLabel label) const { return labels.count(label) != 0; }
  bool operator==(const ConflictClass&) const = default;
};

/// Evaluates all six conditions. The label set is empty for profiles that
/// none of the conditions describe (e.g. both users prefer r, one also prefers not_r).
ConflictClass classify(const TotalProfile& profile);

bool satisfies_nc1(const TotalProfile& profile);
/// NC2 read literally: existential search over subsets U' of the users.
bool satisfies_nc2_search(const TotalProfile& profile);
/// Closed form of NC2; equivalent to the subset search.
bool satisfies_nc2_closed_form(const TotalProfile& profile);
bool satisfies_nc3(const TotalProfile& profile);
bool satisfies_c1(const TotalProfile& profile);
bool satisfies_c2(const TotalProfile& profile);
bool satisfies_c3(const TotalProfile& profile);

struct PreferenceSets {
  std::set<OptionId> positive;
  std::set<OptionId> indifferent;
  std::set<OptionId> negative;
};

PreferenceSets preference_sets(const TotalProfile& profile);

}  // namespace gradarg
