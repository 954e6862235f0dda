#include "gradarg/preferences.hpp"

#include "gradarg/error.hpp"

#include <algorithm>

namespace gradarg {

char to_char(PreferenceSign sign) noexcept {
  switch (sign) {
    case PreferenceSign::Positive: return '+';
    case PreferenceSign::Negative: return '-';
    case PreferenceSign::Indifferent: return '0';
  }
  return '?';
}

PreferenceSign parse_sign(std::string_view text) {
  if (text == "+") return PreferenceSign::Positive;
  if (text == "-") return PreferenceSign::Negative;
  if (text == "0") return PreferenceSign::Indifferent;
  throw Error(ErrorCode::Syntax, "preference sign must be one of + - 0, got '" + std::string(text) + "'");
}

PreferenceProfile::PreferenceProfile(const std::vector<PreferenceEntry>& entries) {
  for (const auto& e : entries) add(e.user, e.option, e.sign);
}

void PreferenceProfile::add(const UserId& user, const OptionId& option, PreferenceSign sign) {
  auto [it, inserted] = entries_.emplace(Key{user, option}, sign);
  if (!inserted && it->second != sign) {
    throw Error(ErrorCode::ConflictingSign,
                "user '" + user + "' has two different signs for option '" + option + "'");
  }
}

void PreferenceProfile::set(const UserId& user, const OptionId& option, PreferenceSign sign) {
  entries_[Key{user, option}] = sign;
}

PreferenceSign TotalProfile::sign(const UserId& user, const OptionId& option) const {
  auto u = signs.find(user);
  if (u == signs.end()) throw Error(ErrorCode::UnknownUser, "unknown user '" + user + "'");
  auto o = u->second.find(option);
  if (o == u->second.end()) throw Error(ErrorCode::NotAnOption, "unknown option '" + option + "'");
  return o->second;
}

TotalProfile extend(const PreferenceProfile& profile, const std::vector<OptionId>& options,
                    const std::set<UserId>& users) {
  TotalProfile total;
  total.options = options;
  for (const auto& user : users) {
    auto& row = total.signs[user];
    for (const auto& option : options) {
      auto it = profile.entries().find({user, option});
      row[option] = it == profile.entries().end() ? PreferenceSign::Indifferent : it->second;
    }
  }
  return total;
}

TotalProfile extend(const std::vector<PreferenceEntry>& entries, const std::vector<OptionId>& options,
                    const std::set<UserId>& users) {
  return extend(PreferenceProfile(entries), options, users);
}

std::string_view to_string(ConflictLabel label) noexcept {
  switch (label) {
    case ConflictLabel::NC1: return "NC1";
    case ConflictLabel::NC2: return "NC2";
    case ConflictLabel::NC3: return "NC3";
    case ConflictLabel::C1: return "C1";
    case ConflictLabel::C2: return "C2";
    case ConflictLabel::C3: return "C3";
  }
  return "?";
}

namespace {

bool has(const TotalProfile& p, const UserId& u, const OptionId& o, PreferenceSign s) {
  return p.signs.at(u).at(o) == s;
}

std::vector<UserId> user_list(const TotalProfile& p) {
  std::vector<UserId> users;
  users.reserve(p.signs.size());
  for (const auto& [u, _] : p.signs) users.push_back(u);
  return users;
}

// C2 and C3 share a shape; only the sign differs.
bool crossed_sign(const TotalProfile& p, PreferenceSign s) {
  const auto users = user_list(p);
  for (const auto& i : users) {
    for (const auto& j : users) {
      if (i == j) continue;
      for (const auto& o : p.options) {
        for (const auto& o2 : p.options) {
          if (o == o2) continue;
          if (has(p, i, o, s) && has(p, j, o2, s) && !has(p, j, o, s) && !has(p, i, o2, s)) return true;
        }
      }
    }
  }
  return false;
}

// Body of NC2 for a fixed option o and subset U' (given as a membership mask).
bool nc2_holds_for(const TotalProfile& p, const std::vector<UserId>& users, const OptionId& o,
                   const std::vector<bool>& in_subset) {
  using S = PreferenceSign;
  for (std::size_t a = 0; a < users.size(); ++a) {
    if (!in_subset[a]) continue;
    const auto& i = users[a];
    if (!has(p, i, o, S::Positive)) return false;
    for (const auto& o2 : p.options) {
      if (o2 == o) continue;
      if (has(p, i, o2, S::Positive)) return false;
      for (std::size_t b = 0; b < users.size(); ++b) {
        if (in_subset[b]) continue;
        const auto& j = users[b];
        if (!has(p, j, o, S::Indifferent) || has(p, j, o2, S::Positive)) return false;
      }
    }
  }
  return true;
}

constexpr std::size_t kMaxSubsetSearchUsers = 16;

}  // namespace

bool satisfies_nc1(const TotalProfile& p) {
  if (p.signs.empty()) return true;
  const auto& first = p.signs.begin()->second;
  return std::all_of(p.signs.begin(), p.signs.end(), [&](const auto& kv) { return kv.second == first; });
}

bool satisfies_nc2_search(const TotalProfile& p) {
  const auto users = user_list(p);
  if (users.size() > kMaxSubsetSearchUsers) return satisfies_nc2_closed_form(p);
  const std::size_t n = users.size();
  for (const auto& o : p.options) {
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
      std::vector<bool> in_subset(n);
      for (std::size_t b = 0; b < n; ++b) in_subset[b] = (mask >> b) & 1U;
      if (nc2_holds_for(p, users, o, in_subset)) return true;
    }
  }
  return false;
}

bool satisfies_nc2_closed_form(const TotalProfile& p) {
  using S = PreferenceSign;
  for (const auto& o : p.options) {
    std::size_t preferring = 0;
    for (const auto& [u, row] : p.signs) {
      if (row.at(o) == S::Positive) ++preferring;
    }
    if (preferring == 0) continue;
    // With a single option there is no o' and every clause past the first is vacuous.
    if (p.options.size() == 1) return true;
    bool ok = true;
    for (const auto& [u, row] : p.signs) {
      for (const auto& o2 : p.options) {
        if (o2 != o && row.at(o2) == S::Positive) ok = false;
      }
      if (row.at(o) == S::Negative) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

bool satisfies_nc3(const TotalProfile& p) {
  using S = PreferenceSign;
  for (const auto& [u, row] : p.signs) {
    bool any_positive = false;
    bool any_indifferent = false;
    for (const auto& [o, s] : row) {
      any_positive |= s == S::Positive;
      any_indifferent |= s == S::Indifferent;
    }
    if (any_positive || !any_indifferent) return false;
  }
  return true;
}

bool satisfies_c1(const TotalProfile& p) {
  using S = PreferenceSign;
  for (const auto& o : p.options) {
    for (const auto& [i, ri] : p.signs) {
      if (ri.at(o) != S::Positive) continue;
      for (const auto& [j, rj] : p.signs) {
        if (i != j && rj.at(o) == S::Negative) return true;
      }
    }
  }
  return false;
}

bool satisfies_c2(const TotalProfile& p) { return crossed_sign(p, PreferenceSign::Positive); }
bool satisfies_c3(const TotalProfile& p) { return crossed_sign(p, PreferenceSign::Negative); }

ConflictClass classify(const TotalProfile& p) {
  ConflictClass result;
  if (satisfies_nc1(p)) result.labels.insert(ConflictLabel::NC1);
  if (satisfies_nc2_search(p)) result.labels.insert(ConflictLabel::NC2);
  if (satisfies_nc3(p)) result.labels.insert(ConflictLabel::NC3);
  if (satisfies_c1(p)) result.labels.insert(ConflictLabel::C1);
  if (satisfies_c2(p)) result.labels.insert(ConflictLabel::C2);
  if (satisfies_c3(p)) result.labels.insert(ConflictLabel::C3);
  const bool conflict = result.has(ConflictLabel::C1) || result.has(ConflictLabel::C2) ||
                        result.has(ConflictLabel::C3);
  result.overall = conflict ? Overall::Conflict : Overall::NoConflict;
  return result;
}

PreferenceSets preference_sets(const TotalProfile& p) {
  PreferenceSets sets;
  for (const auto& [u, row] : p.signs) {
    for (const auto& [o, s] : row) {
      switch (s) {
        case PreferenceSign::Positive: sets.positive.insert(o); break;
        case PreferenceSign::Indifferent: sets.indifferent.insert(o); break;
        case PreferenceSign::Negative: sets.negative.insert(o); break;
      }
    }
  }
  return sets;
}

}  // namespace gradarg
