#include "gradarg/json_io.hpp"

#include "gradarg/dynamics.hpp"

namespace gradarg {

using nlohmann::json;

json to_json(const Framework& f) {
  json args = json::array();
  for (const auto& [id, a] : f.arguments()) args.push_back(to_json(a));
  json rels = json::array();
  for (const auto& r : f.relations()) rels.push_back(to_json(r));
  json prefs = json::array();
  for (const auto& [key, sign] : f.preferences().entries()) {
    prefs.push_back({{"user", key.first}, {"option", key.second}, {"sign", std::string(1, to_char(sign))}});
  }
  return json{{"arguments", std::move(args)},
              {"relations", std::move(rels)},
              {"options", f.options()},
              {"users", f.users()},
              {"preferences", std::move(prefs)}};
}

json to_json(const StrengthMap& s) {
  return json{{"values", s.values}, {"iterations", s.iterations}, {"converged", s.converged}};
}

json to_json(const Decision& d) {
  json j{{"selected", d.selected ? json(*d.selected) : json(nullptr)},
         {"branch", std::string(to_string(d.branch))},
         {"eligible", d.eligible},
         {"candidate_set", d.candidate_set},
         {"strengths", d.strengths.values},
         {"tie", d.tie},
         {"rounds", d.rounds},
         {"resolved", d.resolved},
         {"status", std::string(to_string(d.status))},
         {"fallback", d.fallback}};
  if (d.fallback) j["fallback_code"] = "MAX_ROUNDS_EXCEEDED";
  return j;
}

json to_json(const AttributionTable& t) {
  json entries = json::array();
  for (const auto& e : t.entries) {
    entries.push_back({{"polarity", std::string(to_string(e.relation.polarity))},
                       {"source", e.relation.source},
                       {"target", e.relation.target},
                       {"contribution", e.contribution},
                       {"stderr", e.stderr_}});
  }
  json j{{"options", t.options},
         {"entries", std::move(entries)},
         {"strength", t.strength},
         {"base", t.base},
         {"method", std::string(to_string(t.method))}};
  if (t.method == AttributionMethod::PermutationSampling) {
    j["samples"] = t.samples;
    j["seed"] = t.seed;
  }
  return j;
}

json to_json(const ValidationReport& r) {
  auto issues = [](const std::vector<ValidationIssue>& list) {
    json a = json::array();
    for (const auto& i : list) a.push_back({{"code", i.code}, {"subject", i.subject}, {"message", i.message}});
    return a;
  };
  return json{{"valid", r.valid()}, {"errors", issues(r.errors)}, {"warnings", issues(r.warnings)}};
}

json to_json(const ConflictClass& c) {
  json labels = json::array();
  for (auto l : c.labels) labels.push_back(std::string(to_string(l)));
  return json{{"labels", std::move(labels)}, {"overall", c.overall == Overall::Conflict ? "conflict" : "no_conflict"}};
}

}  // namespace gradarg
