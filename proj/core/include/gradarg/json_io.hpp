#pragma once

#include "gradarg/analysis.hpp"
#include "gradarg/model.hpp"
#include "gradarg/resolver.hpp"
#include "gradarg/semantics.hpp"

#include <nlohmann/json.hpp>

namespace gradarg {

nlohmann::json to_json(const Framework& framework);
nlohmann::json to_json(const StrengthMap& strengths);
nlohmann::json to_json(const Decision& decision);
nlohmann::json to_json(const AttributionTable& table);
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const ConflictClass& cls);

}  // namespace gradarg
