#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "predreg/dgp.hpp"
#include "predreg/estimate.hpp"
#include "predreg/montecarlo.hpp"

namespace predreg {

// JSON schema mapping. Readers throw Errc::Config with the JSON path of the
// offending field, e.g. "$.dgp.sigma_u: missing required field".

PersistenceRule rule_from_json(const nlohmann::json& j, const std::string& path = "$");
nlohmann::json to_json(const PersistenceRule& rule);

InnovationLaw law_from_json(const nlohmann::json& j, const std::string& path = "$");
nlohmann::json to_json(const InnovationLaw& law);

RegressionFunction function_from_json(const nlohmann::json& j, const std::string& path = "$");
nlohmann::json to_json(const RegressionFunction& m);

BandwidthRule bandwidth_from_json(const nlohmann::json& j, const std::string& path = "$");
nlohmann::json to_json(const BandwidthRule& rule);

//! The `n` field is optional here (experiments take n from n_grid).
DgpSpec dgp_from_json(const nlohmann::json& j, const std::string& path = "$");
nlohmann::json to_json(const DgpSpec& spec);

ExperimentConfig experiment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

//! FNV-1a digest of the canonical JSON form (workers excluded).
std::uint64_t experiment_digest(const ExperimentConfig& config);

}  // namespace predreg
