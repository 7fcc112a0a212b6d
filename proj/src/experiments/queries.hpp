#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace pcrlab::experiments {

// Limit coefficients for an atomic bulk law and a set of spikes.
// Input errors surface as ErrorCode::ConfigError.
nlohmann::json limits_json(const nlohmann::json& query);

// Columns h,t,upsilon of the asymptotic out-regression power curve.
std::string power_csv(const nlohmann::json& query, const std::vector<double>& h_grid);

}  // namespace pcrlab::experiments
