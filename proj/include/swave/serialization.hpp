#pragma once

#include <json.hpp>

#include "swave/regularization.hpp"

namespace swave {

nlohmann::json to_json(const SmoothFunction& f);
SmoothFunction smooth_from_json(const nlohmann::json& j);

/// {"kind": "smooth"|"delta"|"delta_power"|"sum", ...}
nlohmann::json to_json(const CoefficientSpec& spec);
CoefficientSpec spec_from_json(const nlohmann::json& j, bool default_nonneg = false);

/// JSON number for finite values, "+inf"/"-inf" strings otherwise.
nlohmann::json number_or_sentinel(double x);

}  // namespace swave
