#pragma once

#include <json.hpp>

#include "playstyle/measures.hpp"

namespace playstyle {

/// JSON document for a comparison report: measure name, value, scaling
/// constant, per-encoder intersection/union bookkeeping, and (when present)
/// the per-state values keyed by hex-encoded state code.
nlohmann::json report_to_json(const ComparisonReport& report);

}  // namespace playstyle
