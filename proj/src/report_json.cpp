#include "playstyle/report_json.hpp"

namespace playstyle {

nlohmann::json report_to_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["measure"] = report.measure_name;
  j["value"] = report.value;
  if (report.dbar) j["dbar"] = *report.dbar;
  j["intersection_states"] = report.intersection_states;
  j["union_states"] = report.union_states;
  nlohmann::json encoders = nlohmann::json::object();
  for (const auto& [id, stats] : report.per_encoder) {
    nlohmann::json e;
    e["states_a"] = stats.states_a;
    e["states_b"] = stats.states_b;
    e["intersection_states"] = stats.intersection_states;
    e["union_states"] = stats.union_states;
    e["comparable_states"] = stats.comparable_states;
    if (!stats.per_state.empty()) {
      nlohmann::json per_state = nlohmann::json::object();
      for (const auto& [code_hex, value] : stats.per_state) per_state[code_hex] = value;
      e["per_state"] = std::move(per_state);
    }
    encoders[id] = std::move(e);
  }
  j["per_encoder"] = std::move(encoders);
  return j;
}

}  // namespace playstyle
