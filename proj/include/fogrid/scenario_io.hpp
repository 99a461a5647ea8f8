#pragma once

#include "fogrid/sim_engine.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace fogrid {

// "paper": three irradiance/temperature steps over 1 s with the default
// conduction losses. "ideal-stc": one lossless 0.5 s case at STC.
std::vector<std::string> builtin_scenario_names();
bool is_builtin_scenario(std::string_view name);
Scenario builtin_scenario(std::string_view name);

// JSON scenario text. Missing keys keep the "paper" values, so "{}" parses
// to the builtin "paper" scenario. Unknown keys and type mismatches raise
// ParseError with the 1-based line and the dotted field path; invariant
// violations raise ConfigError.
Scenario parse_scenario(std::string_view text);

// Builtin name or path to a JSON file.
Scenario load_scenario(const std::string& path_or_builtin);

std::string serialize_scenario(const Scenario& sc);

const char* mode_name(ControllerMode m) noexcept;
const char* fidelity_name(Fidelity f) noexcept;

} // namespace fogrid
