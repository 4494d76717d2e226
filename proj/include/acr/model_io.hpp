#pragma once

// JSON form of a TransitionModel:
//
//   {"direction": "maximize" | "minimize", "f_opt": number,
//    "states": [{"label": string, "fitness": number}, ...],
//    "Q": [[number, ...], ...], "B": [number, ...]}
//
// Numbers are written with 17 significant digits, so doubles round-trip exactly.

#include <filesystem>
#include <string>
#include <string_view>

#include "acr/chain_model.hpp"

namespace acr {

std::string model_to_json(const TransitionModel& model);
/// Throws ConfigError on malformed documents. Does not validate probabilities.
TransitionModel model_from_json(std::string_view text);

void save_model(const std::filesystem::path& path, const TransitionModel& model);
TransitionModel load_model(const std::filesystem::path& path);

}  // namespace acr
