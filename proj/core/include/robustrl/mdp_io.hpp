#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "robustrl/mdp.hpp"

namespace robustrl {

/// Document keys: n_states, n_actions, discount, kernel ([s][a][s']),
/// reward ([s][a]), initial_dist. Doubles are written in shortest
/// round-trip form, so load(save(m)) reproduces every bit.
nlohmann::json mdp_to_json(const TabularMDP& mdp);
TabularMDP mdp_from_json(const nlohmann::json& doc);

nlohmann::json kernel_to_json(int n_states, int n_actions,
                              const std::vector<double>& kernel);
std::vector<double> kernel_from_json(const nlohmann::json& doc, int n_states,
                                     int n_actions);

void save_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace robustrl
