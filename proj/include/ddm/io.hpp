#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "ddm/baselines.hpp"
#include "ddm/mdp.hpp"

namespace ddm {

// Policy artifact: {"states", "actions", "pi", "v_star", "reach_probability"}.
nlohmann::json policy_to_json(const Mdp& mdp, const StationaryPolicy& policy,
                              double v_star, double reach_probability);

struct LoadedPolicy {
    StationaryPolicy policy;
    double v_star = 0.0;
    double reach_probability = 0.0;
};
LoadedPolicy policy_from_json(const Mdp& mdp, const nlohmann::json& j);

nlohmann::json trajectory_to_json(const Mdp& mdp, const Trajectory& trajectory,
                                  std::uint64_t seed);
nlohmann::json baseline_to_json(const Mdp& mdp, const BaselineTrajectory& trajectory);

// Reads the shared trajectory schema; actions are optional (baseline
// trajectories are plain state sequences).
std::vector<StateId> trajectory_states_from_json(const Mdp& mdp, const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path, const std::string& module);
void write_text_file(const std::string& path, const std::string& content,
                     const std::string& module);

}  // namespace ddm
