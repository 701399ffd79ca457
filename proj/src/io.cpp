#include "ddm/io.hpp"

#include <fstream>

#include "ddm/errors.hpp"
#include "ddm/serialize.hpp"

namespace ddm {

nlohmann::json policy_to_json(const Mdp& mdp, const StationaryPolicy& policy,
                              double v_star, double reach_probability) {
    nlohmann::json j;
    j["states"] = mdp.state_names();
    j["actions"] = mdp.action_names();
    nlohmann::json pi = nlohmann::json::object();
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        nlohmann::json row = nlohmann::json::object();
        for (ActionId a = 0; a < mdp.num_actions(); ++a)
            row[mdp.action_name(a)] = round_artifact(policy.prob(s, a));
        pi[mdp.state_name(s)] = std::move(row);
    }
    j["pi"] = std::move(pi);
    j["v_star"] = round_artifact(v_star);
    j["reach_probability"] = round_artifact(reach_probability);
    return j;
}

LoadedPolicy policy_from_json(const Mdp& mdp, const nlohmann::json& j) {
    LoadedPolicy loaded;
    loaded.policy = StationaryPolicy(mdp.num_states(), mdp.num_actions());
    const auto& pi = j.at("pi");
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        const auto it = pi.find(mdp.state_name(s));
        if (it == pi.end())
            fail("cli", "InvalidPolicyFile",
                 "policy has no row for state '" + mdp.state_name(s) + "'");
        for (ActionId a = 0; a < mdp.num_actions(); ++a)
            loaded.policy.set_prob(s, a, it->value(mdp.action_name(a), 0.0));
    }
    loaded.v_star = j.value("v_star", 0.0);
    loaded.reach_probability = j.value("reach_probability", 0.0);
    return loaded;
}

nlohmann::json trajectory_to_json(const Mdp& mdp, const Trajectory& trajectory,
                                  std::uint64_t seed) {
    nlohmann::json j;
    nlohmann::json states = nlohmann::json::array();
    for (StateId s : trajectory.states) states.push_back(mdp.state_name(s));
    nlohmann::json actions = nlohmann::json::array();
    for (ActionId a : trajectory.actions) actions.push_back(mdp.action_name(a));
    j["states"] = std::move(states);
    j["actions"] = std::move(actions);
    j["length"] = trajectory.length();
    j["max_steps_exceeded"] = trajectory.max_steps_exceeded;
    j["seed"] = seed;
    return j;
}

nlohmann::json baseline_to_json(const Mdp& mdp, const BaselineTrajectory& trajectory) {
    nlohmann::json j;
    nlohmann::json states = nlohmann::json::array();
    for (StateId s : trajectory.states) states.push_back(mdp.state_name(s));
    j["states"] = std::move(states);
    j["actions"] = nlohmann::json::array();
    j["length"] = trajectory.length();
    j["max_steps_exceeded"] = false;
    j["generator"] =
        trajectory.generator == BaselineTrajectory::Generator::kShortest ? "shortest" : "dpp";
    if (trajectory.decoy_used)
        j["decoy_used"] = mdp.state_name(*trajectory.decoy_used);
    return j;
}

std::vector<StateId> trajectory_states_from_json(const Mdp& mdp, const nlohmann::json& j) {
    std::vector<StateId> states;
    for (const auto& name : j.at("states"))
        states.push_back(mdp.state_index(name.get<std::string>()));
    return states;
}

nlohmann::json load_json_file(const std::string& path, const std::string& module) {
    std::ifstream in(path);
    if (!in) fail(module, "FileNotFound", "cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(module, "InvalidJson", "parse error in '" + path + "': " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& content,
                     const std::string& module) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(module, "FileNotFound", "cannot write '" + path + "'");
    out << content;
    if (!out) fail(module, "WriteFailed", "failed while writing '" + path + "'");
}

}  // namespace ddm
