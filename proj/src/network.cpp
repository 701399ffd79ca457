#include "ddm/network.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ddm/errors.hpp"

namespace ddm {

namespace {
constexpr const char* kModule = "product-mdp";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

std::vector<TravelEdge> read_edge_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(kModule, "FileNotFound", "cannot open network file '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        fail(kModule, "InvalidNetwork", "network CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "from,to,mean_speed_mps,var_speed,length_m")
        fail(kModule, "InvalidNetwork", "unexpected CSV header '" + line + "'");

    std::vector<TravelEdge> edges;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 5)
            fail(kModule, "InvalidNetwork",
                 "line " + std::to_string(line_no) + " has " +
                     std::to_string(fields.size()) + " fields");
        TravelEdge e;
        e.from = fields[0];
        e.to = fields[1];
        try {
            e.mean_speed = std::stod(fields[2]);
            e.var_speed = std::stod(fields[3]);
            e.length = std::stod(fields[4]);
        } catch (const std::exception&) {
            fail(kModule, "InvalidNetwork",
                 "line " + std::to_string(line_no) + " has a malformed number");
        }
        edges.push_back(std::move(e));
    }
    if (edges.empty()) fail(kModule, "InvalidNetwork", "network has no edges");
    return edges;
}

std::string NetworkGoals::sidecar_path(const std::string& csv_path) {
    auto dot = csv_path.find_last_of('.');
    std::string stem = dot == std::string::npos ? csv_path : csv_path.substr(0, dot);
    return stem + ".goals.json";
}

NetworkGoals NetworkGoals::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(kModule, "FileNotFound", "cannot open goal manifest '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(kModule, "InvalidNetwork", std::string("goal manifest parse error: ") + e.what());
    }
    NetworkGoals g;
    g.start = j.at("start").get<std::string>();
    for (const auto& goal : j.at("goals")) g.goals.push_back(goal.get<std::string>());
    g.true_goal = j.at("true_goal").get<std::string>();
    return g;
}

TravelNetwork build_network(const std::vector<TravelEdge>& edges, const NetworkGoals& goals) {
    std::set<std::string> node_set;
    std::set<std::pair<std::string, std::string>> seen_pairs;
    for (const auto& e : edges) {
        node_set.insert(e.from);
        node_set.insert(e.to);
        if (!seen_pairs.insert({e.from, e.to}).second)
            fail(kModule, "InvalidNetwork",
                 "duplicate directed edge " + e.from + "->" + e.to);
    }
    std::set<std::string> goal_set(goals.goals.begin(), goals.goals.end());

    std::map<std::string, std::vector<const TravelEdge*>> outgoing;
    for (const auto& e : edges) outgoing[e.from].push_back(&e);
    for (auto& [node, out] : outgoing)
        std::sort(out.begin(), out.end(),
                  [](const TravelEdge* a, const TravelEdge* b) { return a->to < b->to; });

    size_t max_degree = 1;
    for (const auto& [node, out] : outgoing)
        if (!goal_set.count(node)) max_degree = std::max(max_degree, out.size());

    MdpDescription desc;
    desc.states.assign(node_set.begin(), node_set.end());
    for (size_t i = 0; i < max_degree; ++i) desc.actions.push_back("e" + std::to_string(i));
    desc.initial_state = goals.start;
    desc.goals = goals.goals;
    desc.true_goal = goals.true_goal;

    for (const auto& node : desc.states) {
        bool absorbing = goal_set.count(node) > 0;
        const auto it = outgoing.find(node);
        const bool has_edges = it != outgoing.end() && !it->second.empty();
        for (size_t a = 0; a < max_degree; ++a) {
            std::string action = desc.actions[a];
            if (absorbing || !has_edges) {
                desc.transitions.push_back({node, action, node, 1.0});
                continue;
            }
            const auto& out = it->second;
            const TravelEdge* edge = a < out.size() ? out[a] : out.front();
            desc.transitions.push_back({node, action, edge->to, 1.0});
        }
    }

    TravelNetwork network;
    network.base = validate_mdp(desc);
    network.edges = edges;
    for (const auto& e : edges) {
        StateId u = network.base.state_index(e.from);
        StateId v = network.base.state_index(e.to);
        network.edge_by_pair[{u, v}] = e;
    }
    return network;
}

TravelNetwork load_network(const std::string& csv_path) {
    auto edges = read_edge_csv(csv_path);
    auto goals = NetworkGoals::from_file(NetworkGoals::sidecar_path(csv_path));
    return build_network(edges, goals);
}

std::map<std::pair<StateId, StateId>, BucketedDistribution> TravelNetwork::discretize(
    int t_max_minutes) const {
    std::map<std::pair<StateId, StateId>, BucketedDistribution> dists;
    for (const auto& [pair, edge] : edge_by_pair)
        dists[pair] = discretize_travel_time(edge, t_max_minutes);
    return dists;
}

}  // namespace ddm
