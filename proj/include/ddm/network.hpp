#pragma once

#include <map>
#include <string>
#include <vector>

#include "ddm/mdp.hpp"
#include "ddm/product.hpp"

namespace ddm {

// Travel network loaded from CSV (header from,to,mean_speed_mps,var_speed,
// length_m) plus a goal manifest. Node actions are "e0", "e1", ... mapped to
// outgoing edges sorted by target name; unused action slots alias the first
// edge so the action set stays uniform.
struct TravelNetwork {
    Mdp base;
    std::vector<TravelEdge> edges;
    std::map<std::pair<StateId, StateId>, TravelEdge> edge_by_pair;

    std::map<std::pair<StateId, StateId>, BucketedDistribution> discretize(
        int t_max_minutes) const;
};

std::vector<TravelEdge> read_edge_csv(const std::string& path);

struct NetworkGoals {
    std::string start;
    std::vector<std::string> goals;
    std::string true_goal;

    // Sidecar manifest "<stem>.goals.json" next to the edge CSV.
    static NetworkGoals from_file(const std::string& path);
    static std::string sidecar_path(const std::string& csv_path);
};

TravelNetwork build_network(const std::vector<TravelEdge>& edges, const NetworkGoals& goals);
TravelNetwork load_network(const std::string& csv_path);

}  // namespace ddm
