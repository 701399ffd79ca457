#include "ddm/grid.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "ddm/errors.hpp"

namespace ddm {

namespace {
constexpr const char* kModule = "mdp-core";

std::pair<int, int> parse_cell(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2)
        fail(kModule, "InvalidGrid", "cells must be [x, y] pairs");
    return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

GridSpec GridSpec::from_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(kModule, "InvalidGrid", std::string("grid JSON parse error: ") + e.what());
    }
    GridSpec spec;
    spec.width = j.at("width").get<int>();
    spec.height = j.at("height").get<int>();
    for (const auto& cell : j.value("obstacles", nlohmann::json::array()))
        spec.obstacles.push_back(parse_cell(cell));
    spec.start = parse_cell(j.at("start"));
    for (const auto& cell : j.at("goals")) spec.goals.push_back(parse_cell(cell));
    spec.true_goal = parse_cell(j.at("true_goal"));
    return spec;
}

GridSpec GridSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(kModule, "FileNotFound", "cannot open grid file '" + path + "'");
    return from_json(in);
}

Mdp build_grid_mdp(const GridSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0)
        fail(kModule, "InvalidGrid", "grid dimensions must be positive");
    std::set<std::pair<int, int>> blocked(spec.obstacles.begin(), spec.obstacles.end());
    auto inside = [&](int x, int y) {
        return x >= 0 && x < spec.width && y >= 0 && y < spec.height &&
               !blocked.count({x, y});
    };
    if (!inside(spec.start.first, spec.start.second))
        fail(kModule, "InvalidGrid", "start cell is blocked or out of bounds");
    for (const auto& g : spec.goals)
        if (!inside(g.first, g.second))
            fail(kModule, "InvalidGrid", "goal cell is blocked or out of bounds");

    MdpDescription desc;
    // Row-major cell order: y outer, x inner.
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            if (inside(x, y)) desc.states.push_back(grid_cell_name(x, y));
    desc.actions = {"up", "down", "left", "right"};
    desc.initial_state = grid_cell_name(spec.start.first, spec.start.second);
    std::set<std::pair<int, int>> goal_cells(spec.goals.begin(), spec.goals.end());
    for (const auto& g : spec.goals) desc.goals.push_back(grid_cell_name(g.first, g.second));
    desc.true_goal = grid_cell_name(spec.true_goal.first, spec.true_goal.second);

    const int dx[] = {0, 0, -1, 1};  // up, down, left, right
    const int dy[] = {1, -1, 0, 0};
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            if (!inside(x, y)) continue;
            std::string from = grid_cell_name(x, y);
            bool absorbing = goal_cells.count({x, y}) > 0;
            for (int a = 0; a < 4; ++a) {
                if (absorbing) {
                    desc.transitions.push_back({from, desc.actions[a], from, 1.0});
                    continue;
                }
                int nx = x + dx[a], ny = y + dy[a];
                std::string to = inside(nx, ny) ? grid_cell_name(nx, ny) : from;
                desc.transitions.push_back({from, desc.actions[a], to, 1.0});
            }
        }
    }
    return validate_mdp(desc);
}

}  // namespace ddm
