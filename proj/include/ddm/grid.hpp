#pragma once

#include <iosfwd>
#include <string>

#include "ddm/mdp.hpp"

namespace ddm {

// Grid world over non-obstacle cells named "x_y" with actions
// {up, down, left, right}; a move into an obstacle or off the boundary keeps
// the agent in place. Goal cells are absorbing.
struct GridSpec {
    int width = 0;
    int height = 0;
    std::vector<std::pair<int, int>> obstacles;
    std::pair<int, int> start;
    std::vector<std::pair<int, int>> goals;
    std::pair<int, int> true_goal;

    static GridSpec from_json(std::istream& in);
    static GridSpec from_file(const std::string& path);
};

Mdp build_grid_mdp(const GridSpec& spec);

inline std::string grid_cell_name(int x, int y) {
    return std::to_string(x) + "_" + std::to_string(y);
}

}  // namespace ddm
