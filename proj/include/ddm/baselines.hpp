#pragma once

#include <optional>
#include <vector>

#include "ddm/mdp.hpp"

namespace ddm {

struct BaselineTrajectory {
    enum class Generator { kShortest, kDpp };
    std::vector<StateId> states;
    Generator generator = Generator::kShortest;
    std::optional<StateId> decoy_used;

    int length() const { return static_cast<int>(states.size()) - 1; }
};

// Unit-weight shortest path from the initial state to the true goal on G_M;
// ties broken by lexicographic action order. Throws baselines/Unreachable.
BaselineTrajectory shortest_path_trajectory(const Mdp& mdp);

// Decoy-detour heuristic: shortest path to the decoy closest to the true
// goal, then shortest path from the decoy to the true goal. Goal absorption
// is bypassed at the graph level. Throws baselines/NoDecoy or
// baselines/UnreachableLeg.
BaselineTrajectory dpp_trajectory(const Mdp& mdp);

}  // namespace ddm
