#include "ddm/baselines.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

#include "ddm/errors.hpp"

namespace ddm {

namespace {
constexpr const char* kModule = "baselines";

// Movement graph used by the baselines: G_M without self-loops, plus the
// reversals of edges entering goals. Absorbing goal states would otherwise
// be one-way, while the baselines treat them as ordinary waypoints.
std::vector<std::vector<StateId>> mobility_graph(const Mdp& mdp) {
    const int ns = mdp.num_states(), na = mdp.num_actions();
    std::vector<ActionId> action_order(na);
    std::iota(action_order.begin(), action_order.end(), 0);
    std::sort(action_order.begin(), action_order.end(), [&](ActionId a, ActionId b) {
        return mdp.action_name(a) < mdp.action_name(b);
    });

    std::vector<std::vector<StateId>> adj(ns);
    std::vector<std::vector<char>> seen(ns, std::vector<char>(ns, 0));
    auto add_edge = [&](StateId u, StateId v) {
        if (u == v || seen[u][v]) return;
        seen[u][v] = 1;
        adj[u].push_back(v);
    };
    for (StateId s = 0; s < ns; ++s)
        for (ActionId a : action_order)
            for (const auto& e : mdp.successors(s, a)) add_edge(s, e.next);
    // Reversed entries restore goal mobility; appended after the action-order
    // neighbors and sorted by state name for determinism.
    for (StateId g : mdp.goals()) {
        std::vector<StateId> back;
        for (StateId s = 0; s < ns; ++s) {
            if (s == g) continue;
            for (ActionId a = 0; a < na; ++a)
                for (const auto& e : mdp.successors(s, a))
                    if (e.next == g && !seen[g][s]) {
                        back.push_back(s);
                        seen[g][s] = 1;
                    }
        }
        std::sort(back.begin(), back.end(), [&](StateId x, StateId y) {
            return mdp.state_name(x) < mdp.state_name(y);
        });
        for (StateId s : back) adj[g].push_back(s);
    }
    return adj;
}

// Breadth-first path; neighbor order fixes tie-breaking.
std::optional<std::vector<StateId>> bfs_path(const std::vector<std::vector<StateId>>& adj,
                                             StateId from, StateId to) {
    const int ns = static_cast<int>(adj.size());
    std::vector<StateId> parent(ns, -2);
    parent[from] = -1;
    std::deque<StateId> queue{from};
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        if (s == to) break;
        for (StateId n : adj[s]) {
            if (parent[n] == -2) {
                parent[n] = s;
                queue.push_back(n);
            }
        }
    }
    if (parent[to] == -2) return std::nullopt;
    std::vector<StateId> path;
    for (StateId s = to; s != -1; s = parent[s]) path.push_back(s);
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<int> bfs_distances(const std::vector<std::vector<StateId>>& adj, StateId from) {
    std::vector<int> dist(adj.size(), -1);
    dist[from] = 0;
    std::deque<StateId> queue{from};
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        for (StateId n : adj[s])
            if (dist[n] < 0) {
                dist[n] = dist[s] + 1;
                queue.push_back(n);
            }
    }
    return dist;
}

}  // namespace

BaselineTrajectory shortest_path_trajectory(const Mdp& mdp) {
    auto adj = mobility_graph(mdp);
    auto path = bfs_path(adj, mdp.initial_state(), mdp.true_goal());
    if (!path)
        fail(kModule, "Unreachable", "true goal is unreachable from the initial state");
    BaselineTrajectory result;
    result.states = std::move(*path);
    result.generator = BaselineTrajectory::Generator::kShortest;
    return result;
}

BaselineTrajectory dpp_trajectory(const Mdp& mdp) {
    auto adj = mobility_graph(mdp);
    const StateId true_goal = mdp.true_goal();

    std::vector<StateId> decoys;
    for (StateId g : mdp.goals())
        if (g != true_goal) decoys.push_back(g);
    if (decoys.empty()) fail(kModule, "NoDecoy", "the goal set has no decoy goal");

    // Decoy closest to the true goal; name order breaks ties.
    std::vector<int> dist_from_true = bfs_distances(adj, true_goal);
    StateId best = -1;
    for (StateId d : decoys) {
        if (dist_from_true[d] < 0) continue;
        if (best < 0 || dist_from_true[d] < dist_from_true[best] ||
            (dist_from_true[d] == dist_from_true[best] &&
             mdp.state_name(d) < mdp.state_name(best)))
            best = d;
    }
    if (best < 0)
        fail(kModule, "UnreachableLeg", "no decoy connects to the true goal");

    auto leg1 = bfs_path(adj, mdp.initial_state(), best);
    auto leg2 = bfs_path(adj, best, true_goal);
    if (!leg1 || !leg2)
        fail(kModule, "UnreachableLeg", "decoy detour has a missing leg");

    BaselineTrajectory result;
    result.states = std::move(*leg1);
    result.states.insert(result.states.end(), leg2->begin() + 1, leg2->end());
    result.generator = BaselineTrajectory::Generator::kDpp;
    result.decoy_used = best;
    return result;
}

}  // namespace ddm
