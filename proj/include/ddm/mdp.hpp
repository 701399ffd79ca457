#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ddm {

using StateId = int;
using ActionId = int;

struct TransitionEntry {
    StateId next;
    double prob;
};

// Raw description prior to validation. State/action identifiers are strings
// at the interface; validation maps them to dense indices in file order.
struct MdpDescription {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::string initial_state;
    std::vector<std::string> goals;
    std::string true_goal;
    // (state, action, successor, probability); rows may be listed in any
    // order, entries of a row may be split across records.
    struct Arc {
        std::string state;
        std::string action;
        std::string successor;
        double prob;
    };
    std::vector<Arc> transitions;
};

class Mdp {
public:
    int num_states() const { return static_cast<int>(state_names_.size()); }
    int num_actions() const { return static_cast<int>(action_names_.size()); }

    const std::string& state_name(StateId s) const { return state_names_[s]; }
    const std::string& action_name(ActionId a) const { return action_names_[a]; }
    const std::vector<std::string>& state_names() const { return state_names_; }
    const std::vector<std::string>& action_names() const { return action_names_; }

    // Throws mdp-core/UnknownState (resp. UnknownAction) when absent.
    StateId state_index(const std::string& name) const;
    ActionId action_index(const std::string& name) const;

    StateId initial_state() const { return initial_state_; }
    const std::vector<StateId>& goals() const { return goals_; }
    StateId true_goal() const { return true_goal_; }
    bool is_goal(StateId s) const { return is_goal_[s]; }
    // Position of a goal state inside goals(), -1 for non-goals.
    int goal_position(StateId s) const { return goal_pos_[s]; }

    std::span<const TransitionEntry> successors(StateId s, ActionId a) const {
        const auto& row = rows_[static_cast<size_t>(s) * num_actions() + a];
        return {row.data(), row.size()};
    }

    double transition_prob(StateId s, ActionId a, StateId next) const;

    friend Mdp validate_mdp(const MdpDescription& raw);

private:
    std::vector<std::string> state_names_;
    std::vector<std::string> action_names_;
    std::unordered_map<std::string, StateId> state_index_;
    std::unordered_map<std::string, ActionId> action_index_;
    StateId initial_state_ = 0;
    std::vector<StateId> goals_;
    StateId true_goal_ = 0;
    std::vector<char> is_goal_;
    std::vector<int> goal_pos_;
    std::vector<std::vector<TransitionEntry>> rows_;  // indexed s * |A| + a
};

// Validates invariants: stochastic rows (renormalized only when the sum is
// within 1e-9 of one), absorbing goals, known true goal, nonempty goal set.
Mdp validate_mdp(const MdpDescription& raw);

class StationaryPolicy {
public:
    StationaryPolicy() = default;
    StationaryPolicy(int num_states, int num_actions)
        : num_states_(num_states), num_actions_(num_actions),
          probs_(static_cast<size_t>(num_states) * num_actions, 0.0) {}

    static StationaryPolicy uniform(int num_states, int num_actions);

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    double prob(StateId s, ActionId a) const {
        return probs_[static_cast<size_t>(s) * num_actions_ + a];
    }
    void set_prob(StateId s, ActionId a, double p) {
        probs_[static_cast<size_t>(s) * num_actions_ + a] = p;
    }

    // Rows must sum to one within tol; throws mdp-core/InvalidPolicy.
    void validate(double tol = 1e-12) const;

private:
    int num_states_ = 0;
    int num_actions_ = 0;
    std::vector<double> probs_;
};

struct Trajectory {
    std::vector<StateId> states;    // visited states, length() + 1 entries
    std::vector<ActionId> actions;  // one per step
    bool max_steps_exceeded = false;

    int length() const { return static_cast<int>(actions.size()); }
};

// Minimum step counts from the initial state on the underlying graph G_M;
// nullopt marks states unreachable from the initial state.
using StepCount = std::optional<int>;
std::vector<StepCount> min_steps(const Mdp& mdp);

// Maximum probability of reaching the target (set) under any policy.
// Value iteration with values pinned to zero outside the set of states that
// can reach the target; stops when the max-norm change drops below 1e-10.
std::vector<double> max_reach_probability(const Mdp& mdp, StateId target);
std::vector<double> max_reach_probability(const Mdp& mdp,
                                          const std::vector<StateId>& targets);

// S_0: states from which no goal is reachable. S_r = S \ (goals ∪ S_0).
struct StatePartition {
    std::vector<StateId> s_zero;
    std::vector<StateId> s_r;
    std::vector<char> in_zero;  // indexed by state
    std::vector<char> in_r;
};
StatePartition zero_reach_states(const Mdp& mdp);

struct ReachabilityReport {
    std::vector<double> rmax;       // toward the true goal
    std::vector<StepCount> t_min;   // from the initial state
    StatePartition partition;
};
ReachabilityReport analyze_reachability(const Mdp& mdp);

// Seeded rollout; stops on entering any goal or after max_steps (the
// trajectory is then flagged, not an error). Identical seeds give identical
// trajectories.
Trajectory simulate(const Mdp& mdp, const StationaryPolicy& policy,
                    std::uint64_t seed, int max_steps);

}  // namespace ddm
