#pragma once

#include <vector>

#include "ddm/mdp.hpp"

namespace ddm {

// Parameters of the observer's maximum-entropy prediction model. The cost
// table is indexed (s * |A| + a) and the prior is aligned with mdp.goals().
struct ObserverParams {
    std::vector<double> cost;
    double alpha = 1.0;
    double gamma_o = 0.95;
    std::vector<double> prior;
    double vi_tolerance = 1e-4;
    double init_penalty = 1e6;
    int max_iterations = 100000;
    // The posterior exponent is (V_G(sT) - V_G(s1)) / alpha by default; the
    // flag restores the unscaled difference for side-by-side comparison.
    bool alpha_scaled_posterior = true;

    static ObserverParams uniform(const Mdp& mdp, double cost_value, double alpha,
                                  double gamma_o);
    void validate(const Mdp& mdp) const;
    double cost_at(const Mdp& mdp, StateId s, ActionId a) const {
        return cost[static_cast<size_t>(s) * mdp.num_actions() + a];
    }
};

struct SoftValueTable {
    StateId goal = -1;
    std::vector<double> v;  // per state
    std::vector<double> q;  // (s * |A| + a)
    int iterations = 0;
    bool converged = false;
    double final_delta = 0.0;  // sum_s |V^t - V^{t-1}| at termination
};

// Fixed point of Q(s,a) = -c(s,a) + gamma_o * sum P(s,a,s') V(s') and
// V(s) = alpha * log sum_a exp(Q(s,a)/alpha), with V(goal) pinned to zero
// and other states starting at -init_penalty. Terminates when
// sum_s |V^t(s) - V^{t-1}(s)| <= vi_tolerance, or at max_iterations with
// converged = false (the table is still returned).
SoftValueTable softmax_value_iteration(const Mdp& mdp, StateId goal,
                                       const ObserverParams& params);

// One table per goal, in goal declaration order.
std::vector<SoftValueTable> observer_tables(const Mdp& mdp,
                                            const ObserverParams& params);

// pi(s,a) = exp((Q(s,a) - V(s)) / alpha); goal-state rows are uniform.
StationaryPolicy expected_policy(const Mdp& mdp, const SoftValueTable& table,
                                 const ObserverParams& params);

struct GoalPosterior {
    std::vector<double> probabilities;  // aligned with mdp.goals()

    int argmax() const;
    int second_argmax() const;  // -1 when only one goal exists
};

// Pr(G | s1, sT) from the per-goal value tables and the prior, computed in
// log space with max subtraction. Throws observer/DegenerateNormalizer when
// every weight underflows to zero.
GoalPosterior predict_goals(const Mdp& mdp, const std::vector<SoftValueTable>& tables,
                            const ObserverParams& params, StateId s1, StateId sT);

std::vector<GoalPosterior> posterior_along_states(
    const Mdp& mdp, const std::vector<SoftValueTable>& tables,
    const ObserverParams& params, const std::vector<StateId>& states);

inline std::vector<GoalPosterior> posterior_along_trajectory(
    const Mdp& mdp, const std::vector<SoftValueTable>& tables,
    const ObserverParams& params, const Trajectory& trajectory) {
    return posterior_along_states(mdp, tables, params, trajectory.states);
}

}  // namespace ddm
