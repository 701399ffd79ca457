#pragma once

#include <vector>

#include "ddm/deception.hpp"
#include "ddm/lp.hpp"
#include "ddm/mdp.hpp"
#include "ddm/observer.hpp"

namespace ddm {

// Reach constraint of the first LP: either pinned to the maximum reach
// probability or a lower bound (used by chance-constrained synthesis).
struct ReachSpec {
    enum class Mode { kEquality, kAtLeast };
    Mode mode = Mode::kEquality;
    double value = 1.0;

    static ReachSpec equality(double v) { return {Mode::kEquality, v}; }
    static ReachSpec at_least(double v) { return {Mode::kAtLeast, v}; }
};

// Occupancy LP over S_r x A: one balance equality per state in S_r plus the
// reach row toward target_set. Throws lp-synthesis/InitialStateNotInSr.
LpProblem build_primary_lp(const Mdp& mdp, const DeceptionCostTable& g,
                           const StatePartition& partition, const ReachSpec& reach,
                           const std::vector<StateId>& target_set);

// Same constraints plus the pinned deception cost; objective becomes total
// occupancy.
LpProblem build_secondary_lp(const LpProblem& primary, double v_star);

// Row-normalizes occupancies; states without occupancy (goals, S_0, unvisited
// states) get the uniform distribution.
StationaryPolicy extract_policy(const LpProblem& problem, const LpSolution& solution,
                                const Mdp& mdp);

struct SynthesisResult {
    StationaryPolicy policy;
    double v_star = 0.0;
    double total_occupancy = 0.0;
    double reach_probability = 0.0;  // attained sum x * r
    LpProblem primary_lp;
    LpSolution lp1;
    LpProblem secondary_lp;
    LpSolution lp2;
    StatePartition partition;
};

// Full pipeline: reachability analysis, per-goal soft values, deception
// costs, the two LPs, and policy extraction.
SynthesisResult synthesize(const Mdp& mdp, const ObserverParams& observer,
                           const DeceptionSpec& spec);

// Shared LP-solving tail used by both plain and product synthesis.
SynthesisResult solve_deception_lps(const Mdp& mdp, const DeceptionCostTable& g,
                                    const StatePartition& partition,
                                    const ReachSpec& reach,
                                    const std::vector<StateId>& target_set);

// Expected visit counts of each state under the policy (zero outside S_r),
// by solving the linear flow system.
std::vector<double> policy_state_occupancy(const Mdp& mdp, const StationaryPolicy& policy,
                                           const StatePartition& partition);

// Occupancy-weighted deception cost of a stationary policy.
double policy_deception_cost(const Mdp& mdp, const StationaryPolicy& policy,
                             const DeceptionCostTable& g, const StatePartition& partition);

// Exact probability of reaching the target set under the policy, per state,
// by linear-system evaluation (1 on targets, 0 on other absorbing states).
std::vector<double> policy_reach_probability(const Mdp& mdp, const StationaryPolicy& policy,
                                             const StatePartition& partition,
                                             const std::vector<StateId>& targets);

// Deception cost accumulated along a concrete state sequence (the terminal
// state incurs nothing).
double state_sequence_cost(const DeceptionCostTable& g, const std::vector<StateId>& states);

// Balance-equation residuals of a candidate solution, one entry per
// balance row of the problem.
std::vector<double> flow_residuals(const LpProblem& problem, const LpSolution& solution);

// Residuals recomputed from the MDP itself over every state of S_r (states
// without variables enter with zero occupancy), for acceptance checks that
// should not trust the LP's own row bookkeeping.
std::vector<double> occupancy_flow_residuals(const Mdp& mdp, const StatePartition& partition,
                                             const LpProblem& problem,
                                             const LpSolution& solution);

}  // namespace ddm
