#include "ddm/synthesis.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "ddm/errors.hpp"

namespace ddm {

namespace {
constexpr const char* kModule = "lp-synthesis";
}

LpProblem build_primary_lp(const Mdp& mdp, const DeceptionCostTable& g,
                           const StatePartition& partition, const ReachSpec& reach,
                           const std::vector<StateId>& target_set) {
    const StateId s1 = mdp.initial_state();
    if (!partition.in_r[s1])
        fail(kModule, "InitialStateNotInSr",
             "initial state '" + mdp.state_name(s1) + "' is a goal or cannot reach any goal");

    // States of S_r the initial state cannot reach have zero occupancy in
    // every feasible point (their balance rows read 0 = 0); drop them up
    // front instead of carrying structurally empty rows into the solver.
    std::vector<char> reachable(mdp.num_states(), 0);
    {
        std::vector<StateId> stack{s1};
        reachable[s1] = 1;
        while (!stack.empty()) {
            StateId s = stack.back();
            stack.pop_back();
            for (ActionId a = 0; a < mdp.num_actions(); ++a)
                for (const auto& e : mdp.successors(s, a))
                    if (!reachable[e.next]) {
                        reachable[e.next] = 1;
                        stack.push_back(e.next);
                    }
        }
    }
    std::vector<StateId> active;
    for (StateId s : partition.s_r)
        if (reachable[s]) active.push_back(s);

    const int na = mdp.num_actions();
    LpProblem lp;
    std::vector<int> var_of(static_cast<size_t>(mdp.num_states()) * na, -1);
    for (StateId s : active)
        for (ActionId a = 0; a < na; ++a)
            var_of[static_cast<size_t>(s) * na + a] = lp.add_variable(g.g(s, a), s, a);

    std::vector<char> is_target(mdp.num_states(), 0);
    for (StateId t : target_set) is_target[t] = 1;

    // Balance rows: out-flow minus in-flow equals the initial distribution.
    std::vector<std::vector<LinearTerm>> balance(active.size());
    std::vector<int> row_of(mdp.num_states(), -1);
    for (size_t i = 0; i < active.size(); ++i) row_of[active[i]] = static_cast<int>(i);

    std::vector<LinearTerm> reach_terms;
    for (StateId s : active) {
        for (ActionId a = 0; a < na; ++a) {
            int var = var_of[static_cast<size_t>(s) * na + a];
            balance[row_of[s]].push_back({var, 1.0});
            double r = 0.0;
            for (const auto& e : mdp.successors(s, a)) {
                if (row_of[e.next] >= 0)
                    balance[row_of[e.next]].push_back({var, -e.prob});
                if (is_target[e.next]) r += e.prob;
            }
            if (r > 0.0) reach_terms.push_back({var, r});
        }
    }
    for (size_t i = 0; i < balance.size(); ++i)
        lp.add_equality(std::move(balance[i]), active[i] == s1 ? 1.0 : 0.0);
    lp.balance_row_states = active;

    if (reach.mode == ReachSpec::Mode::kEquality)
        lp.add_equality(std::move(reach_terms), reach.value);
    else
        lp.add_at_least(std::move(reach_terms), reach.value);
    return lp;
}

LpProblem build_secondary_lp(const LpProblem& primary, double v_star) {
    LpProblem lp = primary;
    std::vector<LinearTerm> cost_terms;
    for (int j = 0; j < primary.num_vars; ++j)
        if (primary.objective[j] != 0.0) cost_terms.push_back({j, primary.objective[j]});
    lp.add_equality(std::move(cost_terms), v_star);
    std::fill(lp.objective.begin(), lp.objective.end(), 1.0);
    return lp;
}

StationaryPolicy extract_policy(const LpProblem& problem, const LpSolution& solution,
                                const Mdp& mdp) {
    const int na = mdp.num_actions();
    StationaryPolicy pi = StationaryPolicy::uniform(mdp.num_states(), na);
    std::vector<double> totals(mdp.num_states(), 0.0);
    for (int j = 0; j < problem.num_vars; ++j)
        totals[problem.var_meta[j].first] += solution.x[j];
    for (int j = 0; j < problem.num_vars; ++j) {
        auto [s, a] = problem.var_meta[j];
        if (totals[s] > 0.0) pi.set_prob(s, a, solution.x[j] / totals[s]);
    }
    // Normalize rows that received occupancy (others stay uniform).
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        if (totals[s] <= 0.0) continue;
        double sum = 0.0;
        for (ActionId a = 0; a < na; ++a) sum += pi.prob(s, a);
        for (ActionId a = 0; a < na; ++a) pi.set_prob(s, a, pi.prob(s, a) / sum);
    }
    return pi;
}

namespace {

double reach_coefficient_sum(const LpProblem& lp, const LpSolution& sol) {
    // The reach row is the last constraint added by build_primary_lp.
    const LinearConstraint* row = nullptr;
    if (!lp.at_least.empty())
        row = &lp.at_least.back();
    else
        row = &lp.equalities.back();
    double acc = 0.0;
    for (const auto& t : row->terms) acc += t.coeff * sol.x[t.var];
    return acc;
}

}  // namespace

SynthesisResult solve_deception_lps(const Mdp& mdp, const DeceptionCostTable& g,
                                    const StatePartition& partition,
                                    const ReachSpec& reach,
                                    const std::vector<StateId>& target_set) {
    SynthesisResult result;
    result.partition = partition;
    result.primary_lp = build_primary_lp(mdp, g, partition, reach, target_set);
    result.lp1 = solve_lp(result.primary_lp);
    if (result.lp1.status != LpStatus::kOptimal)
        fail(kModule, "Infeasible",
             std::string("primary LP ") + to_string(result.lp1.status) + "; " +
                 result.lp1.message);
    result.v_star = result.lp1.objective_value;

    result.secondary_lp = build_secondary_lp(result.primary_lp, result.v_star);
    result.lp2 = solve_lp(result.secondary_lp);
    if (result.lp2.status != LpStatus::kOptimal) {
        // Floating-point pinning can make the cost equality empty; retry once
        // with a two-sided band of width 1e-9.
        LpProblem relaxed = result.primary_lp;
        std::vector<LinearTerm> cost_terms, neg_terms;
        for (int j = 0; j < result.primary_lp.num_vars; ++j) {
            double c = result.primary_lp.objective[j];
            if (c != 0.0) {
                cost_terms.push_back({j, c});
                neg_terms.push_back({j, -c});
            }
        }
        relaxed.add_at_least(std::move(cost_terms), result.v_star - 0.5e-9);
        relaxed.add_at_least(std::move(neg_terms), -(result.v_star + 0.5e-9));
        std::fill(relaxed.objective.begin(), relaxed.objective.end(), 1.0);
        result.secondary_lp = relaxed;
        result.lp2 = solve_lp(result.secondary_lp);
        if (result.lp2.status != LpStatus::kOptimal)
            fail(kModule, "Infeasible",
                 std::string("secondary LP ") + to_string(result.lp2.status) +
                     " after relaxation; " + result.lp2.message);
    }
    result.total_occupancy = result.lp2.objective_value;
    result.reach_probability = reach_coefficient_sum(result.primary_lp, result.lp2);
    result.policy = extract_policy(result.secondary_lp, result.lp2, mdp);
    return result;
}

SynthesisResult synthesize(const Mdp& mdp, const ObserverParams& observer,
                           const DeceptionSpec& spec) {
    StatePartition partition = zero_reach_states(mdp);
    std::vector<StepCount> t_min = min_steps(mdp);
    std::vector<SoftValueTable> tables = observer_tables(mdp, observer);
    DeceptionCostTable g = build_cost(mdp, tables, observer, spec, t_min);
    double rmax = max_reach_probability(mdp, mdp.true_goal())[mdp.initial_state()];
    return solve_deception_lps(mdp, g, partition, ReachSpec::equality(rmax),
                               {mdp.true_goal()});
}

namespace {

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// (I - T) p = rhs (or its transpose) over the given states, with
// T(s,s') = sum_a pi(s,a) P(s,a,s'). The solution is residual-verified;
// a divergent or singular system raises NumericalFailure.
Eigen::VectorXd solve_flow_system(const Mdp& mdp, const StationaryPolicy& policy,
                                  const std::vector<StateId>& states,
                                  const Eigen::VectorXd& rhs, bool transpose) {
    const int nr = static_cast<int>(states.size());
    std::vector<int> row_of(mdp.num_states(), -1);
    for (int i = 0; i < nr; ++i) row_of[states[i]] = i;

    std::vector<Triplet> triplets;
    for (int i = 0; i < nr; ++i) triplets.emplace_back(i, i, 1.0);
    for (int i = 0; i < nr; ++i) {
        StateId s = states[i];
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            double pa = policy.prob(s, a);
            if (pa <= 0.0) continue;
            for (const auto& e : mdp.successors(s, a)) {
                int j = row_of[e.next];
                if (j < 0) continue;
                if (transpose)
                    triplets.emplace_back(j, i, -pa * e.prob);
                else
                    triplets.emplace_back(i, j, -pa * e.prob);
            }
        }
    }
    SparseMat mat(nr, nr);
    mat.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseLU<SparseMat> lu;
    lu.compute(mat);
    if (lu.info() != Eigen::Success)
        fail(kModule, "NumericalFailure", "flow system is singular for this policy");
    Eigen::VectorXd z = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
        fail(kModule, "NumericalFailure", "flow system solve failed");
    double residual = (mat * z - rhs).cwiseAbs().maxCoeff();
    if (!std::isfinite(residual) || residual > 1e-8)
        fail(kModule, "NumericalFailure", "flow system residual too large");
    return z;
}

// States reachable from s1 through positive-probability policy actions,
// staying inside S_r.
std::vector<StateId> policy_reachable(const Mdp& mdp, const StationaryPolicy& policy,
                                      const StatePartition& partition) {
    std::vector<char> seen(mdp.num_states(), 0);
    std::vector<StateId> frontier, out;
    if (!partition.in_r[mdp.initial_state()]) return out;
    seen[mdp.initial_state()] = 1;
    frontier.push_back(mdp.initial_state());
    while (!frontier.empty()) {
        StateId s = frontier.back();
        frontier.pop_back();
        out.push_back(s);
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            if (policy.prob(s, a) <= 0.0) continue;
            for (const auto& e : mdp.successors(s, a)) {
                if (seen[e.next] || !partition.in_r[e.next]) continue;
                seen[e.next] = 1;
                frontier.push_back(e.next);
            }
        }
    }
    return out;
}

}  // namespace

std::vector<double> policy_state_occupancy(const Mdp& mdp, const StationaryPolicy& policy,
                                           const StatePartition& partition) {
    // States the policy never reaches have occupancy zero and are dropped,
    // which keeps recurrent classes elsewhere in S_r from poisoning the
    // system.
    std::vector<StateId> states = policy_reachable(mdp, policy, partition);
    const int nr = static_cast<int>(states.size());
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(nr);
    for (int i = 0; i < nr; ++i)
        if (states[i] == mdp.initial_state()) beta(i) = 1.0;
    Eigen::VectorXd z = solve_flow_system(mdp, policy, states, beta, /*transpose=*/true);
    std::vector<double> occupancy(mdp.num_states(), 0.0);
    for (int i = 0; i < nr; ++i) occupancy[states[i]] = z(i);
    return occupancy;
}

double policy_deception_cost(const Mdp& mdp, const StationaryPolicy& policy,
                             const DeceptionCostTable& g, const StatePartition& partition) {
    std::vector<double> occ = policy_state_occupancy(mdp, policy, partition);
    double total = 0.0;
    for (StateId s : partition.s_r) {
        double per_state = 0.0;
        for (ActionId a = 0; a < mdp.num_actions(); ++a)
            per_state += policy.prob(s, a) * g.g(s, a);
        total += occ[s] * per_state;
    }
    return total;
}

std::vector<double> policy_reach_probability(const Mdp& mdp, const StationaryPolicy& policy,
                                             const StatePartition& partition,
                                             const std::vector<StateId>& targets) {
    const int nr = static_cast<int>(partition.s_r.size());
    std::vector<char> is_target(mdp.num_states(), 0);
    for (StateId t : targets) is_target[t] = 1;

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nr);
    for (int i = 0; i < nr; ++i) {
        StateId s = partition.s_r[i];
        double acc = 0.0;
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            double pa = policy.prob(s, a);
            if (pa <= 0.0) continue;
            for (const auto& e : mdp.successors(s, a))
                if (is_target[e.next]) acc += pa * e.prob;
        }
        rhs(i) = acc;
    }
    Eigen::VectorXd p = solve_flow_system(mdp, policy, partition.s_r, rhs, /*transpose=*/false);
    std::vector<double> reach(mdp.num_states(), 0.0);
    for (StateId t : targets) reach[t] = 1.0;
    for (int i = 0; i < nr; ++i) reach[partition.s_r[i]] = p(i);
    return reach;
}

double state_sequence_cost(const DeceptionCostTable& g, const std::vector<StateId>& states) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < states.size(); ++i) total += g.g_state(states[i]);
    return total;
}

std::vector<double> flow_residuals(const LpProblem& problem, const LpSolution& solution) {
    std::vector<double> residuals;
    residuals.reserve(problem.balance_row_states.size());
    for (size_t i = 0; i < problem.balance_row_states.size(); ++i) {
        const auto& row = problem.equalities[i];
        double acc = -row.rhs;
        for (const auto& t : row.terms) acc += t.coeff * solution.x[t.var];
        residuals.push_back(acc);
    }
    return residuals;
}

std::vector<double> occupancy_flow_residuals(const Mdp& mdp, const StatePartition& partition,
                                             const LpProblem& problem,
                                             const LpSolution& solution) {
    // Recomputed directly from the MDP over all of S_r, independent of the
    // LP's internal row layout.
    std::vector<double> x_state_action(static_cast<size_t>(mdp.num_states()) * mdp.num_actions(),
                                       0.0);
    for (int j = 0; j < problem.num_vars; ++j) {
        auto [s, a] = problem.var_meta[j];
        x_state_action[static_cast<size_t>(s) * mdp.num_actions() + a] += solution.x[j];
    }
    std::vector<double> residuals(partition.s_r.size(), 0.0);
    std::vector<int> row_of(mdp.num_states(), -1);
    for (size_t i = 0; i < partition.s_r.size(); ++i) row_of[partition.s_r[i]] = static_cast<int>(i);
    for (size_t i = 0; i < partition.s_r.size(); ++i) {
        StateId s = partition.s_r[i];
        double acc = s == mdp.initial_state() ? -1.0 : 0.0;
        for (ActionId a = 0; a < mdp.num_actions(); ++a)
            acc += x_state_action[static_cast<size_t>(s) * mdp.num_actions() + a];
        residuals[i] = acc;
    }
    for (StateId s : partition.s_r)
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            double x = x_state_action[static_cast<size_t>(s) * mdp.num_actions() + a];
            if (x == 0.0) continue;
            for (const auto& e : mdp.successors(s, a))
                if (row_of[e.next] >= 0) residuals[row_of[e.next]] -= e.prob * x;
        }
    return residuals;
}

}  // namespace ddm
