// Shared fixtures and independent reference computations for the test
// suites. The oracles here deliberately reimplement the math with plain
// loops so they share no code path with the library under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ddm/mdp.hpp"
#include "ddm/observer.hpp"

namespace ddm::testing {

// G1 - m - G2 with deterministic L/R actions; true goal G1, s1 = m.
inline Mdp three_chain() {
    MdpDescription d;
    d.states = {"G1", "m", "G2"};
    d.actions = {"L", "R"};
    d.initial_state = "m";
    d.goals = {"G1", "G2"};
    d.true_goal = "G1";
    d.transitions = {
        {"G1", "L", "G1", 1.0}, {"G1", "R", "G1", 1.0},
        {"m", "L", "G1", 1.0},  {"m", "R", "G2", 1.0},
        {"G2", "L", "G2", 1.0}, {"G2", "R", "G2", 1.0},
    };
    return validate_mdp(d);
}

// G1 - a - m - b - G2; true goal G1, s1 = m.
inline Mdp five_chain() {
    MdpDescription d;
    d.states = {"G1", "a", "m", "b", "G2"};
    d.actions = {"L", "R"};
    d.initial_state = "m";
    d.goals = {"G1", "G2"};
    d.true_goal = "G1";
    auto arc = [&](const char* s, const char* act, const char* t) {
        d.transitions.push_back({s, act, t, 1.0});
    };
    arc("G1", "L", "G1"); arc("G1", "R", "G1");
    arc("a", "L", "G1"); arc("a", "R", "m");
    arc("m", "L", "a"); arc("m", "R", "b");
    arc("b", "L", "m"); arc("b", "R", "G2");
    arc("G2", "L", "G2"); arc("G2", "R", "G2");
    return validate_mdp(d);
}

// Seeded random MDP with absorbing goals; every non-goal row is a random
// sparse distribution. State 0 is the initial state and never a goal.
inline Mdp random_mdp(std::uint64_t seed, int num_states, int num_actions, int num_goals) {
    std::mt19937_64 rng(seed);
    MdpDescription d;
    for (int i = 0; i < num_states; ++i) d.states.push_back("s" + std::to_string(i));
    for (int a = 0; a < num_actions; ++a) d.actions.push_back("a" + std::to_string(a));
    d.initial_state = "s0";

    std::vector<int> goal_ids;
    while (static_cast<int>(goal_ids.size()) < num_goals) {
        int g = 1 + static_cast<int>(rng() % (num_states - 1));
        if (std::find(goal_ids.begin(), goal_ids.end(), g) == goal_ids.end())
            goal_ids.push_back(g);
    }
    for (int g : goal_ids) d.goals.push_back("s" + std::to_string(g));
    d.true_goal = d.goals.front();

    auto uniform = [&]() { return (rng() >> 11) * 0x1.0p-53; };
    for (int s = 0; s < num_states; ++s) {
        bool absorbing = std::find(goal_ids.begin(), goal_ids.end(), s) != goal_ids.end();
        for (int a = 0; a < num_actions; ++a) {
            if (absorbing) {
                d.transitions.push_back({d.states[s], d.actions[a], d.states[s], 1.0});
                continue;
            }
            int support = 1 + static_cast<int>(rng() % 3);
            std::vector<double> w(support);
            std::vector<int> to(support);
            double total = 0.0;
            for (int k = 0; k < support; ++k) {
                to[k] = static_cast<int>(rng() % num_states);
                w[k] = 0.05 + uniform();
                total += w[k];
            }
            for (int k = 0; k < support; ++k)
                d.transitions.push_back({d.states[s], d.actions[a], d.states[to[k]], w[k] / total});
        }
    }
    return validate_mdp(d);
}

// Dense Gaussian elimination with partial pivoting; returns false on a
// (near-)singular system.
inline bool gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b,
                        std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-12) return false;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.resize(n);
    for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

// Reference reach probability of a fixed policy toward a target set, by
// solving the absorption system over non-target, non-absorbing states.
inline std::vector<double> oracle_policy_reach(const Mdp& mdp, const StationaryPolicy& pi,
                                               const std::vector<StateId>& targets) {
    const int ns = mdp.num_states();
    std::vector<char> is_target(ns, 0);
    for (StateId t : targets) is_target[t] = 1;

    std::vector<int> sys_index(ns, -1);
    std::vector<StateId> sys_states;
    for (StateId s = 0; s < ns; ++s) {
        if (is_target[s] || mdp.is_goal(s)) continue;
        sys_index[s] = static_cast<int>(sys_states.size());
        sys_states.push_back(s);
    }
    const int n = static_cast<int>(sys_states.size());
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    for (int i = 0; i < n; ++i) {
        StateId s = sys_states[i];
        a[i][i] += 1.0;
        for (ActionId act = 0; act < mdp.num_actions(); ++act) {
            double pa = pi.prob(s, act);
            if (pa <= 0.0) continue;
            for (const auto& e : mdp.successors(s, act)) {
                if (is_target[e.next])
                    b[i] += pa * e.prob;
                else if (sys_index[e.next] >= 0)
                    a[i][sys_index[e.next]] -= pa * e.prob;
            }
        }
    }
    std::vector<double> x;
    if (!gauss_solve(a, b, x)) {
        // A policy-induced recurrent class never reaches the target; resolve
        // by damping (probability of eventually leaving such a class is 0).
        x.assign(n, 0.0);
        for (int sweep = 0; sweep < 200000; ++sweep) {
            double delta = 0.0;
            for (int i = 0; i < n; ++i) {
                double v = b[i];
                for (int j = 0; j < n; ++j)
                    if (j != i) v -= a[i][j] * x[j];
                v /= a[i][i];
                delta = std::max(delta, std::abs(v - x[i]));
                x[i] = v;
            }
            if (delta < 1e-13) break;
        }
    }
    std::vector<double> reach(ns, 0.0);
    for (StateId t : targets) reach[t] = 1.0;
    for (int i = 0; i < n; ++i) reach[sys_states[i]] = x[i];
    return reach;
}

// Brute-force maximum reach probability by enumerating all deterministic
// stationary policies (use only on tiny MDPs).
inline std::vector<double> oracle_max_reach(const Mdp& mdp, StateId target) {
    const int ns = mdp.num_states(), na = mdp.num_actions();
    double combos = std::pow(static_cast<double>(na), ns);
    std::vector<double> best(ns, 0.0);
    for (long code = 0; code < static_cast<long>(combos); ++code) {
        StationaryPolicy pi(ns, na);
        long rest = code;
        for (StateId s = 0; s < ns; ++s) {
            pi.set_prob(s, static_cast<ActionId>(rest % na), 1.0);
            rest /= na;
        }
        auto reach = oracle_policy_reach(mdp, pi, {target});
        for (StateId s = 0; s < ns; ++s) best[s] = std::max(best[s], reach[s]);
    }
    return best;
}

// Reference softmax value iteration with the same recursion, written as a
// plain dense sweep, run to a much tighter tolerance.
inline std::vector<double> oracle_soft_values(const Mdp& mdp, StateId goal,
                                              const ObserverParams& params,
                                              double tol = 1e-12, int iters = 2000000) {
    const int ns = mdp.num_states(), na = mdp.num_actions();
    std::vector<double> v(ns, -params.init_penalty);
    v[goal] = 0.0;
    for (int it = 0; it < iters; ++it) {
        double delta = 0.0;
        std::vector<double> nv(ns);
        for (StateId s = 0; s < ns; ++s) {
            if (s == goal) {
                nv[s] = 0.0;
                continue;
            }
            double m = -1e300;
            std::vector<double> q(na);
            for (ActionId a = 0; a < na; ++a) {
                double acc = 0.0;
                for (const auto& e : mdp.successors(s, a)) acc += e.prob * v[e.next];
                q[a] = -params.cost_at(mdp, s, a) + params.gamma_o * acc;
                m = std::max(m, q[a]);
            }
            double z = 0.0;
            for (ActionId a = 0; a < na; ++a) z += std::exp((q[a] - m) / params.alpha);
            nv[s] = m + params.alpha * std::log(z);
            delta += std::abs(nv[s] - v[s]);
        }
        v = nv;
        if (delta <= tol) break;
    }
    return v;
}

// Posterior from oracle values, mirroring the scaled-exponent convention.
inline std::vector<double> oracle_posterior(const Mdp& mdp,
                                            const std::vector<std::vector<double>>& values,
                                            const ObserverParams& params, StateId s1,
                                            StateId sT) {
    const int ng = static_cast<int>(values.size());
    double scale = params.alpha_scaled_posterior ? 1.0 / params.alpha : 1.0;
    std::vector<double> logw(ng);
    double m = -1e300;
    for (int i = 0; i < ng; ++i) {
        logw[i] = (values[i][sT] - values[i][s1]) * scale + std::log(params.prior[i]);
        m = std::max(m, logw[i]);
    }
    std::vector<double> p(ng);
    double z = 0.0;
    for (int i = 0; i < ng; ++i) {
        p[i] = std::exp(logw[i] - m);
        z += p[i];
    }
    for (double& q : p) q /= z;
    return p;
}

}  // namespace ddm::testing
