#include "ddm/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "ddm/errors.hpp"

namespace ddm {

namespace {
constexpr const char* kModule = "mdp-core";
}

StateId Mdp::state_index(const std::string& name) const {
    auto it = state_index_.find(name);
    if (it == state_index_.end()) fail(kModule, "UnknownState", "no state named '" + name + "'");
    return it->second;
}

ActionId Mdp::action_index(const std::string& name) const {
    auto it = action_index_.find(name);
    if (it == action_index_.end()) fail(kModule, "UnknownAction", "no action named '" + name + "'");
    return it->second;
}

double Mdp::transition_prob(StateId s, ActionId a, StateId next) const {
    for (const auto& e : successors(s, a))
        if (e.next == next) return e.prob;
    return 0.0;
}

Mdp validate_mdp(const MdpDescription& raw) {
    Mdp m;
    m.state_names_ = raw.states;
    m.action_names_ = raw.actions;
    if (m.state_names_.empty()) fail(kModule, "EmptyStateSet", "no states listed");
    if (m.action_names_.empty()) fail(kModule, "EmptyActionSet", "no actions listed");

    for (int i = 0; i < m.num_states(); ++i) {
        if (!m.state_index_.emplace(m.state_names_[i], i).second)
            fail(kModule, "DuplicateState", "state '" + m.state_names_[i] + "' listed twice");
    }
    for (int i = 0; i < m.num_actions(); ++i) {
        if (!m.action_index_.emplace(m.action_names_[i], i).second)
            fail(kModule, "DuplicateAction", "action '" + m.action_names_[i] + "' listed twice");
    }

    m.initial_state_ = m.state_index(raw.initial_state);

    if (raw.goals.empty()) fail(kModule, "EmptyGoalSet", "goal set is empty");
    m.is_goal_.assign(m.num_states(), 0);
    m.goal_pos_.assign(m.num_states(), -1);
    for (const auto& g : raw.goals) {
        StateId gs = m.state_index(g);
        if (m.is_goal_[gs]) continue;
        m.goal_pos_[gs] = static_cast<int>(m.goals_.size());
        m.goals_.push_back(gs);
        m.is_goal_[gs] = 1;
    }
    auto tg = m.state_index_.find(raw.true_goal);
    if (tg == m.state_index_.end() || !m.is_goal_[tg->second])
        fail(kModule, "UnknownTrueGoal", "true goal '" + raw.true_goal + "' is not in the goal set");
    m.true_goal_ = tg->second;

    const int ns = m.num_states(), na = m.num_actions();
    std::vector<std::vector<double>> dense(static_cast<size_t>(ns) * na,
                                           std::vector<double>());
    for (auto& row : dense) row.assign(ns, 0.0);
    for (const auto& arc : raw.transitions) {
        StateId s = m.state_index(arc.state);
        ActionId a = m.action_index(arc.action);
        StateId nxt = m.state_index(arc.successor);
        dense[static_cast<size_t>(s) * na + a][nxt] += arc.prob;
    }

    m.rows_.resize(static_cast<size_t>(ns) * na);
    for (StateId s = 0; s < ns; ++s) {
        for (ActionId a = 0; a < na; ++a) {
            auto& row = dense[static_cast<size_t>(s) * na + a];
            double sum = 0.0;
            for (StateId t = 0; t < ns; ++t) {
                if (row[t] < 0.0)
                    fail(kModule, "NonStochasticRow",
                         "negative probability at (" + m.state_names_[s] + ", " +
                             m.action_names_[a] + ")");
                sum += row[t];
            }
            if (std::abs(sum - 1.0) > 1e-9)
                fail(kModule, "NonStochasticRow",
                     "row (" + m.state_names_[s] + ", " + m.action_names_[a] +
                         ") sums to " + std::to_string(sum));
            auto& out = m.rows_[static_cast<size_t>(s) * na + a];
            for (StateId t = 0; t < ns; ++t)
                if (row[t] > 0.0) out.push_back({t, row[t] / sum});
        }
    }

    for (StateId g : m.goals_) {
        for (ActionId a = 0; a < na; ++a) {
            auto row = m.successors(g, a);
            if (row.size() != 1 || row[0].next != g ||
                std::abs(row[0].prob - 1.0) > 1e-12)
                fail(kModule, "NonAbsorbingGoal",
                     "goal '" + m.state_names_[g] + "' is not absorbing under action '" +
                         m.action_names_[a] + "'");
        }
    }
    return m;
}

StationaryPolicy StationaryPolicy::uniform(int num_states, int num_actions) {
    StationaryPolicy p(num_states, num_actions);
    const double u = 1.0 / num_actions;
    for (StateId s = 0; s < num_states; ++s)
        for (ActionId a = 0; a < num_actions; ++a) p.set_prob(s, a, u);
    return p;
}

void StationaryPolicy::validate(double tol) const {
    for (StateId s = 0; s < num_states_; ++s) {
        double sum = 0.0;
        for (ActionId a = 0; a < num_actions_; ++a) {
            double p = prob(s, a);
            if (p < -tol || p > 1.0 + tol)
                fail(kModule, "InvalidPolicy", "probability out of range at state " + std::to_string(s));
            sum += p;
        }
        if (std::abs(sum - 1.0) > tol)
            fail(kModule, "InvalidPolicy",
                 "policy row at state " + std::to_string(s) + " sums to " + std::to_string(sum));
    }
}

std::vector<StepCount> min_steps(const Mdp& mdp) {
    const int ns = mdp.num_states();
    std::vector<StepCount> dist(ns);
    std::deque<StateId> queue;
    dist[mdp.initial_state()] = 0;
    queue.push_back(mdp.initial_state());
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        for (ActionId a = 0; a < mdp.num_actions(); ++a) {
            for (const auto& e : mdp.successors(s, a)) {
                if (!dist[e.next]) {
                    dist[e.next] = *dist[s] + 1;
                    queue.push_back(e.next);
                }
            }
        }
    }
    return dist;
}

namespace {

// States that can reach the target set on G_M (reverse search).
std::vector<char> can_reach(const Mdp& mdp, const std::vector<StateId>& targets) {
    const int ns = mdp.num_states(), na = mdp.num_actions();
    std::vector<std::vector<StateId>> preds(ns);
    for (StateId s = 0; s < ns; ++s)
        for (ActionId a = 0; a < na; ++a)
            for (const auto& e : mdp.successors(s, a))
                if (e.next != s) preds[e.next].push_back(s);
    std::vector<char> mark(ns, 0);
    std::deque<StateId> queue;
    for (StateId t : targets) {
        if (!mark[t]) {
            mark[t] = 1;
            queue.push_back(t);
        }
    }
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        for (StateId p : preds[s]) {
            if (!mark[p]) {
                mark[p] = 1;
                queue.push_back(p);
            }
        }
    }
    return mark;
}

}  // namespace

std::vector<double> max_reach_probability(const Mdp& mdp,
                                          const std::vector<StateId>& targets) {
    const int ns = mdp.num_states(), na = mdp.num_actions();
    std::vector<char> is_target(ns, 0);
    for (StateId t : targets) is_target[t] = 1;
    std::vector<char> alive = can_reach(mdp, targets);

    std::vector<double> v(ns, 0.0), next(ns, 0.0);
    for (StateId t : targets) v[t] = 1.0;
    constexpr double kTol = 1e-10;
    constexpr int kMaxIter = 1000000;
    for (int it = 0; it < kMaxIter; ++it) {
        double delta = 0.0;
        for (StateId s = 0; s < ns; ++s) {
            if (is_target[s] || !alive[s]) {
                next[s] = v[s];
                continue;
            }
            double best = 0.0;
            for (ActionId a = 0; a < na; ++a) {
                double acc = 0.0;
                for (const auto& e : mdp.successors(s, a)) acc += e.prob * v[e.next];
                best = std::max(best, acc);
            }
            next[s] = best;
            delta = std::max(delta, std::abs(best - v[s]));
        }
        v.swap(next);
        if (delta <= kTol) break;
    }
    return v;
}

std::vector<double> max_reach_probability(const Mdp& mdp, StateId target) {
    return max_reach_probability(mdp, std::vector<StateId>{target});
}

StatePartition zero_reach_states(const Mdp& mdp) {
    std::vector<char> reach = can_reach(mdp, mdp.goals());
    StatePartition part;
    const int ns = mdp.num_states();
    part.in_zero.assign(ns, 0);
    part.in_r.assign(ns, 0);
    for (StateId s = 0; s < ns; ++s) {
        if (!reach[s]) {
            part.in_zero[s] = 1;
            part.s_zero.push_back(s);
        } else if (!mdp.is_goal(s)) {
            part.in_r[s] = 1;
            part.s_r.push_back(s);
        }
    }
    return part;
}

ReachabilityReport analyze_reachability(const Mdp& mdp) {
    ReachabilityReport report;
    report.rmax = max_reach_probability(mdp, mdp.true_goal());
    report.t_min = min_steps(mdp);
    report.partition = zero_reach_states(mdp);
    return report;
}

namespace {

// Bit-stable uniform in [0, 1); avoids generate_canonical's
// implementation-defined rounding.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
int sample_index(std::mt19937_64& rng, const T& weights) {
    double u = uniform01(rng);
    double acc = 0.0;
    int last = -1;
    for (size_t i = 0; i < weights.size(); ++i) {
        double w = weights[i].second;
        if (w <= 0.0) continue;
        acc += w;
        last = static_cast<int>(i);
        if (u < acc) return last;
    }
    return last;  // acc may fall short of 1 by rounding; fold into last entry
}

}  // namespace

Trajectory simulate(const Mdp& mdp, const StationaryPolicy& policy,
                    std::uint64_t seed, int max_steps) {
    policy.validate(1e-9);
    if (policy.num_states() != mdp.num_states() ||
        policy.num_actions() != mdp.num_actions())
        fail(kModule, "InvalidPolicy", "policy shape does not match the MDP");

    std::mt19937_64 rng(seed);
    Trajectory traj;
    StateId s = mdp.initial_state();
    traj.states.push_back(s);
    for (int step = 0; step < max_steps; ++step) {
        if (mdp.is_goal(s)) return traj;
        std::vector<std::pair<ActionId, double>> action_weights;
        action_weights.reserve(mdp.num_actions());
        for (ActionId a = 0; a < mdp.num_actions(); ++a)
            action_weights.emplace_back(a, policy.prob(s, a));
        ActionId a = action_weights[sample_index(rng, action_weights)].first;

        auto row = mdp.successors(s, a);
        std::vector<std::pair<StateId, double>> next_weights;
        next_weights.reserve(row.size());
        for (const auto& e : row) next_weights.emplace_back(e.next, e.prob);
        StateId next = next_weights[sample_index(rng, next_weights)].first;

        traj.actions.push_back(a);
        traj.states.push_back(next);
        s = next;
    }
    if (!mdp.is_goal(s)) traj.max_steps_exceeded = true;
    return traj;
}

}  // namespace ddm
