#include "ddm/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddm/errors.hpp"

namespace ddm {

namespace {
constexpr const char* kModule = "observer";

double logsumexp_scaled(const double* values, int n, double alpha) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) m = std::max(m, values[i]);
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::exp((values[i] - m) / alpha);
    return m + alpha * std::log(acc);
}

}  // namespace

ObserverParams ObserverParams::uniform(const Mdp& mdp, double cost_value,
                                       double alpha, double gamma_o) {
    ObserverParams p;
    p.cost.assign(static_cast<size_t>(mdp.num_states()) * mdp.num_actions(), cost_value);
    p.alpha = alpha;
    p.gamma_o = gamma_o;
    p.prior.assign(mdp.goals().size(), 1.0 / mdp.goals().size());
    return p;
}

void ObserverParams::validate(const Mdp& mdp) const {
    if (cost.size() != static_cast<size_t>(mdp.num_states()) * mdp.num_actions())
        fail(kModule, "InvalidParams", "cost table shape does not match the MDP");
    for (double c : cost)
        if (!(c >= 0.0)) fail(kModule, "InvalidParams", "costs must be nonnegative");
    if (!(alpha > 0.0)) fail(kModule, "InvalidParams", "alpha must be positive");
    if (!(gamma_o > 0.0 && gamma_o < 1.0))
        fail(kModule, "InvalidParams", "gamma_o must lie strictly inside (0, 1)");
    if (prior.size() != mdp.goals().size())
        fail(kModule, "InvalidParams", "prior size does not match the goal set");
    double sum = 0.0;
    for (double p : prior) {
        if (!(p >= 0.0)) fail(kModule, "InvalidParams", "prior entries must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        fail(kModule, "InvalidParams", "prior must sum to one");
    if (!(vi_tolerance >= 0.0)) fail(kModule, "InvalidParams", "vi_tolerance must be nonnegative");
    if (!(init_penalty > 0.0)) fail(kModule, "InvalidParams", "init_penalty must be positive");
}

SoftValueTable softmax_value_iteration(const Mdp& mdp, StateId goal,
                                       const ObserverParams& params) {
    params.validate(mdp);
    if (!mdp.is_goal(goal)) fail(kModule, "UnknownGoal", "state is not a goal");

    const int ns = mdp.num_states(), na = mdp.num_actions();
    SoftValueTable table;
    table.goal = goal;
    table.v.assign(ns, -params.init_penalty);
    table.v[goal] = 0.0;
    table.q.assign(static_cast<size_t>(ns) * na, 0.0);

    std::vector<double> v_next(ns, 0.0);
    std::vector<double> q_row(na, 0.0);
    for (int it = 1; it <= params.max_iterations; ++it) {
        double delta = 0.0;
        for (StateId s = 0; s < ns; ++s) {
            if (s == goal) {
                v_next[s] = 0.0;  // pinned
                for (ActionId a = 0; a < na; ++a) {
                    double exp_v = 0.0;
                    for (const auto& e : mdp.successors(s, a)) exp_v += e.prob * table.v[e.next];
                    table.q[static_cast<size_t>(s) * na + a] =
                        -params.cost_at(mdp, s, a) + params.gamma_o * exp_v;
                }
                continue;
            }
            for (ActionId a = 0; a < na; ++a) {
                double exp_v = 0.0;
                for (const auto& e : mdp.successors(s, a)) exp_v += e.prob * table.v[e.next];
                q_row[a] = -params.cost_at(mdp, s, a) + params.gamma_o * exp_v;
                table.q[static_cast<size_t>(s) * na + a] = q_row[a];
            }
            v_next[s] = logsumexp_scaled(q_row.data(), na, params.alpha);
            delta += std::abs(v_next[s] - table.v[s]);
        }
        table.v.swap(v_next);
        table.iterations = it;
        table.final_delta = delta;
        if (delta <= params.vi_tolerance) {
            table.converged = true;
            break;
        }
    }
    return table;
}

std::vector<SoftValueTable> observer_tables(const Mdp& mdp,
                                            const ObserverParams& params) {
    std::vector<SoftValueTable> tables;
    tables.reserve(mdp.goals().size());
    for (StateId g : mdp.goals()) tables.push_back(softmax_value_iteration(mdp, g, params));
    return tables;
}

StationaryPolicy expected_policy(const Mdp& mdp, const SoftValueTable& table,
                                 const ObserverParams& params) {
    const int ns = mdp.num_states(), na = mdp.num_actions();
    StationaryPolicy pi(ns, na);
    for (StateId s = 0; s < ns; ++s) {
        if (mdp.is_goal(s)) {
            for (ActionId a = 0; a < na; ++a) pi.set_prob(s, a, 1.0 / na);
            continue;
        }
        for (ActionId a = 0; a < na; ++a) {
            double q = table.q[static_cast<size_t>(s) * na + a];
            pi.set_prob(s, a, std::exp((q - table.v[s]) / params.alpha));
        }
    }
    return pi;
}

int GoalPosterior::argmax() const {
    int best = 0;
    for (int i = 1; i < static_cast<int>(probabilities.size()); ++i)
        if (probabilities[i] > probabilities[best]) best = i;
    return best;
}

int GoalPosterior::second_argmax() const {
    if (probabilities.size() < 2) return -1;
    int first = argmax();
    int second = -1;
    for (int i = 0; i < static_cast<int>(probabilities.size()); ++i) {
        if (i == first) continue;
        if (second < 0 || probabilities[i] > probabilities[second]) second = i;
    }
    return second;
}

GoalPosterior predict_goals(const Mdp& mdp, const std::vector<SoftValueTable>& tables,
                            const ObserverParams& params, StateId s1, StateId sT) {
    if (tables.size() != mdp.goals().size())
        fail(kModule, "InvalidParams", "expected one value table per goal");
    const int ng = static_cast<int>(tables.size());
    const double scale = params.alpha_scaled_posterior ? 1.0 / params.alpha : 1.0;

    std::vector<double> log_w(ng);
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < ng; ++i) {
        double exponent = (tables[i].v[sT] - tables[i].v[s1]) * scale;
        log_w[i] = params.prior[i] > 0.0
                       ? exponent + std::log(params.prior[i])
                       : -std::numeric_limits<double>::infinity();
        m = std::max(m, log_w[i]);
    }
    if (!std::isfinite(m))
        fail(kModule, "DegenerateNormalizer",
             "all goal weights vanished at state '" + mdp.state_name(sT) + "'");

    GoalPosterior post;
    post.probabilities.resize(ng);
    double z = 0.0;
    for (int i = 0; i < ng; ++i) {
        post.probabilities[i] = std::exp(log_w[i] - m);
        z += post.probabilities[i];
    }
    if (!(z > 0.0) || !std::isfinite(z))
        fail(kModule, "DegenerateNormalizer",
             "normalizer vanished at state '" + mdp.state_name(sT) + "'");
    for (double& p : post.probabilities) p /= z;
    return post;
}

std::vector<GoalPosterior> posterior_along_states(
    const Mdp& mdp, const std::vector<SoftValueTable>& tables,
    const ObserverParams& params, const std::vector<StateId>& states) {
    std::vector<GoalPosterior> result;
    result.reserve(states.size());
    if (states.empty()) return result;
    StateId s1 = states.front();
    for (size_t i = 0; i < states.size(); ++i) {
        try {
            result.push_back(predict_goals(mdp, tables, params, s1, states[i]));
        } catch (const Error& e) {
            if (e.code() == "DegenerateNormalizer")
                fail(kModule, "DegenerateNormalizer",
                     e.message() + " (step " + std::to_string(i) + ")");
            throw;
        }
    }
    return result;
}

}  // namespace ddm
