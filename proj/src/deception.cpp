#include "ddm/deception.hpp"

#include <cmath>
#include <ostream>

#include "ddm/errors.hpp"
#include "ddm/serialize.hpp"

namespace ddm {

namespace {
constexpr const char* kModule = "deception-cost";
}

const char* to_string(DeceptionMode mode) {
    return mode == DeceptionMode::kExaggeration ? "exaggeration" : "ambiguity";
}

DeceptionMode deception_mode_from_string(const std::string& name) {
    if (name == "exaggeration" || name == "exaggerate") return DeceptionMode::kExaggeration;
    if (name == "ambiguity" || name == "ambiguous") return DeceptionMode::kAmbiguity;
    fail(kModule, "UnknownMode", "unknown deception mode '" + name + "'");
}

void DeceptionSpec::validate() const {
    if (!(gamma_a > 0.0 && gamma_a <= 1.0))
        fail(kModule, "InvalidSpec", "gamma_a must lie in (0, 1]");
    if (!(clip_threshold >= 0.0))
        fail(kModule, "InvalidSpec", "clip_threshold must be nonnegative");
}

double exaggeration_f(const GoalPosterior& posterior, int true_goal_pos) {
    const int ng = static_cast<int>(posterior.probabilities.size());
    if (ng < 2)
        fail(kModule, "SingleGoal", "exaggeration needs at least one decoy goal");
    double best_decoy = 0.0;
    bool seen = false;
    for (int i = 0; i < ng; ++i) {
        if (i == true_goal_pos) continue;
        if (!seen || posterior.probabilities[i] > best_decoy) best_decoy = posterior.probabilities[i];
        seen = true;
    }
    return 1.0 + posterior.probabilities[true_goal_pos] - best_decoy;
}

double ambiguity_f(const GoalPosterior& posterior) {
    const int ng = static_cast<int>(posterior.probabilities.size());
    double total = 0.0;
    for (int i = 0; i < ng; ++i)
        for (int j = 0; j < ng; ++j)
            total += std::abs(posterior.probabilities[i] - posterior.probabilities[j]);
    return total;
}

DeceptionCostTable build_cost(const Mdp& mdp, const std::vector<SoftValueTable>& tables,
                              const ObserverParams& params, const DeceptionSpec& spec,
                              const std::vector<StepCount>& t_min) {
    spec.validate();
    if (t_min.size() != static_cast<size_t>(mdp.num_states()))
        fail(kModule, "InvalidSpec", "t_min size does not match the MDP");
    const int true_pos = mdp.goal_position(mdp.true_goal());
    const StateId s1 = mdp.initial_state();

    std::vector<double> g(mdp.num_states(), 0.0);
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        if (mdp.is_goal(s)) continue;
        if (!t_min[s]) continue;  // unreachable from s1, outside S_r anyway
        GoalPosterior post = predict_goals(mdp, tables, params, s1, s);
        double f = spec.mode == DeceptionMode::kExaggeration
                       ? exaggeration_f(post, true_pos)
                       : ambiguity_f(post);
        double value = std::pow(spec.gamma_a, *t_min[s]) * f;
        g[s] = value <= spec.clip_threshold ? 0.0 : value;
    }
    return DeceptionCostTable(spec, std::move(g));
}

void write_cost_csv(std::ostream& out, const Mdp& mdp, const DeceptionCostTable& table) {
    out << "state,action,g\n";
    for (StateId s = 0; s < mdp.num_states(); ++s)
        for (ActionId a = 0; a < mdp.num_actions(); ++a)
            out << mdp.state_name(s) << ',' << mdp.action_name(a) << ','
                << format_double(table.g(s, a)) << '\n';
}

}  // namespace ddm
