#pragma once

#include <iosfwd>
#include <vector>

#include "ddm/mdp.hpp"
#include "ddm/observer.hpp"

namespace ddm {

enum class DeceptionMode { kExaggeration, kAmbiguity };

const char* to_string(DeceptionMode mode);
DeceptionMode deception_mode_from_string(const std::string& name);

struct DeceptionSpec {
    DeceptionMode mode = DeceptionMode::kExaggeration;
    double gamma_a = 0.95;          // in (0, 1]
    double clip_threshold = 1e-5;   // g values at or below this are zeroed

    void validate() const;
};

// 1 + Pr(G* | s1, s) - max over decoys of Pr(G | s1, s); range [0, 2].
// true_goal_pos indexes the true goal within the goal list.
double exaggeration_f(const GoalPosterior& posterior, int true_goal_pos);

// Sum over ordered goal pairs of |Pr(G) - Pr(G')|; zero iff uniform.
double ambiguity_f(const GoalPosterior& posterior);

// g(s,a) = gamma_a^{T_min(s)} * f(s); zero at goals and at states the
// initial state cannot reach. The value is shared across actions.
class DeceptionCostTable {
public:
    DeceptionCostTable() = default;
    DeceptionCostTable(DeceptionSpec spec, std::vector<double> per_state)
        : spec_(spec), per_state_(std::move(per_state)) {}

    double g(StateId s, ActionId) const { return per_state_[s]; }
    double g_state(StateId s) const { return per_state_[s]; }
    const std::vector<double>& per_state() const { return per_state_; }
    const DeceptionSpec& spec() const { return spec_; }

private:
    DeceptionSpec spec_;
    std::vector<double> per_state_;
};

DeceptionCostTable build_cost(const Mdp& mdp, const std::vector<SoftValueTable>& tables,
                              const ObserverParams& params, const DeceptionSpec& spec,
                              const std::vector<StepCount>& t_min);

// CSV rows: state,action,g
void write_cost_csv(std::ostream& out, const Mdp& mdp, const DeceptionCostTable& table);

}  // namespace ddm
