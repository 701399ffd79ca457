#pragma once

#include <string>
#include <vector>

#include "ddm/mdp.hpp"
#include "ddm/observer.hpp"

namespace ddm {

// Named parameter bundles loadable by keyword. Priors are uniform over the
// MDP's goal set; vi_tolerance is 1e-4 and the init penalty 1e6 throughout.
struct Preset {
    std::string name;
    double alpha;
    double gamma_o;
    double gamma_a;
    double cost;
};

const std::vector<Preset>& known_presets();
const Preset& preset_by_name(const std::string& name);  // throws cli/UnknownPreset

ObserverParams observer_params_from_preset(const Mdp& mdp, const Preset& preset);

}  // namespace ddm
