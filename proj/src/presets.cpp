#include "ddm/presets.hpp"

#include "ddm/errors.hpp"

namespace ddm {

const std::vector<Preset>& known_presets() {
    static const std::vector<Preset> presets = {
        {"study1-baseline", 20.0, 0.95, 0.95, 1.0},
        {"study1-ddm", 0.5, 0.95, 0.95, 1.0},
        {"study2-ddm", 1.0, 0.95, 0.9, 20.0},
    };
    return presets;
}

const Preset& preset_by_name(const std::string& name) {
    for (const auto& p : known_presets())
        if (p.name == name) return p;
    fail("cli", "UnknownPreset", "unknown preset '" + name + "'");
}

ObserverParams observer_params_from_preset(const Mdp& mdp, const Preset& preset) {
    ObserverParams params = ObserverParams::uniform(mdp, preset.cost, preset.alpha,
                                                    preset.gamma_o);
    params.vi_tolerance = 1e-4;
    params.init_penalty = 1e6;
    return params;
}

}  // namespace ddm
