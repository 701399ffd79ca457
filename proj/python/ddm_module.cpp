#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddm/baselines.hpp"
#include "ddm/deception.hpp"
#include "ddm/errors.hpp"
#include "ddm/evaluation.hpp"
#include "ddm/grid.hpp"
#include "ddm/mdp.hpp"
#include "ddm/network.hpp"
#include "ddm/observer.hpp"
#include "ddm/presets.hpp"
#include "ddm/product.hpp"
#include "ddm/synthesis.hpp"

namespace py = pybind11;
using namespace ddm;

namespace {

using PolicyDict = std::map<std::string, std::map<std::string, double>>;

PolicyDict policy_to_dict(const Mdp& mdp, const StationaryPolicy& pi) {
    PolicyDict out;
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        auto& row = out[mdp.state_name(s)];
        for (ActionId a = 0; a < mdp.num_actions(); ++a)
            row[mdp.action_name(a)] = pi.prob(s, a);
    }
    return out;
}

StationaryPolicy policy_from_dict(const Mdp& mdp, const PolicyDict& dict) {
    StationaryPolicy pi(mdp.num_states(), mdp.num_actions());
    for (const auto& [state, row] : dict) {
        StateId s = mdp.state_index(state);
        for (const auto& [action, p] : row) pi.set_prob(s, mdp.action_index(action), p);
    }
    return pi;
}

ObserverParams make_params(const Mdp& mdp, double cost, double alpha, double gamma_o,
                           std::optional<std::vector<double>> prior, double vi_tolerance,
                           bool alpha_scaled) {
    ObserverParams params = ObserverParams::uniform(mdp, cost, alpha, gamma_o);
    if (prior) params.prior = *prior;
    params.vi_tolerance = vi_tolerance;
    params.alpha_scaled_posterior = alpha_scaled;
    return params;
}

DeceptionSpec make_spec(const std::string& mode, double gamma_a, double clip) {
    return DeceptionSpec{deception_mode_from_string(mode), gamma_a, clip};
}

py::dict synthesis_to_dict(const Mdp& mdp, const SynthesisResult& result) {
    py::dict out;
    out["v_star"] = result.v_star;
    out["total_occupancy"] = result.total_occupancy;
    out["reach_probability"] = result.reach_probability;
    out["policy"] = policy_to_dict(mdp, result.policy);
    std::map<std::string, double> occupancy;
    for (int j = 0; j < result.secondary_lp.num_vars; ++j) {
        auto [s, a] = result.secondary_lp.var_meta[j];
        occupancy[mdp.state_name(s)] += result.lp2.x[j];
    }
    out["state_occupancy"] = occupancy;
    return out;
}

}  // namespace

PYBIND11_MODULE(ddmpy, m) {
    m.doc() = "Deceptive goal-reaching policy synthesis over MDPs";

    py::register_exception<Error>(m, "DdmError");

    py::class_<Mdp>(m, "Mdp")
        .def_property_readonly("states", &Mdp::state_names)
        .def_property_readonly("actions", &Mdp::action_names)
        .def_property_readonly("initial_state",
                               [](const Mdp& mdp) { return mdp.state_name(mdp.initial_state()); })
        .def_property_readonly("true_goal",
                               [](const Mdp& mdp) { return mdp.state_name(mdp.true_goal()); })
        .def_property_readonly("goals",
                               [](const Mdp& mdp) {
                                   std::vector<std::string> names;
                                   for (StateId g : mdp.goals()) names.push_back(mdp.state_name(g));
                                   return names;
                               })
        .def("__repr__", [](const Mdp& mdp) {
            return "<Mdp states=" + std::to_string(mdp.num_states()) +
                   " actions=" + std::to_string(mdp.num_actions()) + ">";
        });

    py::class_<ObserverParams>(m, "ObserverParams")
        .def_readwrite("alpha", &ObserverParams::alpha)
        .def_readwrite("gamma_o", &ObserverParams::gamma_o)
        .def_readwrite("prior", &ObserverParams::prior)
        .def_readwrite("vi_tolerance", &ObserverParams::vi_tolerance)
        .def_readwrite("alpha_scaled_posterior", &ObserverParams::alpha_scaled_posterior);

    m.def("load_grid", [](const std::string& path) {
        return build_grid_mdp(GridSpec::from_file(path));
    });

    m.def(
        "grid_mdp",
        [](int width, int height, std::vector<std::pair<int, int>> obstacles,
           std::pair<int, int> start, std::vector<std::pair<int, int>> goals,
           std::pair<int, int> true_goal) {
            GridSpec spec;
            spec.width = width;
            spec.height = height;
            spec.obstacles = std::move(obstacles);
            spec.start = start;
            spec.goals = std::move(goals);
            spec.true_goal = true_goal;
            return build_grid_mdp(spec);
        },
        py::arg("width"), py::arg("height"), py::arg("obstacles"), py::arg("start"),
        py::arg("goals"), py::arg("true_goal"));

    m.def(
        "observer_params",
        [](const Mdp& mdp, double cost, double alpha, double gamma_o,
           std::optional<std::vector<double>> prior, double vi_tolerance, bool alpha_scaled) {
            return make_params(mdp, cost, alpha, gamma_o, std::move(prior), vi_tolerance,
                               alpha_scaled);
        },
        py::arg("mdp"), py::arg("cost") = 1.0, py::arg("alpha") = 1.0,
        py::arg("gamma_o") = 0.95, py::arg("prior") = std::nullopt,
        py::arg("vi_tolerance") = 1e-4, py::arg("alpha_scaled") = true);

    m.def("preset_params", [](const Mdp& mdp, const std::string& name) {
        const Preset& preset = preset_by_name(name);
        ObserverParams params = observer_params_from_preset(mdp, preset);
        return py::make_tuple(params, preset.gamma_a);
    });

    m.def("preset_names", []() {
        std::vector<std::string> names;
        for (const auto& p : known_presets()) names.push_back(p.name);
        return names;
    });

    m.def("min_steps", [](const Mdp& mdp) {
        std::map<std::string, std::optional<int>> out;
        auto t = min_steps(mdp);
        for (StateId s = 0; s < mdp.num_states(); ++s) out[mdp.state_name(s)] = t[s];
        return out;
    });

    m.def("max_reach", [](const Mdp& mdp, const std::string& target) {
        std::map<std::string, double> out;
        auto r = max_reach_probability(mdp, mdp.state_index(target));
        for (StateId s = 0; s < mdp.num_states(); ++s) out[mdp.state_name(s)] = r[s];
        return out;
    });

    m.def("soft_values", [](const Mdp& mdp, const ObserverParams& params) {
        std::vector<std::map<std::string, double>> out;
        for (const auto& table : observer_tables(mdp, params)) {
            std::map<std::string, double> v;
            for (StateId s = 0; s < mdp.num_states(); ++s) v[mdp.state_name(s)] = table.v[s];
            out.push_back(std::move(v));
        }
        return out;
    });

    m.def(
        "posterior",
        [](const Mdp& mdp, const ObserverParams& params, const std::string& at) {
            auto tables = observer_tables(mdp, params);
            GoalPosterior post = predict_goals(mdp, tables, params, mdp.initial_state(),
                                               mdp.state_index(at));
            std::map<std::string, double> out;
            for (size_t i = 0; i < post.probabilities.size(); ++i)
                out[mdp.state_name(mdp.goals()[i])] = post.probabilities[i];
            return out;
        },
        py::arg("mdp"), py::arg("params"), py::arg("at"));

    m.def(
        "cost_table",
        [](const Mdp& mdp, const ObserverParams& params, const std::string& mode,
           double gamma_a, double clip) {
            auto tables = observer_tables(mdp, params);
            DeceptionCostTable g =
                build_cost(mdp, tables, params, make_spec(mode, gamma_a, clip), min_steps(mdp));
            std::map<std::string, double> out;
            for (StateId s = 0; s < mdp.num_states(); ++s)
                out[mdp.state_name(s)] = g.g_state(s);
            return out;
        },
        py::arg("mdp"), py::arg("params"), py::arg("mode") = "exaggeration",
        py::arg("gamma_a") = 0.95, py::arg("clip") = 1e-5);

    m.def(
        "synthesize",
        [](const Mdp& mdp, const ObserverParams& params, const std::string& mode,
           double gamma_a, double clip) {
            SynthesisResult result = synthesize(mdp, params, make_spec(mode, gamma_a, clip));
            return synthesis_to_dict(mdp, result);
        },
        py::arg("mdp"), py::arg("params"), py::arg("mode") = "exaggeration",
        py::arg("gamma_a") = 0.95, py::arg("clip") = 1e-5);

    m.def(
        "simulate",
        [](const Mdp& mdp, const PolicyDict& policy, std::uint64_t seed, int max_steps) {
            Trajectory t = simulate(mdp, policy_from_dict(mdp, policy), seed, max_steps);
            py::dict out;
            std::vector<std::string> states, actions;
            for (StateId s : t.states) states.push_back(mdp.state_name(s));
            for (ActionId a : t.actions) actions.push_back(mdp.action_name(a));
            out["states"] = states;
            out["actions"] = actions;
            out["max_steps_exceeded"] = t.max_steps_exceeded;
            return out;
        },
        py::arg("mdp"), py::arg("policy"), py::arg("seed") = 0, py::arg("max_steps") = 10000);

    m.def(
        "policy_reach",
        [](const Mdp& mdp, const PolicyDict& policy, std::vector<std::string> targets) {
            std::vector<StateId> ids;
            for (const auto& t : targets) ids.push_back(mdp.state_index(t));
            StatePartition part = zero_reach_states(mdp);
            return policy_reach_probability(mdp, policy_from_dict(mdp, policy), part,
                                            ids)[mdp.initial_state()];
        },
        py::arg("mdp"), py::arg("policy"), py::arg("targets"));

    m.def(
        "policy_cost",
        [](const Mdp& mdp, const ObserverParams& params, const PolicyDict& policy,
           const std::string& mode, double gamma_a, double clip) {
            auto tables = observer_tables(mdp, params);
            DeceptionCostTable g =
                build_cost(mdp, tables, params, make_spec(mode, gamma_a, clip), min_steps(mdp));
            StatePartition part = zero_reach_states(mdp);
            return policy_deception_cost(mdp, policy_from_dict(mdp, policy), g, part);
        },
        py::arg("mdp"), py::arg("params"), py::arg("policy"),
        py::arg("mode") = "exaggeration", py::arg("gamma_a") = 0.95, py::arg("clip") = 1e-5);

    m.def(
        "sequence_cost",
        [](const Mdp& mdp, const ObserverParams& params, std::vector<std::string> states,
           const std::string& mode, double gamma_a, double clip) {
            auto tables = observer_tables(mdp, params);
            DeceptionCostTable g =
                build_cost(mdp, tables, params, make_spec(mode, gamma_a, clip), min_steps(mdp));
            std::vector<StateId> ids;
            for (const auto& s : states) ids.push_back(mdp.state_index(s));
            return state_sequence_cost(g, ids);
        },
        py::arg("mdp"), py::arg("params"), py::arg("states"),
        py::arg("mode") = "exaggeration", py::arg("gamma_a") = 0.95, py::arg("clip") = 1e-5);

    m.def("shortest_trajectory", [](const Mdp& mdp) {
        BaselineTrajectory t = shortest_path_trajectory(mdp);
        std::vector<std::string> names;
        for (StateId s : t.states) names.push_back(mdp.state_name(s));
        return names;
    });

    m.def("dpp_trajectory", [](const Mdp& mdp) {
        BaselineTrajectory t = dpp_trajectory(mdp);
        py::dict out;
        std::vector<std::string> names;
        for (StateId s : t.states) names.push_back(mdp.state_name(s));
        out["states"] = names;
        out["decoy"] = mdp.state_name(*t.decoy_used);
        return out;
    });

    m.def(
        "evaluate_segments",
        [](const Mdp& mdp, const ObserverParams& params, std::vector<std::string> states,
           std::vector<double> fractions) {
            auto tables = observer_tables(mdp, params);
            std::vector<StateId> ids;
            for (const auto& s : states) ids.push_back(mdp.state_index(s));
            SegmentReport report = evaluate_segments(mdp, tables, params, ids, fractions);
            py::list rows;
            for (const auto& seg : report.segments) {
                py::dict row;
                row["fraction"] = seg.fraction;
                row["prefix_len"] = seg.prefix_length;
                row["argmax"] = mdp.state_name(mdp.goals()[seg.argmax_goal]);
                row["second"] = seg.second_goal >= 0
                                    ? py::object(py::str(mdp.state_name(mdp.goals()[seg.second_goal])))
                                    : py::object(py::none());
                row["correct"] = seg.correct;
                std::map<std::string, double> post;
                for (size_t i = 0; i < seg.posterior.probabilities.size(); ++i)
                    post[mdp.state_name(mdp.goals()[i])] = seg.posterior.probabilities[i];
                row["posterior"] = post;
                rows.append(row);
            }
            return rows;
        },
        py::arg("mdp"), py::arg("params"), py::arg("states"),
        py::arg("fractions") = std::vector<double>{0.25, 0.5, 0.75, 0.9});

    py::class_<TravelNetwork>(m, "TravelNetwork")
        .def_property_readonly("base", [](const TravelNetwork& n) { return n.base; });

    m.def("load_network", &load_network, py::arg("csv_path"));

    m.def(
        "product_synthesize",
        [](const TravelNetwork& net, int t_max, double threshold,
           const ObserverParams& params, const std::string& mode, double gamma_a,
           double clip) {
            auto tables = observer_tables(net.base, params);
            DeceptionCostTable g = build_cost(net.base, tables, params,
                                              make_spec(mode, gamma_a, clip), min_steps(net.base));
            ProductMdp product = build_product(net.base, net.discretize(t_max), t_max);
            SynthesisResult result = synthesize_time_constrained(product, g, threshold);

            py::dict out = synthesis_to_dict(product.mdp(), result);
            StatePartition part = zero_reach_states(product.mdp());
            out["on_time_probability"] = policy_reach_probability(
                product.mdp(), result.policy, part,
                product.goal_layer())[product.mdp().initial_state()];
            std::map<std::string, double> base_occ;
            for (int j = 0; j < result.secondary_lp.num_vars; ++j) {
                auto [s, a] = result.secondary_lp.var_meta[j];
                base_occ[net.base.state_name(product.base_state_of(s))] += result.lp2.x[j];
            }
            out["base_occupancy"] = base_occ;
            return out;
        },
        py::arg("network"), py::arg("t_max"), py::arg("threshold") = 0.8,
        py::arg("params"), py::arg("mode") = "exaggeration", py::arg("gamma_a") = 1.0,
        py::arg("clip") = 1e-5);

    m.def("max_on_time", [](const TravelNetwork& net, int t_max) {
        ProductMdp product = build_product(net.base, net.discretize(t_max), t_max);
        return max_reach_probability(product.mdp(),
                                     product.goal_layer())[product.mdp().initial_state()];
    });
}
