// Command-line front-end: loads grid/network inputs, runs synthesis,
// simulation, prediction and evaluation pipelines, and writes JSON/CSV
// artifacts. Exit code 0 on success; domain errors print a machine-readable
// JSON object on stderr and exit 1.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ddm/baselines.hpp"
#include "ddm/deception.hpp"
#include "ddm/errors.hpp"
#include "ddm/evaluation.hpp"
#include "ddm/grid.hpp"
#include "ddm/io.hpp"
#include "ddm/mdp.hpp"
#include "ddm/network.hpp"
#include "ddm/observer.hpp"
#include "ddm/presets.hpp"
#include "ddm/product.hpp"
#include "ddm/serialize.hpp"
#include "ddm/synthesis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("DDM_LOG");
        if (!env) return LogLevel::kError;
        std::string value(env);
        if (value == "debug") return LogLevel::kDebug;
        if (value == "info") return LogLevel::kInfo;
        return LogLevel::kError;
    }();
    return level;
}

void log_info(const std::string& message) {
    if (log_level() >= LogLevel::kInfo) std::cerr << "[info] " << message << "\n";
}

void log_debug(const std::string& message) {
    if (log_level() >= LogLevel::kDebug) std::cerr << "[debug] " << message << "\n";
}

// Observer/agent parameter bundle resolved from --preset plus overrides.
struct ParamFlags {
    std::optional<std::string> preset;
    std::optional<double> alpha;
    std::optional<double> gamma_o;
    std::optional<double> gamma_a;
    std::optional<double> cost;
    double clip = 1e-5;
    bool unscaled_posterior = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--preset", preset, "named parameter preset");
        cmd->add_option("--alpha", alpha, "observer efficiency parameter");
        cmd->add_option("--gamma-o", gamma_o, "observer discount factor");
        cmd->add_option("--gamma-a", gamma_a, "agent discount factor");
        cmd->add_option("--cost", cost, "uniform observer cost c(s,a)");
        cmd->add_option("--clip", clip, "zero out deception costs at or below this");
        cmd->add_flag("--unscaled-posterior", unscaled_posterior,
                      "use the unscaled posterior exponent");
    }

    struct Resolved {
        double alpha, gamma_o, gamma_a, cost;
        std::string label;
    };

    Resolved resolve(double default_alpha, double default_gamma_o, double default_gamma_a,
                     double default_cost) const {
        Resolved r{default_alpha, default_gamma_o, default_gamma_a, default_cost, "custom"};
        if (preset) {
            const ddm::Preset& p = ddm::preset_by_name(*preset);
            r = {p.alpha, p.gamma_o, p.gamma_a, p.cost, p.name};
        }
        if (alpha) r.alpha = *alpha;
        if (gamma_o) r.gamma_o = *gamma_o;
        if (gamma_a) r.gamma_a = *gamma_a;
        if (cost) r.cost = *cost;
        return r;
    }

    ddm::ObserverParams observer(const ddm::Mdp& mdp, const Resolved& r) const {
        ddm::ObserverParams params =
            ddm::ObserverParams::uniform(mdp, r.cost, r.alpha, r.gamma_o);
        params.vi_tolerance = 1e-4;
        params.alpha_scaled_posterior = !unscaled_posterior;
        return params;
    }
};

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) ddm::fail("cli", "OutputDirError", "cannot create '" + dir.string() + "'");
    return dir;
}

void write_json_artifact(const fs::path& path, const json& j) {
    ddm::write_text_file(path.string(), j.dump(2) + "\n", "cli");
    log_info("wrote " + path.string());
}

json summary_common(const ParamFlags::Resolved& r, const std::string& mode) {
    json j;
    j["preset"] = r.label;
    j["alpha"] = ddm::round_artifact(r.alpha);
    j["gamma_o"] = ddm::round_artifact(r.gamma_o);
    j["gamma_a"] = ddm::round_artifact(r.gamma_a);
    j["cost"] = ddm::round_artifact(r.cost);
    j["mode"] = mode;
    return j;
}

int run_synth(const std::string& grid_path, const ParamFlags& flags, const std::string& mode,
              const std::string& out) {
    ddm::Mdp mdp = ddm::build_grid_mdp(ddm::GridSpec::from_file(grid_path));
    auto r = flags.resolve(1.0, 0.95, 0.95, 1.0);
    ddm::ObserverParams params = flags.observer(mdp, r);
    ddm::DeceptionSpec spec{ddm::deception_mode_from_string(mode), r.gamma_a, flags.clip};
    log_info("synthesizing over " + std::to_string(mdp.num_states()) + " states");
    ddm::SynthesisResult result = ddm::synthesize(mdp, params, spec);

    fs::path dir = ensure_out_dir(out);
    write_json_artifact(dir / "policy.json",
                        ddm::policy_to_json(mdp, result.policy, result.v_star,
                                            result.reach_probability));

    auto tables = ddm::observer_tables(mdp, params);
    ddm::DeceptionCostTable g =
        ddm::build_cost(mdp, tables, params, spec, ddm::min_steps(mdp));
    std::ostringstream csv;
    ddm::write_cost_csv(csv, mdp, g);
    ddm::write_text_file((dir / "cost_table.csv").string(), csv.str(), "cli");
    log_info("wrote " + (dir / "cost_table.csv").string());

    json summary = summary_common(r, ddm::to_string(spec.mode));
    summary["v_star"] = ddm::round_artifact(result.v_star);
    summary["total_occupancy"] = ddm::round_artifact(result.total_occupancy);
    summary["reach_probability"] = ddm::round_artifact(result.reach_probability);
    write_json_artifact(dir / "summary.json", summary);
    return 0;
}

int run_simulate(const std::string& grid_path, const std::string& policy_path,
                 std::uint64_t seed, int rollouts, int max_steps, const std::string& out) {
    ddm::Mdp mdp = ddm::build_grid_mdp(ddm::GridSpec::from_file(grid_path));
    ddm::LoadedPolicy loaded =
        ddm::policy_from_json(mdp, ddm::load_json_file(policy_path, "cli"));
    fs::path dir = ensure_out_dir(out);
    for (int i = 0; i < rollouts; ++i) {
        std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        ddm::Trajectory t = ddm::simulate(mdp, loaded.policy, s, max_steps);
        write_json_artifact(dir / ("trajectory_" + std::to_string(s) + ".json"),
                            ddm::trajectory_to_json(mdp, t, s));
    }
    return 0;
}

int run_predict(const std::string& grid_path, const ParamFlags& flags, const std::string& out) {
    ddm::Mdp mdp = ddm::build_grid_mdp(ddm::GridSpec::from_file(grid_path));
    auto r = flags.resolve(1.0, 0.95, 0.95, 1.0);
    ddm::ObserverParams params = flags.observer(mdp, r);
    auto tables = ddm::observer_tables(mdp, params);

    std::ostringstream csv;
    csv << "state,goal,posterior\n";
    for (ddm::StateId s = 0; s < mdp.num_states(); ++s) {
        ddm::GoalPosterior post =
            ddm::predict_goals(mdp, tables, params, mdp.initial_state(), s);
        for (size_t i = 0; i < post.probabilities.size(); ++i)
            csv << mdp.state_name(s) << ',' << mdp.state_name(mdp.goals()[i]) << ','
                << ddm::format_double(post.probabilities[i]) << '\n';
    }
    fs::path dir = ensure_out_dir(out);
    ddm::write_text_file((dir / "posteriors.csv").string(), csv.str(), "cli");
    log_info("wrote " + (dir / "posteriors.csv").string());
    return 0;
}

int run_eval(const std::string& grid_path, const std::string& trajectory_path,
             const ParamFlags& flags, std::vector<double> fractions, const std::string& out) {
    ddm::Mdp mdp = ddm::build_grid_mdp(ddm::GridSpec::from_file(grid_path));
    auto r = flags.resolve(1.0, 0.95, 0.95, 1.0);
    ddm::ObserverParams params = flags.observer(mdp, r);
    auto tables = ddm::observer_tables(mdp, params);
    std::vector<ddm::StateId> states =
        ddm::trajectory_states_from_json(mdp, ddm::load_json_file(trajectory_path, "cli"));
    if (fractions.empty()) fractions = {0.25, 0.5, 0.75, 0.9};
    ddm::SegmentReport report = evaluate_segments(mdp, tables, params, states, fractions);
    std::ostringstream csv;
    ddm::write_segment_csv(csv, mdp, report);
    fs::path dir = ensure_out_dir(out);
    ddm::write_text_file((dir / "segments.csv").string(), csv.str(), "cli");
    log_info("wrote " + (dir / "segments.csv").string());
    return 0;
}

int run_product_synth(const std::string& network_path, const ParamFlags& flags,
                      const std::string& mode, int t_max, double threshold,
                      const std::string& out) {
    ddm::TravelNetwork net = ddm::load_network(network_path);
    auto r = flags.resolve(1.0, 0.95, 1.0, 5.0);
    ddm::ObserverParams params = flags.observer(net.base, r);
    ddm::DeceptionSpec spec{ddm::deception_mode_from_string(mode), r.gamma_a, flags.clip};

    auto tables = ddm::observer_tables(net.base, params);
    ddm::DeceptionCostTable g =
        ddm::build_cost(net.base, tables, params, spec, ddm::min_steps(net.base));
    log_info("building product over " + std::to_string(net.base.num_states()) +
             " nodes, t_max " + std::to_string(t_max));
    ddm::ProductMdp product = ddm::build_product(net.base, net.discretize(t_max), t_max);
    log_debug("product has " + std::to_string(product.mdp().num_states()) + " states");
    ddm::SynthesisResult result = ddm::synthesize_time_constrained(product, g, threshold);

    ddm::StatePartition part = ddm::zero_reach_states(product.mdp());
    double on_time = ddm::policy_reach_probability(
        product.mdp(), result.policy, part,
        product.goal_layer())[product.mdp().initial_state()];

    fs::path dir = ensure_out_dir(out);
    write_json_artifact(dir / "product_policy.json",
                        ddm::policy_to_json(product.mdp(), result.policy, result.v_star,
                                            result.reach_probability));
    json summary = summary_common(r, ddm::to_string(spec.mode));
    summary["t_max_minutes"] = t_max;
    summary["threshold"] = ddm::round_artifact(threshold);
    summary["v_star"] = ddm::round_artifact(result.v_star);
    summary["on_time_probability"] = ddm::round_artifact(on_time);
    summary["total_occupancy"] = ddm::round_artifact(result.total_occupancy);
    write_json_artifact(dir / "summary.json", summary);
    return 0;
}

int run_baseline(const std::string& grid_path, const std::string& out) {
    ddm::Mdp mdp = ddm::build_grid_mdp(ddm::GridSpec::from_file(grid_path));
    fs::path dir = ensure_out_dir(out);
    write_json_artifact(dir / "shortest.json",
                        ddm::baseline_to_json(mdp, ddm::shortest_path_trajectory(mdp)));
    write_json_artifact(dir / "dpp.json",
                        ddm::baseline_to_json(mdp, ddm::dpp_trajectory(mdp)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deceptive goal-reaching policy synthesis"};
    app.require_subcommand(1);

    std::string grid_path, network_path, policy_path, trajectory_path;
    std::string mode = "exaggeration";
    std::string out;
    std::uint64_t seed = 0;
    int rollouts = 1;
    int max_steps = 10000;
    int t_max = 30;
    double threshold = 0.8;
    std::vector<double> fractions;
    ParamFlags flags;

    CLI::App* synth = app.add_subcommand("synth", "synthesize a deceptive policy on a grid");
    synth->add_option("--grid", grid_path, "grid JSON file")->required();
    synth->add_option("--mode", mode, "exaggeration | ambiguity");
    synth->add_option("--out", out, "output directory");
    flags.attach(synth);

    CLI::App* simulate = app.add_subcommand("simulate", "roll out a saved policy");
    simulate->add_option("--grid", grid_path, "grid JSON file")->required();
    simulate->add_option("--policy", policy_path, "policy JSON file")->required();
    simulate->add_option("--seed", seed, "base seed");
    simulate->add_option("--rollouts", rollouts, "number of seeds");
    simulate->add_option("--max-steps", max_steps, "rollout step cap");
    simulate->add_option("--out", out, "output directory");

    CLI::App* predict = app.add_subcommand("predict", "per-state goal posteriors");
    predict->add_option("--grid", grid_path, "grid JSON file")->required();
    predict->add_option("--out", out, "output directory");
    flags.attach(predict);

    CLI::App* eval = app.add_subcommand("eval", "segment-level trajectory evaluation");
    eval->add_option("--grid", grid_path, "grid JSON file")->required();
    eval->add_option("--trajectory", trajectory_path, "trajectory JSON file")->required();
    eval->add_option("--fractions", fractions, "evaluation fractions in (0,1]");
    eval->add_option("--out", out, "output directory");
    flags.attach(eval);

    CLI::App* product = app.add_subcommand("product-synth",
                                           "chance-constrained synthesis on a travel network");
    product->add_option("--network", network_path, "edge CSV file")->required();
    product->add_option("--tmax", t_max, "arrival budget in minutes")->required();
    product->add_option("--threshold", threshold, "on-time probability bound");
    product->add_option("--mode", mode, "exaggeration | ambiguity");
    product->add_option("--out", out, "output directory");
    flags.attach(product);

    CLI::App* baseline = app.add_subcommand("baseline", "shortest and decoy-detour trajectories");
    baseline->add_option("--grid", grid_path, "grid JSON file")->required();
    baseline->add_option("--out", out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (synth->parsed()) return run_synth(grid_path, flags, mode, out);
        if (simulate->parsed())
            return run_simulate(grid_path, policy_path, seed, rollouts, max_steps, out);
        if (predict->parsed()) return run_predict(grid_path, flags, out);
        if (eval->parsed())
            return run_eval(grid_path, trajectory_path, flags, fractions, out);
        if (product->parsed())
            return run_product_synth(network_path, flags, mode, t_max, threshold, out);
        if (baseline->parsed()) return run_baseline(grid_path, out);
    } catch (const ddm::InfeasibleThreshold& e) {
        json err{{"module", e.module()},
                 {"code", e.code()},
                 {"message", e.message()},
                 {"max_achievable", ddm::round_artifact(e.max_achievable())}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const ddm::Error& e) {
        json err{{"module", e.module()}, {"code", e.code()}, {"message", e.message()}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        json err{{"module", "cli"}, {"code", "Internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 2;
}
