// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each check pins its tolerance in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
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
#include "fixtures.hpp"

using namespace ddm;
using namespace ddm::testing;

namespace {

#ifndef DDM_FIXTURES_DIR
#error "DDM_FIXTURES_DIR must point at the fixtures directory"
#endif
const std::string kFixtures = DDM_FIXTURES_DIR;

struct Criterion {
    int number;
    std::string title;
    std::function<void(std::ostringstream&)> body;  // throws on failure
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Mdp load_fixture_grid(const std::string& name) {
    return build_grid_mdp(GridSpec::from_file(kFixtures + "/" + name));
}

SynthesisResult synthesize_with_preset(const Mdp& mdp, const std::string& preset_name,
                                       DeceptionMode mode) {
    const Preset& preset = preset_by_name(preset_name);
    ObserverParams params = observer_params_from_preset(mdp, preset);
    DeceptionSpec spec{mode, preset.gamma_a, 1e-5};
    return synthesize(mdp, params, spec);
}

// ---------------------------------------------------------------------------

void criterion_posterior_normalization(std::ostringstream& detail) {
    auto start = std::chrono::steady_clock::now();
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        int ns = 4 + static_cast<int>(seed % 5);  // up to 8
        int ng = 2 + static_cast<int>(seed % 2);
        Mdp m = random_mdp(seed * 101 + 13, ns, 2, ng);
        ObserverParams params = ObserverParams::uniform(m, 1.0, 0.7 + 0.2 * (seed % 3), 0.9);
        params.vi_tolerance = 1e-6;
        std::mt19937_64 rng(seed + 1);
        double total = 0.0;
        for (auto& p : params.prior) {
            p = 0.05 + (rng() >> 11) * 0x1.0p-53;
            total += p;
        }
        for (auto& p : params.prior) p /= total;
        auto tables = observer_tables(m, params);
        for (StateId s = 0; s < m.num_states(); ++s) {
            GoalPosterior post = predict_goals(m, tables, params, m.initial_state(), s);
            double sum = 0.0;
            for (double p : post.probabilities) sum += p;
            require(std::abs(sum - 1.0) <= 1e-12,
                    "posterior sum off by " + std::to_string(sum - 1.0));
            ++checked;
        }
    }
    double elapsed = seconds_since(start);
    require(elapsed < 10.0, "runtime " + std::to_string(elapsed) + "s exceeds 10s");
    detail << checked << " posteriors over 200 MDPs in " << elapsed << "s";
}

void criterion_softmax_vi_fixtures(std::ostringstream& detail) {
    Mdp chain = three_chain();
    ObserverParams params = ObserverParams::uniform(chain, 1.0, 1.0, 1.0 - 1e-9);
    params.init_penalty = 1e6;
    SoftValueTable table = softmax_value_iteration(chain, chain.state_index("G1"), params);
    double vm = table.v[chain.state_index("m")];
    require(std::abs(vm - (-1.0)) <= 1e-3,
            "3-chain V(m) = " + std::to_string(vm) + " not within 1e-3 of -1");

    MdpDescription d;
    d.states = {"s", "G"};
    d.actions = {"a1", "a2"};
    d.initial_state = "s";
    d.goals = {"G"};
    d.true_goal = "G";
    d.transitions = {{"s", "a1", "G", 1.0}, {"s", "a2", "G", 1.0},
                     {"G", "a1", "G", 1.0}, {"G", "a2", "G", 1.0}};
    Mdp pair = validate_mdp(d);
    for (double alpha : {0.5, 1.0, 2.0}) {
        ObserverParams p2 = ObserverParams::uniform(pair, 1.0, alpha, 0.95);
        SoftValueTable t2 = softmax_value_iteration(pair, pair.state_index("G"), p2);
        double expected = -1.0 + alpha * std::log(2.0);
        require(std::abs(t2.v[pair.state_index("s")] - expected) <= 1e-6,
                "parallel-action fixture misses -1 + alpha ln 2");
    }

    // Convergence under the default tolerance follows the appendix rule.
    ObserverParams p3 = ObserverParams::uniform(chain, 1.0, 1.0, 0.95);
    require(p3.vi_tolerance == 1e-4, "default tolerance is not 1e-4");
    SoftValueTable t3 = softmax_value_iteration(chain, chain.state_index("G1"), p3);
    require(t3.converged, "3-chain VI did not converge at gamma_o = 0.95");
    require(t3.final_delta <= 1e-4, "termination delta exceeds 1e-4");
    detail << "V(m)=" << vm << ", parallel fixture exact to 1e-6, delta "
           << t3.final_delta;
}

void criterion_alpha_absorption(std::ostringstream& detail) {
    int instances = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Mdp m = random_mdp(seed * 37 + 5, 4 + seed % 4, 2, 2);
        double alpha = 0.5 + static_cast<double>(seed % 8);
        ObserverParams scaled = ObserverParams::uniform(m, 2.0, alpha, 0.9);
        scaled.vi_tolerance = 1e-11;
        ObserverParams absorbed = scaled;
        absorbed.alpha = 1.0;
        for (auto& c : absorbed.cost) c /= alpha;
        absorbed.vi_tolerance = scaled.vi_tolerance / alpha;

        auto tables_s = observer_tables(m, scaled);
        auto tables_a = observer_tables(m, absorbed);
        for (size_t gi = 0; gi < tables_s.size(); ++gi) {
            StationaryPolicy ps = expected_policy(m, tables_s[gi], scaled);
            StationaryPolicy pa = expected_policy(m, tables_a[gi], absorbed);
            for (StateId s = 0; s < m.num_states(); ++s)
                for (ActionId a = 0; a < m.num_actions(); ++a)
                    require(std::abs(ps.prob(s, a) - pa.prob(s, a)) <= 1e-9,
                            "expected policies diverge beyond 1e-9");
        }
        for (StateId s = 0; s < m.num_states(); ++s) {
            GoalPosterior qs = predict_goals(m, tables_s, scaled, m.initial_state(), s);
            GoalPosterior qa = predict_goals(m, tables_a, absorbed, m.initial_state(), s);
            for (size_t i = 0; i < qs.probabilities.size(); ++i)
                require(std::abs(qs.probabilities[i] - qa.probabilities[i]) <= 1e-9,
                        "posteriors diverge beyond 1e-9");
        }
        ++instances;
    }
    detail << instances << " instances, policies and posteriors within 1e-9";
}

void criterion_lp_correctness(std::ostringstream& detail) {
    struct Case {
        std::string grid;
        std::string preset;
        DeceptionMode mode;
    };
    std::vector<Case> cases = {
        {"corridor.json", "study1-ddm", DeceptionMode::kExaggeration},
        {"corridor.json", "study1-baseline", DeceptionMode::kExaggeration},
        {"study1.json", "study1-ddm", DeceptionMode::kExaggeration},
        {"study1.json", "study1-ddm", DeceptionMode::kAmbiguity},
        {"study2.json", "study2-ddm", DeceptionMode::kExaggeration},
    };
    for (const auto& c : cases) {
        Mdp m = load_fixture_grid(c.grid);
        SynthesisResult r = synthesize_with_preset(m, c.preset, c.mode);
        for (double res : occupancy_flow_residuals(m, r.partition, r.primary_lp, r.lp1))
            require(std::abs(res) <= 1e-6, c.grid + ": LP1 flow residual beyond 1e-6");
        for (double res : occupancy_flow_residuals(m, r.partition, r.secondary_lp, r.lp2))
            require(std::abs(res) <= 1e-6, c.grid + ": LP2 flow residual beyond 1e-6");

        double rmax = max_reach_probability(m, m.true_goal())[m.initial_state()];
        require(std::abs(r.reach_probability - rmax) <= 1e-6,
                c.grid + ": attained reach misses R_max");

        double cost2 = 0.0, occ1 = 0.0, occ2 = 0.0;
        for (int j = 0; j < r.primary_lp.num_vars; ++j) {
            cost2 += r.primary_lp.objective[j] * r.lp2.x[j];
            occ1 += r.lp1.x[j];
            occ2 += r.lp2.x[j];
        }
        require(std::abs(cost2 - r.v_star) <= 1e-8, c.grid + ": LP2 cost drifts from v*");
        require(occ2 <= occ1 + 1e-8, c.grid + ": LP2 occupancy exceeds LP1");
    }
    detail << cases.size() << " fixture runs within tolerances";
}

void criterion_global_optimality(std::ostringstream& detail) {
    auto start = std::chrono::steady_clock::now();
    struct Case {
        std::string grid;
        std::string preset;
    };
    for (const Case& c : {Case{"corridor.json", "study1-ddm"},
                          Case{"study2.json", "study2-ddm"}}) {
        Mdp m = load_fixture_grid(c.grid);
        const Preset& preset = preset_by_name(c.preset);
        ObserverParams params = observer_params_from_preset(m, preset);
        DeceptionSpec spec{DeceptionMode::kExaggeration, preset.gamma_a, 1e-5};
        SynthesisResult r = synthesize(m, params, spec);

        auto tables = observer_tables(m, params);
        DeceptionCostTable g = build_cost(m, tables, params, spec, min_steps(m));
        double shortest_cost = state_sequence_cost(g, shortest_path_trajectory(m).states);
        double dpp_cost = state_sequence_cost(g, dpp_trajectory(m).states);
        require(shortest_cost >= r.v_star - 1e-8,
                c.grid + ": shortest baseline beats v*");
        require(dpp_cost >= r.v_star - 1e-8, c.grid + ": decoy-detour baseline beats v*");
        detail << c.grid << " v*=" << r.v_star << " shortest=" << shortest_cost
               << " dpp=" << dpp_cost << "; ";
    }
    double elapsed = seconds_since(start);
    require(elapsed < 30.0, "runtime " + std::to_string(elapsed) + "s exceeds 30s");
    detail << "in " << elapsed << "s";
}

void criterion_tunability(std::ostringstream& detail) {
    Mdp m = load_fixture_grid("study1.json");
    auto t_min = min_steps(m);
    int shortest_steps = *t_min[m.true_goal()];

    SynthesisResult efficient =
        synthesize_with_preset(m, "study1-baseline", DeceptionMode::kExaggeration);
    Trajectory t_eff = simulate(m, efficient.policy, 0, 10000);
    require(t_eff.length() == shortest_steps,
            "alpha=20 trajectory length " + std::to_string(t_eff.length()) +
                " differs from t_min " + std::to_string(shortest_steps));

    SynthesisResult deceptive =
        synthesize_with_preset(m, "study1-ddm", DeceptionMode::kExaggeration);
    Trajectory t_dec = simulate(m, deceptive.policy, 0, 10000);
    require(t_dec.length() > shortest_steps, "alpha=0.5 trajectory is not longer");

    const Preset& ddm_preset = preset_by_name("study1-ddm");
    ObserverParams params = observer_params_from_preset(m, ddm_preset);
    auto tables = observer_tables(m, params);
    int true_pos = m.goal_position(m.true_goal());
    auto min_gap = [&](const std::vector<StateId>& states) {
        double best = 1e300;
        for (StateId s : states) {
            GoalPosterior post = predict_goals(m, tables, params, m.initial_state(), s);
            double decoy = -1e300;
            for (size_t i = 0; i < post.probabilities.size(); ++i)
                if (static_cast<int>(i) != true_pos)
                    decoy = std::max(decoy, post.probabilities[i]);
            best = std::min(best, post.probabilities[true_pos] - decoy);
        }
        return best;
    };
    BaselineTrajectory base = shortest_path_trajectory(m);
    double gap_dec = min_gap(t_dec.states);
    double gap_base = min_gap(base.states);
    require(gap_dec < gap_base, "deceptive min posterior gap is not below the baseline's");
    detail << "lengths " << t_eff.length() << " (=t_min) vs " << t_dec.length()
           << ", min gaps " << gap_dec << " < " << gap_base;
}

void criterion_monte_carlo(std::ostringstream& detail) {
    auto start = std::chrono::steady_clock::now();
    Mdp m = load_fixture_grid("study1.json");
    SynthesisResult r = synthesize_with_preset(m, "study1-ddm", DeceptionMode::kExaggeration);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        Trajectory t = simulate(m, r.policy, 90000 + i, 2000);
        if (t.states.back() == m.true_goal()) ++hits;
    }
    double freq = static_cast<double>(hits) / n;
    require(std::abs(freq - r.reach_probability) <= 0.01,
            "empirical frequency " + std::to_string(freq) + " vs LP reach " +
                std::to_string(r.reach_probability));
    double elapsed = seconds_since(start);
    require(elapsed < 60.0, "runtime " + std::to_string(elapsed) + "s exceeds 60s");
    detail << "freq " << freq << " vs " << r.reach_probability << " over " << n
           << " rollouts in " << elapsed << "s";
}

void criterion_product_chance_constraint(std::ostringstream& detail) {
    TravelNetwork net = load_network(kFixtures + "/twocity.csv");
    ObserverParams params = ObserverParams::uniform(net.base, 5.0, 1.0, 0.95);
    DeceptionSpec spec{DeceptionMode::kExaggeration, 1.0, 1e-5};
    auto tables = observer_tables(net.base, params);
    DeceptionCostTable g = build_cost(net.base, tables, params, spec, min_steps(net.base));

    struct Run {
        int t_max;
        double on_time;
        double v_star;
        double west_mass;
        double direct_mass;
    };
    auto run_budget = [&](int t_max) {
        ProductMdp product = build_product(net.base, net.discretize(t_max), t_max);
        SynthesisResult r = synthesize_time_constrained(product, g, 0.8);
        StatePartition part = zero_reach_states(product.mdp());
        double on_time = policy_reach_probability(
            product.mdp(), r.policy, part, product.goal_layer())[product.mdp().initial_state()];
        double west = 0.0, direct = 0.0;
        for (int j = 0; j < r.secondary_lp.num_vars; ++j) {
            std::string base_name =
                net.base.state_name(product.base_state_of(r.secondary_lp.var_meta[j].first));
            if (base_name[0] == 'w') west += r.lp2.x[j];
            if (base_name[0] == 'd') direct += r.lp2.x[j];
        }
        return Run{t_max, on_time, r.v_star, west, direct};
    };

    Run loose = run_budget(40);
    Run tight = run_budget(30);
    require(loose.on_time >= 0.8 - 1e-6, "40-minute policy misses the 0.8 bound");
    require(tight.on_time >= 0.8 - 1e-6, "30-minute policy misses the 0.8 bound");
    // Loose budget detours past the decoy; the tight one goes direct.
    require(loose.west_mass > loose.direct_mass, "40-minute run does not detour");
    require(tight.direct_mass > tight.west_mass, "30-minute run does not go direct");
    require(tight.v_star >= loose.v_star - 1e-8, "tightening the budget lowered v*");
    detail << "on-time " << loose.on_time << "/" << tight.on_time << ", v* "
           << loose.v_star << " -> " << tight.v_star << ", west mass "
           << loose.west_mass << " -> " << tight.west_mass;
}

void criterion_cost_formulas(std::ostringstream& detail) {
    auto posterior = [](std::vector<double> p) {
        GoalPosterior post;
        post.probabilities = std::move(p);
        return post;
    };
    require(std::abs(exaggeration_f(posterior({0.0, 1.0}), 0) - 0.0) == 0.0,
            "exaggeration anchor 0");
    require(std::abs(exaggeration_f(posterior({0.5, 0.5}), 0) - 1.0) == 0.0,
            "exaggeration anchor 1");
    require(std::abs(exaggeration_f(posterior({1.0, 0.0}), 0) - 2.0) == 0.0,
            "exaggeration anchor 2");
    for (int goals = 2; goals <= 4; ++goals) {
        std::vector<double> uniform(goals, 1.0 / goals);
        require(ambiguity_f(posterior(uniform)) == 0.0, "ambiguity on uniform");
        std::vector<double> point(goals, 0.0);
        point[0] = 1.0;
        require(std::abs(ambiguity_f(posterior(point)) - 2.0 * (goals - 1)) <= 1e-15,
                "ambiguity on point mass");
    }

    // Appendix clipping: any g at or below 1e-5 becomes exactly zero.
    Mdp m = load_fixture_grid("study1.json");
    ObserverParams params = ObserverParams::uniform(m, 1.0, 1.0, 0.95);
    auto tables = observer_tables(m, params);
    auto t_min = min_steps(m);
    DeceptionSpec spec{DeceptionMode::kExaggeration, 0.35, 1e-5};
    DeceptionCostTable g = build_cost(m, tables, params, spec, t_min);
    DeceptionSpec unclipped_spec{DeceptionMode::kExaggeration, 0.35, 0.0};
    DeceptionCostTable raw = build_cost(m, tables, params, unclipped_spec, t_min);
    int clipped = 0;
    for (StateId s = 0; s < m.num_states(); ++s) {
        if (raw.g_state(s) <= 1e-5) {
            require(g.g_state(s) == 0.0, "sub-threshold cost not clipped to zero");
            if (raw.g_state(s) > 0.0) ++clipped;
        } else {
            require(g.g_state(s) == raw.g_state(s), "clipping altered a live cost");
        }
    }
    require(clipped > 0, "fixture produced no clippable costs");
    detail << "anchors exact, " << clipped << " tiny costs clipped to zero";
}

void criterion_segment_evaluation(std::ostringstream& detail) {
    Mdp m = load_fixture_grid("corridor.json");
    const Preset& preset = preset_by_name("study1-ddm");
    ObserverParams params = observer_params_from_preset(m, preset);
    params.vi_tolerance = 1e-10;
    auto tables = observer_tables(m, params);

    SynthesisResult r = synthesize_with_preset(m, "study1-ddm", DeceptionMode::kExaggeration);
    Trajectory deceptive = simulate(m, r.policy, 0, 10000);
    BaselineTrajectory baseline = shortest_path_trajectory(m);

    SegmentReport rep_dec =
        evaluate_segments(m, tables, params, deceptive.states, {0.25, 0.5, 0.75, 0.9});
    SegmentReport rep_base =
        evaluate_segments(m, tables, params, baseline.states, {0.25, 0.5, 0.75, 0.9});

    int true_pos = m.goal_position(m.true_goal());
    require(rep_dec.segments[1].argmax_goal != true_pos,
            "deceptive 50% segment already reveals the true goal");
    require(rep_base.segments[1].argmax_goal == true_pos,
            "baseline 50% segment does not point at the true goal");

    // Posteriors match a reference recursion run to a tighter tolerance.
    std::vector<std::vector<double>> values;
    for (StateId goal : m.goals()) values.push_back(oracle_soft_values(m, goal, params));
    for (const SegmentReport* rep : {&rep_dec, &rep_base}) {
        const std::vector<StateId>& states =
            rep == &rep_dec ? deceptive.states : baseline.states;
        for (const auto& seg : rep->segments) {
            StateId endpoint = states[std::min<size_t>(seg.prefix_length, states.size() - 1)];
            auto expected = oracle_posterior(m, values, params, states.front(), endpoint);
            for (size_t i = 0; i < expected.size(); ++i)
                require(std::abs(seg.posterior.probabilities[i] - expected[i]) <= 1e-9,
                        "posterior differs from the reference recursion");
        }
    }
    detail << "50% argmax decoy vs true goal; posteriors match oracle to 1e-9";
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "posterior normalization over random MDPs", criterion_posterior_normalization},
        {2, "softmax value-iteration fixtures", criterion_softmax_vi_fixtures},
        {3, "alpha absorption into the cost function", criterion_alpha_absorption},
        {4, "occupancy LP correctness on fixtures", criterion_lp_correctness},
        {5, "global optimality against baselines", criterion_global_optimality},
        {6, "tunable behavior between presets", criterion_tunability},
        {7, "Monte-Carlo consistency of the extracted policy", criterion_monte_carlo},
        {8, "product-MDP chance constraint and route switch", criterion_product_chance_constraint},
        {9, "deception cost formula anchors and clipping", criterion_cost_formulas},
        {10, "segment evaluation against the reference recursion", criterion_segment_evaluation},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::ostringstream detail;
        try {
            c.body(detail);
            std::printf("[PASS] criterion %2d: %s — %s\n", c.number, c.title.c_str(),
                        detail.str().c_str());
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] criterion %2d: %s — %s\n", c.number, c.title.c_str(), e.what());
        }
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
