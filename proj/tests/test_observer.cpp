#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "ddm/errors.hpp"
#include "ddm/observer.hpp"
#include "fixtures.hpp"

using namespace ddm;
using namespace ddm::testing;

namespace {

// Initial state plus two parallel actions into a single absorbing goal.
Mdp parallel_pair() {
    MdpDescription d;
    d.states = {"s", "G"};
    d.actions = {"a1", "a2"};
    d.initial_state = "s";
    d.goals = {"G"};
    d.true_goal = "G";
    d.transitions = {
        {"s", "a1", "G", 1.0}, {"s", "a2", "G", 1.0},
        {"G", "a1", "G", 1.0}, {"G", "a2", "G", 1.0},
    };
    return validate_mdp(d);
}

}  // namespace

TEST_CASE("soft value of the 3-chain middle state is -1 when the decoy stays "
          "prohibitively penalized") {
    Mdp m = three_chain();
    ObserverParams params = ObserverParams::uniform(m, 1.0, 1.0, 1.0 - 1e-9);
    params.max_iterations = 100000;
    SoftValueTable table = softmax_value_iteration(m, m.state_index("G1"), params);
    CHECK(table.v[m.state_index("m")] == doctest::Approx(-1.0).epsilon(1e-3));
    CHECK(table.v[m.state_index("G1")] == 0.0);
    // The absorbing decoy keeps drifting, so the cap is hit.
    CHECK_FALSE(table.converged);
    CHECK(table.iterations == params.max_iterations);
}

TEST_CASE("two parallel actions produce the softmax closed form -1 + alpha ln 2") {
    for (double alpha : {0.5, 1.0, 3.0}) {
        Mdp m = parallel_pair();
        ObserverParams params = ObserverParams::uniform(m, 1.0, alpha, 0.95);
        SoftValueTable table = softmax_value_iteration(m, m.state_index("G"), params);
        CHECK(table.converged);
        CHECK(table.v[m.state_index("s")] ==
              doctest::Approx(-1.0 + alpha * std::log(2.0)).epsilon(1e-6));
    }
}

TEST_CASE("goal value stays pinned to zero and the softmax identity holds") {
    Mdp m = five_chain();
    ObserverParams params = ObserverParams::uniform(m, 1.0, 1.0, 0.95);
    params.vi_tolerance = 1e-10;
    for (StateId g : m.goals()) {
        SoftValueTable t = softmax_value_iteration(m, g, params);
        CHECK(t.converged);
        CHECK(t.final_delta <= params.vi_tolerance);
        CHECK(t.v[g] == 0.0);
        for (StateId s = 0; s < m.num_states(); ++s) {
            if (s == g) continue;
            double lse = -std::numeric_limits<double>::infinity();
            for (ActionId a = 0; a < m.num_actions(); ++a)
                lse = std::max(lse, t.q[s * m.num_actions() + a]);
            double acc = 0.0;
            for (ActionId a = 0; a < m.num_actions(); ++a)
                acc += std::exp((t.q[s * m.num_actions() + a] - lse) / params.alpha);
            CHECK(t.v[s] ==
                  doctest::Approx(lse + params.alpha * std::log(acc)).epsilon(1e-9));
        }
    }
}

TEST_CASE("expected_policy closed forms") {
    Mdp m = parallel_pair();
    ObserverParams params = ObserverParams::uniform(m, 1.0, 2.0, 0.95);
    SoftValueTable t = softmax_value_iteration(m, m.state_index("G"), params);

    SUBCASE("two equal Q values split evenly") {
        StationaryPolicy pi = expected_policy(m, t, params);
        CHECK(pi.prob(m.state_index("s"), 0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(pi.prob(m.state_index("s"), 1) == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("Q gap of alpha ln 3 gives (3/4, 1/4)") {
        StateId s = m.state_index("s");
        t.q[s * 2 + 0] = -1.0;
        t.q[s * 2 + 1] = -1.0 - params.alpha * std::log(3.0);
        double mx = t.q[s * 2 + 0];
        t.v[s] = mx + params.alpha *
                          std::log(std::exp((t.q[s * 2 + 0] - mx) / params.alpha) +
                                   std::exp((t.q[s * 2 + 1] - mx) / params.alpha));
        StationaryPolicy pi = expected_policy(m, t, params);
        CHECK(pi.prob(s, 0) == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(pi.prob(s, 1) == doctest::Approx(0.25).epsilon(1e-12));
    }

    SUBCASE("goal rows are uniform") {
        StationaryPolicy pi = expected_policy(m, t, params);
        CHECK(pi.prob(m.state_index("G"), 0) == doctest::Approx(0.5));
    }
}

TEST_CASE("single available action collapses the expected policy") {
    MdpDescription d;
    d.states = {"s", "G"};
    d.actions = {"a"};
    d.initial_state = "s";
    d.goals = {"G"};
    d.true_goal = "G";
    d.transitions = {{"s", "a", "G", 1.0}, {"G", "a", "G", 1.0}};
    Mdp m = validate_mdp(d);
    ObserverParams params = ObserverParams::uniform(m, 2.0, 1.5, 0.9);
    SoftValueTable t = softmax_value_iteration(m, m.state_index("G"), params);
    StationaryPolicy pi = expected_policy(m, t, params);
    CHECK(pi.prob(m.state_index("s"), 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("posterior at the initial state equals the prior") {
    Mdp m = five_chain();
    ObserverParams params = ObserverParams::uniform(m, 1.0, 1.0, 0.95);
    params.prior = {0.3, 0.7};
    auto tables = observer_tables(m, params);
    GoalPosterior post = predict_goals(m, tables, params, m.initial_state(), m.initial_state());
    CHECK(post.probabilities[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(post.probabilities[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("symmetric chain yields an even posterior at the center") {
    Mdp m = five_chain();
    ObserverParams params = ObserverParams::uniform(m, 1.0, 1.0, 0.95);
    auto tables = observer_tables(m, params);
    GoalPosterior post = predict_goals(m, tables, params, m.initial_state(), m.initial_state());
    CHECK(post.probabilities[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("a step toward a goal raises its posterior and matches the oracle") {
    Mdp m = five_chain();
    ObserverParams params = ObserverParams::uniform(m, 1.0, 1.0, 0.95);
    params.vi_tolerance = 1e-10;
    auto tables = observer_tables(m, params);
    StateId b = m.state_index("b");
    GoalPosterior post = predict_goals(m, tables, params, m.initial_state(), b);
    int g2 = m.goal_position(m.state_index("G2"));
    CHECK(post.probabilities[g2] > 0.5);

    std::vector<std::vector<double>> values;
    for (StateId g : m.goals()) values.push_back(oracle_soft_values(m, g, params));
    auto expected = oracle_posterior(m, values, params, m.initial_state(), b);
    for (size_t i = 0; i < expected.size(); ++i)
        CHECK(post.probabilities[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("posterior along a trajectory ends on the reached decoy") {
    Mdp m = five_chain();
    ObserverParams params = ObserverParams::uniform(m, 1.0, 1.0, 0.95);
    auto tables = observer_tables(m, params);
    std::vector<StateId> walk = {m.state_index("m"), m.state_index("b"), m.state_index("G2")};
    auto posts = posterior_along_states(m, tables, params, walk);
    REQUIRE(posts.size() == 3);
    CHECK(posts.back().argmax() == m.goal_position(m.state_index("G2")));
    // Re-visiting a state reproduces the same posterior.
    std::vector<StateId> loop = {m.state_index("m"), m.state_index("b"), m.state_index("m"),
                                 m.state_index("b")};
    auto posts2 = posterior_along_states(m, tables, params, loop);
    CHECK(posts2[1].probabilities[0] == doctest::Approx(posts2[3].probabilities[0]).epsilon(1e-15));
    CHECK(posts2[0].probabilities[0] == doctest::Approx(posts2[2].probabilities[0]).epsilon(1e-15));
}

TEST_CASE("posterior normalization holds across random MDPs") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        Mdp m = random_mdp(seed * 7 + 1, 4 + seed % 5, 2, 2 + seed % 2);
        ObserverParams params = ObserverParams::uniform(m, 1.0 + (seed % 3), 0.8, 0.9);
        std::mt19937_64 rng(seed);
        double total = 0.0;
        for (auto& p : params.prior) {
            p = 0.1 + (rng() >> 11) * 0x1.0p-53;
            total += p;
        }
        for (auto& p : params.prior) p /= total;
        auto tables = observer_tables(m, params);
        for (StateId s = 0; s < m.num_states(); ++s) {
            GoalPosterior post = predict_goals(m, tables, params, m.initial_state(), s);
            double sum = 0.0;
            for (double p : post.probabilities) {
                CHECK(p >= 0.0);
                CHECK(p <= 1.0 + 1e-15);
                sum += p;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("alpha can be absorbed into the cost function") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Mdp m = random_mdp(seed * 13 + 3, 5, 2, 2);
        double alpha = 0.5 + (seed % 4);
        ObserverParams scaled = ObserverParams::uniform(m, 2.0, alpha, 0.9);
        scaled.vi_tolerance = 1e-11;
        ObserverParams absorbed = scaled;
        absorbed.alpha = 1.0;
        for (auto& c : absorbed.cost) c /= alpha;
        absorbed.vi_tolerance = scaled.vi_tolerance / alpha;

        for (StateId g : m.goals()) {
            SoftValueTable ts = softmax_value_iteration(m, g, scaled);
            SoftValueTable ta = softmax_value_iteration(m, g, absorbed);
            REQUIRE(ts.converged);
            REQUIRE(ta.converged);
            StationaryPolicy ps = expected_policy(m, ts, scaled);
            StationaryPolicy pa = expected_policy(m, ta, absorbed);
            for (StateId s = 0; s < m.num_states(); ++s)
                for (ActionId a = 0; a < m.num_actions(); ++a)
                    CHECK(ps.prob(s, a) == doctest::Approx(pa.prob(s, a)).epsilon(1e-9));
        }

        auto tables_s = observer_tables(m, scaled);
        auto tables_a = observer_tables(m, absorbed);
        for (StateId s = 0; s < m.num_states(); ++s) {
            GoalPosterior qs = predict_goals(m, tables_s, scaled, m.initial_state(), s);
            GoalPosterior qa = predict_goals(m, tables_a, absorbed, m.initial_state(), s);
            for (size_t i = 0; i < qs.probabilities.size(); ++i)
                CHECK(qs.probabilities[i] == doctest::Approx(qa.probabilities[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("large alpha flattens the posterior away from absorbing states") {
    // Absorbing states keep collecting the alpha*log|A| entropy bonus, so
    // their neighborhoods never flatten completely; the deviation still
    // shrinks with alpha and vanishes at the symmetric center.
    Mdp m = five_chain();
    auto deviation_at = [&](double alpha, StateId s) {
        ObserverParams params = ObserverParams::uniform(m, 1.0, alpha, 0.95);
        auto tables = observer_tables(m, params);
        GoalPosterior post = predict_goals(m, tables, params, m.initial_state(), s);
        double dev = 0.0;
        for (double p : post.probabilities) dev = std::max(dev, std::abs(p - 0.5));
        return dev;
    };
    CHECK(deviation_at(1e4, m.initial_state()) <= 1e-2);
    for (const char* name : {"a", "b"}) {
        StateId s = m.state_index(name);
        CHECK(deviation_at(1e4, s) < deviation_at(1.0, s));
    }
}

TEST_CASE("unscaled posterior exponent multiplies the log odds by alpha") {
    Mdp m = five_chain();
    ObserverParams params = ObserverParams::uniform(m, 1.0, 2.0, 0.95);
    params.vi_tolerance = 1e-10;
    auto tables = observer_tables(m, params);
    ObserverParams unscaled = params;
    unscaled.alpha_scaled_posterior = false;
    StateId b = m.state_index("b");
    GoalPosterior ps = predict_goals(m, tables, params, m.initial_state(), b);
    GoalPosterior pu = predict_goals(m, tables, unscaled, m.initial_state(), b);
    double scaled_logit = std::log(ps.probabilities[0] / ps.probabilities[1]);
    double unscaled_logit = std::log(pu.probabilities[0] / pu.probabilities[1]);
    CHECK(unscaled_logit == doctest::Approx(params.alpha * scaled_logit).epsilon(1e-9));
}

TEST_CASE("degenerate normalizer is reported with the offending step") {
    Mdp m = three_chain();
    ObserverParams params = ObserverParams::uniform(m, 1.0, 1.0, 0.95);
    auto tables = observer_tables(m, params);
    for (auto& t : tables)
        for (auto& v : t.v) v = -std::numeric_limits<double>::infinity();
    std::vector<StateId> walk = {m.initial_state(), m.state_index("G1")};
    CHECK_THROWS_WITH_AS(posterior_along_states(m, tables, params, walk),
                         doctest::Contains("DegenerateNormalizer"), Error);
}

TEST_CASE("observer parameter validation rejects bad inputs") {
    Mdp m = three_chain();
    ObserverParams params = ObserverParams::uniform(m, 1.0, 1.0, 0.95);
    params.gamma_o = 1.0;
    CHECK_THROWS_AS(softmax_value_iteration(m, m.state_index("G1"), params), Error);
    params = ObserverParams::uniform(m, 1.0, -1.0, 0.95);
    CHECK_THROWS_AS(softmax_value_iteration(m, m.state_index("G1"), params), Error);
    params = ObserverParams::uniform(m, 1.0, 1.0, 0.95);
    params.prior = {0.9, 0.2};
    CHECK_THROWS_AS(softmax_value_iteration(m, m.state_index("G1"), params), Error);
}
