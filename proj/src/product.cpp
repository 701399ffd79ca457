#include "ddm/product.hpp"

#include <algorithm>
#include <cmath>

#include "ddm/errors.hpp"

namespace ddm {

namespace {
constexpr const char* kModule = "product-mdp";

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

BucketedDistribution discretize_travel_time(const TravelEdge& edge, int t_max_minutes) {
    if (!(edge.mean_speed > 0.0) || !(edge.length > 0.0) || edge.var_speed < 0.0)
        fail(kModule, "DegenerateEdge",
             "edge " + edge.from + "->" + edge.to + " has nonpositive speed or length");
    if (t_max_minutes < 1)
        fail(kModule, "DegenerateEdge", "t_max must be at least one minute");

    // Speed ~ lognormal(mu, sigma^2) by moment matching; travel time
    // length/speed ~ lognormal(log(length) - mu, sigma^2).
    const double sigma2 = std::log(1.0 + edge.var_speed / (edge.mean_speed * edge.mean_speed));
    const double mu = std::log(edge.mean_speed) - sigma2 / 2.0;
    const double t_mu = std::log(edge.length) - mu;
    const double t_sigma = std::sqrt(sigma2);

    auto cdf = [&](double seconds) {
        if (seconds <= 0.0) return 0.0;
        if (t_sigma == 0.0) return std::log(seconds) >= t_mu ? 1.0 : 0.0;
        return normal_cdf((std::log(seconds) - t_mu) / t_sigma);
    };

    const int regular = 2 * t_max_minutes;
    BucketedDistribution dist;
    dist.probabilities.resize(regular + 1);
    double prev = 0.0;
    for (int k = 1; k <= regular; ++k) {
        double cur = cdf(30.0 * k);
        dist.probabilities[k - 1] = cur - prev;
        prev = cur;
    }
    dist.probabilities[regular] = 1.0 - prev;

    double sum = 0.0;
    for (double& p : dist.probabilities) {
        if (p < 1e-12) p = 0.0;
        sum += p;
    }
    if (sum <= 0.0)
        fail(kModule, "DegenerateEdge", "travel-time mass vanished after flushing");
    for (double& p : dist.probabilities) p /= sum;
    return dist;
}

ProductMdp build_product(const Mdp& base,
                         const std::map<std::pair<StateId, StateId>, BucketedDistribution>& dists,
                         int t_max_minutes) {
    const int layers = 2 * t_max_minutes + 2;  // entry bucket 0 through overflow
    const int overflow = layers - 1;
    const int ns = base.num_states(), na = base.num_actions();

    MdpDescription desc;
    auto name_of = [&](StateId s, int t) {
        return base.state_name(s) + "@" + std::to_string(t);
    };
    for (StateId s = 0; s < ns; ++s)
        for (int t = 0; t < layers; ++t) desc.states.push_back(name_of(s, t));
    desc.actions = base.action_names();
    desc.initial_state = name_of(base.initial_state(), 0);
    for (StateId g : base.goals())
        for (int t = 0; t < layers; ++t) desc.goals.push_back(name_of(g, t));
    desc.true_goal = name_of(base.true_goal(), 0);

    for (StateId s = 0; s < ns; ++s) {
        const bool absorbing_base = base.is_goal(s);
        for (int t = 0; t < layers; ++t) {
            const std::string from = name_of(s, t);
            for (ActionId a = 0; a < na; ++a) {
                if (absorbing_base || t == overflow) {
                    desc.transitions.push_back({from, base.action_name(a), from, 1.0});
                    continue;
                }
                auto row = base.successors(s, a);
                if (row.size() != 1 || std::abs(row[0].prob - 1.0) > 1e-12)
                    fail(kModule, "NondeterministicBase",
                         "product construction requires a deterministic base transition at (" +
                             base.state_name(s) + ", " + base.action_name(a) + ")");
                StateId next = row[0].next;
                if (next == s) {  // degenerate self-edge: consumes no time
                    desc.transitions.push_back({from, base.action_name(a), from, 1.0});
                    continue;
                }
                auto it = dists.find({s, next});
                if (it == dists.end())
                    fail(kModule, "MissingEdgeDistribution",
                         "no travel-time distribution for edge " + base.state_name(s) +
                             "->" + base.state_name(next));
                const auto& f = it->second.probabilities;
                // Bucket mass below 1e-9 is numerically inert but poisons
                // the LP's conditioning; fold it into the heaviest bucket.
                double flushed = 0.0;
                std::vector<std::pair<int, double>> kept;
                int heaviest = -1;
                for (int k = 1; k <= static_cast<int>(f.size()); ++k) {
                    double p = f[k - 1];
                    if (p <= 0.0) continue;
                    if (p < 1e-9) {
                        flushed += p;
                        continue;
                    }
                    kept.push_back({k, p});
                    if (heaviest < 0 || p > kept[heaviest].second)
                        heaviest = static_cast<int>(kept.size()) - 1;
                }
                if (kept.empty())
                    fail(kModule, "DegenerateEdge", "edge distribution vanished");
                kept[heaviest].second += flushed;
                double excess = 0.0;
                for (const auto& [k, p] : kept) {
                    int arrival = t + k;
                    if (k < static_cast<int>(f.size()) && arrival <= overflow - 1)
                        desc.transitions.push_back(
                            {from, base.action_name(a), name_of(next, arrival), p});
                    else
                        excess += p;
                }
                if (excess > 0.0)
                    desc.transitions.push_back(
                        {from, base.action_name(a), name_of(next, overflow), excess});
            }
        }
    }

    ProductMdp product;
    product.mdp_ = validate_mdp(desc);
    product.t_max_ = t_max_minutes;
    for (int t = 0; t <= 2 * t_max_minutes; ++t)
        product.goal_layer_.push_back(
            product.mdp_.state_index(name_of(base.true_goal(), t)));
    return product;
}

DeceptionCostTable lift_cost(const ProductMdp& product, const DeceptionCostTable& base_g) {
    const Mdp& pm = product.mdp();
    std::vector<double> g(pm.num_states(), 0.0);
    for (StateId s = 0; s < pm.num_states(); ++s)
        g[s] = base_g.g_state(product.base_state_of(s));
    return DeceptionCostTable(base_g.spec(), std::move(g));
}

SynthesisResult synthesize_time_constrained(const ProductMdp& product,
                                            const DeceptionCostTable& base_g,
                                            double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        fail(kModule, "InvalidThreshold", "threshold must lie in (0, 1]");
    const Mdp& pm = product.mdp();
    StatePartition partition = zero_reach_states(pm);
    double max_on_time =
        max_reach_probability(pm, product.goal_layer())[pm.initial_state()];
    if (threshold > max_on_time + 1e-9) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f", max_on_time);
        throw InfeasibleThreshold("threshold " + std::to_string(threshold) +
                                      " exceeds the maximum achievable on-time probability " +
                                      buf,
                                  max_on_time);
    }
    DeceptionCostTable lifted = lift_cost(product, base_g);
    return solve_deception_lps(pm, lifted, partition, ReachSpec::at_least(threshold),
                               product.goal_layer());
}

}  // namespace ddm
