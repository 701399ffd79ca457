#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ddm/deception.hpp"
#include "ddm/mdp.hpp"
#include "ddm/synthesis.hpp"

namespace ddm {

struct TravelEdge {
    std::string from;
    std::string to;
    double mean_speed = 0.0;  // m/s
    double var_speed = 0.0;   // (m/s)^2
    double length = 0.0;      // m
};

// Travel-time mass over 30-second buckets: entry k (1-based bucket index,
// stored at probabilities[k-1]) covers (30(k-1), 30k] seconds for
// k = 1..2*t_max; the final entry is the overflow beyond 60*t_max seconds.
struct BucketedDistribution {
    std::vector<double> probabilities;

    int overflow_index() const { return static_cast<int>(probabilities.size()); }
    double mass(int bucket) const { return probabilities[bucket - 1]; }
};

// Moment-matched lognormal on speed, exact reciprocal for travel time,
// CDF differences per bucket; sub-1e-12 mass is flushed and the vector
// renormalized. Throws product-mdp/DegenerateEdge for nonpositive
// speed or length.
BucketedDistribution discretize_travel_time(const TravelEdge& edge, int t_max_minutes);

// Base MDP crossed with elapsed-time buckets {0, ..., 2*t_max+1}; the last
// layer absorbs overflow. Product states are named "<base>@<t>".
class ProductMdp {
public:
    const Mdp& mdp() const { return mdp_; }
    int t_max() const { return t_max_; }
    int num_layers() const { return 2 * t_max_ + 2; }

    StateId product_state(StateId base_state, int t) const {
        return base_state * num_layers() + t;
    }
    StateId base_state_of(StateId product) const { return product / num_layers(); }
    int bucket_of(StateId product) const { return product % num_layers(); }

    StateId initial_state() const { return mdp_.initial_state(); }
    // On-time true-goal layer: (G*, t) for t <= 2*t_max.
    const std::vector<StateId>& goal_layer() const { return goal_layer_; }

    friend ProductMdp build_product(
        const Mdp& base, const std::map<std::pair<StateId, StateId>, BucketedDistribution>& dists,
        int t_max_minutes);

private:
    Mdp mdp_;
    int t_max_ = 0;
    std::vector<StateId> goal_layer_;
};

// Requires a deterministic base transition function and one distribution per
// base edge; throws product-mdp/MissingEdgeDistribution otherwise.
ProductMdp build_product(const Mdp& base,
                         const std::map<std::pair<StateId, StateId>, BucketedDistribution>& dists,
                         int t_max_minutes);

// Lifts the base cost table onto the product (g((s,t),a) = g(s,a)).
DeceptionCostTable lift_cost(const ProductMdp& product, const DeceptionCostTable& base_g);

// Deceptive synthesis under Pr(on-time arrival) >= threshold. Throws
// InfeasibleThreshold carrying the maximum achievable probability.
SynthesisResult synthesize_time_constrained(const ProductMdp& product,
                                            const DeceptionCostTable& base_g,
                                            double threshold);

}  // namespace ddm
