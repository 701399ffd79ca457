#pragma once

#include <iosfwd>
#include <vector>

#include "ddm/mdp.hpp"
#include "ddm/observer.hpp"

namespace ddm {

struct SegmentEvaluation {
    double fraction = 0.0;
    int prefix_length = 0;       // steps kept, ceil(fraction * length), >= 1
    GoalPosterior posterior;     // at the truncation endpoint
    int argmax_goal = -1;        // position in mdp.goals()
    int second_goal = -1;
    bool correct = false;        // argmax equals the true goal
};

struct SegmentReport {
    std::vector<SegmentEvaluation> segments;
};

// Posterior, argmax and second-argmax goal at each fractional truncation of
// the trajectory; ties resolve by goal declaration order.
SegmentReport evaluate_segments(const Mdp& mdp, const std::vector<SoftValueTable>& tables,
                                const ObserverParams& params,
                                const std::vector<StateId>& trajectory_states,
                                const std::vector<double>& fractions);

// CSV rows: fraction,prefix_len,argmax,second_argmax,correct,posterior_true,
// posterior_argmax
void write_segment_csv(std::ostream& out, const Mdp& mdp, const SegmentReport& report);

}  // namespace ddm
