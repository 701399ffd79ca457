#include "ddm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ddm/errors.hpp"
#include "ddm/serialize.hpp"

namespace ddm {

namespace {
constexpr const char* kModule = "evaluation";
}

SegmentReport evaluate_segments(const Mdp& mdp, const std::vector<SoftValueTable>& tables,
                                const ObserverParams& params,
                                const std::vector<StateId>& trajectory_states,
                                const std::vector<double>& fractions) {
    if (trajectory_states.empty())
        fail(kModule, "EmptyTrajectory", "cannot evaluate an empty trajectory");
    for (size_t i = 0; i < fractions.size(); ++i) {
        if (!(fractions[i] > 0.0 && fractions[i] <= 1.0))
            fail(kModule, "InvalidFraction", "fractions must lie in (0, 1]");
        if (i > 0 && fractions[i] < fractions[i - 1])
            fail(kModule, "InvalidFraction", "fractions must be sorted ascending");
    }

    const int steps = static_cast<int>(trajectory_states.size()) - 1;
    const int true_pos = mdp.goal_position(mdp.true_goal());

    SegmentReport report;
    for (double fraction : fractions) {
        SegmentEvaluation seg;
        seg.fraction = fraction;
        seg.prefix_length = std::max(1, static_cast<int>(std::ceil(fraction * steps)));
        StateId endpoint = trajectory_states[std::min<size_t>(seg.prefix_length,
                                                              trajectory_states.size() - 1)];
        seg.posterior = predict_goals(mdp, tables, params, trajectory_states.front(), endpoint);
        seg.argmax_goal = seg.posterior.argmax();
        seg.second_goal = seg.posterior.second_argmax();
        seg.correct = seg.argmax_goal == true_pos;
        report.segments.push_back(std::move(seg));
    }
    return report;
}

void write_segment_csv(std::ostream& out, const Mdp& mdp, const SegmentReport& report) {
    const int true_pos = mdp.goal_position(mdp.true_goal());
    out << "fraction,prefix_len,argmax,second_argmax,correct,posterior_true,posterior_argmax\n";
    for (const auto& seg : report.segments) {
        const auto goal_name = [&](int pos) {
            return pos >= 0 ? mdp.state_name(mdp.goals()[pos]) : std::string("-");
        };
        out << format_double(seg.fraction) << ',' << seg.prefix_length << ','
            << goal_name(seg.argmax_goal) << ',' << goal_name(seg.second_goal) << ','
            << (seg.correct ? 1 : 0) << ','
            << format_double(seg.posterior.probabilities[true_pos]) << ','
            << format_double(seg.posterior.probabilities[seg.argmax_goal]) << '\n';
    }
}

}  // namespace ddm
