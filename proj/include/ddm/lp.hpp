#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ddm/mdp.hpp"

namespace ddm {

struct LinearTerm {
    int var;
    double coeff;
};

struct LinearConstraint {
    std::vector<LinearTerm> terms;
    double rhs = 0.0;
};

// Minimize objective . x subject to equalities, at-least rows, and x >= 0.
struct LpProblem {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<LinearConstraint> equalities;
    std::vector<LinearConstraint> at_least;
    // Occupancy problems annotate each variable with its (state, action)
    // and record which state each leading balance equality belongs to.
    std::vector<std::pair<StateId, ActionId>> var_meta;
    std::vector<StateId> balance_row_states;

    int add_variable(double objective_coeff, StateId s = -1, ActionId a = -1);
    void add_equality(std::vector<LinearTerm> terms, double rhs);
    void add_at_least(std::vector<LinearTerm> terms, double rhs);
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

const char* to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::kInfeasible;
    std::vector<double> x;
    double objective_value = 0.0;
    std::string message;
};

// Two-phase revised simplex. Optimal solutions are basic, satisfy every
// constraint within 1e-6 absolute residual, and are objective-accurate to
// 1e-8 relative; anything the solver cannot certify raises
// lp-synthesis/NumericalFailure.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace ddm
