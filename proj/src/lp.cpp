#include "ddm/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>

#include "ddm/errors.hpp"

namespace ddm {

namespace {
constexpr const char* kModule = "lp-synthesis";
constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-7;
constexpr double kFeasibilityTol = 1e-6;
constexpr double kPhase1Tol = 1e-7;
constexpr int kRefactorPeriod = 400;

// DDM_LP_DEBUG=1 traces pivoting progress and restarts on stderr.
bool lp_debug() {
    static bool enabled = std::getenv("DDM_LP_DEBUG") != nullptr;
    return enabled;
}
}  // namespace

int LpProblem::add_variable(double objective_coeff, StateId s, ActionId a) {
    objective.push_back(objective_coeff);
    var_meta.emplace_back(s, a);
    return num_vars++;
}

void LpProblem::add_equality(std::vector<LinearTerm> terms, double rhs) {
    equalities.push_back({std::move(terms), rhs});
}

void LpProblem::add_at_least(std::vector<LinearTerm> terms, double rhs) {
    at_least.push_back({std::move(terms), rhs});
}

const char* to_string(LpStatus status) {
    switch (status) {
        case LpStatus::kOptimal: return "optimal";
        case LpStatus::kInfeasible: return "infeasible";
        case LpStatus::kUnbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

// Two-phase revised simplex with an explicit basis inverse, devex pricing,
// a two-pass ratio test, and periodic refactorization. Artificial columns
// are implicit (identity); surplus columns carry the at-least rows.
class Simplex {
public:
    Simplex(const LpProblem& p) : problem_(p) { build(p); }

    LpSolution run() {
        if (rows_ == 0) {
            LpSolution sol;
            for (double c : problem_.objective)
                if (c < 0.0) {
                    sol.status = LpStatus::kUnbounded;
                    sol.message = "negative cost with no constraints";
                    return sol;
                }
            sol.status = LpStatus::kOptimal;
            sol.x.assign(problem_.num_vars, 0.0);
            sol.objective_value = 0.0;
            return sol;
        }
        // Accumulated basis-inverse drift occasionally leaves an infeasible
        // basis behind; a clean restart with a shorter refactor period
        // repairs it.
        constexpr int kPeriods[] = {kRefactorPeriod, 120, 40};
        for (int attempt = 0; attempt < 3; ++attempt) {
            refactor_period_ = kPeriods[attempt];
            needs_restart_ = false;
            reset();
            if (lp_debug())
                std::fprintf(stderr, "[lp] attempt %d rows=%d vars=%d\n", attempt, rows_,
                             n_total_);
            LpSolution sol = run_once();
            if (!needs_restart_) return sol;
        }
        fail(kModule, "NumericalFailure", "basis stayed unstable after restarts");
    }

private:
    void reset() {
        rows_ = rows_original_;
        b_ = b_original_;
        cols_ = cols_original_;
        basis_.resize(rows_);
        in_basis_.assign(n_total_, 0);
        for (int i = 0; i < rows_; ++i) basis_[i] = n_total_ + i;
        binv_ = MatrixXd::Identity(rows_, rows_);
        xb_ = b_;
        weights_.assign(n_total_, 1.0);
        unbounded_ = false;
    }

    LpSolution run_once() {
        LpSolution sol;
        phase1_ = true;
        if (!iterate()) {
            if (needs_restart_) return sol;
            fail(kModule, "NumericalFailure", "phase 1 exceeded the iteration budget");
        }
        if (needs_restart_) return sol;
        double infeas = current_objective();
        if (infeas > kPhase1Tol) {
            sol.status = LpStatus::kInfeasible;
            sol.message = "phase 1 infeasibility " + std::to_string(infeas);
            return sol;
        }
        remove_artificials();

        phase1_ = false;
        weights_.assign(n_total_, 1.0);
        if (!iterate()) {
            if (needs_restart_) return sol;
            if (unbounded_) {
                sol.status = LpStatus::kUnbounded;
                sol.message = "cost-reducing ray found";
                return sol;
            }
            fail(kModule, "NumericalFailure", "phase 2 exceeded the iteration budget");
        }
        if (needs_restart_) return sol;
        if (unbounded_) {
            sol.status = LpStatus::kUnbounded;
            sol.message = "cost-reducing ray found";
            return sol;
        }
        return finalize();
    }
    void build(const LpProblem& p) {
        const int me = static_cast<int>(p.equalities.size());
        const int mi = static_cast<int>(p.at_least.size());
        rows_ = me + mi;
        n_struct_ = p.num_vars;
        n_total_ = n_struct_ + mi;
        cols_.assign(n_total_, {});
        b_ = VectorXd::Zero(rows_);

        std::vector<std::map<int, double>> by_row(rows_);
        for (int i = 0; i < me; ++i) {
            for (const auto& t : p.equalities[i].terms) check_var(t.var), by_row[i][t.var] += t.coeff;
            b_(i) = p.equalities[i].rhs;
        }
        for (int k = 0; k < mi; ++k) {
            int i = me + k;
            for (const auto& t : p.at_least[k].terms) check_var(t.var), by_row[i][t.var] += t.coeff;
            by_row[i][n_struct_ + k] = -1.0;  // surplus
            b_(i) = p.at_least[k].rhs;
        }
        for (int i = 0; i < rows_; ++i) {
            double sign = b_(i) < 0.0 ? -1.0 : 1.0;
            b_(i) *= sign;
            for (const auto& [var, coeff] : by_row[i])
                if (coeff != 0.0) cols_[var].push_back({i, coeff * sign});
        }

        cost_ = VectorXd::Zero(n_total_);
        for (int j = 0; j < n_struct_; ++j) cost_(j) = p.objective[j];

        rows_original_ = rows_;
        b_original_ = b_;
        cols_original_ = cols_;
    }

    void check_var(int var) const {
        if (var < 0 || var >= problem_.num_vars)
            fail(kModule, "NumericalFailure", "constraint references unknown variable");
    }

    bool is_artificial(int var) const { return var >= n_total_; }

    double var_cost(int var) const {
        if (phase1_) return is_artificial(var) ? 1.0 : 0.0;
        return is_artificial(var) ? 0.0 : cost_(var);
    }

    double current_objective() const {
        double obj = 0.0;
        for (int i = 0; i < rows_; ++i) obj += var_cost(basis_[i]) * xb_(i);
        return obj;
    }

    VectorXd dual_prices() const {
        VectorXd cb(rows_);
        for (int i = 0; i < rows_; ++i) cb(i) = var_cost(basis_[i]);
        return binv_.transpose() * cb;
    }

    double column_dot(int var, const VectorXd& y) const {
        double acc = 0.0;
        for (const auto& [row, coeff] : cols_[var]) acc += y(row) * coeff;
        return acc;
    }

    VectorXd ftran(int var) const {
        VectorXd d = VectorXd::Zero(rows_);
        for (const auto& [row, coeff] : cols_[var]) d += coeff * binv_.col(row);
        return d;
    }

    void refactorize() {
        MatrixXd bmat = MatrixXd::Zero(rows_, rows_);
        for (int k = 0; k < rows_; ++k) {
            int var = basis_[k];
            if (is_artificial(var))
                bmat(var - n_total_, k) = 1.0;
            else
                for (const auto& [row, coeff] : cols_[var]) bmat(row, k) = coeff;
        }
        Eigen::PartialPivLU<MatrixXd> lu(bmat);
        binv_ = lu.inverse();
        xb_ = binv_ * b_;
        double worst = 0.0;
        for (int i = 0; i < rows_; ++i) {
            if (xb_(i) < 0.0) {
                worst = std::min(worst, xb_(i));
                if (xb_(i) < -1e-8)
                    needs_restart_ = true;  // drift produced an infeasible basis
                xb_(i) = 0.0;
            }
        }
        if (lp_debug() && worst < 0.0)
            std::fprintf(stderr, "[lp] refactor: worst xb %.3e%s\n", worst,
                         needs_restart_ ? " RESTART" : "");
    }

    // One simplex phase; false when the iteration budget runs out.
    bool iterate() {
        const long budget = 50000L + 100L * rows_ + 8L * n_total_;
        unbounded_ = false;
        banned_.assign(n_total_, 0);
        bool bland = false;
        int stall = 0;
        int since_refactor = 0;
        double last_obj = current_objective();
        for (long it = 0; it < budget; ++it) {
            VectorXd y = dual_prices();
            int entering = -1;
            double best_score = 0.0;
            for (int j = 0; j < n_total_; ++j) {
                if (in_basis_[j] || banned_[j]) continue;
                double rc = var_cost(j) - column_dot(j, y);
                if (rc >= -kReducedCostTol) continue;
                if (bland) {  // lowest improving index
                    entering = j;
                    break;
                }
                double score = rc * rc / weights_[j];
                if (score > best_score) {
                    best_score = score;
                    entering = j;
                }
            }
            if (entering < 0) return true;  // phase optimal

            VectorXd d = ftran(entering);
            int leaving = choose_leaving(d, bland, kPivotTol);
            if (leaving < 0) {
                double dmax = d.maxCoeff();
                if (dmax > 1e-10) leaving = choose_leaving(d, bland, dmax * 1e-2);
            }
            if (leaving < 0) {
                if (d.cwiseAbs().maxCoeff() <= 1e-9) {
                    // Numerically null direction: the column is dependent on
                    // the basis; drop it from pricing for this phase.
                    banned_[entering] = 1;
                    continue;
                }
                if (phase1_) {
                    if (lp_debug())
                        std::fprintf(stderr, "[lp] phase-1 ray at col %d dmax=%.3e\n",
                                     entering, d.maxCoeff());
                    needs_restart_ = true;  // a phase-1 ray cannot be real
                    return false;
                }
                unbounded_ = true;
                return true;
            }
            devex_update(entering, leaving, d);
            pivot(entering, leaving, d);

            if (++since_refactor >= refactor_period_) {
                refactorize();
                if (needs_restart_) return false;
                since_refactor = 0;
                weights_.assign(n_total_, 1.0);
            }

            double obj = current_objective();
            if (obj < last_obj - 1e-12) {
                stall = 0;
                bland = false;
            } else if (++stall > 200) {
                bland = true;
            }
            last_obj = obj;
            if (lp_debug() && it % 2000 == 1999)
                std::fprintf(stderr, "[lp] phase%d it=%ld obj=%.9e stall=%d\n",
                             phase1_ ? 1 : 2, it, obj, stall);
        }
        return false;
    }

    // Harris two-pass ratio test: the first pass relaxes each bound by a
    // small feasibility tolerance, the second picks the largest pivot among
    // the rows whose exact ratio stays within the relaxed limit. Rows
    // holding artificials are preferred so phase 2 drives them out.
    int choose_leaving(const VectorXd& d, bool bland, double pivot_floor) const {
        constexpr double kHarrisDelta = 1e-9;
        double theta_limit = std::numeric_limits<double>::infinity();
        for (int i = 0; i < rows_; ++i) {
            if (d(i) <= pivot_floor) continue;
            theta_limit = std::min(theta_limit, (xb_(i) + kHarrisDelta) / d(i));
        }
        if (!std::isfinite(theta_limit)) return -1;

        int leaving = -1;
        for (int i = 0; i < rows_; ++i) {
            if (d(i) <= pivot_floor) continue;
            if (xb_(i) / d(i) > theta_limit) continue;
            if (leaving < 0) {
                leaving = i;
                continue;
            }
            bool cand_art = is_artificial(basis_[i]);
            bool cur_art = is_artificial(basis_[leaving]);
            if (cand_art != cur_art) {
                if (cand_art) leaving = i;
            } else if (bland) {
                if (basis_[i] < basis_[leaving]) leaving = i;
            } else if (d(i) > d(leaving)) {
                leaving = i;
            }
        }
        return leaving;
    }

    void devex_update(int entering, int leaving, const VectorXd& d) {
        const double dr = d(leaving);
        const double wq = weights_[entering];
        RowVectorXd rho = binv_.row(leaving);
        const double ratio = wq / (dr * dr);
        for (int j = 0; j < n_total_; ++j) {
            if (in_basis_[j] || j == entering) continue;
            double alpha = 0.0;
            for (const auto& [row, coeff] : cols_[j]) alpha += rho(row) * coeff;
            if (alpha != 0.0)
                weights_[j] = std::max(weights_[j], alpha * alpha * ratio);
        }
        if (!is_artificial(basis_[leaving]))
            weights_[basis_[leaving]] = std::max(ratio, 1.0);
        weights_[entering] = 1.0;
    }

    void pivot(int entering, int leaving, const VectorXd& d) {
        double dr = d(leaving);
        double theta = xb_(leaving) / dr;
        xb_ -= theta * d;
        xb_(leaving) = theta;
        for (int i = 0; i < rows_; ++i)
            if (xb_(i) < 0.0 && xb_(i) > -2e-9) xb_(i) = 0.0;

        RowVectorXd pivot_row = binv_.row(leaving) / dr;
        binv_.noalias() -= d * pivot_row;
        binv_.row(leaving) = pivot_row;

        int old = basis_[leaving];
        if (!is_artificial(old)) in_basis_[old] = 0;
        basis_[leaving] = entering;
        in_basis_[entering] = 1;
    }

    // After phase 1: pivot residual artificials out; rows admitting no pivot
    // are linearly dependent and get dropped.
    void remove_artificials() {
        std::vector<int> drop;
        for (int i = 0; i < rows_; ++i) {
            if (!is_artificial(basis_[i])) continue;
            int found = -1;
            VectorXd d;
            for (int j = 0; j < n_total_ && found < 0; ++j) {
                if (in_basis_[j]) continue;
                double dr = 0.0;
                for (const auto& [row, coeff] : cols_[j]) dr += binv_(i, row) * coeff;
                if (std::abs(dr) > kPivotTol * 10) {
                    d = ftran(j);
                    if (std::abs(d(i)) > kPivotTol) found = j;
                }
            }
            if (found >= 0) {
                pivot(found, i, d);  // zero-level pivot
            } else {
                drop.push_back(i);
            }
        }
        if (!drop.empty()) drop_rows(drop);
    }

    void drop_rows(const std::vector<int>& drop) {
        std::vector<char> dead(rows_, 0);
        for (int i : drop) dead[i] = 1;
        std::vector<int> keep;
        for (int i = 0; i < rows_; ++i)
            if (!dead[i]) keep.push_back(i);
        const int new_rows = static_cast<int>(keep.size());

        std::vector<int> new_row_of(rows_, -1);
        for (int k = 0; k < new_rows; ++k) new_row_of[keep[k]] = k;

        for (auto& col : cols_) {
            std::vector<std::pair<int, double>> nc;
            for (auto& [row, coeff] : col)
                if (new_row_of[row] >= 0) nc.push_back({new_row_of[row], coeff});
            col = std::move(nc);
        }
        VectorXd nb(new_rows);
        std::vector<int> nbasis(new_rows);
        for (int k = 0; k < new_rows; ++k) {
            nb(k) = b_(keep[k]);
            nbasis[k] = basis_[keep[k]];
        }
        b_ = nb;
        basis_ = nbasis;
        rows_ = new_rows;

        MatrixXd bmat = MatrixXd::Zero(rows_, rows_);
        for (int k = 0; k < rows_; ++k)
            for (const auto& [row, coeff] : cols_[basis_[k]]) bmat(row, k) = coeff;
        Eigen::PartialPivLU<MatrixXd> lu(bmat);
        binv_ = lu.inverse();
        xb_ = binv_ * b_;
    }

    LpSolution finalize() {
        // Fresh factorization of the final basis removes accumulated drift.
        MatrixXd bmat = MatrixXd::Zero(rows_, rows_);
        for (int k = 0; k < rows_; ++k) {
            int var = basis_[k];
            if (is_artificial(var))
                bmat(var - n_total_, k) = 1.0;
            else
                for (const auto& [row, coeff] : cols_[var]) bmat(row, k) = coeff;
        }
        Eigen::PartialPivLU<MatrixXd> lu(bmat);
        VectorXd xb = lu.solve(b_);

        LpSolution sol;
        sol.status = LpStatus::kOptimal;
        sol.x.assign(problem_.num_vars, 0.0);
        std::vector<double> full(n_total_, 0.0);
        for (int i = 0; i < rows_; ++i) {
            if (is_artificial(basis_[i])) {
                if (std::abs(xb(i)) > kFeasibilityTol)
                    fail(kModule, "NumericalFailure", "artificial variable stuck in basis");
                continue;
            }
            if (lp_debug() && xb(i) < -1e-9)
                std::fprintf(stderr, "[lp] finalize: basic %d = %.3e\n", basis_[i], xb(i));
            full[basis_[i]] = xb(i);
        }
        for (double& v : full)
            if (v < 0.0) {
                if (v < -1e-7) {
                    needs_restart_ = true;
                    return sol;
                }
                v = 0.0;
            }
        for (int j = 0; j < problem_.num_vars; ++j) sol.x[j] = full[j];

        verify(sol.x);
        double obj = 0.0;
        for (int j = 0; j < problem_.num_vars; ++j) obj += problem_.objective[j] * sol.x[j];
        sol.objective_value = obj;
        return sol;
    }

    void verify(const std::vector<double>& x) const {
        for (const auto& c : problem_.equalities) {
            double acc = -c.rhs;
            for (const auto& t : c.terms) acc += t.coeff * x[t.var];
            if (std::abs(acc) > kFeasibilityTol)
                fail(kModule, "NumericalFailure",
                     "equality residual " + std::to_string(acc) + " beyond tolerance");
        }
        for (const auto& c : problem_.at_least) {
            double acc = -c.rhs;
            for (const auto& t : c.terms) acc += t.coeff * x[t.var];
            if (acc < -kFeasibilityTol)
                fail(kModule, "NumericalFailure",
                     "inequality violated by " + std::to_string(-acc));
        }
    }

    const LpProblem& problem_;
    int rows_ = 0;
    int rows_original_ = 0;
    int n_struct_ = 0;
    int n_total_ = 0;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<std::vector<std::pair<int, double>>> cols_original_;
    VectorXd b_;
    VectorXd b_original_;
    VectorXd cost_;
    std::vector<int> basis_;
    std::vector<char> in_basis_;
    std::vector<char> banned_;
    std::vector<double> weights_;
    MatrixXd binv_;
    VectorXd xb_;
    int refactor_period_ = kRefactorPeriod;
    bool phase1_ = true;
    bool unbounded_ = false;
    bool needs_restart_ = false;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
    if (problem.objective.size() != static_cast<size_t>(problem.num_vars))
        fail(kModule, "NumericalFailure", "objective size does not match num_vars");
    Simplex simplex(problem);
    return simplex.run();
}

}  // namespace ddm
