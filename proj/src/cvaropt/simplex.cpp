#include "fcvar/cvaropt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fcvar/core/errors.hpp"
#include "fcvar/core/parallel.hpp"

namespace fcvar::cvaropt {

void LpProblem::validate() const {
    const Eigen::Index n = num_vars();
    const Eigen::Index m = num_rows();
    if (rows.cols() != n || rhs.size() != m ||
        static_cast<Eigen::Index>(senses.size()) != m ||
        static_cast<Eigen::Index>(free_vars.size()) != n) {
        throw InvalidConfig("LpProblem: inconsistent dimensions");
    }
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != n) {
        throw InvalidConfig("LpProblem: names must be empty or one per variable");
    }
    if (!objective.allFinite() || !rows.allFinite() || !rhs.allFinite()) {
        throw InvalidConfig("LpProblem: non-finite coefficients");
    }
}

namespace {

struct Tableau {
    // rows 0..m-1: constraints with rhs in the last column
    // row m:       phase-2 reduced costs (last cell = -z2)
    // row m+1:     phase-1 reduced costs (last cell = -z1)
    Eigen::MatrixXd t;
    std::vector<int> basis;        // basic column per constraint row
    int m = 0;
    int ncols = 0;                 // columns excluding rhs
    int first_artificial = 0;      // artificial columns start here (ncols if none)

    double& rhs(int i) { return t(i, ncols); }

    void pivot(int row, int col) {
        const double piv = t(row, col);
        t.row(row) /= piv;
        const Eigen::RowVectorXd prow = t.row(row);
        core::parallel_for(m + 2, [&](std::ptrdiff_t i) {
            if (static_cast<int>(i) == row) return;
            const double f = t(i, col);
            if (f != 0.0) t.row(i) -= f * prow;
        });
        basis[static_cast<std::size_t>(row)] = col;
    }
};

}  // namespace

LpSolution DenseSimplexSolver::solve(const LpProblem& problem) {
    problem.validate();
    const int m = static_cast<int>(problem.num_rows());
    const int n = static_cast<int>(problem.num_vars());

    // column layout: one column per variable, plus a mirror column for each
    // free variable (x = u - v), then slack/surplus, then artificials
    std::vector<int> mirror(n, -1);
    int n2 = n;
    for (int j = 0; j < n; ++j) {
        if (problem.free_vars[j]) mirror[j] = n2++;
    }

    // equilibrate rows (scale-free feasible set), then normalize rhs >= 0
    Eigen::MatrixXd A = problem.rows;
    Eigen::VectorXd b = problem.rhs;
    std::vector<RowSense> senses = problem.senses;
    for (int i = 0; i < m; ++i) {
        const double mx = A.row(i).cwiseAbs().maxCoeff();
        if (mx > 0.0) {
            A.row(i) /= mx;
            b[i] /= mx;
        }
        if (b[i] < 0.0) {
            A.row(i) = -A.row(i);
            b[i] = -b[i];
            if (senses[i] == RowSense::le) senses[i] = RowSense::ge;
            else if (senses[i] == RowSense::ge) senses[i] = RowSense::le;
        }
    }
    // scale the objective for pricing tolerances; the reported objective is
    // recomputed from the original coefficients
    Eigen::VectorXd c = problem.objective;
    const double c_scale = c.cwiseAbs().maxCoeff();
    if (c_scale > 0.0) c /= c_scale;
    int n_slack = 0, n_art = 0;
    for (int i = 0; i < m; ++i) {
        if (senses[i] != RowSense::eq) ++n_slack;
        if (senses[i] != RowSense::le) ++n_art;
    }

    Tableau tab;
    tab.m = m;
    tab.ncols = n2 + n_slack + n_art;
    tab.first_artificial = n2 + n_slack;
    tab.t = Eigen::MatrixXd::Zero(m + 2, tab.ncols + 1);
    tab.basis.assign(static_cast<std::size_t>(m), -1);

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            tab.t(i, j) = A(i, j);
            if (mirror[j] >= 0) tab.t(i, mirror[j]) = -A(i, j);
        }
        tab.t(i, tab.ncols) = b[i];
    }
    int slack_at = n2, art_at = tab.first_artificial;
    for (int i = 0; i < m; ++i) {
        switch (senses[i]) {
            case RowSense::le:
                tab.t(i, slack_at) = 1.0;
                tab.basis[i] = slack_at++;
                break;
            case RowSense::ge:
                tab.t(i, slack_at++) = -1.0;
                tab.t(i, art_at) = 1.0;
                tab.basis[i] = art_at++;
                break;
            case RowSense::eq:
                tab.t(i, art_at) = 1.0;
                tab.basis[i] = art_at++;
                break;
        }
    }

    // phase-2 reduced costs start at c (initial basis has zero cost)
    for (int j = 0; j < n; ++j) {
        tab.t(m, j) = c[j];
        if (mirror[j] >= 0) tab.t(m, mirror[j]) = -c[j];
    }
    // phase-1 reduced costs: cost 1 on artificials, expressed in the basis
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] >= tab.first_artificial) {
            tab.t.row(m + 1) -= tab.t.row(i);
        }
    }
    for (int j = tab.first_artificial; j < tab.ncols; ++j) tab.t(m + 1, j) = 0.0;

    LpSolution sol;
    int degenerate_run = 0;
    bool bland = false;
    const int max_iter = 50000 + 50 * (m + tab.ncols);

    auto price = [&](int obj_row, int allowed_cols) -> int {
        int col = -1;
        double best = -tol_;
        for (int j = 0; j < allowed_cols; ++j) {
            const double r = tab.t(obj_row, j);
            if (r < -tol_) {
                if (bland) return j;
                if (r < best) {
                    best = r;
                    col = j;
                }
            }
        }
        return col;
    };
    auto ratio_test = [&](int col) -> int {
        int row = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            const double a = tab.t(i, col);
            if (a > tol_) {
                const double r = tab.rhs(i) / a;
                if (r < best - 1e-12 ||
                    (r < best + 1e-12 && (row < 0 || tab.basis[i] < tab.basis[row]))) {
                    best = r;
                    row = i;
                }
            }
        }
        return row;
    };
    auto run_phase = [&](int obj_row, int allowed_cols) -> LpStatus {
        while (sol.iterations < max_iter) {
            const int col = price(obj_row, allowed_cols);
            if (col < 0) return LpStatus::optimal;
            const int row = ratio_test(col);
            if (row < 0) return LpStatus::unbounded;
            const double ratio = tab.rhs(row) / tab.t(row, col);
            degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
            if (degenerate_run > 30) bland = true;
            tab.pivot(row, col);
            ++sol.iterations;
        }
        return LpStatus::numerical;
    };

    // phase 1
    if (n_art > 0) {
        const LpStatus st = run_phase(m + 1, tab.first_artificial);
        if (st != LpStatus::optimal) {
            // phase 1 is bounded below by zero, so anything else is numerical
            sol.status = LpStatus::numerical;
            return sol;
        }
        const double infeas = -tab.t(m + 1, tab.ncols);
        if (infeas > 1e-7) {
            sol.status = LpStatus::infeasible;
            return sol;
        }
        // drive surviving artificials out of the basis when possible
        for (int i = 0; i < m; ++i) {
            if (tab.basis[i] < tab.first_artificial) continue;
            int col = -1;
            for (int j = 0; j < tab.first_artificial; ++j) {
                if (std::fabs(tab.t(i, j)) > tol_) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                tab.pivot(i, col);
                ++sol.iterations;
            }
            // a fully zero row is redundant; the artificial stays basic at 0
        }
    }

    // phase 2
    const LpStatus st = run_phase(m, tab.first_artificial);
    sol.status = st;
    if (st != LpStatus::optimal) return sol;

    Eigen::VectorXd full = Eigen::VectorXd::Zero(tab.ncols);
    for (int i = 0; i < m; ++i) full[tab.basis[i]] = tab.rhs(i);
    sol.x.resize(n);
    for (int j = 0; j < n; ++j) {
        sol.x[j] = full[j] - (mirror[j] >= 0 ? full[mirror[j]] : 0.0);
    }
    sol.objective = problem.objective.dot(sol.x);
    return sol;
}

LpSolution solve_lp(const LpProblem& problem, LpSolver* solver) {
    DenseSimplexSolver bundled;
    LpSolution sol = (solver ? *solver : static_cast<LpSolver&>(bundled)).solve(problem);
    switch (sol.status) {
        case LpStatus::optimal: return sol;
        case LpStatus::infeasible: throw Infeasible("solve_lp: problem is infeasible");
        case LpStatus::unbounded: throw Unbounded("solve_lp: problem is unbounded");
        case LpStatus::numerical: throw NumericalFailure("solve_lp: iteration limit reached");
    }
    throw NumericalFailure("solve_lp: unknown status");
}

void dump_lp(const LpProblem& problem, std::ostream& os) {
    problem.validate();
    os.precision(17);
    os << "minimize\n";
    for (Eigen::Index j = 0; j < problem.num_vars(); ++j) {
        os << (j ? " " : "") << problem.objective[j];
    }
    os << "\nsubject_to\n";
    for (Eigen::Index i = 0; i < problem.num_rows(); ++i) {
        const char* s = problem.senses[i] == RowSense::le   ? "<="
                        : problem.senses[i] == RowSense::eq ? "=="
                                                            : ">=";
        os << s << ' ' << problem.rhs[i] << " :";
        for (Eigen::Index j = 0; j < problem.num_vars(); ++j) os << ' ' << problem.rows(i, j);
        os << '\n';
    }
    os << "free";
    for (Eigen::Index j = 0; j < problem.num_vars(); ++j) {
        if (problem.free_vars[j]) os << ' ' << j;
    }
    os << '\n';
    if (!problem.names.empty()) {
        os << "names";
        for (const auto& nm : problem.names) os << ' ' << nm;
        os << '\n';
    }
}

}  // namespace fcvar::cvaropt
