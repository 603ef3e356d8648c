#pragma once

#include <Eigen/Dense>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace fcvar::cvaropt {

enum class RowSense { le, eq, ge };

/// Dense LP in the form  min c'x  s.t.  A x {<=,=,>=} b, with every variable
/// either bounded below by 0 or free.
struct LpProblem {
    Eigen::VectorXd objective;        // n
    Eigen::MatrixXd rows;             // m x n
    std::vector<RowSense> senses;     // m
    Eigen::VectorXd rhs;              // m
    std::vector<bool> free_vars;      // n; false = lower bound 0
    std::vector<std::string> names;   // n, optional tags

    Eigen::Index num_vars() const { return objective.size(); }
    Eigen::Index num_rows() const { return rows.rows(); }
    void validate() const;  // throws InvalidConfig on inconsistent dimensions
};

enum class LpStatus { optimal, infeasible, unbounded, numerical };

struct LpSolution {
    Eigen::VectorXd x;
    double objective = 0.0;
    LpStatus status = LpStatus::numerical;
    int iterations = 0;
};

/// Solver interface; the bundled dense simplex can be swapped for an external
/// solver with the same contract.
class LpSolver {
public:
    virtual ~LpSolver() = default;
    virtual LpSolution solve(const LpProblem& problem) = 0;
};

/// Bundled two-phase dense full-tableau simplex. Dantzig pricing, switching
/// permanently to Bland's rule after a run of degenerate pivots so cycling
/// terminates. Pivot row elimination is OpenMP-parallel with slot writes
/// only, so results do not depend on the thread count.
class DenseSimplexSolver final : public LpSolver {
public:
    explicit DenseSimplexSolver(double tol = 1e-9) : tol_(tol) {}
    LpSolution solve(const LpProblem& problem) override;

private:
    double tol_;
};

/// Solves with the bundled simplex; throws Infeasible / Unbounded /
/// NumericalFailure instead of returning a non-optimal status.
LpSolution solve_lp(const LpProblem& problem, LpSolver* solver = nullptr);

/// Plain-text dump of an LP instance for cross-checks with external solvers.
/// Format: `minimize` + coefficient row, `subject_to` + one `<sense> <rhs> :
/// <coefficients>` row each, `free` + indices, `names` + tags.
void dump_lp(const LpProblem& problem, std::ostream& os);

}  // namespace fcvar::cvaropt
