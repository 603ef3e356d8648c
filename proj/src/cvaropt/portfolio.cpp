#include "fcvar/cvaropt/portfolio.hpp"

#include <algorithm>
#include <cmath>

#include "fcvar/core/errors.hpp"

namespace fcvar::cvaropt {

namespace {

void check_config(const ScenarioMatrix& sc, const OptConfig& cfg) {
    if (sc.scenarios() < 1 || sc.assets() < 1) {
        throw InvalidConfig("optimize: scenario matrix must be non-empty");
    }
    if (!sc.returns.allFinite()) throw InvalidConfig("optimize: non-finite scenario returns");
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw InvalidConfig("optimize: alpha not in [0,1]");
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) throw InvalidConfig("optimize: beta not in (0,1)");
    if (cfg.prev_weights) {
        if (cfg.prev_weights->size() != sc.assets()) {
            throw InvalidConfig("optimize: prev_weights length mismatch");
        }
        if ((cfg.prev_weights->array() < -1e-9).any() ||
            std::fabs(cfg.prev_weights->sum() - 1.0) > 1e-6) {
            throw InvalidConfig("optimize: prev_weights must lie on the simplex");
        }
        if (cfg.turnover_cap && !(*cfg.turnover_cap > 0.0)) {
            throw InvalidConfig("optimize: turnover_cap must be positive");
        }
    }
}

}  // namespace

LpProblem build_lp(const ScenarioMatrix& sc, const OptConfig& cfg) {
    check_config(sc, cfg);
    const int S = static_cast<int>(sc.scenarios());
    const int I = static_cast<int>(sc.assets());
    const bool turnover = cfg.prev_weights.has_value() && cfg.turnover_cap.has_value();

    // variables: theta (I) | nu (1, free) | u (S) | d (I, if turnover)
    const int nu_ix = I;
    const int u_ix = I + 1;
    const int d_ix = u_ix + S;
    const int n = turnover ? d_ix + I : u_ix + S;
    const int m = 1 + S + (turnover ? 2 * I + 1 : 0);

    LpProblem lp;
    lp.objective = Eigen::VectorXd::Zero(n);
    lp.rows = Eigen::MatrixXd::Zero(m, n);
    lp.rhs = Eigen::VectorXd::Zero(m);
    lp.senses.assign(static_cast<std::size_t>(m), RowSense::le);
    lp.free_vars.assign(static_cast<std::size_t>(n), false);
    lp.free_vars[static_cast<std::size_t>(nu_ix)] = true;
    lp.names.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < I; ++i) lp.names[i] = "theta_" + std::to_string(i);
    lp.names[nu_ix] = "nu";
    for (int s = 0; s < S; ++s) lp.names[u_ix + s] = "u_" + std::to_string(s);

    const Eigen::VectorXd mu = sc.returns.colwise().mean();
    lp.objective.head(I) = -cfg.alpha * mu;
    lp.objective[nu_ix] = 1.0 - cfg.alpha;
    const double tail_coef = (1.0 - cfg.alpha) / (static_cast<double>(S) * (1.0 - cfg.beta));
    lp.objective.segment(u_ix, S).setConstant(tail_coef);

    // budget
    lp.rows.row(0).head(I).setOnes();
    lp.senses[0] = RowSense::eq;
    lp.rhs[0] = 1.0;

    // u_s + sum_i r_si theta_i + nu >= 0
    for (int s = 0; s < S; ++s) {
        lp.rows.row(1 + s).head(I) = sc.returns.row(s);
        lp.rows(1 + s, nu_ix) = 1.0;
        lp.rows(1 + s, u_ix + s) = 1.0;
        lp.senses[1 + s] = RowSense::ge;
        lp.rhs[1 + s] = 0.0;
    }

    if (turnover) {
        const Eigen::VectorXd& prev = *cfg.prev_weights;
        for (int i = 0; i < I; ++i) {
            lp.names[d_ix + i] = "d_" + std::to_string(i);
            // d_i - theta_i >= -prev_i
            lp.rows(1 + S + 2 * i, d_ix + i) = 1.0;
            lp.rows(1 + S + 2 * i, i) = -1.0;
            lp.senses[1 + S + 2 * i] = RowSense::ge;
            lp.rhs[1 + S + 2 * i] = -prev[i];
            // d_i + theta_i >= prev_i
            lp.rows(1 + S + 2 * i + 1, d_ix + i) = 1.0;
            lp.rows(1 + S + 2 * i + 1, i) = 1.0;
            lp.senses[1 + S + 2 * i + 1] = RowSense::ge;
            lp.rhs[1 + S + 2 * i + 1] = prev[i];
        }
        lp.rows.row(m - 1).segment(d_ix, I).setOnes();
        lp.senses[m - 1] = RowSense::le;
        lp.rhs[m - 1] = *cfg.turnover_cap;
    }
    return lp;
}

OptResult optimize_portfolio(const ScenarioMatrix& sc, const OptConfig& cfg, LpSolver* solver) {
    const LpProblem lp = build_lp(sc, cfg);
    const LpSolution sol = solve_lp(lp, solver);
    const int S = static_cast<int>(sc.scenarios());
    const int I = static_cast<int>(sc.assets());

    OptResult res;
    res.status = sol.status;
    res.weights = sol.x.head(I);
    res.nu = sol.x[I];
    res.objective = sol.objective;
    const Eigen::VectorXd mu = sc.returns.colwise().mean();
    res.expected_return = mu.dot(res.weights);
    if (cfg.alpha < 1.0) {
        res.cvar = res.nu + sol.x.segment(I + 1, S).sum() /
                                (static_cast<double>(S) * (1.0 - cfg.beta));
    } else {
        // alpha = 1 gives the cvar block zero weight, leaving nu and the
        // slacks undetermined; evaluate the tail of the chosen weights instead
        res.cvar = cvar_of_weights(sc, res.weights, cfg.beta);
    }
    return res;
}

double cvar_of_weights(const ScenarioMatrix& sc, const Eigen::VectorXd& weights, double beta) {
    if (weights.size() != sc.assets()) throw InvalidConfig("cvar_of_weights: weight length mismatch");
    const int S = static_cast<int>(sc.scenarios());
    std::vector<double> losses(static_cast<std::size_t>(S));
    const Eigen::VectorXd x = sc.returns * weights;
    for (int s = 0; s < S; ++s) losses[static_cast<std::size_t>(s)] = -x[s];
    std::sort(losses.begin(), losses.end(), std::greater<double>());
    const double mass = (1.0 - beta) * static_cast<double>(S);
    const int k = static_cast<int>(std::floor(mass));
    const double frac = mass - k;
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += losses[static_cast<std::size_t>(j)];
    if (frac > 0.0 && k < S) acc += frac * losses[static_cast<std::size_t>(k)];
    return acc / mass;
}

}  // namespace fcvar::cvaropt
