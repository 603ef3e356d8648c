#include "fcvar/core/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fcvar::core {

namespace {

struct Vertex {
    std::vector<double> x;
    double f;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             std::vector<double> x0, const std::vector<double>& steps,
                             const NelderMeadOptions& opts) {
    const std::size_t n = x0.size();
    NelderMeadResult res;
    res.x = x0;

    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        double f = fn(x);
        if (!std::isfinite(f)) f = std::numeric_limits<double>::max();
        return f;
    };

    std::vector<Vertex> simplex(n + 1);
    simplex[0] = {x0, eval(x0)};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> xi = x0;
        xi[i] += steps[i];
        simplex[i + 1] = {std::move(xi), 0.0};
        simplex[i + 1].f = eval(simplex[i + 1].x);
    }

    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    std::sort(simplex.begin(), simplex.end(), by_value);

    // adaptive coefficients (Gao & Han)
    const double nd = static_cast<double>(std::max<std::size_t>(n, 1));
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / nd;
    const double gamma = 0.75 - 0.5 / nd;
    const double delta = 1.0 - 1.0 / nd;

    double cycle_best = simplex[0].f;
    int iters_in_cycle = 0;

    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    while (evals < opts.max_evals) {
        // centroid of all but worst
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i].x[j];
        }
        for (std::size_t j = 0; j < n; ++j) centroid[j] /= nd;

        const Vertex& worst = simplex[n];
        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - worst.x[j]);
        const double fr = eval(xr);

        if (fr < simplex[0].f) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + beta * (xr[j] - centroid[j]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[n] = {xe, fe};
            } else {
                simplex[n] = {xr, fr};
            }
        } else if (fr < simplex[n - 1].f) {
            simplex[n] = {xr, fr};
        } else {
            const bool outside = fr < worst.f;
            if (outside) {
                for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
            } else {
                for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] - gamma * (centroid[j] - worst.x[j]);
            }
            const double fc = eval(xc);
            if (fc < std::min(fr, worst.f)) {
                simplex[n] = {xc, fc};
            } else {
                // shrink toward best
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        simplex[i].x[j] = simplex[0].x[j] + delta * (simplex[i].x[j] - simplex[0].x[j]);
                    }
                    simplex[i].f = eval(simplex[i].x);
                }
            }
        }

        std::sort(simplex.begin(), simplex.end(), by_value);

        if (++iters_in_cycle >= static_cast<int>(n) + 1) {
            const double spread = simplex[n].f - simplex[0].f;
            const double scale = 1.0 + std::fabs(simplex[0].f);
            if (cycle_best - simplex[0].f < opts.tol && spread < opts.tol * scale) {
                res.converged = true;
                break;
            }
            cycle_best = simplex[0].f;
            iters_in_cycle = 0;
        }
    }

    res.x = simplex[0].x;
    res.fx = simplex[0].f;
    res.evals = evals;
    return res;
}

}  // namespace fcvar::core
