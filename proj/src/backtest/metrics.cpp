#include "fcvar/backtest/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fcvar/core/errors.hpp"

namespace fcvar::backtest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Mean of the lowest tail of `sorted` (ascending) with probability mass tau,
// fractional boundary weight.
double tail_mean_low(const std::vector<double>& sorted, double tau) {
    const double mass = tau * static_cast<double>(sorted.size());
    const int k = static_cast<int>(std::floor(mass));
    const double frac = mass - k;
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += sorted[j];
    if (frac > 0.0 && k < static_cast<int>(sorted.size())) acc += frac * sorted[k];
    return acc / mass;
}

}  // namespace

TailPair cvar_empirical(const std::vector<double>& sample, double beta) {
    if (sample.empty()) throw InsufficientRows("cvar_empirical: empty sample");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidParameter("cvar_empirical: beta must be in (0,1)");
    const double tau = 1.0 - beta;
    std::vector<double> asc(sample);
    std::sort(asc.begin(), asc.end());
    std::vector<double> desc(asc.rbegin(), asc.rend());
    TailPair out;
    out.lower = tail_mean_low(asc, tau);
    out.upper = tail_mean_low(desc, tau);
    out.tail_empty = tau * static_cast<double>(sample.size()) < 1.0;
    return out;
}

double max_drawdown(const std::vector<double>& values) {
    double peak = -std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (double v : values) {
        peak = std::max(peak, v);
        worst = std::max(worst, (peak - v) / peak);
    }
    return 100.0 * worst;
}

double gini_mean_difference(const std::vector<double>& sample) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(sample.size());
    if (n < 2) return 0.0;
    std::vector<double> asc(sample);
    std::sort(asc.begin(), asc.end());
    // sum_{i<j} |x_i - x_j| = sum_i (2i - n + 1) x_(i) on the sorted sample
    double acc = 0.0;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        acc += static_cast<double>(2 * i - n + 1) * asc[i];
    }
    return 2.0 * acc / (static_cast<double>(n) * static_cast<double>(n - 1));
}

RrRatios rr_ratios(const std::vector<double>& returns, double beta_rachev) {
    const std::size_t n = returns.size();
    if (n < 2) throw InsufficientRows("rr_ratios: need at least 2 observations");

    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(n);

    double ss = 0.0, down2 = 0.0;
    for (double r : returns) {
        const double d = r - mean;
        ss += d * d;
        if (r < 0.0) down2 += r * r;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double downside = std::sqrt(down2 / static_cast<double>(n));
    const auto tails = cvar_empirical(returns, beta_rachev);
    const double gmd = gini_mean_difference(returns);

    RrRatios out;
    auto set = [](double num, double den, double& slot, bool& flag) {
        if (den > 0.0 && std::isfinite(den)) {
            slot = num / den;
            flag = true;
        } else {
            slot = kNaN;
            flag = false;
        }
    };
    set(mean, sd, out.ir, out.ir_defined);
    set(mean, downside, out.sortino, out.sortino_defined);
    set(mean, std::fabs(tails.lower), out.starr, out.starr_defined);
    set(tails.upper, std::fabs(tails.lower), out.rachev, out.rachev_defined);
    set(mean, gmd, out.gini, out.gini_defined);
    return out;
}

}  // namespace fcvar::backtest
