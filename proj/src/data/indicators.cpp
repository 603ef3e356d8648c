#include "fcvar/data/indicators.hpp"

#include <algorithm>
#include <cmath>

#include "fcvar/backtest/metrics.hpp"
#include "fcvar/core/errors.hpp"

namespace fcvar::data {

ReturnPanel compute_log_returns(const PricePanel& prices) {
    if (prices.rows() < 2) throw InsufficientRows("compute_log_returns: need at least 2 price rows");
    if ((prices.prices.array() <= 0.0).any()) {
        throw NonPositivePrice("compute_log_returns: prices must be strictly positive");
    }
    ReturnPanel out;
    out.tickers = prices.tickers;
    out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    const Eigen::Index n = prices.rows();
    out.returns = prices.prices.bottomRows(n - 1).array().log().matrix() -
                  prices.prices.topRows(n - 1).array().log().matrix();
    return out;
}

std::vector<double> compute_rsi(const std::vector<double>& prices, int n) {
    if (n < 1 || static_cast<int>(prices.size()) <= n) {
        throw WindowTooLong("compute_rsi: series length must exceed the window");
    }
    std::vector<double> changes(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) changes[i - 1] = prices[i] - prices[i - 1];

    std::vector<double> out;
    out.reserve(changes.size() - n + 1);
    for (std::size_t t = n - 1; t < changes.size(); ++t) {
        double up = 0.0, down = 0.0;
        int n_up = 0, n_down = 0;
        for (std::size_t j = t + 1 - n; j <= t; ++j) {
            if (changes[j] > 0.0) {
                up += changes[j];
                ++n_up;
            } else if (changes[j] < 0.0) {
                down += -changes[j];
                ++n_down;
            }
        }
        const double avg_up = n_up ? up / n_up : 0.0;
        const double avg_down = n_down ? down / n_down : 0.0;
        double rsi;
        if (avg_down == 0.0) {
            rsi = 100.0;
        } else if (avg_up == 0.0) {
            rsi = 0.0;
        } else {
            rsi = 100.0 - 100.0 / (1.0 + avg_up / avg_down);
        }
        out.push_back(rsi);
    }
    return out;
}

std::vector<double> compute_atr(const std::vector<double>& highs, const std::vector<double>& lows,
                                const std::vector<double>& closes, int n) {
    if (highs.size() != lows.size() || highs.size() != closes.size()) {
        throw MisalignedSeries("compute_atr: high/low/close series must have equal length");
    }
    if (n < 1 || static_cast<int>(highs.size()) <= n) {
        throw WindowTooLong("compute_atr: series length must exceed the window");
    }
    std::vector<double> tr(highs.size());
    tr[0] = highs[0] - lows[0];
    for (std::size_t t = 1; t < highs.size(); ++t) {
        const double hl = highs[t] - lows[t];
        const double hc = std::fabs(highs[t] - closes[t - 1]);
        const double lc = std::fabs(lows[t] - closes[t - 1]);
        tr[t] = std::max({hl, hc, lc});
    }
    std::vector<double> out;
    out.reserve(tr.size() - n + 1);
    double acc = 0.0;
    for (std::size_t t = 0; t < tr.size(); ++t) {
        acc += tr[t];
        if (t >= static_cast<std::size_t>(n)) acc -= tr[t - n];
        if (t + 1 >= static_cast<std::size_t>(n)) out.push_back(acc / n);
    }
    return out;
}

FactorPanel normalize_factors(const FactorPanel& panel) {
    FactorPanel out = panel;
    const Eigen::Index k = panel.factors();
    out.bounds.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const double lo = panel.values.col(j).minCoeff();
        const double hi = panel.values.col(j).maxCoeff();
        out.bounds[j] = {lo, hi};
        if (hi > lo) {
            out.values.col(j) = (panel.values.col(j).array() - lo) / (hi - lo);
        } else {
            out.values.col(j).setConstant(0.5);
        }
    }
    return out;
}

Eigen::VectorXd apply_bounds(const Eigen::VectorXd& raw_row,
                             const std::vector<std::pair<double, double>>& bounds) {
    if (static_cast<std::size_t>(raw_row.size()) != bounds.size()) {
        throw MisalignedSeries("apply_bounds: row length does not match bounds");
    }
    Eigen::VectorXd out(raw_row.size());
    for (Eigen::Index j = 0; j < raw_row.size(); ++j) {
        const auto [lo, hi] = bounds[j];
        out[j] = hi > lo ? (raw_row[j] - lo) / (hi - lo) : 0.5;
    }
    return out;
}

std::vector<AssetStats> panel_stats(const ReturnPanel& returns, double beta) {
    const Eigen::Index n = returns.rows();
    if (n < 2) throw InsufficientRows("panel_stats: need at least 2 observations");
    std::vector<AssetStats> out(returns.assets());
    for (Eigen::Index i = 0; i < returns.assets(); ++i) {
        const Eigen::VectorXd col = returns.returns.col(i);
        AssetStats s;
        s.mean = col.mean();
        Eigen::VectorXd sorted = col;
        std::sort(sorted.data(), sorted.data() + n);
        s.median = (n % 2) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        const Eigen::ArrayXd d = col.array() - s.mean;
        const double m2 = d.square().mean();
        s.stddev = std::sqrt(m2 * static_cast<double>(n) / static_cast<double>(n - 1));
        if (m2 > 0.0) {
            s.skewness = d.pow(3).mean() / std::pow(m2, 1.5);
            s.ex_kurtosis = d.pow(4).mean() / (m2 * m2) - 3.0;
        }
        const auto tails = backtest::cvar_empirical(
            std::vector<double>(col.data(), col.data() + n), beta);
        s.cvar_lower = tails.lower;
        s.cvar_upper = tails.upper;
        out[i] = s;
    }
    return out;
}

RollingWindow make_window(const ReturnPanel& returns, const std::vector<FactorPanel>& factors,
                          int t, int window, bool with_factors) {
    if (window < 1) throw WindowOutOfRange("make_window: window must be positive");
    const int min_anchor = with_factors ? window + 1 : window;
    if (t < min_anchor || t > static_cast<int>(returns.rows())) {
        throw WindowOutOfRange("make_window: anchor " + std::to_string(t) +
                               " out of range for window " + std::to_string(window));
    }
    RollingWindow w;
    w.anchor = t;
    w.length = window;
    w.returns = returns.returns.middleRows(t - window, window);
    if (with_factors) {
        w.factors.reserve(factors.size());
        for (const auto& fp : factors) {
            if (fp.rows() != returns.rows()) {
                throw MisalignedSeries("make_window: factor panel for " + fp.ticker +
                                       " is not aligned with the return panel");
            }
            w.factors.push_back(fp.values.middleRows(t - window - 1, window));
        }
    }
    return w;
}

}  // namespace fcvar::data
