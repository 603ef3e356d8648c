#include "fcvar/backtest/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fcvar/core/errors.hpp"
#include "fcvar/data/csv_io.hpp"

namespace fcvar::backtest {

MetricsReport compute_metrics(const BacktestLedger& ledger) {
    const std::size_t n = ledger.rows.size();
    if (n < 2) throw InsufficientRows("compute_metrics: need at least 2 ledger rows");

    MetricsReport m;
    std::vector<double> net, values;
    net.reserve(n);
    values.reserve(n + 1);
    values.push_back(ledger.initial_value);
    double turn_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        net.push_back(ledger.rows[i].net);
        values.push_back(ledger.rows[i].value);
        if (i > 0) turn_sum += ledger.rows[i].turnover;
    }
    const double final_v = values.back();
    m.total_return_pct = (final_v / ledger.initial_value - 1.0) * 100.0;
    m.annualized_return_pct =
        (std::pow(final_v / ledger.initial_value, 252.0 / static_cast<double>(n)) - 1.0) * 100.0;
    m.avg_turnover_pct = turn_sum / static_cast<double>(n - 1) * 100.0;
    m.max_drawdown_pct = max_drawdown(values);

    const auto t95 = cvar_empirical(net, 0.95);
    const auto t99 = cvar_empirical(net, 0.99);
    m.cvar_lower_95_pct = t95.lower * 100.0;
    m.cvar_upper_95_pct = t95.upper * 100.0;
    m.cvar_lower_99_pct = t99.lower * 100.0;
    m.cvar_upper_99_pct = t99.upper * 100.0;

    double mean = 0.0;
    for (double r : net) mean += r;
    mean /= static_cast<double>(n);
    m.mean = mean;
    std::vector<double> sorted(net);
    std::sort(sorted.begin(), sorted.end());
    m.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0, semi = 0.0;
    for (double r : net) {
        const double d = r - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        if (d < 0.0) semi += d * d;
    }
    const double nn = static_cast<double>(n);
    m.stddev = std::sqrt(m2 / (nn - 1.0));
    const double v = m2 / nn;
    if (v > 0.0) {
        m.skewness = (m3 / nn) / std::pow(v, 1.5);
        m.ex_kurtosis = (m4 / nn) / (v * v) - 3.0;
    }
    m.semi_deviation = std::sqrt(semi / (nn - 1.0));

    const RrRatios rr = rr_ratios(net, 0.95);
    m.ir = rr.ir * 100.0;
    m.sortino = rr.sortino * 100.0;
    m.starr = rr.starr * 100.0;
    m.rachev = rr.rachev * 100.0;
    m.gini = rr.gini * 100.0;
    m.ratios_defined[0] = rr.ir_defined;
    m.ratios_defined[1] = rr.sortino_defined;
    m.ratios_defined[2] = rr.starr_defined;
    m.ratios_defined[3] = rr.rachev_defined;
    m.ratios_defined[4] = rr.gini_defined;
    return m;
}

std::string metrics_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::ostringstream os;
    os.precision(10);
    os << "strategy,tot_ret_pct,ann_ret_pct,avg_turnover_pct,cvar_l_95_pct,cvar_u_95_pct,"
          "md_pct,mean,median,std,skew,ex_kurt,semi_dev,ir,sortino,starr,rachev,gini,"
          "cvar_l_99_pct,cvar_u_99_pct\n";
    for (const auto& [label, m] : rows) {
        os << label << ',' << m.total_return_pct << ',' << m.annualized_return_pct << ','
           << m.avg_turnover_pct << ',' << m.cvar_lower_95_pct << ',' << m.cvar_upper_95_pct << ','
           << m.max_drawdown_pct << ',' << m.mean << ',' << m.median << ',' << m.stddev << ','
           << m.skewness << ',' << m.ex_kurtosis << ',' << m.semi_deviation << ','
           << m.ir << ',' << m.sortino << ',' << m.starr << ',' << m.rachev << ',' << m.gini << ','
           << m.cvar_lower_99_pct << ',' << m.cvar_upper_99_pct << '\n';
    }
    return os.str();
}

std::string value_path_csv(const std::vector<std::pair<std::string, BacktestLedger>>& ledgers) {
    if (ledgers.empty()) return "date\n";
    std::ostringstream os;
    os.precision(17);
    os << "date";
    for (const auto& [label, ledger] : ledgers) os << ',' << label;
    os << '\n';
    const std::size_t n = ledgers.front().second.rows.size();
    for (const auto& [label, ledger] : ledgers) {
        if (ledger.rows.size() != n) throw MisalignedSeries("value_path_csv: ledger lengths differ");
    }
    for (std::size_t i = 0; i < n; ++i) {
        os << ledgers.front().second.rows[i].date;
        for (const auto& [label, ledger] : ledgers) os << ',' << ledger.rows[i].value;
        os << '\n';
    }
    return os.str();
}

std::string ledger_csv(const BacktestLedger& ledger, const std::vector<std::string>& tickers) {
    std::ostringstream os;
    os.precision(17);
    os << "date,gross,cost,net,value,turnover";
    for (const auto& t : tickers) os << ",w_" << t;
    os << '\n';
    for (const auto& r : ledger.rows) {
        os << r.date << ',' << r.gross << ',' << r.cost << ',' << r.net << ',' << r.value << ','
           << r.turnover;
        for (Eigen::Index i = 0; i < r.weights_after.size(); ++i) os << ',' << r.weights_after[i];
        os << '\n';
    }
    return os.str();
}

std::string diagnostics_csv(const std::vector<FactorDiagRow>& rows) {
    std::ostringstream os;
    os.precision(10);
    os << "date,ticker,model,adj_r2,mae,bic,pvalue_flags\n";
    for (const auto& r : rows) {
        os << r.date << ',' << r.ticker << ',' << r.model << ',' << r.adj_r2 << ',' << r.mae << ','
           << r.bic << ',' << r.pvalue_flags << '\n';
    }
    return os.str();
}

std::string pca_csv(const PcaDynamics& dyn, const std::vector<std::string>& anchor_dates) {
    if (anchor_dates.size() != dyn.returns_share.size()) {
        throw MisalignedSeries("pca_csv: date axis does not match the share series");
    }
    std::ostringstream os;
    os.precision(10);
    os << "date,returns_share,innovations_share,residuals_share,k_fixed\n";
    for (std::size_t i = 0; i < anchor_dates.size(); ++i) {
        os << anchor_dates[i] << ',' << dyn.returns_share[i] << ',' << dyn.innovations_share[i]
           << ',' << dyn.residuals_share[i] << ',' << dyn.k_fixed << '\n';
    }
    return os.str();
}

BacktestLedger ledger_from_csv(const std::string& path) {
    const data::CsvTable t = data::read_csv(path, true);
    const std::vector<std::string> want = {"gross", "cost", "net", "value", "turnover"};
    for (std::size_t j = 0; j < want.size(); ++j) {
        if (j >= t.columns.size() || t.columns[j] != want[j]) {
            throw ParseError(path + ": not a ledger CSV (expected column `" + want[j] + "`)");
        }
    }
    BacktestLedger ledger;
    const Eigen::Index nw = t.values.cols() - 5;
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
        LedgerRow r;
        r.date = t.row_labels[static_cast<std::size_t>(i)];
        r.gross = t.values(i, 0);
        r.cost = t.values(i, 1);
        r.net = t.values(i, 2);
        r.value = t.values(i, 3);
        r.turnover = t.values(i, 4);
        r.weights_after = t.values.row(i).segment(5, nw).transpose();
        r.weights_before = ledger.rows.empty()
                               ? Eigen::VectorXd::Zero(nw).eval()
                               : ledger.rows.back().weights_after;
        ledger.rows.push_back(std::move(r));
    }
    if (ledger.rows.empty()) throw ParseError(path + ": empty ledger");
    // initial value from the accounting identity value = v0*(1+gross) - cost
    const auto& r0 = ledger.rows.front();
    ledger.initial_value = (r0.value + r0.cost) / (1.0 + r0.gross);
    return ledger;
}

}  // namespace fcvar::backtest
