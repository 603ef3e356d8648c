#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fcvar::data {

/// Dated close-price matrix (rows = trading days, cols = assets).
/// Optional high/low matrices of the same shape feed the ATR indicator.
/// Dates are ISO-8601 strings, strictly increasing; prices strictly positive.
/// Immutable after construction.
struct PricePanel {
    std::vector<std::string> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd prices;
    std::optional<Eigen::MatrixXd> highs;
    std::optional<Eigen::MatrixXd> lows;

    Eigen::Index rows() const { return prices.rows(); }
    Eigen::Index assets() const { return prices.cols(); }
};

/// Dated log-return matrix; one fewer row than the price panel it came from.
struct ReturnPanel {
    std::vector<std::string> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd returns;

    Eigen::Index rows() const { return returns.rows(); }
    Eigen::Index assets() const { return returns.cols(); }
};

/// Per-asset factor matrix (rows = dates aligned with the owning ReturnPanel,
/// cols = named factors). `bounds` holds the (min, max) used at normalization
/// time; empty means raw, un-normalized values.
struct FactorPanel {
    std::string ticker;
    std::vector<std::string> dates;
    std::vector<std::string> factor_names;
    Eigen::MatrixXd values;
    std::vector<std::pair<double, double>> bounds;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index factors() const { return values.cols(); }
    bool normalized() const { return !bounds.empty(); }
};

/// Training slices for one anchor date. The return slice holds the T_w rows
/// [anchor-T_w, anchor-1]. Factor slices are lag-aligned: row j pairs with
/// return row j and is the factor observation one day earlier, i.e. rows
/// [anchor-T_w-1, anchor-2]. Neither slice touches the anchor row.
struct RollingWindow {
    int anchor = 0;
    int length = 0;
    Eigen::MatrixXd returns;                   // T_w x I
    std::vector<Eigen::MatrixXd> factors;      // per asset, T_w x K (may be empty)
};

}  // namespace fcvar::data
