#pragma once

#include <map>
#include <string>
#include <vector>

#include "fcvar/data/panels.hpp"

namespace fcvar::data {

/// Universe manifest: key-value text file with `tickers`, `factors` and
/// optional `category.<factor>` lines (momentum | fundamental | technical).
struct UniverseManifest {
    std::vector<std::string> tickers;
    std::vector<std::string> factor_names;
    std::map<std::string, std::string> categories;
};

UniverseManifest load_universe(const std::string& path);

/// Price CSV: header `date,<ticker1>,...`; ISO-8601 dates; one row per trading
/// day. Rows with any missing/unparsable cell are dropped. Ticker order
/// follows `tickers` when non-empty (a subset selection), else the header.
PricePanel load_price_csv(const std::string& path,
                          const std::vector<std::string>& tickers = {});

/// Factor CSV for one asset: header `date,<factor1>,...,<factorK>`. Rows with
/// missing cells are dropped. Column order follows `factor_names` when
/// non-empty, else the header.
FactorPanel load_factor_csv(const std::string& path, const std::string& ticker,
                            const std::vector<std::string>& factor_names = {});

/// Intersects dates across the return panel and every factor panel so all
/// share one date axis (rows missing anywhere are dropped everywhere).
void align_dates(ReturnPanel& returns, std::vector<FactorPanel>& factors);

/// Generic numeric table with a leading date column, used for scenario files
/// and ledgers on the CLI surface.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::string> row_labels;  // empty when the table has no label column
    Eigen::MatrixXd values;
};

CsvTable read_csv(const std::string& path, bool first_col_is_label);
std::string format_csv(const CsvTable& table, const std::string& label_header);

}  // namespace fcvar::data
