#include "fcvar/data/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "fcvar/core/errors.hpp"

namespace fcvar::data {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == sep) out.push_back("");
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e && std::isfinite(out);
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::string> dates;
    std::vector<std::vector<double>> rows;
};

// Reads `date,<col>...`; drops rows with missing/bad cells.
RawTable read_dated_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    RawTable t;
    t.header = split(line, ',');
    if (t.header.size() < 2 || t.header[0] != "date") {
        throw ParseError(path + ": header must be `date,<name>,...`");
    }
    const std::size_t ncols = t.header.size() - 1;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != t.header.size()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(t.header.size()) + " cells");
        }
        std::vector<double> row(ncols);
        bool ok = true;
        for (std::size_t j = 0; j < ncols; ++j) {
            if (!parse_double(cells[j + 1], row[j])) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;  // incomplete rows are dropped before windowing
        if (!t.dates.empty() && cells[0] <= t.dates.back()) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": dates must be strictly increasing");
        }
        t.dates.push_back(cells[0]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<Eigen::Index> column_selection(const std::vector<std::string>& header,
                                           const std::vector<std::string>& wanted,
                                           const std::string& path) {
    std::vector<Eigen::Index> sel;
    if (wanted.empty()) {
        for (std::size_t j = 1; j < header.size(); ++j) sel.push_back(static_cast<Eigen::Index>(j - 1));
        return sel;
    }
    for (const auto& name : wanted) {
        auto it = std::find(header.begin() + 1, header.end(), name);
        if (it == header.end()) throw ParseError(path + ": column `" + name + "` not found");
        sel.push_back(static_cast<Eigen::Index>(it - header.begin() - 1));
    }
    return sel;
}

Eigen::MatrixXd to_matrix(const RawTable& t, const std::vector<Eigen::Index>& sel) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(sel.size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        for (std::size_t j = 0; j < sel.size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.rows[i][sel[j]];
        }
    }
    return m;
}

}  // namespace

UniverseManifest load_universe(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    UniverseManifest m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "tickers") {
            m.tickers = split(value, ',');
        } else if (key == "factors") {
            m.factor_names = split(value, ',');
        } else if (key.rfind("category.", 0) == 0) {
            m.categories[key.substr(9)] = value;
        } else {
            throw ParseError(path + ":" + std::to_string(lineno) + ": unknown key `" + key + "`");
        }
    }
    if (m.tickers.empty()) throw ParseError(path + ": manifest must list tickers");
    return m;
}

PricePanel load_price_csv(const std::string& path, const std::vector<std::string>& tickers) {
    const RawTable t = read_dated_table(path);
    const auto sel = column_selection(t.header, tickers, path);
    PricePanel p;
    p.dates = t.dates;
    p.tickers = tickers.empty()
                    ? std::vector<std::string>(t.header.begin() + 1, t.header.end())
                    : tickers;
    p.prices = to_matrix(t, sel);
    if ((p.prices.array() <= 0.0).any()) {
        throw NonPositivePrice(path + ": prices must be strictly positive");
    }
    return p;
}

FactorPanel load_factor_csv(const std::string& path, const std::string& ticker,
                            const std::vector<std::string>& factor_names) {
    const RawTable t = read_dated_table(path);
    const auto sel = column_selection(t.header, factor_names, path);
    FactorPanel f;
    f.ticker = ticker;
    f.dates = t.dates;
    f.factor_names = factor_names.empty()
                         ? std::vector<std::string>(t.header.begin() + 1, t.header.end())
                         : factor_names;
    f.values = to_matrix(t, sel);
    return f;
}

void align_dates(ReturnPanel& returns, std::vector<FactorPanel>& factors) {
    std::set<std::string> common(returns.dates.begin(), returns.dates.end());
    for (const auto& f : factors) {
        std::set<std::string> here(f.dates.begin(), f.dates.end());
        std::set<std::string> merged;
        std::set_intersection(common.begin(), common.end(), here.begin(), here.end(),
                              std::inserter(merged, merged.begin()));
        common.swap(merged);
    }
    if (common.size() < 2) throw InsufficientRows("align_dates: fewer than 2 common dates");

    auto filter_rows = [&](const std::vector<std::string>& dates, const Eigen::MatrixXd& m)
        -> std::pair<Eigen::MatrixXd, std::vector<std::string>> {
        Eigen::MatrixXd out(static_cast<Eigen::Index>(common.size()), m.cols());
        std::vector<std::string> kept;
        kept.reserve(common.size());
        Eigen::Index r = 0;
        for (std::size_t i = 0; i < dates.size(); ++i) {
            if (common.count(dates[i])) {
                out.row(r++) = m.row(static_cast<Eigen::Index>(i));
                kept.push_back(dates[i]);
            }
        }
        return {std::move(out), std::move(kept)};
    };

    auto [r_vals, r_dates] = filter_rows(returns.dates, returns.returns);
    returns.returns = std::move(r_vals);
    returns.dates = std::move(r_dates);
    for (auto& f : factors) {
        auto [vals, dates] = filter_rows(f.dates, f.values);
        f.values = std::move(vals);
        f.dates = std::move(dates);
    }
}

CsvTable read_csv(const std::string& path, bool first_col_is_label) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    CsvTable t;
    auto header = split(line, ',');
    const std::size_t skip = first_col_is_label ? 1 : 0;
    if (header.size() <= skip) throw ParseError(path + ": no data columns");
    t.columns.assign(header.begin() + skip, header.end());
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != header.size()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " cells");
        }
        if (first_col_is_label) t.row_labels.push_back(cells[0]);
        std::vector<double> row(t.columns.size());
        for (std::size_t j = 0; j < t.columns.size(); ++j) {
            if (!parse_double(cells[j + skip], row[j])) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad number `" +
                                 cells[j + skip] + "`");
            }
        }
        rows.push_back(std::move(row));
    }
    t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.columns.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < t.columns.size(); ++j) {
            t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return t;
}

std::string format_csv(const CsvTable& table, const std::string& label_header) {
    std::ostringstream os;
    os.precision(17);
    const bool labeled = !table.row_labels.empty();
    if (labeled) os << label_header;
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        if (labeled || j > 0) os << ',';
        os << table.columns[j];
    }
    os << '\n';
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        if (labeled) os << table.row_labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
            if (labeled || j > 0) os << ',';
            os << table.values(i, j);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace fcvar::data
