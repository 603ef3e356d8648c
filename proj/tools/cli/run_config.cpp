#include "run_config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fcvar/core/errors.hpp"

namespace fcvar::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_int(const std::string& s, long long& out) {
    try {
        std::size_t pos = 0;
        out = std::stoll(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

std::vector<double> parse_double_list(const std::string& s, bool& ok) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    ok = true;
    while (std::getline(ss, cell, ',')) {
        double v;
        if (!parse_double(trim(cell), v)) {
            ok = false;
            return out;
        }
        out.push_back(v);
    }
    if (out.empty()) ok = false;
    return out;
}

}  // namespace

void apply_config_file(const std::string& path, RunConfig& cfg,
                       std::vector<std::string>& errors) {
    std::ifstream in(path);
    if (!in) {
        errors.push_back("config: cannot open `" + path + "`");
        return;
    }
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            if (section != "data" && section != "backtest" && section != "output") {
                errors.push_back("config:" + std::to_string(lineno) + ": unknown section [" +
                                 section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("config:" + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto bad_value = [&]() {
            errors.push_back("config:" + std::to_string(lineno) + ": bad value for `" + key +
                             "`: `" + value + "`");
        };
        long long ll = 0;
        double d = 0.0;
        if (section == "data") {
            if (key == "prices") cfg.prices_path = value;
            else if (key == "factors_dir") cfg.factors_dir = value;
            else if (key == "universe") cfg.universe_path = value;
            else errors.push_back("config:" + std::to_string(lineno) + ": unknown key `" + key + "`");
        } else if (section == "backtest") {
            if (key == "window") {
                if (parse_int(value, ll) && ll > 0) cfg.bt.window = static_cast<int>(ll);
                else bad_value();
            } else if (key == "scenarios") {
                if (parse_int(value, ll) && ll > 0) cfg.bt.scenarios = static_cast<int>(ll);
                else bad_value();
            } else if (key == "beta") {
                if (parse_double(value, d)) cfg.bt.beta = d;
                else bad_value();
            } else if (key == "alphas") {
                bool ok = false;
                auto v = parse_double_list(value, ok);
                if (ok) cfg.bt.alphas = v;
                else bad_value();
            } else if (key == "cost_rate") {
                if (parse_double(value, d)) cfg.bt.cost_rate = d;
                else bad_value();
            } else if (key == "turnover_cap") {
                if (value == "none") cfg.bt.turnover_cap.reset();
                else if (parse_double(value, d)) cfg.bt.turnover_cap = d;
                else bad_value();
            } else if (key == "factor_model") {
                try {
                    cfg.bt.factor_model = factors::factor_model_from_string(value);
                } catch (const Error&) {
                    bad_value();
                }
            } else if (key == "seed") {
                if (parse_int(value, ll) && ll >= 0) {
                    cfg.bt.seed = static_cast<std::uint64_t>(ll);
                    cfg.seed_set = true;
                } else {
                    bad_value();
                }
            } else {
                errors.push_back("config:" + std::to_string(lineno) + ": unknown key `" + key + "`");
            }
        } else if (section == "output") {
            if (key == "out_dir") cfg.out_dir = value;
            else if (key == "log_level") cfg.log_level = value;
            else errors.push_back("config:" + std::to_string(lineno) + ": unknown key `" + key + "`");
        } else {
            errors.push_back("config:" + std::to_string(lineno) + ": key outside a section");
        }
    }
}

void validate(const RunConfig& cfg, const std::string& subcommand,
              std::vector<std::string>& errors) {
    const bool needs_data = subcommand == "fit" || subcommand == "simulate" ||
                            subcommand == "backtest";
    if (needs_data) {
        if (cfg.prices_path.empty()) {
            errors.push_back("prices: path is required");
        } else if (!std::filesystem::exists(cfg.prices_path)) {
            errors.push_back("prices: `" + cfg.prices_path + "` does not exist");
        }
        if (!cfg.universe_path.empty() && !std::filesystem::exists(cfg.universe_path)) {
            errors.push_back("universe: `" + cfg.universe_path + "` does not exist");
        }
        const bool wants_factors =
            cfg.bt.factor_model != factors::FactorModelKind::none &&
            subcommand != "fit";
        if (wants_factors) {
            if (cfg.factors_dir.empty()) {
                errors.push_back("factors_dir: required when factor_model != none");
            } else if (!std::filesystem::exists(cfg.factors_dir)) {
                errors.push_back("factors_dir: `" + cfg.factors_dir + "` does not exist");
            }
            if (cfg.universe_path.empty()) {
                errors.push_back("universe: required when factor_model != none");
            }
        }
    }
    if ((subcommand == "simulate" || subcommand == "backtest") && !cfg.seed_set) {
        errors.push_back("seed: --seed is mandatory for " + subcommand);
    }
    if (!(cfg.bt.beta > 0.0 && cfg.bt.beta < 1.0)) errors.push_back("beta: must be in (0,1)");
    if (cfg.bt.window < 10) errors.push_back("window: must be at least 10");
    if (cfg.bt.scenarios < 1) errors.push_back("scenarios: must be positive");
    if (cfg.bt.alphas.empty()) errors.push_back("alphas: at least one value");
    for (double a : cfg.bt.alphas) {
        if (!(a >= 0.0 && a <= 1.0)) errors.push_back("alphas: values must lie in [0,1]");
    }
    if (cfg.bt.cost_rate < 0.0) errors.push_back("cost_rate: must be >= 0");
    if (cfg.bt.turnover_cap && !(*cfg.bt.turnover_cap > 0.0)) {
        errors.push_back("turnover_cap: must be positive (or `none`)");
    }
    if (cfg.log_level != "quiet" && cfg.log_level != "info" && cfg.log_level != "debug") {
        errors.push_back("log_level: expected quiet|info|debug");
    }
}

std::string to_config_text(const RunConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "[data]\n";
    os << "prices = " << cfg.prices_path << '\n';
    if (!cfg.factors_dir.empty()) os << "factors_dir = " << cfg.factors_dir << '\n';
    if (!cfg.universe_path.empty()) os << "universe = " << cfg.universe_path << '\n';
    os << "\n[backtest]\n";
    os << "window = " << cfg.bt.window << '\n';
    os << "scenarios = " << cfg.bt.scenarios << '\n';
    os << "beta = " << cfg.bt.beta << '\n';
    os << "alphas = ";
    for (std::size_t i = 0; i < cfg.bt.alphas.size(); ++i) {
        os << (i ? "," : "") << cfg.bt.alphas[i];
    }
    os << '\n';
    os << "cost_rate = " << cfg.bt.cost_rate << '\n';
    if (cfg.bt.turnover_cap) os << "turnover_cap = " << *cfg.bt.turnover_cap << '\n';
    else os << "turnover_cap = none\n";
    os << "factor_model = " << factors::to_string(cfg.bt.factor_model) << '\n';
    if (cfg.seed_set) os << "seed = " << cfg.bt.seed << '\n';
    os << "\n[output]\n";
    os << "out_dir = " << cfg.out_dir << '\n';
    os << "log_level = " << cfg.log_level << '\n';
    return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) {
        std::filesystem::create_directories(target.parent_path());
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write `" + tmp + "`");
        out << content;
        out.flush();
        if (!out) throw Error("short write to `" + tmp + "`");
    }
    std::filesystem::rename(tmp, path);
}

void log_info(const RunConfig& cfg, const std::string& msg) {
    if (cfg.log_level != "quiet") std::cerr << "[fcvar] " << msg << '\n';
}

void log_debug(const RunConfig& cfg, const std::string& msg) {
    if (cfg.log_level == "debug") std::cerr << "[fcvar] " << msg << '\n';
}

}  // namespace fcvar::cli
