// Writes the bundled 3-asset synthetic fixture: prices, per-asset factor
// files, universe manifest, and a ready-to-run config. Deterministic.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fcvar/core/rng.hpp"

using fcvar::core::Rng;

namespace {

std::string iso_date(int serial) {
    // synthetic weekday-free calendar: sequential days from 2018-01-01
    const int base_y = 2018;
    static const int mdays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int y = base_y, m = 0, d = serial;
    while (true) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        const int dm = mdays[m] + (m == 1 && leap ? 1 : 0);
        if (d < dm) break;
        d -= dm;
        if (++m == 12) {
            m = 0;
            ++y;
        }
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y % 10000, (m + 1) % 100, (d + 1) % 100);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string out_dir = argc > 1 ? argv[1] : "data/fixture";
    const int n = 260;  // window 150 + lag 1 + ~100 out-of-sample days
    const int I = 3;
    std::filesystem::create_directories(out_dir);
    std::filesystem::create_directories(out_dir + "/factors");

    Rng rng(20240517);
    std::vector<std::vector<double>> prices(I, std::vector<double>(n + 1, 100.0));
    std::vector<std::vector<std::array<double, 2>>> factors(
        I, std::vector<std::array<double, 2>>(n + 1));

    const double ar[I] = {0.2, 0.0, 0.35};
    const double drift[I] = {4e-4, 1e-4, 0.0};
    for (int i = 0; i < I; ++i) {
        double latent = 0.0, s_prev = 2e-6 / 0.15, e_prev = 0.0, r_prev = 0.0;
        double f_lag = 0.5;
        for (int t = 0; t <= n; ++t) {
            latent = 0.9 * latent + 0.3 * rng.normal();
            const double f0 = 1.0 / (1.0 + std::exp(-latent));
            const double f1 = rng.uniform();
            factors[i][t] = {f0, f1};
            if (t > 0) {
                const double h = 0.45 * std::sin(2.0 * M_PI * f_lag) + 0.9 * rng.normal();
                const double s = 2e-6 + 0.75 * s_prev + 0.1 * e_prev * e_prev;
                const double e = std::sqrt(s) * h;
                const double r = drift[i] + ar[i] * r_prev + e;
                prices[i][t] = prices[i][t - 1] * std::exp(r);
                s_prev = s;
                e_prev = e;
                r_prev = r;
            }
            f_lag = f0;
        }
    }

    {
        std::ofstream out(out_dir + "/prices.csv");
        out << "date,SYN0,SYN1,SYN2\n";
        out.precision(10);
        for (int t = 0; t <= n; ++t) {
            out << iso_date(t);
            for (int i = 0; i < I; ++i) out << ',' << prices[i][t];
            out << '\n';
        }
    }
    for (int i = 0; i < I; ++i) {
        std::ofstream out(out_dir + "/factors/SYN" + std::to_string(i) + ".csv");
        out << "date,mom,noise\n";
        out.precision(10);
        // factor rows are aligned with return dates (prices row t>=1)
        for (int t = 1; t <= n; ++t) {
            out << iso_date(t) << ',' << factors[i][t][0] << ',' << factors[i][t][1] << '\n';
        }
    }
    {
        std::ofstream out(out_dir + "/universe.txt");
        out << "tickers = SYN0,SYN1,SYN2\n";
        out << "factors = mom,noise\n";
        out << "category.mom = momentum\n";
        out << "category.noise = technical\n";
    }
    {
        std::ofstream out(out_dir + "/fixture.conf");
        out << "[data]\n";
        out << "prices = " << out_dir << "/prices.csv\n";
        out << "factors_dir = " << out_dir << "/factors\n";
        out << "universe = " << out_dir << "/universe.txt\n\n";
        out << "[backtest]\n";
        out << "window = 150\n";
        out << "scenarios = 400\n";
        out << "beta = 0.99\n";
        out << "alphas = 0.5\n";
        out << "cost_rate = 0.0002\n";
        out << "turnover_cap = 0.05\n";
        out << "factor_model = gam\n";
        out << "seed = 42\n\n";
        out << "[output]\n";
        out << "out_dir = out\n";
        out << "log_level = info\n";
    }
    std::cout << "fixture written to " << out_dir << "\n";
    return 0;
}

