#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "../../tools/cli/run_config.hpp"

using namespace fcvar;

namespace {

std::string write_temp(const std::string& content) {
    const std::string path = "test_cli_cfg_tmp.conf";
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("config file: values land, unknown keys are all reported") {
    const auto path = write_temp(
        "[data]\n"
        "prices = p.csv\n"
        "[backtest]\n"
        "window = 200\n"
        "beta = 0.97\n"
        "alphas = 0.1,0.9\n"
        "factor_model = rlr\n"
        "bogus_key = 1\n"
        "[output]\n"
        "out_dir = results\n"
        "other_bogus = 2\n");
    cli::RunConfig cfg;
    std::vector<std::string> errors;
    cli::apply_config_file(path, cfg, errors);
    CHECK(cfg.prices_path == "p.csv");
    CHECK(cfg.bt.window == 200);
    CHECK(cfg.bt.beta == doctest::Approx(0.97));
    CHECK(cfg.bt.alphas == std::vector<double>{0.1, 0.9});
    CHECK(cfg.bt.factor_model == factors::FactorModelKind::rlr);
    CHECK(cfg.out_dir == "results");
    REQUIRE(errors.size() == 2);  // both bogus keys, not just the first
    CHECK(errors[0].find("bogus_key") != std::string::npos);
    CHECK(errors[1].find("other_bogus") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("validation: collects every problem and names the field") {
    cli::RunConfig cfg;
    cfg.bt.beta = 1.5;
    cfg.bt.alphas = {2.0};
    std::vector<std::string> errors;
    cli::validate(cfg, "backtest", errors);
    bool saw_prices = false, saw_seed = false, saw_beta = false, saw_alpha = false;
    for (const auto& e : errors) {
        saw_prices = saw_prices || e.find("prices") != std::string::npos;
        saw_seed = saw_seed || e.find("seed") != std::string::npos;
        saw_beta = saw_beta || e.find("beta") != std::string::npos;
        saw_alpha = saw_alpha || e.find("alphas") != std::string::npos;
    }
    CHECK(saw_prices);
    CHECK(saw_seed);
    CHECK(saw_beta);
    CHECK(saw_alpha);
}

TEST_CASE("config round trip is idempotent") {
    cli::RunConfig cfg;
    cfg.prices_path = "a/prices.csv";
    cfg.factors_dir = "a/factors";
    cfg.universe_path = "a/universe.txt";
    cfg.bt.window = 321;
    cfg.bt.scenarios = 1234;
    cfg.bt.beta = 0.975;
    cfg.bt.alphas = {0.0, 0.25, 1.0};
    cfg.bt.cost_rate = 3e-4;
    cfg.bt.turnover_cap = 0.07;
    cfg.bt.factor_model = factors::FactorModelKind::gam;
    cfg.bt.seed = 99;
    cfg.seed_set = true;
    cfg.out_dir = "results";
    cfg.log_level = "debug";

    const auto text = cli::to_config_text(cfg);
    const auto path = write_temp(text);
    cli::RunConfig parsed;
    std::vector<std::string> errors;
    cli::apply_config_file(path, parsed, errors);
    CHECK(errors.empty());
    CHECK(cli::to_config_text(parsed) == text);
    std::filesystem::remove(path);
}
