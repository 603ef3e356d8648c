// Timing harness comparing the serial reference path (threads = 1) with the
// OpenMP path (threads = hardware) for the data-parallel kernels. Outputs are
// bit-identical by construction; this only measures speed.

#include <chrono>
#include <cstdio>
#include <functional>

#include "../../tests/testutil/synthetic.hpp"
#include "fcvar/core/parallel.hpp"
#include "fcvar/cvaropt/portfolio.hpp"
#include "fcvar/factors/gam.hpp"
#include "fcvar/nig/em.hpp"
#include "fcvar/nig/nig_distribution.hpp"
#include "fcvar/ts/arma_garch.hpp"

using namespace fcvar;

namespace {

double time_once(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench(const char* name, const std::function<void()>& fn) {
    core::set_max_threads(1);
    fn();  // warm caches
    const double serial = time_once(fn);
    core::set_max_threads(0);
    const double parallel = time_once(fn);
    core::set_max_threads(0);
    std::printf("%-34s serial %8.3fs   omp(%d) %8.3fs   speedup %.2fx\n", name, serial,
                core::effective_threads(), parallel, serial / parallel);
    std::fflush(stdout);
}

}  // namespace

int main() {
    std::printf("fcvar kernel benchmarks (serial reference vs OpenMP)\n");

    const auto series = testutil::simulate_ar_garch(765, 1e-4, 0.3, 1e-5, 0.8, 0.1, 42);
    bench("bic selection, 81 specs, T=765", [&] { ts::select_model_bic(series); });

    nig::NigParams p;
    p.alpha_bar = 1.5;
    p.mu = Eigen::VectorXd::Zero(29);
    p.gamma = Eigen::VectorXd::Constant(29, 0.05);
    p.sigma = Eigen::MatrixXd::Identity(29, 29);
    for (int i = 0; i < 28; ++i) p.sigma(i, i + 1) = p.sigma(i + 1, i) = 0.2;
    bench("nig sampling, S=200000, I=29", [&] { nig::sample_nig(p, 200000, 7); });

    const Eigen::MatrixXd panel = nig::sample_nig(p, 765, 11);
    bench("nig em e-step+loglik, n=765, I=29", [&] {
        nig::gig_conditional_moments(panel, p);
        nig::nig_log_density_batch(panel, p);
    });

    const auto F = testutil::uniform_matrix(765, 8, 3);
    Eigen::VectorXd h(765);
    for (int i = 0; i < 765; ++i) h[i] = std::sin(6.0 * F(i, 0)) + 0.3 * F(i, 3);
    bench("gam gcv sweep, n=765, K=8, q=10", [&] { factors::fit_gam(h, F); });

    cvaropt::ScenarioMatrix sc;
    sc.returns = testutil::gaussian_matrix(4000, 20, 5) * 0.02;
    cvaropt::OptConfig cfg;
    cfg.alpha = 0.5;
    cfg.prev_weights.reset();
    bench("cvar lp solve, S=4000, I=20", [&] { cvaropt::optimize_portfolio(sc, cfg); });
    return 0;
}
