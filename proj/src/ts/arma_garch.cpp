#include "fcvar/ts/arma_garch.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <tuple>

#include "fcvar/core/errors.hpp"
#include "fcvar/core/nelder_mead.hpp"
#include "fcvar/core/parallel.hpp"
#include "fcvar/core/rng.hpp"

namespace fcvar::ts {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kBig = std::numeric_limits<double>::max();

struct NaturalParams {
    double c1 = 0.0;
    std::array<double, 2> ar{0.0, 0.0};
    std::array<double, 2> ma{0.0, 0.0};
    double c2 = 0.0;
    std::array<double, 2> garch{0.0, 0.0};
    std::array<double, 2> arch{0.0, 0.0};
};

double clamp_pacf(double r) { return std::max(-0.995, std::min(0.995, r)); }

double logit(double a) { return std::log(a / (1.0 - a)); }
double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Partial-autocorrelation map onto the stationary AR region (orders <= 2).
void pacf_to_ar(const double* v, int order, double* out) {
    if (order == 1) {
        out[0] = std::tanh(v[0]);
    } else if (order == 2) {
        const double r1 = std::tanh(v[0]);
        const double r2 = std::tanh(v[1]);
        out[0] = r1 * (1.0 - r2);
        out[1] = r2;
    }
}

void ar_to_pacf(const double* a, int order, double* v) {
    if (order == 1) {
        v[0] = std::atanh(clamp_pacf(a[0]));
    } else if (order == 2) {
        const double r2 = clamp_pacf(a[1]);
        const double r1 = clamp_pacf(a[0] / (1.0 - r2));
        v[0] = std::atanh(r1);
        v[1] = std::atanh(r2);
    }
}

/// Unconstrained parameter vector layout:
///   [c1/sd, ar pacf (p), ma pacf (q), log c2, stick-breaking (P+Q)]
/// The stick-breaking block maps R^(P+Q) onto the open simplex
/// {x >= 0, sum x < 1}, which is the covariance-stationarity region.
struct Codec {
    ArmaGarchSpec spec;
    double sd = 1.0;

    int dim() const { return spec.param_count(); }

    NaturalParams decode(const std::vector<double>& raw) const {
        NaturalParams n;
        int k = 0;
        n.c1 = raw[k++] * sd;
        if (spec.p > 0) {
            pacf_to_ar(&raw[k], spec.p, n.ar.data());
            k += spec.p;
        }
        if (spec.q > 0) {
            std::array<double, 2> tmp{0.0, 0.0};
            pacf_to_ar(&raw[k], spec.q, tmp.data());
            n.ma[0] = -tmp[0];
            n.ma[1] = -tmp[1];
            k += spec.q;
        }
        n.c2 = std::exp(raw[k++]);
        double rem = 1.0;
        for (int j = 0; j < spec.P; ++j) {
            const double x = sigmoid(raw[k++]) * rem;
            n.garch[j] = x;
            rem -= x;
        }
        for (int j = 0; j < spec.Q; ++j) {
            const double x = sigmoid(raw[k++]) * rem;
            n.arch[j] = x;
            rem -= x;
        }
        return n;
    }

    std::vector<double> encode(const NaturalParams& n) const {
        std::vector<double> raw(dim());
        int k = 0;
        raw[k++] = n.c1 / sd;
        if (spec.p > 0) {
            ar_to_pacf(n.ar.data(), spec.p, &raw[k]);
            k += spec.p;
        }
        if (spec.q > 0) {
            std::array<double, 2> tmp{-n.ma[0], -n.ma[1]};
            ar_to_pacf(tmp.data(), spec.q, &raw[k]);
            k += spec.q;
        }
        raw[k++] = std::log(std::max(n.c2, 1e-300));
        double rem = 1.0;
        auto push = [&](double x) {
            const double a = std::min(1.0 - 1e-8, std::max(1e-8, x / rem));
            raw[k++] = logit(a);
            rem -= a * rem;
        };
        for (int j = 0; j < spec.P; ++j) push(n.garch[j]);
        for (int j = 0; j < spec.Q; ++j) push(n.arch[j]);
        return raw;
    }
};

/// Filter recursion shared by the likelihood, the residual extraction and the
/// refit path. Returns the Gaussian log-likelihood; optionally stores the
/// sigma2/eps series.
double filter_loglik(const Eigen::VectorXd& r, const ArmaGarchSpec& spec, const NaturalParams& par,
                     double pre_mean, double pre_var, Eigen::VectorXd* sigma2_out,
                     Eigen::VectorXd* eps_out) {
    const int T = static_cast<int>(r.size());
    double e1 = 0.0, e2 = 0.0;        // eps_{t-1}, eps_{t-2}
    double s1 = pre_var, s2 = pre_var;  // sigma2_{t-1}, sigma2_{t-2}
    double ll = 0.0;
    for (int t = 0; t < T; ++t) {
        const double r1 = t >= 1 ? r[t - 1] : pre_mean;
        const double r2 = t >= 2 ? r[t - 2] : pre_mean;
        double mean = par.c1;
        if (spec.p > 0) mean += par.ar[0] * r1;
        if (spec.p > 1) mean += par.ar[1] * r2;
        if (spec.q > 0) mean += par.ma[0] * e1;
        if (spec.q > 1) mean += par.ma[1] * e2;
        const double e = r[t] - mean;

        double s = par.c2;
        if (spec.P > 0) s += par.garch[0] * s1;
        if (spec.P > 1) s += par.garch[1] * s2;
        if (spec.Q > 0) s += par.arch[0] * e1 * e1;
        if (spec.Q > 1) s += par.arch[1] * e2 * e2;

        ll -= 0.5 * (kLog2Pi + std::log(s) + e * e / s);

        if (sigma2_out) (*sigma2_out)[t] = s;
        if (eps_out) (*eps_out)[t] = e;
        e2 = e1;
        e1 = e;
        s2 = s1;
        s1 = s;
    }
    return ll;
}

NaturalParams moment_start(const Eigen::VectorXd& r, const ArmaGarchSpec& spec, double mean,
                           double var) {
    NaturalParams n;
    n.ar = {0.0, 0.0};
    n.ma = {0.0, 0.0};
    if (spec.p > 0) {
        // lag-1 autocorrelation
        const int T = static_cast<int>(r.size());
        double num = 0.0, den = 0.0;
        for (int t = 0; t < T; ++t) {
            const double d = r[t] - mean;
            den += d * d;
            if (t > 0) num += d * (r[t - 1] - mean);
        }
        n.ar[0] = den > 0.0 ? std::max(-0.7, std::min(0.7, num / den)) : 0.0;
        if (spec.p > 1) n.ar[1] = 0.05;
    }
    if (spec.q > 0) n.ma[0] = 0.05;
    if (spec.q > 1) n.ma[1] = 0.05;
    if (spec.P > 0) n.garch[0] = spec.P > 1 ? 0.6 : 0.7;
    if (spec.P > 1) n.garch[1] = 0.05;
    if (spec.Q > 0) n.arch[0] = spec.Q > 1 ? 0.1 : 0.15;
    if (spec.Q > 1) n.arch[1] = 0.05;
    n.c1 = mean * (1.0 - n.ar[0] - n.ar[1]);
    const double margin = n.garch[0] + n.garch[1] + n.arch[0] + n.arch[1];
    n.c2 = std::max(var * (1.0 - margin), 1e-12 * var + 1e-300);
    return n;
}

ArmaGarchFit finalize_fit(const Eigen::VectorXd& r, const ArmaGarchSpec& spec,
                          const NaturalParams& par, double pre_mean, double pre_var) {
    const int T = static_cast<int>(r.size());
    ArmaGarchFit fit;
    fit.spec = spec;
    fit.c1 = par.c1;
    fit.ar = par.ar;
    fit.ma = par.ma;
    fit.c2 = par.c2;
    fit.garch = par.garch;
    fit.arch = par.arch;
    fit.sigma2.resize(T);
    fit.eps.resize(T);
    fit.loglik = filter_loglik(r, spec, par, pre_mean, pre_var, &fit.sigma2, &fit.eps);
    fit.h = fit.eps.array() / fit.sigma2.array().sqrt();
    fit.n_obs = T;
    fit.bic = bic(fit.loglik, spec.param_count(), T);
    fit.last_returns = {r[T - 1], T >= 2 ? r[T - 2] : pre_mean};
    fit.has_state = true;
    return fit;
}

}  // namespace

double bic(double loglik, int k, int n) {
    return static_cast<double>(k) * std::log(static_cast<double>(n)) - 2.0 * loglik;
}

ArmaGarchFit fit_arma_garch(const Eigen::VectorXd& returns, const ArmaGarchSpec& spec,
                            const FitOptions& opts) {
    if (!spec.valid()) throw InvalidParameter("fit_arma_garch: orders must lie in {0,1,2}");
    const int T = static_cast<int>(returns.size());
    if (T < 4) throw InsufficientRows("fit_arma_garch: series too short");

    const double mean = returns.mean();
    const double var = (returns.array() - mean).square().sum() / static_cast<double>(T - 1);
    if (!(var > 1e-24 * (1.0 + mean * mean))) {
        throw ConstantSeries("fit_arma_garch: constant series");
    }

    Codec codec{spec, std::sqrt(var)};
    const std::vector<double> base = codec.encode(moment_start(returns, spec, mean, var));

    auto objective = [&](const std::vector<double>& raw) {
        const NaturalParams par = codec.decode(raw);
        const double ll = filter_loglik(returns, spec, par, mean, var, nullptr, nullptr);
        return std::isfinite(ll) ? -ll : kBig;
    };

    core::NelderMeadOptions nm;
    nm.tol = opts.nm_tol;
    nm.max_evals = opts.nm_max_evals > 0 ? opts.nm_max_evals : 500 * codec.dim();

    core::Rng jitter(opts.jitter_seed ^ (static_cast<std::uint64_t>(spec.p) << 24 ^
                                         static_cast<std::uint64_t>(spec.q) << 16 ^
                                         static_cast<std::uint64_t>(spec.P) << 8 ^
                                         static_cast<std::uint64_t>(spec.Q)));
    std::vector<double> best_raw;
    double best_f = kBig;
    for (int s = 0; s < std::max(1, opts.restarts); ++s) {
        std::vector<double> x0 = base;
        if (s > 0) {
            for (auto& v : x0) v += 0.3 * jitter.normal();
        }
        std::vector<double> steps(x0.size(), 0.15);
        steps[0] = 0.05;  // scaled mean constant moves on a finer grid
        const auto res = core::nelder_mead(objective, x0, steps, nm);
        if (res.fx < best_f) {
            best_f = res.fx;
            best_raw = res.x;
        }
    }
    if (!(best_f < kBig)) {
        throw OptimizerDiverged("fit_arma_garch: likelihood not finite at any start");
    }
    return finalize_fit(returns, spec, codec.decode(best_raw), mean, var);
}

ArmaGarchFit select_model_bic(const Eigen::VectorXd& returns, const FitOptions& opts) {
    std::vector<ArmaGarchSpec> specs;
    specs.reserve(81);
    for (int p = 0; p <= 2; ++p)
        for (int q = 0; q <= 2; ++q)
            for (int P = 0; P <= 2; ++P)
                for (int Q = 0; Q <= 2; ++Q) specs.push_back({p, q, P, Q});

    std::vector<std::optional<ArmaGarchFit>> fits(specs.size());
    core::parallel_for(static_cast<std::ptrdiff_t>(specs.size()), [&](std::ptrdiff_t i) {
        try {
            fits[i] = fit_arma_garch(returns, specs[i], opts);
        } catch (const Error&) {
            fits[i] = std::nullopt;
        }
    });

    auto better = [&](const ArmaGarchFit& a, const ArmaGarchFit& b) {
        const double tol = 1e-9 * (1.0 + std::min(std::fabs(a.bic), std::fabs(b.bic)));
        if (std::fabs(a.bic - b.bic) > tol) return a.bic < b.bic;
        if (a.spec.param_count() != b.spec.param_count()) {
            return a.spec.param_count() < b.spec.param_count();
        }
        return std::tie(a.spec.p, a.spec.q, a.spec.P, a.spec.Q) <
               std::tie(b.spec.p, b.spec.q, b.spec.P, b.spec.Q);
    };

    const ArmaGarchFit* winner = nullptr;
    const ArmaGarchFit* stable_winner = nullptr;  // margin <= 0.999
    for (const auto& f : fits) {
        if (!f) continue;
        if (!winner || better(*f, *winner)) winner = &*f;
        if (f->stationarity_margin() <= 0.999 && (!stable_winner || better(*f, *stable_winner))) {
            stable_winner = &*f;
        }
    }
    if (!winner) throw AllFitsFailed("select_model_bic: every spec failed to fit");
    if (winner->stationarity_margin() > 0.999 && stable_winner) return *stable_winner;
    return *winner;
}

double forecast_sigma2(const ArmaGarchFit& fit) {
    if (!fit.has_state) throw MissingState("forecast_sigma2: fit has no in-sample state");
    const int T = fit.n_obs;
    const double pre_var = fit.sigma2.size() ? fit.sigma2[0] : fit.c2;
    auto sig_at = [&](int back) { return T - back >= 0 ? fit.sigma2[T - back] : pre_var; };
    auto eps_at = [&](int back) { return T - back >= 0 ? fit.eps[T - back] : 0.0; };
    double s = fit.c2;
    s += fit.garch[0] * sig_at(1) + fit.garch[1] * sig_at(2);
    s += fit.arch[0] * eps_at(1) * eps_at(1) + fit.arch[1] * eps_at(2) * eps_at(2);
    return s;
}

double forecast_mean(const ArmaGarchFit& fit) {
    if (!fit.has_state) throw MissingState("forecast_mean: fit has no in-sample state");
    const int T = fit.n_obs;
    auto eps_at = [&](int back) { return T - back >= 0 ? fit.eps[T - back] : 0.0; };
    double m = fit.c1;
    m += fit.ar[0] * fit.last_returns[0] + fit.ar[1] * fit.last_returns[1];
    m += fit.ma[0] * eps_at(1) + fit.ma[1] * eps_at(2);
    return m;
}

double forecast_one_step(const ArmaGarchFit& fit, double h_sim) {
    return forecast_mean(fit) + std::sqrt(forecast_sigma2(fit)) * h_sim;
}

Eigen::VectorXd param_stderr(const ArmaGarchFit& fit, const Eigen::VectorXd& returns) {
    const ArmaGarchSpec spec = fit.spec;
    const int T = static_cast<int>(returns.size());
    const double mean = returns.mean();
    const double var = (returns.array() - mean).square().sum() / static_cast<double>(T - 1);

    std::vector<double> theta;
    theta.push_back(fit.c1);
    for (int j = 0; j < spec.p; ++j) theta.push_back(fit.ar[j]);
    for (int j = 0; j < spec.q; ++j) theta.push_back(fit.ma[j]);
    theta.push_back(fit.c2);
    for (int j = 0; j < spec.P; ++j) theta.push_back(fit.garch[j]);
    for (int j = 0; j < spec.Q; ++j) theta.push_back(fit.arch[j]);
    const int k = static_cast<int>(theta.size());

    auto unpack = [&](const std::vector<double>& th) {
        NaturalParams n;
        int i = 0;
        n.c1 = th[i++];
        for (int j = 0; j < spec.p; ++j) n.ar[j] = th[i++];
        for (int j = 0; j < spec.q; ++j) n.ma[j] = th[i++];
        n.c2 = th[i++];
        for (int j = 0; j < spec.P; ++j) n.garch[j] = th[i++];
        for (int j = 0; j < spec.Q; ++j) n.arch[j] = th[i++];
        return n;
    };
    auto ll = [&](const std::vector<double>& th) {
        return filter_loglik(returns, spec, unpack(th), mean, var, nullptr, nullptr);
    };

    std::vector<double> step(k);
    const double sd = std::sqrt(var);
    for (int i = 0; i < k; ++i) {
        double scale = 1.0;
        if (i == 0) scale = sd;
        if (i == 1 + spec.p + spec.q) scale = var;
        step[i] = 1e-3 * std::fabs(theta[i]) + 1e-5 * scale;
    }

    Eigen::MatrixXd H(k, k);
    const double f0 = ll(theta);
    for (int i = 0; i < k; ++i) {
        for (int j = i; j < k; ++j) {
            std::vector<double> t = theta;
            if (i == j) {
                t[i] = theta[i] + step[i];
                const double fp = ll(t);
                t[i] = theta[i] - step[i];
                const double fm = ll(t);
                H(i, i) = (fp - 2.0 * f0 + fm) / (step[i] * step[i]);
            } else {
                double fpp, fpm, fmp, fmm;
                t[i] = theta[i] + step[i];
                t[j] = theta[j] + step[j];
                fpp = ll(t);
                t[j] = theta[j] - step[j];
                fpm = ll(t);
                t[i] = theta[i] - step[i];
                fmm = ll(t);
                t[j] = theta[j] + step[j];
                fmp = ll(t);
                H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * step[i] * step[j]);
            }
        }
    }

    Eigen::MatrixXd info = -H;  // observed information
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
    Eigen::VectorXd ev = es.eigenvalues();
    const double floor = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (int i = 0; i < k; ++i) ev[i] = std::max(ev[i], floor);
    const Eigen::MatrixXd cov =
        es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

std::string to_record(const ArmaGarchFit& fit) {
    std::ostringstream os;
    os.precision(17);
    os << "fcvar_arma_garch_fit v1\n";
    os << "spec = " << fit.spec.p << ' ' << fit.spec.q << ' ' << fit.spec.P << ' ' << fit.spec.Q
       << '\n';
    os << "c1 = " << fit.c1 << '\n';
    os << "ar = " << fit.ar[0] << ' ' << fit.ar[1] << '\n';
    os << "ma = " << fit.ma[0] << ' ' << fit.ma[1] << '\n';
    os << "c2 = " << fit.c2 << '\n';
    os << "garch = " << fit.garch[0] << ' ' << fit.garch[1] << '\n';
    os << "arch = " << fit.arch[0] << ' ' << fit.arch[1] << '\n';
    os << "loglik = " << fit.loglik << '\n';
    os << "bic = " << fit.bic << '\n';
    os << "n_obs = " << fit.n_obs << '\n';
    return os.str();
}

ArmaGarchFit fit_from_record(const std::string& record) {
    std::istringstream in(record);
    std::string line;
    if (!std::getline(in, line) || line.rfind("fcvar_arma_garch_fit", 0) != 0) {
        throw ParseError("fit_from_record: missing header");
    }
    ArmaGarchFit fit;
    fit.has_state = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key, eq;
        ls >> key >> eq;
        if (eq != "=") throw ParseError("fit_from_record: bad line `" + line + "`");
        if (key == "spec") {
            ls >> fit.spec.p >> fit.spec.q >> fit.spec.P >> fit.spec.Q;
        } else if (key == "c1") {
            ls >> fit.c1;
        } else if (key == "ar") {
            ls >> fit.ar[0] >> fit.ar[1];
        } else if (key == "ma") {
            ls >> fit.ma[0] >> fit.ma[1];
        } else if (key == "c2") {
            ls >> fit.c2;
        } else if (key == "garch") {
            ls >> fit.garch[0] >> fit.garch[1];
        } else if (key == "arch") {
            ls >> fit.arch[0] >> fit.arch[1];
        } else if (key == "loglik") {
            ls >> fit.loglik;
        } else if (key == "bic") {
            ls >> fit.bic;
        } else if (key == "n_obs") {
            ls >> fit.n_obs;
        } else {
            throw ParseError("fit_from_record: unknown key `" + key + "`");
        }
        if (ls.fail()) throw ParseError("fit_from_record: bad value in `" + line + "`");
    }
    return fit;
}

}  // namespace fcvar::ts
