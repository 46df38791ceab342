#include "bflim/ar1.hpp"

#include <cmath>

#include "bflim/rng.hpp"

namespace bflim {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace

TimeSeries simulate_ar1(const TrueProcess& process, std::size_t n,
                        std::uint64_t seed) {
    process.validate();
    if (n == 0) throw ConfigError("simulate_ar1: n must be >= 1");
    std::vector<double> x(n);
    double prev = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double eps = rng::normal(seed, 0, t);
        prev = process.rho0 * prev + process.sigma0 * eps;
        x[t] = prev;
    }
    return TimeSeries(std::move(x), seed, process);
}

double ar1_loglik(const SuffStats& stats, double rho, double sigma) {
    if (!(sigma > 0.0))
        throw ConfigError("ar1_loglik: sigma must be > 0");
    const double q =
        stats.s_yy - 2.0 * rho * stats.s_xy + rho * rho * stats.s_xx;
    const double n = static_cast<double>(stats.n);
    return -0.5 * n * (kLog2Pi + 2.0 * std::log(sigma)) -
           q / (2.0 * sigma * sigma);
}

double ar1_loglik(const TimeSeries& series, double rho, double sigma) {
    return ar1_loglik(series.stats(), rho, sigma);
}

double log_likelihood_ratio(const TimeSeries& series, const ModelSpec& model,
                            const ParamPoint& theta,
                            const TrueProcess& process) {
    process.validate();
    if (!model.family)
        throw ConfigError(
            "log_likelihood_ratio: model is not an AR(1) family");
    if (!model.domain.contains(theta))
        throw ConfigError("log_likelihood_ratio: theta outside model domain");
    const double sigma = theta.sigma(model.family->sigma_fixed);
    return ar1_loglik(series, theta.rho(), sigma) -
           ar1_loglik(series, process.rho0, process.sigma0);
}

DivergenceRate h1_closed(double rho1, const Ar1ClosedForms& forms) {
    forms.validate();
    const double d = rho1 - forms.rho0;
    const double v = d * d / (2.0 * (1.0 - forms.rho0 * forms.rho0));
    return DivergenceRate{v, 0.0, kClosedForm};
}

DivergenceRate h_sigma_closed(double rho, double sigma,
                              const Ar1ClosedForms& forms) {
    forms.validate();
    if (!(sigma > 0.0))
        throw ConfigError("h_sigma_closed: sigma must be > 0");
    const double s0 = forms.sigma0;
    const double v = s0 * s0 / (1.0 - forms.rho0 * forms.rho0);
    const double d = forms.rho0 - rho;
    const double value = std::log(sigma / s0) - 0.5 +
                         (s0 * s0 + d * d * v) / (2.0 * sigma * sigma);
    return DivergenceRate{value, 0.0, kClosedForm};
}

DivergenceRate h2_theta_closed(const Ar1ClosedForms& forms) {
    forms.validate();
    const double dm = std::min((1.0 - forms.rho0) * (1.0 - forms.rho0),
                               (1.0 + forms.rho0) * (1.0 + forms.rho0));
    const double value = dm / (2.0 * (1.0 - forms.rho0 * forms.rho0));
    return DivergenceRate{value, 0.0, kClosedForm};
}

DivergenceRate h2_sigma_free_closed(const Ar1ClosedForms& forms) {
    forms.validate();
    const double dm = std::min((1.0 - forms.rho0) * (1.0 - forms.rho0),
                               (1.0 + forms.rho0) * (1.0 + forms.rho0));
    const double value =
        0.5 * std::log1p(dm / (1.0 - forms.rho0 * forms.rho0));
    return DivergenceRate{value, 0.0, kClosedForm};
}

double autocovariance_limit(unsigned lag, const Ar1ClosedForms& forms) {
    forms.validate();
    const double v =
        forms.sigma0 * forms.sigma0 / (1.0 - forms.rho0 * forms.rho0);
    return v * std::pow(forms.rho0, static_cast<double>(lag));
}

ErgodicDiagnostics ergodic_diagnostics(const TimeSeries& series) {
    if (series.n() < 2)
        throw ConfigError("ergodic_diagnostics: need n >= 2");
    const SuffStats& s = series.stats();
    const double n = static_cast<double>(s.n);
    ErgodicDiagnostics d;
    d.mean_sq = s.s_xx / n;
    d.lag1 = s.s_xy / n;
    d.noise_cross = d.lag1 - series.source().rho0 * d.mean_sq;
    return d;
}

}  // namespace bflim
