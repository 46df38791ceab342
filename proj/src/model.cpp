#include "bflim/model.hpp"

#include <cmath>

#include "bflim/ar1.hpp"

namespace bflim {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

}  // namespace

double log_phi_interval(double a, double b) {
    if (!(a < b)) throw ConfigError("log_phi_interval: need a < b");
    // By symmetry Phi(b) - Phi(a) = Phi(-a) - Phi(-b); fold left-leaning
    // intervals onto the right half line, where the tail difference below
    // subtracts two small erfc values instead of two values near 1.
    if (a + b < 0.0) {
        const double t = a;
        a = -b;
        b = -t;
    }
    const double inv_sqrt2 = 0.70710678118654752440;
    // Phi(b) - Phi(a) as a difference of upper tails keeps precision when
    // both endpoints sit far on the same side.
    const double ca = 0.5 * std::erfc(a * inv_sqrt2);
    const double cb = 0.5 * std::erfc(b * inv_sqrt2);
    const double diff = ca - cb;
    if (!(diff > 0.0))
        throw NumericError(
            "truncated normal prior: vanishing mass on domain");
    return std::log(diff);
}

ModelSpec make_ar1_model(std::string name, const ParameterDomain& rho_domain,
                         const SigmaSpec& sigma, PriorSpec prior) {
    rho_domain.validate();
    if (rho_domain.dims != 1)
        throw ConfigError("make_ar1_model: rho_domain must be 1-dimensional");
    if (sigma.known && !(sigma.fixed > 0.0))
        throw ConfigError("make_ar1_model: fixed sigma must be > 0");
    if (!sigma.known && !(sigma.range.lo > 0.0))
        throw ConfigError(
            "make_ar1_model: sigma range must stay strictly above 0");
    if (prior.kind == PriorSpec::Kind::trunc_normal_rho && !(prior.sd > 0.0))
        throw ConfigError("make_ar1_model: prior sd must be > 0");

    ParameterDomain domain;
    if (sigma.known) {
        domain = rho_domain;
    } else {
        domain.dims = 2;
        for (const Box& b : rho_domain.boxes)
            domain.boxes.push_back(Box{{b.iv[0], sigma.range}});
        domain.validate();
    }

    ModelSpec m;
    m.name = std::move(name);
    m.domain = domain;
    m.prior = prior;
    m.family = Ar1Family{sigma.known, sigma.fixed};

    if (prior.kind == PriorSpec::Kind::uniform) {
        const double log_density = -std::log(domain.measure());
        m.log_prior = [domain, log_density](const ParamPoint& p) {
            return domain.contains(p) ? log_density : kNegInf;
        };
    } else {
        // Normal(mu, sd) in rho truncated to the union of rho ranges,
        // uniform in sigma. The normalizer sums the cdf mass of each piece.
        const double mu = prior.mu;
        const double sd = prior.sd;
        KahanSum mass;
        for (const Box& b : domain.boxes)
            mass.add(std::exp(log_phi_interval((b.iv[0].lo - mu) / sd,
                                               (b.iv[0].hi - mu) / sd)));
        if (!(mass.value() > 0.0))
            throw NumericError(
                "truncated normal prior: vanishing mass on domain");
        const double log_mass = std::log(mass.value());
        const double log_sigma_width =
            sigma.known ? 0.0 : std::log(sigma.range.width());
        m.log_prior = [domain, mu, sd, log_mass,
                       log_sigma_width](const ParamPoint& p) {
            if (!domain.contains(p)) return kNegInf;
            const double z = (p.rho() - mu) / sd;
            return -0.5 * z * z - kLogSqrt2Pi - std::log(sd) - log_mass -
                   log_sigma_width;
        };
    }

    const double sf = sigma.fixed;
    m.log_lik = [sf](const TimeSeries& series, const ParamPoint& p) {
        return ar1_loglik(series, p.rho(), p.sigma(sf));
    };
    return m;
}

}  // namespace bflim
