#pragma once

#include <cstdint>

#include "bflim/model.hpp"
#include "bflim/process.hpp"

namespace bflim {

// Carrier for the closed-form rate formulas of a fixed true process.
struct Ar1ClosedForms {
    double rho0 = 0.5;
    double sigma0 = 1.0;

    static Ar1ClosedForms from(const TrueProcess& p) {
        p.validate();
        return Ar1ClosedForms{p.rho0, p.sigma0};
    }
    void validate() const {
        TrueProcess{rho0, sigma0}.validate();
    }
};

// Simulates n observations of x_t = rho0 x_{t-1} + sigma0 eps_t from x_0 = 0.
// Fully determined by (process, n, seed); the first m values of a length-n
// path equal the length-m path for the same seed.
TimeSeries simulate_ar1(const TrueProcess& process, std::size_t n,
                        std::uint64_t seed);

// Gaussian AR(1) log likelihood of the whole path given (rho, sigma),
// conditional on x_0 = 0. Evaluated from sufficient statistics in O(1).
double ar1_loglik(const TimeSeries& series, double rho, double sigma);

// Same likelihood from explicit sufficient statistics; lets trajectory code
// score any prefix without copying the path.
double ar1_loglik(const SuffStats& stats, double rho, double sigma);

// log of L(theta) / L(theta_true): the candidate parameter against the
// data-generating one. The model supplies the fixed noise scale when theta
// has no sigma coordinate. Equals the closed sufficient-statistic form
// (rho0 - rho1)/sigma0^2 * [S_xx (rho0 + rho1)/2 - S_xy] when both noise
// scales agree.
double log_likelihood_ratio(const TimeSeries& series, const ModelSpec& model,
                            const ParamPoint& theta,
                            const TrueProcess& process);

// Per-observation Kullback-Leibler divergence rate of the candidate with
// the noise scale held at its true value:
//   h1(rho1) = (rho1 - rho0)^2 / (2 (1 - rho0^2)).
DivergenceRate h1_closed(double rho1, const Ar1ClosedForms& forms);

// General closed-form rate for candidate (rho, sigma):
//   h(rho, sigma) = log(sigma/sigma0) - 1/2
//                 + [sigma0^2 + (rho0 - rho)^2 v] / (2 sigma^2),
// with v = sigma0^2 / (1 - rho0^2) the stationary second moment. Reduces to
// h1 at sigma = sigma0, is >= 0 everywhere, and vanishes only at
// (rho0, sigma0). Cross-validated against kl_rate_mc.
DivergenceRate h_sigma_closed(double rho, double sigma,
                              const Ar1ClosedForms& forms);

// Infimum of h1 over the explosive candidate set {|rho| >= 1}:
//   min{(1 - rho0)^2, (1 + rho0)^2} / (2 (1 - rho0^2)),
// attained at the unit-root boundary nearer to rho0.
DivergenceRate h2_theta_closed(const Ar1ClosedForms& forms);

// Infimum of h(rho, sigma) over {|rho| >= 1} with sigma free: minimizing in
// sigma at fixed rho gives sigma^2 = sigma0^2 + (rho0 - rho)^2 v and value
// (1/2) log(1 + (rho0 - rho)^2 / (1 - rho0^2)); the rho minimum is again
// the nearer unit root.
DivergenceRate h2_sigma_free_closed(const Ar1ClosedForms& forms);

// Stationary autocovariance at lag h: sigma0^2 rho0^h / (1 - rho0^2).
double autocovariance_limit(unsigned lag, const Ar1ClosedForms& forms);

// Sample path averages whose limits the ergodic theorem fixes:
//   mean_sq     = (1/n) sum x_{t-1}^2          -> sigma0^2/(1 - rho0^2)
//   lag1        = (1/n) sum x_t x_{t-1}        -> rho0 sigma0^2/(1 - rho0^2)
//   noise_cross = (1/n) sum (x_t - rho0 x_{t-1}) x_{t-1} -> 0
// noise_cross is defined as lag1 - rho0 * mean_sq, so the decomposition
// lag1 = rho0 * mean_sq + noise_cross holds bit-for-bit.
struct ErgodicDiagnostics {
    double mean_sq = 0.0;
    double lag1 = 0.0;
    double noise_cross = 0.0;
};

ErgodicDiagnostics ergodic_diagnostics(const TimeSeries& series);

}  // namespace bflim
