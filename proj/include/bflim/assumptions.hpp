#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bflim/klrate.hpp"
#include "bflim/model.hpp"

namespace bflim {

// Growing parameter subset G_T used by the prior-concentration diagnostic:
// the prior mass outside G_T must shrink like alpha * exp(-beta * T).
struct Sieve {
    std::size_t index = 1;
    ParameterDomain domain;
    double beta = 0.0;
};

using SieveFamily = std::function<Sieve(std::size_t)>;

// Pathwise equipartition probe ((A3)): sup over the closure grid of the
// model's rho range of |(1/n) log R_n(theta) + h(theta)| along one growing
// realization, with the noise scale held at the model's fixed value (or at
// the true sigma0 when sigma is free, where the rate reduces to the
// fixed-scale form). The grid includes closed endpoints; the rate is
// evaluated in closed form, so the model must be an AR(1) family.
struct SupGapPoint {
    std::size_t n = 0;
    double sup_gap = 0.0;
};

std::vector<SupGapPoint> uniform_convergence_probe(
    const ModelSpec& model, const TrueProcess& process,
    const std::vector<std::size_t>& n_list, std::size_t grid_resolution,
    std::uint64_t seed);

// Prior-mass check of a sieve family ((A5)(2)): mass of G_T under the model
// prior against the bound 1 - alpha * exp(-beta * T). beta must exceed
// twice the model's essential infimum rate or the bound is vacuous, which
// is a configuration error.
struct SieveMassPoint {
    std::size_t index = 0;
    double mass = 0.0;
    double bound = 0.0;
    bool ok = false;
};

std::vector<SieveMassPoint> sieve_mass_check(const ModelSpec& model,
                                             const TrueProcess& process,
                                             const SieveFamily& family,
                                             double alpha,
                                             const std::vector<std::size_t>& t_list);

// Sieve family helpers for the built-in suites: the whole domain for every
// T, and the domain truncated to |rho| <= exp(beta * T).
SieveFamily full_domain_sieve(const ModelSpec& model, double beta);
SieveFamily exp_truncation_sieve(const ModelSpec& model, double beta);

// Expected-rate probe ((A2)): Monte Carlo estimate of E[(1/n) log R_n(rho1)]
// at each n, against the closed form -h1(rho1). Each replication averages
// the conditional expectation of the rate given the lagged squares (the
// innovations integrate out exactly), which keeps the O(1/n) expectation
// gap resolvable above sampling noise. Replications share streams across n
// (each replication is one path scored at every prefix), so the gaps decay
// smoothly enough to regress.
struct A2Point {
    std::size_t n = 0;
    double mean_rate = 0.0;
    double closed_form_gap = 0.0;
    double std_error = 0.0;
};

std::vector<A2Point> a2_expectation_probe(const TrueProcess& process,
                                          double rho1,
                                          const std::vector<std::size_t>& n_list,
                                          std::size_t replications,
                                          std::uint64_t seed);

// Slope of log(closed_form_gap) against log(n); the gap decay exponent.
// Inverse-variance weighted least squares (weights (gap/std_error)^2 by the
// delta method), with equal weights when any std_error is zero. Requires
// strictly positive gaps.
double loglog_slope(const std::vector<A2Point>& points);

}  // namespace bflim
