#pragma once

#include <cstdint>
#include <functional>

#include "bflim/ar1.hpp"
#include "bflim/model.hpp"

namespace bflim {

using RateFn = std::function<DivergenceRate(const ParamPoint&)>;

// Closed-form rate of the model's AR(1) family at theta, with the fixed
// noise scale substituted when theta carries none.
DivergenceRate closed_form_rate(const ModelSpec& model, const ParamPoint& theta,
                                const TrueProcess& process);

// Convenience adaptor: the closed-form rate of `model` as a RateFn.
RateFn closed_form_rate_fn(const ModelSpec& model, const TrueProcess& process);

// Monte Carlo estimate of the rate: mean over replications of
// -(1/n) log R_n(theta) on independently simulated series, each replication
// on its own stream derived from `seed`. At theta equal to the true
// parameter every replication gives exactly zero, so the estimate is 0 with
// standard error 0.
DivergenceRate kl_rate_mc(const ModelSpec& model, const ParamPoint& theta,
                          const TrueProcess& process, std::size_t n,
                          std::size_t replications, std::uint64_t seed);

// Infimum of a rate function over the model's domain: grid scan at
// grid_resolution cells per unit length, golden-section refinement along
// each coordinate within the best cell, and a 4x verification scan. If the
// refined minimum escapes its cell or the fine scan finds a better basin,
// the grid was too coarse and a NumericError is raised. Under a strictly
// positive prior this infimum equals the essential infimum.
struct EssInfResult {
    DivergenceRate h_theta;
    ParamPoint argmin;
};

EssInfResult ess_inf_h(const ModelSpec& model, const RateFn& rate_fn,
                       std::size_t grid_resolution);

// Prior mass of {theta : rate_fn(theta).value > threshold} by midpoint
// quadrature at grid_resolution cells per unit length. For rates that are
// bounded on the domain this is 0 once threshold exceeds the bound; at
// threshold 0 it is the mass of the misspecified set.
double divergence_set_mass(const ModelSpec& model, const RateFn& rate_fn,
                           double threshold, std::size_t grid_resolution);

}  // namespace bflim
