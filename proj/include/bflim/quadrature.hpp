#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "bflim/model.hpp"
#include "bflim/process.hpp"

namespace bflim {

enum class QuadRule { midpoint, gauss_legendre };

// Deterministic product quadrature over a union-of-boxes domain. Resolution
// counts cells per unit length per dimension; every box of the union is
// partitioned independently at that density. gauss_legendre places 4 nodes
// per cell, midpoint 1 (with at least 2 cells per box so no box ever
// collapses to a single node).
struct QuadratureGrid {
    struct Axis {
        std::vector<double> node;
        std::vector<double> logw;
    };
    struct BoxGrid {
        std::array<Axis, 2> axis;
    };

    QuadRule rule = QuadRule::gauss_legendre;
    int dims = 1;
    std::array<std::size_t, 2> resolution{32, 32};
    std::vector<BoxGrid> boxes;
    std::size_t total_nodes = 0;
};

QuadratureGrid make_grid(const ParameterDomain& domain, QuadRule rule,
                         std::array<std::size_t, 2> resolution);

// log of sum_j w_j exp(log_f(node_j)) over the whole grid. Nodes are walked
// in a fixed global order (box, then dim 0, then dim 1) in blocks of 16384;
// block accumulators merge in index order, so any thread count produces the
// same bits as a serial run. Returns -inf when every term vanishes.
double log_weighted_sum(const QuadratureGrid& grid,
                        const std::function<double(const ParamPoint&)>& log_f,
                        int threads = 1);

// log m(X | model): the prior-weighted likelihood integral on the given
// grid. Raises NumericError if the whole integrand vanishes.
double log_marginal(const ModelSpec& model, const TimeSeries& series,
                    const QuadratureGrid& grid, int threads = 1);

struct QuadratureSettings {
    QuadRule rule = QuadRule::gauss_legendre;
    // 0 means automatic: max(32, ceil(sqrt(n))) cells per unit length.
    std::array<std::size_t, 2> base_resolution{0, 0};
    // Cap on quadrature nodes per dimension within one box.
    std::size_t max_resolution = std::size_t{1} << 20;
    int threads = 1;
};

struct MarginalResult {
    double value = 0.0;
    std::array<std::size_t, 2> resolution{0, 0};
    int dims = 1;
    std::size_t evaluations = 0;
};

// Doubles resolution per dimension (round-robin) until the last doubling of
// every dimension moves the value by less than tol / dims. Throws
// NumericError when a dimension would exceed max_resolution nodes first,
// which is also the guaranteed outcome of tol = 0.
MarginalResult refine_until(const ModelSpec& model, const TimeSeries& series,
                            double tol, const QuadratureSettings& settings);

double quad_auto_resolution(std::size_t n);

// log posterior density at theta on the given grid:
// log_lik + log_prior - log_marginal.
double posterior_logdensity(const ModelSpec& model, const TimeSeries& series,
                            const ParamPoint& theta,
                            const QuadratureGrid& grid, int threads = 1);

// Largest |log m - (log_lik + log_prior - log posterior)| across the probe
// points, all terms evaluated against the same grid. Probes with zero
// posterior density (outside the domain) are rejected. A plumbing
// self-check: the residual must sit at rounding level.
double log_marginal_identity_check(const ModelSpec& model,
                                   const TimeSeries& series,
                                   const std::vector<ParamPoint>& probes,
                                   const QuadratureGrid& grid,
                                   int threads = 1);

double log_marginal_identity_check(const ModelSpec& model,
                                   const TimeSeries& series,
                                   const ParamPoint& theta,
                                   const QuadratureGrid& grid,
                                   int threads = 1);

}  // namespace bflim
