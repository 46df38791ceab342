#include "bflim/klrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bflim/quadrature.hpp"
#include "bflim/rng.hpp"

namespace bflim {

namespace {

double golden_section_min(const std::function<double(double)>& f, double a,
                          double b) {
    // Shrinks [a, b] by the golden ratio; 80 steps reach ~1e-15 of the
    // initial width. f need only be continuous.
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

struct ScanBest {
    double value = std::numeric_limits<double>::infinity();
    ParamPoint point;
    std::size_t box = 0;
    std::array<double, 2> cell{0.0, 0.0};
};

double rate_value(const RateFn& rate_fn, const ParamPoint& p) {
    const double v = rate_fn(p).value;
    if (std::isnan(v)) throw NumericError("rate function returned NaN");
    return v;
}

ScanBest scan_grid(const ModelSpec& model, const RateFn& rate_fn,
                   std::size_t resolution) {
    const QuadratureGrid grid =
        make_grid(model.domain, QuadRule::midpoint, {resolution, resolution});
    ScanBest best;
    for (std::size_t b = 0; b < grid.boxes.size(); ++b) {
        const QuadratureGrid::BoxGrid& bg = grid.boxes[b];
        const std::size_t n1 = grid.dims == 2 ? bg.axis[1].node.size() : 1;
        for (std::size_t i = 0; i < bg.axis[0].node.size(); ++i) {
            for (std::size_t j = 0; j < n1; ++j) {
                ParamPoint p;
                p.dims = grid.dims;
                p.coord[0] = bg.axis[0].node[i];
                if (grid.dims == 2) p.coord[1] = bg.axis[1].node[j];
                const double v = rate_value(rate_fn, p);
                if (v < best.value) {
                    best.value = v;
                    best.point = p;
                    best.box = b;
                    for (int d = 0; d < grid.dims; ++d) {
                        const auto di = static_cast<std::size_t>(d);
                        const auto& ax = bg.axis[di];
                        best.cell[di] =
                            ax.node.size() > 1
                                ? ax.node[1] - ax.node[0]
                                : model.domain.boxes[b].iv[di].width();
                    }
                }
            }
        }
    }
    return best;
}

// Golden-section polish confined to one grid cell around the best node. A
// polished coordinate pinned against the cell window anywhere other than
// the domain edge means the true minimum lies outside the scanned cell.
ScanBest polish(const ModelSpec& model, const RateFn& rate_fn,
                ScanBest best) {
    const Box& box = model.domain.boxes[best.box];
    const int dims = model.domain.dims;
    for (int round = 0; round < 3; ++round) {
        for (int d = 0; d < dims; ++d) {
            const auto di = static_cast<std::size_t>(d);
            const Interval& iv = box.iv[di];
            const double lo =
                std::max(iv.lo, best.point.coord[di] - best.cell[di]);
            const double hi =
                std::min(iv.hi, best.point.coord[di] + best.cell[di]);
            ParamPoint probe = best.point;
            const double x = golden_section_min(
                [&](double c) {
                    probe.coord[di] = c;
                    return rate_value(rate_fn, probe);
                },
                lo, hi);
            const double edge_eps = 1e-9 * (hi - lo);
            if ((x - lo < edge_eps && lo != iv.lo) ||
                (hi - x < edge_eps && hi != iv.hi))
                throw NumericError(
                    "ess_inf_h: grid too coarse (refined minimum escapes "
                    "its cell)");
            probe.coord[di] = x;
            const double v = rate_value(rate_fn, probe);
            if (v <= best.value) {
                best.value = v;
                best.point = probe;
            }
        }
    }
    return best;
}

}  // namespace

DivergenceRate closed_form_rate(const ModelSpec& model,
                                const ParamPoint& theta,
                                const TrueProcess& process) {
    if (!model.family)
        throw ConfigError("closed_form_rate: model is not an AR(1) family");
    const double sigma = theta.sigma(model.family->sigma_fixed);
    return h_sigma_closed(theta.rho(), sigma, Ar1ClosedForms::from(process));
}

RateFn closed_form_rate_fn(const ModelSpec& model,
                           const TrueProcess& process) {
    if (!model.family)
        throw ConfigError(
            "closed_form_rate_fn: model is not an AR(1) family");
    const Ar1ClosedForms forms = Ar1ClosedForms::from(process);
    const double sigma_fixed = model.family->sigma_fixed;
    return [forms, sigma_fixed](const ParamPoint& p) {
        return h_sigma_closed(p.rho(), p.sigma(sigma_fixed), forms);
    };
}

DivergenceRate kl_rate_mc(const ModelSpec& model, const ParamPoint& theta,
                          const TrueProcess& process, std::size_t n,
                          std::size_t replications, std::uint64_t seed) {
    if (n < 100)
        throw ConfigError("kl_rate_mc: n must be >= 100");
    if (replications < 2)
        throw ConfigError("kl_rate_mc: replications must be >= 2");
    if (!model.domain.contains(theta))
        throw ConfigError("kl_rate_mc: theta outside model domain");
    if (!model.log_lik)
        throw ConfigError("kl_rate_mc: model has no likelihood");
    process.validate();
    KahanSum sum, sumsq;
    for (std::size_t r = 0; r < replications; ++r) {
        const std::uint64_t rep_seed = rng::split(seed, r);
        const TimeSeries path = simulate_ar1(process, n, rep_seed);
        const double lr = model.log_lik(path, theta) -
                          ar1_loglik(path, process.rho0, process.sigma0);
        if (!std::isfinite(lr))
            throw NumericError(
                "kl_rate_mc: non-finite log likelihood on replication seed " +
                std::to_string(rep_seed));
        const double v = -lr / static_cast<double>(n);
        sum.add(v);
        sumsq.add(v * v);
    }
    const double reps = static_cast<double>(replications);
    const double mean = sum.value() / reps;
    const double var =
        std::max(0.0, (sumsq.value() - reps * mean * mean) / (reps - 1.0));
    return DivergenceRate{mean, std::sqrt(var / reps), kMonteCarlo};
}

EssInfResult ess_inf_h(const ModelSpec& model, const RateFn& rate_fn,
                       std::size_t grid_resolution) {
    if (grid_resolution == 0)
        throw ConfigError("ess_inf_h: grid_resolution must be positive");
    ScanBest best =
        polish(model, rate_fn, scan_grid(model, rate_fn, grid_resolution));
    ScanBest fine = scan_grid(model, rate_fn, grid_resolution * 4);
    if (fine.value < best.value - 1e-9)
        throw NumericError(
            "ess_inf_h: grid too coarse (finer scan found a better basin)");
    DivergenceRate at_min = rate_fn(best.point);
    return EssInfResult{at_min, best.point};
}

double divergence_set_mass(const ModelSpec& model, const RateFn& rate_fn,
                           double threshold, std::size_t grid_resolution) {
    if (threshold < 0.0)
        throw ConfigError("divergence_set_mass: threshold must be >= 0");
    if (grid_resolution == 0)
        throw ConfigError(
            "divergence_set_mass: grid_resolution must be positive");
    const QuadratureGrid grid = make_grid(model.domain, QuadRule::midpoint,
                                          {grid_resolution, grid_resolution});
    KahanSum mass;
    for (const QuadratureGrid::BoxGrid& bg : grid.boxes) {
        const std::size_t n1 = grid.dims == 2 ? bg.axis[1].node.size() : 1;
        for (std::size_t i = 0; i < bg.axis[0].node.size(); ++i) {
            for (std::size_t j = 0; j < n1; ++j) {
                ParamPoint p;
                p.dims = grid.dims;
                p.coord[0] = bg.axis[0].node[i];
                double logw = bg.axis[0].logw[i];
                if (grid.dims == 2) {
                    p.coord[1] = bg.axis[1].node[j];
                    logw += bg.axis[1].logw[j];
                }
                if (rate_value(rate_fn, p) > threshold) {
                    const double lp = model.log_prior(p);
                    if (lp != kNegInf) mass.add(std::exp(lp + logw));
                }
            }
        }
    }
    return mass.value();
}

}  // namespace bflim
