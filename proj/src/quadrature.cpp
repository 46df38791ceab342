#include "bflim/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace bflim {

namespace {

// 4-point Gauss-Legendre rule on [-1, 1], nodes ascending.
constexpr double kGlNode[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
constexpr double kGlWeight[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};

constexpr std::size_t kBlockNodes = 16384;

std::size_t cells_for(const Interval& iv, QuadRule rule,
                      std::size_t resolution) {
    const double raw =
        std::ceil(iv.width() * static_cast<double>(resolution));
    const std::size_t min_cells = rule == QuadRule::midpoint ? 2 : 1;
    return std::max(min_cells, static_cast<std::size_t>(raw));
}

std::size_t nodes_per_cell(QuadRule rule) {
    return rule == QuadRule::gauss_legendre ? 4 : 1;
}

QuadratureGrid::Axis make_axis(const Interval& iv, QuadRule rule,
                               std::size_t resolution) {
    const std::size_t cells = cells_for(iv, rule, resolution);
    const double h = iv.width() / static_cast<double>(cells);
    QuadratureGrid::Axis ax;
    if (rule == QuadRule::midpoint) {
        ax.node.reserve(cells);
        ax.logw.assign(cells, std::log(h));
        for (std::size_t c = 0; c < cells; ++c)
            ax.node.push_back(iv.lo + (static_cast<double>(c) + 0.5) * h);
    } else {
        ax.node.reserve(cells * 4);
        ax.logw.reserve(cells * 4);
        const double half = 0.5 * h;
        for (std::size_t c = 0; c < cells; ++c) {
            const double mid = iv.lo + (static_cast<double>(c) + 0.5) * h;
            for (int g = 0; g < 4; ++g) {
                ax.node.push_back(mid + half * kGlNode[g]);
                ax.logw.push_back(std::log(half * kGlWeight[g]));
            }
        }
    }
    return ax;
}

// Largest per-box node count along one dimension at the given resolution.
std::size_t max_axis_nodes(const ParameterDomain& domain, QuadRule rule,
                           std::size_t resolution, int dim) {
    std::size_t worst = 0;
    for (const Box& b : domain.boxes)
        worst = std::max(
            worst, cells_for(b.iv[static_cast<std::size_t>(dim)], rule,
                             resolution) *
                       nodes_per_cell(rule));
    return worst;
}

struct BoxLayout {
    std::size_t n0 = 1;
    std::size_t n1 = 1;
    std::size_t count = 1;
};

}  // namespace

QuadratureGrid make_grid(const ParameterDomain& domain, QuadRule rule,
                         std::array<std::size_t, 2> resolution) {
    domain.validate();
    for (int d = 0; d < domain.dims; ++d)
        if (resolution[static_cast<std::size_t>(d)] == 0)
            throw ConfigError("make_grid: resolution must be positive");
    QuadratureGrid grid;
    grid.rule = rule;
    grid.dims = domain.dims;
    grid.resolution = resolution;
    grid.boxes.reserve(domain.boxes.size());
    for (const Box& b : domain.boxes) {
        QuadratureGrid::BoxGrid bg;
        std::size_t count = 1;
        for (int d = 0; d < domain.dims; ++d) {
            const auto di = static_cast<std::size_t>(d);
            bg.axis[di] = make_axis(b.iv[di], rule, resolution[di]);
            count *= bg.axis[di].node.size();
        }
        grid.total_nodes += count;
        grid.boxes.push_back(std::move(bg));
    }
    return grid;
}

double log_weighted_sum(const QuadratureGrid& grid,
                        const std::function<double(const ParamPoint&)>& log_f,
                        int threads) {
    if (grid.total_nodes == 0)
        throw ConfigError("log_weighted_sum: empty grid");
    std::vector<BoxLayout> layout(grid.boxes.size());
    std::vector<std::size_t> prefix(grid.boxes.size() + 1, 0);
    for (std::size_t b = 0; b < grid.boxes.size(); ++b) {
        BoxLayout& l = layout[b];
        l.n0 = grid.boxes[b].axis[0].node.size();
        l.n1 = grid.dims == 2 ? grid.boxes[b].axis[1].node.size() : 1;
        l.count = l.n0 * l.n1;
        prefix[b + 1] = prefix[b] + l.count;
    }

    const std::size_t nblocks =
        (grid.total_nodes + kBlockNodes - 1) / kBlockNodes;
    std::vector<LogSumAcc> accs(nblocks);

    parallel_chunks(nblocks, threads, [&](std::size_t blk) {
        const std::size_t k0 = blk * kBlockNodes;
        const std::size_t k1 = std::min(grid.total_nodes, k0 + kBlockNodes);
        std::size_t b = static_cast<std::size_t>(
                            std::upper_bound(prefix.begin(), prefix.end(),
                                             k0) -
                            prefix.begin()) -
                        1;
        std::size_t local = k0 - prefix[b];
        LogSumAcc& acc = accs[blk];
        ParamPoint p;
        p.dims = grid.dims;
        for (std::size_t k = k0; k < k1; ++k) {
            while (local == layout[b].count) {
                ++b;
                local = 0;
            }
            const std::size_t i = local / layout[b].n1;
            const std::size_t j = local % layout[b].n1;
            const QuadratureGrid::BoxGrid& bg = grid.boxes[b];
            p.coord[0] = bg.axis[0].node[i];
            double logw = bg.axis[0].logw[i];
            if (grid.dims == 2) {
                p.coord[1] = bg.axis[1].node[j];
                logw += bg.axis[1].logw[j];
            }
            const double lf = log_f(p);
            if (std::isnan(lf))
                throw NumericError("log_weighted_sum: integrand is NaN");
            if (std::isinf(lf) && lf > 0.0)
                throw NumericError("log_weighted_sum: integrand diverged");
            acc.add(lf + logw);
            ++local;
        }
    });

    LogSumAcc total;
    for (const LogSumAcc& a : accs) total.merge(a);
    return total.value();
}

double log_marginal(const ModelSpec& model, const TimeSeries& series,
                    const QuadratureGrid& grid, int threads) {
    const double v = log_weighted_sum(
        grid,
        [&](const ParamPoint& p) {
            const double lp = model.log_prior(p);
            if (lp == kNegInf) return kNegInf;
            return lp + model.log_lik(series, p);
        },
        threads);
    if (v == kNegInf)
        throw NumericError(
            "log_marginal: every integrand evaluation vanished (prior and "
            "likelihood have no common support)");
    return v;
}

double quad_auto_resolution(std::size_t n) {
    const double r = std::ceil(std::sqrt(static_cast<double>(n)));
    return std::max(32.0, r);
}

MarginalResult refine_until(const ModelSpec& model, const TimeSeries& series,
                            double tol, const QuadratureSettings& settings) {
    if (std::isnan(tol) || tol < 0.0)
        throw ConfigError("refine_until: tol must be >= 0");
    model.domain.validate();
    const int dims = model.domain.dims;
    std::array<std::size_t, 2> res{1, 1};
    for (int d = 0; d < dims; ++d) {
        const auto di = static_cast<std::size_t>(d);
        res[di] = settings.base_resolution[di] != 0
                      ? settings.base_resolution[di]
                      : static_cast<std::size_t>(
                            quad_auto_resolution(series.n()));
    }

    MarginalResult out;
    out.dims = dims;
    {
        const QuadratureGrid g = make_grid(model.domain, settings.rule, res);
        out.value = log_marginal(model, series, g, settings.threads);
        out.evaluations = g.total_nodes;
    }

    const double dim_tol = tol / static_cast<double>(dims);
    std::array<bool, 2> converged{false, dims < 2};
    while (!(converged[0] && converged[1])) {
        for (int d = 0; d < dims; ++d) {
            const auto di = static_cast<std::size_t>(d);
            if (converged[di]) continue;
            if (max_axis_nodes(model.domain, settings.rule, res[di] * 2, d) >
                settings.max_resolution)
                throw NumericError(
                    "refine_until: resolution cap (" +
                    std::to_string(settings.max_resolution) +
                    " nodes per dimension) reached in dim " +
                    std::to_string(d) + " before tolerance " + fmt17(tol) +
                    " was met");
            res[di] *= 2;
            const QuadratureGrid g =
                make_grid(model.domain, settings.rule, res);
            const double v = log_marginal(model, series, g, settings.threads);
            out.evaluations += g.total_nodes;
            const double delta = std::abs(v - out.value);
            out.value = v;
            if (delta < dim_tol) converged[di] = true;
        }
    }
    out.resolution = res;
    return out;
}

double posterior_logdensity(const ModelSpec& model, const TimeSeries& series,
                            const ParamPoint& theta,
                            const QuadratureGrid& grid, int threads) {
    const double lp = model.log_prior(theta);
    if (lp == kNegInf) return kNegInf;
    const double ll = model.log_lik(series, theta);
    return lp + ll - log_marginal(model, series, grid, threads);
}

double log_marginal_identity_check(const ModelSpec& model,
                                   const TimeSeries& series,
                                   const std::vector<ParamPoint>& probes,
                                   const QuadratureGrid& grid, int threads) {
    const double lm = log_marginal(model, series, grid, threads);
    double worst = 0.0;
    for (const ParamPoint& theta : probes) {
        const double lp = model.log_prior(theta);
        if (lp == kNegInf)
            throw ConfigError(
                "log_marginal_identity_check: probe has zero posterior "
                "density");
        const double ll = model.log_lik(series, theta);
        const double lpost = lp + ll - lm;
        worst = std::max(worst, std::abs(lm - (ll + lp - lpost)));
    }
    return worst;
}

double log_marginal_identity_check(const ModelSpec& model,
                                   const TimeSeries& series,
                                   const ParamPoint& theta,
                                   const QuadratureGrid& grid, int threads) {
    return log_marginal_identity_check(
        model, series, std::vector<ParamPoint>{theta}, grid, threads);
}

}  // namespace bflim
