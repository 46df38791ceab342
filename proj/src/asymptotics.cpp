#include "bflim/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bflim/ar1.hpp"

namespace bflim {

namespace {

constexpr std::size_t kEssInfGridResolution = 128;

void validate_checkpoints(const std::vector<std::size_t>& checkpoints) {
    if (checkpoints.empty())
        throw ConfigError("checkpoints must be non-empty");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0)
            throw ConfigError("checkpoints must be positive");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw ConfigError("checkpoints must be strictly increasing");
    }
}

double theory_limit_for(const ModelSpec& m1, const ModelSpec& m2,
                        const TrueProcess& process) {
    if (!m1.family || !m2.family)
        return std::numeric_limits<double>::quiet_NaN();
    const double h1 =
        ess_inf_h(m1, closed_form_rate_fn(m1, process), kEssInfGridResolution)
            .h_theta.value;
    const double h2 =
        ess_inf_h(m2, closed_form_rate_fn(m2, process), kEssInfGridResolution)
            .h_theta.value;
    return h2 - h1;
}

double converged_log_marginal(const ModelSpec& model, const TimeSeries& series,
                              double tol, const QuadratureSettings& settings,
                              std::size_t checkpoint) {
    try {
        return refine_until(model, series, tol, settings).value;
    } catch (const NumericError& e) {
        throw NumericError("checkpoint n=" + std::to_string(checkpoint) +
                           ", model " + model.name + ": " + e.what());
    }
}

bool strictly_inside(const ParameterDomain& domain, const ParamPoint& p) {
    if (p.dims != domain.dims) return false;
    for (const Box& b : domain.boxes) {
        bool inside = true;
        for (int d = 0; d < domain.dims; ++d) {
            const auto di = static_cast<std::size_t>(d);
            if (!(p.coord[di] > b.iv[di].lo && p.coord[di] < b.iv[di].hi))
                inside = false;
        }
        if (inside) return true;
    }
    return false;
}

}  // namespace

Trajectory trajectory(const TrueProcess& process, const ModelSpec& m1,
                      const ModelSpec& m2,
                      const std::vector<std::size_t>& checkpoints,
                      std::uint64_t seed, double tol,
                      const QuadratureSettings& settings) {
    validate_checkpoints(checkpoints);
    Trajectory out;
    out.checkpoints = checkpoints;
    out.seed = seed;
    out.model_pair = {m1.name, m2.name};
    out.theory_limit = theory_limit_for(m1, m2, process);

    const TimeSeries full = simulate_ar1(process, checkpoints.back(), seed);
    out.values.reserve(checkpoints.size());
    for (std::size_t m : checkpoints) {
        const TimeSeries prefix = full.prefix(m);
        const double lm1 =
            converged_log_marginal(m1, prefix, tol, settings, m);
        const double lm2 =
            converged_log_marginal(m2, prefix, tol, settings, m);
        out.values.push_back((lm1 - lm2) / static_cast<double>(m));
    }
    return out;
}

LimitEstimate fit_limit(const std::vector<Trajectory>& trajectories,
                        double tail_fraction) {
    if (trajectories.size() < 2)
        throw ConfigError("fit_limit: need at least 2 trajectories");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw ConfigError("fit_limit: tail_fraction must be in (0,1)");
    const std::vector<std::size_t>& cps = trajectories.front().checkpoints;
    for (const Trajectory& t : trajectories) {
        if (t.checkpoints != cps)
            throw ConfigError("fit_limit: trajectories must share checkpoints");
        if (t.values.size() != cps.size())
            throw ConfigError("fit_limit: trajectory values incomplete");
    }
    const std::size_t k = cps.size();
    const auto tail = static_cast<std::size_t>(
        std::ceil(tail_fraction * static_cast<double>(k)));
    if (tail < 2)
        throw ConfigError("fit_limit: fewer than 2 tail checkpoints");
    const std::size_t start = k - tail;

    KahanSum mean_acc;
    std::vector<double> tail_means;
    tail_means.reserve(trajectories.size());
    for (const Trajectory& t : trajectories) {
        KahanSum s;
        for (std::size_t i = start; i < k; ++i) s.add(t.values[i]);
        const double m = s.value() / static_cast<double>(tail);
        tail_means.push_back(m);
        mean_acc.add(m);
    }
    const double point =
        mean_acc.value() / static_cast<double>(tail_means.size());

    KahanSum var_acc;
    for (double m : tail_means) var_acc.add((m - point) * (m - point));
    const double sd = std::sqrt(
        var_acc.value() / static_cast<double>(tail_means.size() - 1));

    // Least-squares slope of log B_n = n * value against n over the pooled
    // tail points of every trajectory.
    KahanSum sx, sy;
    std::size_t npts = 0;
    for (const Trajectory& t : trajectories) {
        for (std::size_t i = start; i < k; ++i) {
            sx.add(static_cast<double>(cps[i]));
            sy.add(static_cast<double>(cps[i]) * t.values[i]);
            ++npts;
        }
    }
    const double xbar = sx.value() / static_cast<double>(npts);
    const double ybar = sy.value() / static_cast<double>(npts);
    KahanSum sxy, sxx;
    for (const Trajectory& t : trajectories) {
        for (std::size_t i = start; i < k; ++i) {
            const double dx = static_cast<double>(cps[i]) - xbar;
            const double dy =
                static_cast<double>(cps[i]) * t.values[i] - ybar;
            sxy.add(dx * dy);
            sxx.add(dx * dx);
        }
    }

    LimitEstimate est;
    est.point = point;
    est.halfwidth = 2.0 * sd;
    est.slope_check = sxx.value() > 0.0 ? sxy.value() / sxx.value() : 0.0;
    return est;
}

std::vector<std::pair<std::size_t, double>> posterior_logdensity_rate(
    const ModelSpec& model, const TrueProcess& process,
    const ParamPoint& theta, const std::vector<std::size_t>& checkpoints,
    std::uint64_t seed, double tol, const QuadratureSettings& settings) {
    validate_checkpoints(checkpoints);
    if (!strictly_inside(model.domain, theta))
        throw ConfigError(
            "posterior_logdensity_rate: theta must be strictly inside the "
            "model domain");
    const TimeSeries full = simulate_ar1(process, checkpoints.back(), seed);
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(checkpoints.size());
    for (std::size_t m : checkpoints) {
        const TimeSeries prefix = full.prefix(m);
        const double lm =
            converged_log_marginal(model, prefix, tol, settings, m);
        const double lp = model.log_prior(theta);
        const double ll = model.log_lik(prefix, theta);
        out.emplace_back(m, ((ll + lp) - lm) / static_cast<double>(m));
    }
    return out;
}

SelectionReport select_model(const TrueProcess& process,
                             const std::vector<ModelSpec>& models,
                             std::size_t n,
                             const std::vector<std::uint64_t>& seeds,
                             double tol,
                             const QuadratureSettings& settings) {
    if (models.empty())
        throw ConfigError("select_model: need at least one model");
    if (seeds.empty()) throw ConfigError("select_model: need at least one seed");
    if (n == 0) throw ConfigError("select_model: n must be positive");

    SelectionReport report;
    std::size_t best = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const EssInfResult r =
            ess_inf_h(models[i], closed_form_rate_fn(models[i], process),
                      kEssInfGridResolution);
        report.rates.emplace_back(models[i].name, r.h_theta);
        if (r.h_theta.value < report.rates[best].second.value) best = i;
    }
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (i == best) continue;
        const DivergenceRate& a = report.rates[best].second;
        const DivergenceRate& b = report.rates[i].second;
        if (std::abs(a.value - b.value) <=
            a.std_error + b.std_error + 1e-9)
            throw NumericError(
                "select_model: ambiguous, rates of " +
                report.rates[best].first + " and " + report.rates[i].first +
                " tie within combined uncertainty");
    }
    report.winner = report.rates[best].first;
    if (models.size() == 1) return report;

    // Pairwise empirical sign check: for h_i < h_j the limit of
    // (1/n) log B^(ij) is positive, so the observed sign at n should agree
    // for a majority of seeds.
    std::vector<std::vector<double>> lm(models.size());
    for (std::uint64_t seed : seeds) {
        const TimeSeries path = simulate_ar1(process, n, seed);
        for (std::size_t i = 0; i < models.size(); ++i)
            lm[i].push_back(
                converged_log_marginal(models[i], path, tol, settings, n));
    }
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = i + 1; j < models.size(); ++j) {
            const double gap =
                report.rates[j].second.value - report.rates[i].second.value;
            std::size_t agree = 0;
            for (std::size_t s = 0; s < seeds.size(); ++s) {
                const double logb = lm[i][s] - lm[j][s];
                if ((gap > 0.0 && logb > 0.0) || (gap < 0.0 && logb < 0.0))
                    ++agree;
            }
            const bool consistent = 2 * agree > seeds.size();
            report.signs_consistent = report.signs_consistent && consistent;
            report.sign_notes.push_back(
                report.rates[i].first + "/" + report.rates[j].first + ": " +
                std::to_string(agree) + "/" + std::to_string(seeds.size()) +
                " seeds match the rate ordering");
        }
    }
    return report;
}

}  // namespace bflim
