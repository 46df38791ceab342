// Regenerates tests/fixtures/marginal_oracle.txt: brute-force reference
// values for log m(X | model) on the cases in tests/fixture_cases.hpp.
//
// The integrator here is deliberately primitive and shares no code with the
// production quadrature: a flat midpoint Riemann sum over about 10^6 nodes,
// a per-node O(n) likelihood loop without sufficient statistics, plain
// long-double accumulation, and a two-pass log-sum-exp. Agreement between
// this and refine_until is what the golden-fixture acceptance criterion
// certifies.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "bflim/ar1.hpp"
#include "bflim/common.hpp"
#include "fixture_cases.hpp"

namespace {

constexpr std::size_t kTotalNodes = 1000000;

long double loglik_direct(const std::vector<double>& x, long double rho,
                          long double sigma) {
    long double ss = 0.0L;
    long double prev = 0.0L;
    for (double xt : x) {
        const long double r = static_cast<long double>(xt) - rho * prev;
        ss += r * r;
        prev = xt;
    }
    const long double n = static_cast<long double>(x.size());
    const long double two_pi = 6.283185307179586476925286766559L;
    return -0.5L * n * std::log(two_pi * sigma * sigma) -
           ss / (2.0L * sigma * sigma);
}

long double phi_cdf(long double z) {
    return 0.5L * std::erfc(-z / std::sqrt(2.0L));
}

struct PriorDensity {
    bool uniform = true;
    long double log_const = 0.0L;
    long double mu = 0.0L;
    long double sd = 1.0L;
    long double log_norm = 0.0L;

    long double log_at(long double rho) const {
        if (uniform) return log_const;
        const long double z = (rho - mu) / sd;
        return -0.5L * z * z - log_norm;
    }
};

PriorDensity prior_for(const bflim::ModelConfig& mc) {
    PriorDensity p;
    long double width = 0.0L;
    for (const bflim::Interval& iv : mc.rho_intervals) {
        width += static_cast<long double>(iv.hi) - static_cast<long double>(iv.lo);
    }
    if (mc.prior.kind == bflim::PriorSpec::Kind::uniform) {
        p.uniform = true;
        p.log_const = -std::log(width);
        return p;
    }
    p.uniform = false;
    p.mu = mc.prior.mu;
    p.sd = mc.prior.sd;
    long double mass = 0.0L;
    for (const bflim::Interval& iv : mc.rho_intervals) {
        mass += phi_cdf((iv.hi - p.mu) / p.sd) - phi_cdf((iv.lo - p.mu) / p.sd);
    }
    const long double half_log_two_pi = 0.91893853320467274178032973640562L;
    p.log_norm = half_log_two_pi + std::log(p.sd) + std::log(mass);
    return p;
}

double oracle_log_marginal(const bflim_fixtures::FixtureCase& fc) {
    const bflim::TimeSeries series =
        bflim::simulate_ar1(fc.process, fc.n, fc.seed);
    const std::vector<double>& x = series.values();
    const long double sigma = fc.model.sigma.fixed;
    const PriorDensity prior = prior_for(fc.model);

    long double total_width = 0.0L;
    for (const bflim::Interval& iv : fc.model.rho_intervals) {
        total_width += static_cast<long double>(iv.hi) -
                       static_cast<long double>(iv.lo);
    }

    std::vector<long double> log_terms;
    log_terms.reserve(kTotalNodes + fc.model.rho_intervals.size());
    for (const bflim::Interval& iv : fc.model.rho_intervals) {
        const long double w = static_cast<long double>(iv.hi) -
                              static_cast<long double>(iv.lo);
        const auto nodes = static_cast<std::size_t>(std::llround(
            static_cast<double>(w / total_width) *
            static_cast<double>(kTotalNodes)));
        const long double h = w / static_cast<long double>(nodes);
        const long double logh = std::log(h);
        for (std::size_t j = 0; j < nodes; ++j) {
            const long double rho = static_cast<long double>(iv.lo) +
                                    (static_cast<long double>(j) + 0.5L) * h;
            log_terms.push_back(loglik_direct(x, rho, sigma) +
                                prior.log_at(rho) + logh);
        }
    }

    long double peak = log_terms.front();
    for (long double t : log_terms) peak = std::max(peak, t);
    long double sum = 0.0L;
    for (long double t : log_terms) sum += std::exp(t - peak);
    return static_cast<double>(peak + std::log(sum));
}

}  // namespace

int main(int argc, char** argv) {
    const std::string out_path =
        argc > 1 ? argv[1] : "tests/fixtures/marginal_oracle.txt";
    std::FILE* out = std::fopen(out_path.c_str(), "wb");
    if (out == nullptr) {
        std::fprintf(stderr, "cannot open %s for writing\n", out_path.c_str());
        return 2;
    }
    for (const bflim_fixtures::FixtureCase& fc :
         bflim_fixtures::marginal_fixture_cases()) {
        const double v = oracle_log_marginal(fc);
        std::fprintf(out, "%s %zu %llu %s\n", fc.id.c_str(), fc.n,
                     static_cast<unsigned long long>(fc.seed),
                     bflim::fmt17(v).c_str());
        std::fprintf(stderr, "%-28s %s\n", fc.id.c_str(),
                     bflim::fmt17(v).c_str());
    }
    std::fclose(out);
    return 0;
}
