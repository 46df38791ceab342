#include <cmath>
#include <vector>

#include "bflim/ar1.hpp"
#include "bflim/common.hpp"
#include "bflim/domain.hpp"
#include "bflim/model.hpp"
#include "bflim/quadrature.hpp"
#include "doctest.h"

using namespace bflim;

namespace {

double prior_mass(const ModelSpec& model, std::size_t resolution) {
    const QuadratureGrid grid =
        make_grid(model.domain, QuadRule::gauss_legendre, {resolution, resolution});
    return std::exp(log_weighted_sum(grid, model.log_prior));
}

}  // namespace

TEST_CASE("interval membership honours open endpoints") {
    const Interval closed{-1.0, 1.0, false, false};
    const Interval open{-1.0, 1.0, true, true};
    CHECK(closed.contains(-1.0));
    CHECK(closed.contains(1.0));
    CHECK(!open.contains(-1.0));
    CHECK(!open.contains(1.0));
    CHECK(open.contains(0.999999));
}

TEST_CASE("domain measure adds up over a union") {
    const ParameterDomain d = make_domain1(
        std::vector<Interval>{Interval{-1.5, -1.0}, Interval{1.0, 1.5}});
    CHECK(d.measure() == doctest::Approx(1.0).epsilon(1e-15));
    const ParameterDomain d2 =
        make_domain2(Interval{-1.0, 1.0}, Interval{0.1, 5.0});
    CHECK(d2.measure() == doctest::Approx(2.0 * 4.9).epsilon(1e-15));
}

TEST_CASE("domain validation rejects overlapping boxes") {
    CHECK_THROWS_AS(
        make_domain1(
            std::vector<Interval>{Interval{-1.0, 0.5}, Interval{0.0, 1.0}}),
        ConfigError);
}

TEST_CASE("domain validation rejects empty and inverted intervals") {
    CHECK_THROWS_AS(make_domain1(Interval{0.5, 0.5}).validate(), ConfigError);
    CHECK_THROWS_AS(make_domain1(Interval{1.0, -1.0}).validate(), ConfigError);
    CHECK_THROWS_AS(ParameterDomain{}.validate(), ConfigError);
}

TEST_CASE("domain contains distinguishes union pieces") {
    const ParameterDomain d = make_domain1(
        std::vector<Interval>{Interval{-1.5, -1.0}, Interval{1.0, 1.5}});
    CHECK(d.contains(ParamPoint::d1(1.2)));
    CHECK(d.contains(ParamPoint::d1(-1.2)));
    CHECK(!d.contains(ParamPoint::d1(0.0)));
    CHECK(!d.contains(ParamPoint::d1(1.7)));
}

TEST_CASE("uniform priors integrate to 1") {
    const ModelSpec m1 =
        make_ar1_model("M1", make_domain1(Interval{-1.0, 1.0, true, true}),
                       SigmaSpec::fixed_at(1.0), PriorSpec{});
    CHECK(prior_mass(m1, 64) == doctest::Approx(1.0).epsilon(1e-6));

    const ModelSpec m2 = make_ar1_model(
        "M2",
        make_domain1(std::vector<Interval>{Interval{-1.5, -1.0}, Interval{1.0, 1.5}}),
        SigmaSpec::fixed_at(1.0), PriorSpec{});
    CHECK(prior_mass(m2, 64) == doctest::Approx(1.0).epsilon(1e-6));

    const ModelSpec m1s =
        make_ar1_model("M1s", make_domain1(Interval{-1.0, 1.0, true, true}),
                       SigmaSpec::over(Interval{0.1, 5.0}), PriorSpec{});
    CHECK(prior_mass(m1s, 64) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("truncated normal prior integrates to 1 and has normal shape") {
    PriorSpec prior;
    prior.kind = PriorSpec::Kind::trunc_normal_rho;
    prior.mu = 0.2;
    prior.sd = 0.5;
    const ModelSpec m =
        make_ar1_model("M1", make_domain1(Interval{-1.0, 1.0, true, true}),
                       SigmaSpec::fixed_at(1.0), prior);
    CHECK(prior_mass(m, 256) == doctest::Approx(1.0).epsilon(1e-6));

    // Log-density differences must match the untruncated normal exactly;
    // truncation only shifts the normalizer.
    const double a = m.log_prior(ParamPoint::d1(0.2));
    const double b = m.log_prior(ParamPoint::d1(0.7));
    const double expect = 0.5 * (0.5 / 0.5) * (0.5 / 0.5);
    CHECK(a - b == doctest::Approx(expect).epsilon(1e-12));
    CHECK(m.log_prior(ParamPoint::d1(1.5)) == kNegInf);
}

TEST_CASE("truncated normal over a sigma-free domain is uniform in sigma") {
    PriorSpec prior;
    prior.kind = PriorSpec::Kind::trunc_normal_rho;
    prior.mu = 0.0;
    prior.sd = 1.0;
    const ModelSpec m =
        make_ar1_model("M1s", make_domain1(Interval{-1.0, 1.0, true, true}),
                       SigmaSpec::over(Interval{0.5, 2.0}), prior);
    CHECK(prior_mass(m, 128) == doctest::Approx(1.0).epsilon(1e-6));
    const double lo = m.log_prior(ParamPoint::d2(0.3, 0.6));
    const double hi = m.log_prior(ParamPoint::d2(0.3, 1.9));
    CHECK(lo == hi);
}

TEST_CASE("log_phi_interval matches erfc arithmetic") {
    const auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    CHECK(log_phi_interval(-1.0, 1.0) ==
          doctest::Approx(std::log(phi(1.0) - phi(-1.0))).epsilon(1e-13));
    CHECK(log_phi_interval(-40.0, -38.0) < -700.0);
    CHECK(std::isfinite(log_phi_interval(-40.0, -38.0)));
    CHECK_THROWS_AS(log_phi_interval(1.0, 1.0), ConfigError);
}

TEST_CASE("model domain dimension follows the sigma treatment") {
    const ModelSpec fixed =
        make_ar1_model("a", make_domain1(Interval{-1.0, 1.0}),
                       SigmaSpec::fixed_at(2.0), PriorSpec{});
    CHECK(fixed.domain.dims == 1);
    REQUIRE(fixed.family.has_value());
    CHECK(fixed.family->sigma_known);
    CHECK(fixed.family->sigma_fixed == 2.0);

    const ModelSpec free =
        make_ar1_model("b", make_domain1(Interval{-1.0, 1.0}),
                       SigmaSpec::over(Interval{0.1, 5.0}), PriorSpec{});
    CHECK(free.domain.dims == 2);
    REQUIRE(free.family.has_value());
    CHECK(!free.family->sigma_known);
}

TEST_CASE("make_ar1_model rejects sigma ranges touching 0") {
    CHECK_THROWS_AS(make_ar1_model("bad", make_domain1(Interval{-1.0, 1.0}),
                                   SigmaSpec::over(Interval{0.0, 5.0}),
                                   PriorSpec{}),
                    ConfigError);
    CHECK_THROWS_AS(make_ar1_model("bad", make_domain1(Interval{-1.0, 1.0}),
                                   SigmaSpec::fixed_at(0.0), PriorSpec{}),
                    ConfigError);
}

TEST_CASE("time series caches stats identical to prefix recomputation") {
    const TrueProcess p{0.5, 1.0};
    const TimeSeries s = simulate_ar1(p, 5000, 31);
    const SuffStats full = s.prefix_stats(s.n());
    CHECK(s.stats().s_xx == full.s_xx);
    CHECK(s.stats().s_xy == full.s_xy);
    CHECK(s.stats().s_yy == full.s_yy);
    CHECK(s.stats().n == full.n);

    const TimeSeries head = s.prefix(1200);
    const SuffStats direct = s.prefix_stats(1200);
    CHECK(head.stats().s_xx == direct.s_xx);
    CHECK(head.stats().s_xy == direct.s_xy);
    CHECK(head.stats().s_yy == direct.s_yy);
    CHECK(head.seed() == s.seed());
}

TEST_CASE("time series rejects out-of-range prefixes and bad values") {
    const TrueProcess p{0.5, 1.0};
    const TimeSeries s = simulate_ar1(p, 10, 1);
    CHECK_THROWS_AS(s.prefix_stats(11), ConfigError);
    CHECK_THROWS_AS(s.prefix(11), ConfigError);
    std::vector<double> bad{1.0, std::nan("")};
    CHECK_THROWS_AS(TimeSeries(bad, 0, p), ConfigError);
}
