#include <cmath>
#include <vector>

#include "bflim/ar1.hpp"
#include "bflim/klrate.hpp"
#include "bflim/model.hpp"
#include "doctest.h"

using namespace bflim;

namespace {

const TrueProcess kProcess{0.5, 1.0};

ModelSpec stationary(SigmaSpec sigma = SigmaSpec::fixed_at(1.0)) {
    return make_ar1_model("M1", make_domain1(Interval{-1.0, 1.0, true, true}),
                          sigma, PriorSpec{});
}

ModelSpec explosive(SigmaSpec sigma = SigmaSpec::fixed_at(1.0)) {
    return make_ar1_model(
        "M2",
        make_domain1(std::vector<Interval>{Interval{-1.5, -1.0},
                                           Interval{1.0, 1.5}}),
        sigma, PriorSpec{});
}

}  // namespace

TEST_CASE("closed_form_rate substitutes the model's noise scale") {
    const Ar1ClosedForms forms = Ar1ClosedForms::from(kProcess);
    const ModelSpec m1 = stationary();
    for (double rho : {-0.8, -0.2, 0.0, 0.5, 0.9}) {
        const DivergenceRate r =
            closed_form_rate(m1, ParamPoint::d1(rho), kProcess);
        // The general formula reduces to h1 at sigma = sigma0 up to
        // rounding, not bit for bit.
        CHECK(r.value ==
              doctest::Approx(h1_closed(rho, forms).value).epsilon(1e-14));
        CHECK(r.std_error == 0.0);
        CHECK(r.method == kClosedForm);
    }

    const ModelSpec wide = stationary(SigmaSpec::fixed_at(2.0));
    CHECK(closed_form_rate(wide, ParamPoint::d1(0.5), kProcess).value ==
          h_sigma_closed(0.5, 2.0, forms).value);

    const ModelSpec free = stationary(SigmaSpec::over(Interval{0.1, 5.0}));
    const ParamPoint theta = ParamPoint::d2(0.75, 1.5);
    CHECK(closed_form_rate(free, theta, kProcess).value ==
          h_sigma_closed(0.75, 1.5, forms).value);
    CHECK(closed_form_rate_fn(free, kProcess)(theta).value ==
          h_sigma_closed(0.75, 1.5, forms).value);

    ModelSpec bare = stationary();
    bare.family.reset();
    CHECK_THROWS_AS(closed_form_rate(bare, ParamPoint::d1(0.0), kProcess),
                    ConfigError);
    CHECK_THROWS_AS(closed_form_rate_fn(bare, kProcess), ConfigError);
}

TEST_CASE("kl_rate_mc is exactly zero at the true parameter") {
    const DivergenceRate r =
        kl_rate_mc(stationary(), ParamPoint::d1(0.5), kProcess, 100, 10, 42);
    CHECK(r.value == 0.0);
    CHECK(r.std_error == 0.0);
    CHECK(r.method == kMonteCarlo);
}

TEST_CASE("kl_rate_mc standard error shrinks like one over sqrt(R)") {
    const ModelSpec m = stationary();
    const ParamPoint theta = ParamPoint::d1(0.0);
    const double se16 = kl_rate_mc(m, theta, kProcess, 100, 16, 7).std_error;
    const double se64 = kl_rate_mc(m, theta, kProcess, 100, 64, 7).std_error;
    const double se256 = kl_rate_mc(m, theta, kProcess, 100, 256, 7).std_error;
    CHECK(se16 > 0.0);
    CHECK(se64 < se16);
    CHECK(se256 < se64);
    CHECK(se16 / se256 > 2.0);
    CHECK(se16 / se256 < 8.0);
}

TEST_CASE("kl_rate_mc agrees with the closed form within three sigma") {
    const ModelSpec m1 = stationary();
    const DivergenceRate mc1 =
        kl_rate_mc(m1, ParamPoint::d1(0.8), kProcess, 10000, 50, 1234);
    const double h1 = closed_form_rate(m1, ParamPoint::d1(0.8), kProcess).value;
    CHECK(std::abs(mc1.value - h1) <= 3.0 * mc1.std_error);

    const ModelSpec ms = stationary(SigmaSpec::over(Interval{0.1, 5.0}));
    const ParamPoint theta = ParamPoint::d2(0.75, 1.5);
    const DivergenceRate mc2 = kl_rate_mc(ms, theta, kProcess, 10000, 50, 77);
    const double h2 = closed_form_rate(ms, theta, kProcess).value;
    CHECK(std::abs(mc2.value - h2) <= 3.0 * mc2.std_error);
}

TEST_CASE("kl_rate_mc rejects malformed requests") {
    const ModelSpec m = stationary();
    CHECK_THROWS_AS(kl_rate_mc(m, ParamPoint::d1(0.0), kProcess, 99, 10, 1),
                    ConfigError);
    CHECK_THROWS_AS(kl_rate_mc(m, ParamPoint::d1(0.0), kProcess, 100, 1, 1),
                    ConfigError);
    CHECK_THROWS_AS(kl_rate_mc(m, ParamPoint::d1(1.2), kProcess, 100, 10, 1),
                    ConfigError);
}

TEST_CASE("ess_inf_h finds interior minima of the closed-form rate") {
    const ModelSpec m1 = stationary();
    const EssInfResult r1 = ess_inf_h(m1, closed_form_rate_fn(m1, kProcess), 256);
    CHECK(r1.h_theta.value <= 1e-12);
    CHECK(r1.argmin.rho() == doctest::Approx(0.5).epsilon(1e-7));

    const ModelSpec ms = stationary(SigmaSpec::over(Interval{0.1, 5.0}));
    const EssInfResult rs = ess_inf_h(ms, closed_form_rate_fn(ms, kProcess), 64);
    CHECK(rs.h_theta.value <= 1e-10);
    CHECK(rs.argmin.rho() == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(rs.argmin.sigma(0.0) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("ess_inf_h attains boundary minima at the unit root") {
    const Ar1ClosedForms forms = Ar1ClosedForms::from(kProcess);
    const ModelSpec m2 = explosive();
    const EssInfResult r2 = ess_inf_h(m2, closed_form_rate_fn(m2, kProcess), 256);
    CHECK(r2.h_theta.value ==
          doctest::Approx(h2_theta_closed(forms).value).epsilon(1e-9));
    CHECK(r2.argmin.rho() == doctest::Approx(1.0).epsilon(1e-9));

    const ModelSpec m2s = explosive(SigmaSpec::over(Interval{0.1, 5.0}));
    const EssInfResult rs = ess_inf_h(m2s, closed_form_rate_fn(m2s, kProcess), 64);
    CHECK(rs.h_theta.value ==
          doctest::Approx(h2_sigma_free_closed(forms).value).epsilon(1e-9));
    CHECK(rs.argmin.rho() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rs.argmin.sigma(0.0) ==
          doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-6));

    // Freeing the noise scale can only lower the infimum.
    CHECK(rs.h_theta.value < r2.h_theta.value);
}

TEST_CASE("ess_inf_h works on a near-degenerate sliver domain") {
    const ModelSpec m =
        make_ar1_model("sliver", make_domain1(Interval{0.3, 0.3 + 1e-12}),
                       SigmaSpec::fixed_at(1.0), PriorSpec{});
    const Ar1ClosedForms forms = Ar1ClosedForms::from(kProcess);
    const EssInfResult r = ess_inf_h(m, closed_form_rate_fn(m, kProcess), 64);
    CHECK(r.h_theta.value ==
          doctest::Approx(h1_closed(0.3, forms).value).epsilon(1e-9));
}

TEST_CASE("ess_inf_h flags minima invisible to its base grid") {
    const ModelSpec m =
        make_ar1_model("trap", make_domain1(Interval{0.0, 1.0}),
                       SigmaSpec::fixed_at(1.0), PriorSpec{});
    // A narrow well the 2-cell base scan (nodes 0.25 and 0.75) cannot see;
    // the 4x verification scan's node at 0.1875 lands inside it.
    const RateFn hidden_well = [](const ParamPoint& p) {
        const double rho = p.rho();
        const double v = (rho >= 0.165 && rho <= 0.215)
                             ? -1.0
                             : (rho - 0.9) * (rho - 0.9);
        return DivergenceRate{v, 0.0, kClosedForm};
    };
    CHECK_THROWS_WITH_AS(ess_inf_h(m, hidden_well, 2),
                         doctest::Contains("better basin"), NumericError);

    // A spike confined to the node itself leaves the within-cell search on a
    // flat plateau, so it drifts onto a cell edge that is not a domain edge.
    const RateFn spiked = [](const ParamPoint& p) {
        const double v = std::abs(p.rho() - 0.75) <= 1e-7 ? -1.0 : 0.5;
        return DivergenceRate{v, 0.0, kClosedForm};
    };
    CHECK_THROWS_WITH_AS(ess_inf_h(m, spiked, 2),
                         doctest::Contains("escapes its cell"), NumericError);

    CHECK_THROWS_AS(ess_inf_h(m, hidden_well, 0), ConfigError);
}

TEST_CASE("divergence_set_mass measures prior mass above a rate level") {
    const ModelSpec m1 = stationary();
    const RateFn rate1 = closed_form_rate_fn(m1, kProcess);
    CHECK(divergence_set_mass(m1, rate1, 0.0, 256) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(divergence_set_mass(m1, rate1, 1e9, 256) == 0.0);

    // On the explosive domain with a uniform prior, {h > h(1.25)} is the
    // union of (1.25, 1.5] and the whole negative box: 3/4 of the mass.
    const ModelSpec m2 = explosive();
    const RateFn rate2 = closed_form_rate_fn(m2, kProcess);
    const Ar1ClosedForms forms = Ar1ClosedForms::from(kProcess);
    const double level = h1_closed(1.25, forms).value;
    CHECK(divergence_set_mass(m2, rate2, level, 256) ==
          doctest::Approx(0.75).epsilon(0.01));

    CHECK_THROWS_AS(divergence_set_mass(m1, rate1, -0.1, 256), ConfigError);
    CHECK_THROWS_AS(divergence_set_mass(m1, rate1, 0.0, 0), ConfigError);
}
