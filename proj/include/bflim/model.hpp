#pragma once

#include <functional>
#include <optional>
#include <string>

#include "bflim/domain.hpp"
#include "bflim/process.hpp"

namespace bflim {

// A divergence rate value with provenance. Closed-form values carry a zero
// standard error; Monte Carlo values carry their sampling error. (A Monte
// Carlo estimate can still be exactly 0 +- 0 when the integrand vanishes
// pathwise, so std_error = 0 does not by itself imply closed form.)
struct DivergenceRate {
    double value = 0.0;
    double std_error = 0.0;
    std::string method;
};

inline constexpr const char* kClosedForm = "closed_form";
inline constexpr const char* kMonteCarlo = "monte_carlo";

// Prior over the candidate set. Either uniform on the whole domain, or a
// normal density in rho truncated to the domain (uniform in sigma when the
// domain is 2-dimensional). Both are normalized to integrate to 1.
struct PriorSpec {
    enum class Kind { uniform, trunc_normal_rho };
    Kind kind = Kind::uniform;
    double mu = 0.0;
    double sd = 1.0;
};

// Noise-scale treatment for an AR(1) model: either a fixed known value or a
// free parameter ranging over an interval bounded away from 0.
struct SigmaSpec {
    bool known = true;
    double fixed = 1.0;
    Interval range{};

    static SigmaSpec fixed_at(double s) { return SigmaSpec{true, s, {}}; }
    static SigmaSpec over(Interval r) { return SigmaSpec{false, 1.0, r}; }
};

// Marks a model as Gaussian AR(1), which unlocks the closed-form divergence
// rates and the likelihood-ratio identities.
struct Ar1Family {
    bool sigma_known = true;
    double sigma_fixed = 1.0;
};

// A candidate model: a parameter domain, a normalized log prior density on
// it, and a log likelihood for a full observed path.
struct ModelSpec {
    std::string name;
    ParameterDomain domain;
    PriorSpec prior;
    std::optional<Ar1Family> family;

    std::function<double(const ParamPoint&)> log_prior;
    std::function<double(const TimeSeries&, const ParamPoint&)> log_lik;
};

// Builds a Gaussian AR(1) model. rho_domain must be 1-dimensional; if sigma
// is free, its range becomes the second coordinate of the model domain and
// must stay strictly above 0.
ModelSpec make_ar1_model(std::string name, const ParameterDomain& rho_domain,
                         const SigmaSpec& sigma, PriorSpec prior);

// Log of the standard normal cdf difference Phi(b) - Phi(a), a < b,
// evaluated via erfc for the truncated-normal normalizer.
double log_phi_interval(double a, double b);

}  // namespace bflim
