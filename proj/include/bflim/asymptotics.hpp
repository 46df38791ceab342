#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bflim/klrate.hpp"
#include "bflim/model.hpp"
#include "bflim/quadrature.hpp"

namespace bflim {

// One growing realization scored by two models: the sequence
// (1/n) log B_n at each checkpoint, with the predicted limit
// h2(Theta_2) - h1(Theta_1) attached.
struct Trajectory {
    std::vector<std::size_t> checkpoints;
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::pair<std::string, std::string> model_pair;
    double theory_limit = 0.0;
};

// Summary of a bundle of trajectories sharing checkpoints: point is the
// across-trajectory mean of tail means, halfwidth twice the
// across-trajectory standard deviation, slope_check the least-squares slope
// of the unnormalized log B_n against n over the pooled tail (it should
// reproduce point when log B_n grows linearly).
struct LimitEstimate {
    double point = 0.0;
    double halfwidth = 0.0;
    double slope_check = 0.0;
};

// Simulates one path at the final checkpoint length and scores each prefix
// under both models with converged marginals. theory_limit comes from the
// closed-form essential infima when both models are AR(1) families, NaN
// otherwise. Marginal failures are rethrown with the checkpoint attached.
Trajectory trajectory(const TrueProcess& process, const ModelSpec& m1,
                      const ModelSpec& m2,
                      const std::vector<std::size_t>& checkpoints,
                      std::uint64_t seed, double tol = 1e-4,
                      const QuadratureSettings& settings = {});

LimitEstimate fit_limit(const std::vector<Trajectory>& trajectories,
                        double tail_fraction = 0.25);

// (1/n) log posterior density at theta along the same growing realization:
// ((log_lik + log_prior) - log m) / n per checkpoint. theta must lie
// strictly inside the model domain.
std::vector<std::pair<std::size_t, double>> posterior_logdensity_rate(
    const ModelSpec& model, const TrueProcess& process,
    const ParamPoint& theta, const std::vector<std::size_t>& checkpoints,
    std::uint64_t seed, double tol = 1e-4,
    const QuadratureSettings& settings = {});

// Picks the model with the smallest essential infimum of the closed-form
// rate, and cross-checks the ordering against empirical pairwise Bayes
// factor signs at sample size n over the given seeds. A tie in the rates
// within combined uncertainty is ambiguous and raises NumericError (the
// limit law cannot separate the models).
struct SelectionReport {
    std::string winner;
    std::vector<std::pair<std::string, DivergenceRate>> rates;
    bool signs_consistent = true;
    std::vector<std::string> sign_notes;
};

SelectionReport select_model(const TrueProcess& process,
                             const std::vector<ModelSpec>& models,
                             std::size_t n,
                             const std::vector<std::uint64_t>& seeds,
                             double tol = 1e-4,
                             const QuadratureSettings& settings = {});

}  // namespace bflim
