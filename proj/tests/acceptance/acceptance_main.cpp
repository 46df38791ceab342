// Acceptance gate for the release: exercises every configured pass condition
// end to end and prints exactly one PASS/FAIL line per criterion. Exit code
// 0 only when all criteria hold. Numeric tolerances are pinned here, next to
// the checks they gate.

#include <fcntl.h>
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bflim/ar1.hpp"
#include "bflim/assumptions.hpp"
#include "bflim/asymptotics.hpp"
#include "bflim/common.hpp"
#include "bflim/config.hpp"
#include "bflim/klrate.hpp"
#include "bflim/model.hpp"
#include "bflim/quadrature.hpp"
#include "bflim/rng.hpp"
#include "bflim/runner.hpp"
#include "fixture_cases.hpp"

namespace fs = std::filesystem;
using namespace bflim;

namespace {

// Routes stdout to /dev/null for the lifetime of the object; the table a
// subcommand prints would otherwise interleave with the criterion lines.
class StdoutSilencer {
  public:
    StdoutSilencer() {
        std::fflush(stdout);
        saved_ = dup(1);
        const int null_fd = open("/dev/null", O_WRONLY);
        dup2(null_fd, 1);
        close(null_fd);
    }
    ~StdoutSilencer() {
        std::fflush(stdout);
        dup2(saved_, 1);
        close(saved_);
    }

  private:
    int saved_ = -1;
};

bool report(int index, bool ok, const std::string& detail) {
    std::printf("%s criterion-%d: %s\n", ok ? "PASS" : "FAIL", index,
                detail.c_str());
    std::fflush(stdout);
    return ok;
}

bool guarded(int index, const std::function<bool()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        return report(index, false, std::string("unexpected error: ") + e.what());
    }
}

std::vector<ModelSpec> suite_models(const ExperimentConfig& cfg) {
    std::vector<ModelSpec> models;
    for (const ModelConfig& mc : cfg.models) models.push_back(build_model(mc));
    return models;
}

QuadratureSettings suite_settings(const ExperimentConfig& cfg) {
    QuadratureSettings s;
    s.rule = cfg.quadrature.rule;
    s.max_resolution = cfg.quadrature.max_resolution;
    s.threads = 1;
    return s;
}

// Final per-seed (1/n) log B_n values of a two-model suite.
std::vector<double> suite_finals(const ExperimentConfig& cfg) {
    const std::vector<ModelSpec> models = suite_models(cfg);
    const QuadratureSettings settings = suite_settings(cfg);
    std::vector<double> finals;
    finals.reserve(cfg.seeds.size());
    for (std::uint64_t seed : cfg.seeds) {
        const Trajectory t =
            trajectory(cfg.process, models[0], models[1], cfg.checkpoints,
                       seed, cfg.quadrature.tol, settings);
        finals.push_back(t.values.back());
    }
    return finals;
}

std::size_t count_within(const std::vector<double>& values, double center,
                         double tol) {
    std::size_t hits = 0;
    for (double v : values)
        if (std::fabs(v - center) <= tol) ++hits;
    return hits;
}

std::string ratio(std::size_t hits, std::size_t total) {
    return std::to_string(hits) + "/" + std::to_string(total);
}

bool limit_criterion(int index, const char* suite, double center, double tol,
                     const char* label) {
    const ExperimentConfig cfg = builtin_suite(suite);
    const std::vector<double> finals = suite_finals(cfg);
    const std::size_t hits = count_within(finals, center, tol);
    const bool ok = 20 * hits >= 18 * finals.size() && finals.size() >= 20;
    return report(index, ok,
                  std::string(label) + ": " + ratio(hits, finals.size()) +
                      " paths at n=" + std::to_string(cfg.checkpoints.back()) +
                      " within " + fmt17(tol) + " of " + fmt17(center));
}

bool criterion1() {
    return limit_criterion(
        1, "paper-stationary-vs-nonstationary", 1.0 / 6.0, 0.02,
        "stationary-vs-explosive Bayes factor rate, known noise scale");
}

bool criterion2() {
    return limit_criterion(
        2, "paper-unknown-sigma", 1.0 / 6.0, 0.03,
        "stationary-vs-explosive Bayes factor rate, free noise scale");
}

bool criterion3() {
    return limit_criterion(3, "nested-both-correct", 0.0, 0.01,
                           "nested pair with a common true parameter");
}

bool criterion4() {
    const ExperimentConfig cfg = builtin_suite("paper-stationary-vs-nonstationary");
    const ModelSpec m1 = build_model(cfg.models[0]);
    const QuadratureSettings settings = suite_settings(cfg);
    const std::size_t n = cfg.checkpoints.back();
    const double thetas[] = {0.0, 0.25, 0.75};

    std::string detail = "posterior log-density rate at n=" + std::to_string(n);
    bool ok = true;
    for (double theta : thetas) {
        const double target =
            -(theta - cfg.process.rho0) * (theta - cfg.process.rho0) /
            (2.0 * (1.0 - cfg.process.rho0 * cfg.process.rho0));
        std::size_t hits = 0;
        for (std::uint64_t seed : cfg.seeds) {
            const auto rows = posterior_logdensity_rate(
                m1, cfg.process, ParamPoint::d1(theta), {n}, seed,
                cfg.quadrature.tol, settings);
            if (std::fabs(rows.front().second - target) <= 0.02) ++hits;
        }
        ok = ok && 20 * hits >= 18 * cfg.seeds.size();
        detail += "; theta=" + fmt17(theta) + ": " +
                  ratio(hits, cfg.seeds.size()) + " within 0.02 of " +
                  fmt17(target);
    }
    return report(4, ok, detail);
}

bool criterion5() {
    const ExperimentConfig cfg = builtin_suite("paper-stationary-vs-nonstationary");
    const ModelSpec probe = make_ar1_model(
        "kl-probe", make_domain1(Interval{-1.0, 1.0, true, true}),
        SigmaSpec::over(Interval{0.1, 5.0}), PriorSpec{});
    std::vector<ParamPoint> thetas;
    for (double s : cfg.kl.sigma_probes)
        for (double r : cfg.kl.rho_probes) thetas.push_back(ParamPoint::d2(r, s));
    const std::vector<KlTableRow> rows =
        kl_probe_rows(probe, cfg.process, thetas, cfg.kl.n, cfg.kl.replications,
                      cfg.kl.seed);
    std::size_t ok_rows = 0;
    for (const KlTableRow& row : rows)
        if (row.has_closed_form && std::fabs(row.gap_in_se) <= 3.0) ++ok_rows;
    const bool ok =
        rows.size() >= 25 &&
        static_cast<double>(ok_rows) >= 0.95 * static_cast<double>(rows.size());
    return report(5, ok,
                  "Monte Carlo divergence rates: " +
                      ratio(ok_rows, rows.size()) +
                      " probes within 3 standard errors of closed form at n=" +
                      std::to_string(cfg.kl.n));
}

bool criterion6() {
    const fs::path path = fs::path(BFLIM_FIXTURE_DIR) / "marginal_oracle.txt";
    std::ifstream in(path);
    if (!in) return report(6, false, "cannot open " + path.string());
    std::map<std::string, double> oracle;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string id;
        std::size_t n = 0;
        std::uint64_t seed = 0;
        double value = 0.0;
        if (row >> id >> n >> seed >> value) oracle[id] = value;
    }

    QuadratureSettings settings;
    settings.threads = 1;
    std::size_t good = 0;
    std::size_t total = 0;
    double worst = 0.0;
    for (const bflim_fixtures::FixtureCase& fc :
         bflim_fixtures::marginal_fixture_cases()) {
        const auto it = oracle.find(fc.id);
        if (it == oracle.end())
            return report(6, false, "fixture " + fc.id + " missing from " +
                                        path.string());
        ++total;
        const ModelSpec model = build_model(fc.model);
        const TimeSeries series = simulate_ar1(fc.process, fc.n, fc.seed);
        const double got = refine_until(model, series, 1e-7, settings).value;
        const double rel = std::fabs(got - it->second) / std::fabs(it->second);
        worst = std::max(worst, rel);
        if (rel <= 1e-8) ++good;
    }
    const bool ok = good >= 10 && total >= 10;
    return report(6, ok,
                  "converged marginals vs brute-force oracle: " +
                      ratio(good, total) + " within 1e-8 relative (worst " +
                      fmt17(worst) + ")");
}

std::vector<ModelSpec> probe_zoo() {
    std::vector<ModelSpec> zoo;
    zoo.push_back(make_ar1_model("Z1",
                                 make_domain1(Interval{-1.0, 1.0, true, true}),
                                 SigmaSpec::fixed_at(1.0), PriorSpec{}));
    zoo.push_back(make_ar1_model(
        "Z2",
        make_domain1(std::vector<Interval>{Interval{-1.5, -1.0},
                                           Interval{1.0, 1.5}}),
        SigmaSpec::fixed_at(1.0), PriorSpec{}));
    zoo.push_back(make_ar1_model("Zs",
                                 make_domain1(Interval{-1.0, 1.0, true, true}),
                                 SigmaSpec::over(Interval{0.1, 5.0}),
                                 PriorSpec{}));
    PriorSpec normal;
    normal.kind = PriorSpec::Kind::trunc_normal_rho;
    normal.mu = 0.2;
    normal.sd = 0.5;
    zoo.push_back(make_ar1_model("Zn",
                                 make_domain1(Interval{-1.0, 1.0, true, true}),
                                 SigmaSpec::fixed_at(1.0), normal));
    return zoo;
}

bool criterion7() {
    const std::vector<ModelSpec> zoo = probe_zoo();
    const TrueProcess process{0.5, 1.0};
    constexpr std::uint64_t kSeed = 20260814;
    constexpr std::size_t kProbes = 1000;

    std::size_t residual_ok = 0;
    std::size_t prior_ok = 0;
    double worst_residual = 0.0;
    for (std::size_t k = 0; k < kProbes; ++k) {
        const ModelSpec& model = zoo[k % zoo.size()];
        const std::size_t n =
            100 + static_cast<std::size_t>(rng::word(kSeed, 1, k) % 1901);
        const TimeSeries series =
            simulate_ar1(process, n, rng::word(kSeed, 2, k));

        const std::size_t b = rng::word(kSeed, 3, k) % model.domain.boxes.size();
        const Box& box = model.domain.boxes[b];
        ParamPoint theta;
        theta.dims = model.domain.dims;
        for (int d = 0; d < model.domain.dims; ++d) {
            const auto di = static_cast<std::size_t>(d);
            const double u = rng::uniform01(
                rng::word(kSeed, 4 + static_cast<std::uint64_t>(d), k));
            theta.coord[di] =
                box.iv[di].lo + (0.05 + 0.9 * u) * box.iv[di].width();
        }

        const std::array<std::size_t, 2> res =
            model.domain.dims == 1 ? std::array<std::size_t, 2>{32, 32}
                                   : std::array<std::size_t, 2>{16, 16};
        const QuadratureGrid grid =
            make_grid(model.domain, QuadRule::gauss_legendre, res);
        const double residual =
            log_marginal_identity_check(model, series, theta, grid);
        worst_residual = std::max(worst_residual, residual);
        if (residual <= 1e-10) ++residual_ok;
        // At n = 10^5 the prior contributes (1/n) log pi(theta); the
        // criterion caps its magnitude at 1e-4, i.e. |log pi| <= 10.
        if (std::fabs(model.log_prior(theta)) <= 10.0) ++prior_ok;
    }
    const bool ok = residual_ok == kProbes && prior_ok == kProbes;
    return report(7, ok,
                  "factorization identity: " + ratio(residual_ok, kProbes) +
                      " residuals <= 1e-10 (worst " + fmt17(worst_residual) +
                      "), " + ratio(prior_ok, kProbes) +
                      " prior terms <= 1e-4 at n=100000");
}

bool criterion8() {
    const TrueProcess process{0.5, 1.0};
    const Ar1ClosedForms forms = Ar1ClosedForms::from(process);
    std::vector<std::string> failures;

    {
        const ModelSpec m1 = probe_zoo()[0];
        const ModelSpec m2 = probe_zoo()[1];
        const std::vector<std::size_t> cps{100, 316, 1000};
        for (std::uint64_t seed : {3ULL, 4ULL}) {
            const Trajectory fwd =
                trajectory(process, m1, m2, cps, seed, 1e-3);
            const Trajectory rev =
                trajectory(process, m2, m1, cps, seed, 1e-3);
            bool flipped = fwd.theory_limit == -rev.theory_limit;
            for (std::size_t i = 0; i < cps.size(); ++i)
                flipped = flipped && fwd.values[i] == -rev.values[i];
            if (!flipped) failures.push_back("antisymmetry");
        }
    }

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const TimeSeries series = simulate_ar1(process, 10000, seed);
        const ErgodicDiagnostics d = ergodic_diagnostics(series);
        if (d.lag1 != process.rho0 * d.mean_sq + d.noise_cross)
            failures.push_back("ergodic decomposition");
    }

    {
        bool nonneg = true;
        for (int i = -99; i <= 99; ++i) {
            const double rho = static_cast<double>(i) / 100.0 * 1.5;
            if (h1_closed(rho, forms).value < 0.0) nonneg = false;
            for (double sigma : {0.25, 0.5, 1.0, 2.0, 4.0}) {
                const double h = h_sigma_closed(rho, sigma, forms).value;
                if (h < 0.0) nonneg = false;
                if ((rho != 0.5 || sigma != 1.0) && !(h > 0.0)) nonneg = false;
            }
        }
        if (!nonneg) failures.push_back("rate nonnegativity");
    }

    {
        auto inf_over = [&](const ModelSpec& m) {
            return ess_inf_h(m, closed_form_rate_fn(m, process), 256)
                .h_theta.value;
        };
        const ModelSpec narrow =
            make_ar1_model("narrow", make_domain1(Interval{0.75, 0.9}),
                           SigmaSpec::fixed_at(1.0), PriorSpec{});
        const ModelSpec mid =
            make_ar1_model("mid", make_domain1(Interval{0.6, 0.9}),
                           SigmaSpec::fixed_at(1.0), PriorSpec{});
        const std::vector<ModelSpec> zoo = probe_zoo();
        const ModelSpec m2_free = make_ar1_model(
            "M2s", make_domain1(zoo[1].domain.boxes[0].iv[0]),
            SigmaSpec::over(Interval{0.1, 5.0}), PriorSpec{});
        const double a = inf_over(narrow);
        const double b = inf_over(mid);
        const double c = inf_over(zoo[0]);
        if (!(a >= b && b >= c))
            failures.push_back("ess-inf nesting");
        // Freeing sigma enlarges the candidate set, so the infimum drops.
        const ModelSpec m2_fixed =
            make_ar1_model("M2f", make_domain1(zoo[1].domain.boxes[0].iv[0]),
                           SigmaSpec::fixed_at(1.0), PriorSpec{});
        if (!(inf_over(m2_free) <= inf_over(m2_fixed)))
            failures.push_back("ess-inf sigma relaxation");
    }

    for (const ModelSpec& m : probe_zoo()) {
        const std::array<std::size_t, 2> res =
            m.domain.dims == 1 ? std::array<std::size_t, 2>{256, 256}
                               : std::array<std::size_t, 2>{64, 64};
        const QuadratureGrid grid =
            make_grid(m.domain, QuadRule::gauss_legendre, res);
        const double mass = std::exp(log_weighted_sum(grid, m.log_prior, 1));
        if (std::fabs(mass - 1.0) > 1e-6)
            failures.push_back("prior normalization (" + m.name + ")");
    }

    std::string detail =
        "trajectory antisymmetry, ergodic decomposition, rate nonnegativity, "
        "ess-inf nesting, prior normalization";
    if (!failures.empty()) {
        detail += "; failed:";
        for (const std::string& f : failures) detail += " " + f;
    }
    return report(8, failures.empty(), detail);
}

bool criterion9() {
    bool ok = true;
    std::string detail = "assumption diagnostics all OK on";
    for (const char* suite :
         {"paper-stationary-vs-nonstationary", "paper-unknown-sigma"}) {
        const ExperimentConfig cfg = builtin_suite(suite);
        const fs::path out =
            fs::temp_directory_path() / (std::string("bflim-acceptance-") + suite);
        fs::remove_all(out);
        RunOptions opts;
        opts.out_dir = out.string();
        opts.threads = 1;
        int rc = 1;
        {
            StdoutSilencer mute;
            rc = cmd_check_assumptions(cfg, opts);
        }
        ok = ok && rc == 0;
        detail += std::string(" ") + suite + "=" +
                  (rc == 0 ? "pass" : "fail");
    }
    return report(9, ok, detail);
}

}  // namespace

int main() {
    bool all = true;
    all = guarded(1, criterion1) && all;
    all = guarded(2, criterion2) && all;
    all = guarded(3, criterion3) && all;
    all = guarded(4, criterion4) && all;
    all = guarded(5, criterion5) && all;
    all = guarded(6, criterion6) && all;
    all = guarded(7, criterion7) && all;
    all = guarded(8, criterion8) && all;
    all = guarded(9, criterion9) && all;
    std::printf("%s\n", all ? "acceptance: all criteria passed"
                            : "acceptance: FAILURES PRESENT");
    return all ? 0 : 1;
}
