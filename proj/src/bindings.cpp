// Python bindings for the bflim core. The surface mirrors the C++ API one
// to one: every function here delegates to the library without extra
// numerics, so python results match the CLI bit for bit.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bflim/ar1.hpp"
#include "bflim/assumptions.hpp"
#include "bflim/asymptotics.hpp"
#include "bflim/config.hpp"
#include "bflim/klrate.hpp"
#include "bflim/model.hpp"
#include "bflim/quadrature.hpp"
#include "bflim/runner.hpp"

namespace py = pybind11;
using namespace bflim;

namespace {

QuadratureGrid probe_grid(const ModelSpec& model, std::size_t resolution) {
    return make_grid(model.domain, QuadRule::gauss_legendre,
                     {resolution, resolution});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "Bayes factor limit laws for AR(1) model comparison: simulation, "
        "deterministic marginal quadrature, divergence rates and "
        "assumption diagnostics.";
    m.attr("__version__") = BFLIM_VERSION;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError",
                                         PyExc_ArithmeticError);

    py::class_<TrueProcess>(m, "TrueProcess")
        .def(py::init<double, double>(), py::arg("rho0") = 0.5,
             py::arg("sigma0") = 1.0)
        .def_readwrite("rho0", &TrueProcess::rho0)
        .def_readwrite("sigma0", &TrueProcess::sigma0)
        .def("validate", &TrueProcess::validate)
        .def("__repr__", [](const TrueProcess& p) {
            return "TrueProcess(rho0=" + fmt17(p.rho0) +
                   ", sigma0=" + fmt17(p.sigma0) + ")";
        });

    py::class_<Interval>(m, "Interval")
        .def(py::init<double, double, bool, bool>(), py::arg("lo"),
             py::arg("hi"), py::arg("open_lo") = false,
             py::arg("open_hi") = false)
        .def_readwrite("lo", &Interval::lo)
        .def_readwrite("hi", &Interval::hi)
        .def_readwrite("open_lo", &Interval::open_lo)
        .def_readwrite("open_hi", &Interval::open_hi)
        .def("width", &Interval::width)
        .def("contains", &Interval::contains, py::arg("x"))
        .def("__repr__", [](const Interval& iv) {
            return std::string(iv.open_lo ? "(" : "[") + fmt17(iv.lo) + ", " +
                   fmt17(iv.hi) + (iv.open_hi ? ")" : "]");
        });

    py::class_<ParamPoint>(m, "ParamPoint")
        .def_static("d1", &ParamPoint::d1, py::arg("rho"))
        .def_static("d2", &ParamPoint::d2, py::arg("rho"), py::arg("sigma"))
        .def_readonly("dims", &ParamPoint::dims)
        .def_property_readonly("rho", &ParamPoint::rho)
        .def("sigma", &ParamPoint::sigma, py::arg("fixed_sigma"))
        .def("coords",
             [](const ParamPoint& p) {
                 py::tuple t(p.dims);
                 for (int d = 0; d < p.dims; ++d)
                     t[static_cast<std::size_t>(d)] =
                         p.coord[static_cast<std::size_t>(d)];
                 return t;
             })
        .def("__repr__", [](const ParamPoint& p) {
            std::string s = "ParamPoint(rho=" + fmt17(p.coord[0]);
            if (p.dims == 2) s += ", sigma=" + fmt17(p.coord[1]);
            return s + ")";
        });

    py::class_<ParameterDomain>(m, "ParameterDomain")
        .def_readonly("dims", &ParameterDomain::dims)
        .def("contains", &ParameterDomain::contains, py::arg("theta"))
        .def("measure", &ParameterDomain::measure)
        .def("describe", &ParameterDomain::describe)
        .def("__repr__", &ParameterDomain::describe);

    m.def("make_domain1",
          py::overload_cast<Interval>(&make_domain1), py::arg("rho"));
    m.def("make_domain1",
          py::overload_cast<std::vector<Interval>>(&make_domain1),
          py::arg("rho_pieces"));
    m.def("make_domain2",
          py::overload_cast<Interval, Interval>(&make_domain2),
          py::arg("rho"), py::arg("sigma"));
    m.def("make_domain2",
          py::overload_cast<std::vector<Interval>, Interval>(&make_domain2),
          py::arg("rho_pieces"), py::arg("sigma"));

    py::class_<PriorSpec> prior(m, "PriorSpec");
    py::enum_<PriorSpec::Kind>(prior, "Kind")
        .value("uniform", PriorSpec::Kind::uniform)
        .value("trunc_normal_rho", PriorSpec::Kind::trunc_normal_rho);
    prior.def(py::init<>())
        .def_readwrite("kind", &PriorSpec::kind)
        .def_readwrite("mu", &PriorSpec::mu)
        .def_readwrite("sd", &PriorSpec::sd);
    m.def("uniform_prior", [] { return PriorSpec{}; });
    m.def(
        "normal_prior",
        [](double mu, double sd) {
            PriorSpec p;
            p.kind = PriorSpec::Kind::trunc_normal_rho;
            p.mu = mu;
            p.sd = sd;
            return p;
        },
        py::arg("mu"), py::arg("sd"));

    py::class_<SigmaSpec>(m, "SigmaSpec")
        .def_static("fixed_at", &SigmaSpec::fixed_at, py::arg("sigma"))
        .def_static("over", &SigmaSpec::over, py::arg("range"))
        .def_readonly("known", &SigmaSpec::known)
        .def_readonly("fixed", &SigmaSpec::fixed)
        .def_readonly("range", &SigmaSpec::range);

    py::class_<ModelSpec>(m, "Model")
        .def_readonly("name", &ModelSpec::name)
        .def_readonly("domain", &ModelSpec::domain)
        .def_property_readonly(
            "is_ar1",
            [](const ModelSpec& ms) { return ms.family.has_value(); })
        .def("log_prior",
             [](const ModelSpec& ms, const ParamPoint& theta) {
                 return ms.log_prior(theta);
             },
             py::arg("theta"))
        .def("log_lik",
             [](const ModelSpec& ms, const TimeSeries& series,
                const ParamPoint& theta) { return ms.log_lik(series, theta); },
             py::arg("series"), py::arg("theta"));

    m.def("make_ar1_model", &make_ar1_model, py::arg("name"),
          py::arg("rho_domain"), py::arg("sigma"),
          py::arg("prior") = PriorSpec{});

    py::class_<SuffStats>(m, "SuffStats")
        .def_readonly("s_xx", &SuffStats::s_xx)
        .def_readonly("s_xy", &SuffStats::s_xy)
        .def_readonly("s_yy", &SuffStats::s_yy)
        .def_readonly("n", &SuffStats::n);

    py::class_<TimeSeries>(m, "TimeSeries")
        .def(py::init<std::vector<double>, std::uint64_t,
                      const TrueProcess&>(),
             py::arg("values"), py::arg("seed"), py::arg("source"))
        .def_property_readonly(
            "values",
            [](const TimeSeries& s) { return s.values(); })
        .def("__len__", &TimeSeries::n)
        .def_property_readonly("seed", &TimeSeries::seed)
        .def_property_readonly("source", &TimeSeries::source)
        .def_property_readonly(
            "stats", [](const TimeSeries& s) { return s.stats(); })
        .def("prefix", &TimeSeries::prefix, py::arg("m"))
        .def("prefix_stats", &TimeSeries::prefix_stats, py::arg("m"));

    m.def("simulate_ar1", &simulate_ar1, py::arg("process"), py::arg("n"),
          py::arg("seed"));
    m.def("ar1_loglik",
          py::overload_cast<const TimeSeries&, double, double>(&ar1_loglik),
          py::arg("series"), py::arg("rho"), py::arg("sigma"));
    m.def("log_likelihood_ratio", &log_likelihood_ratio, py::arg("series"),
          py::arg("model"), py::arg("theta"), py::arg("process"));

    py::class_<DivergenceRate>(m, "DivergenceRate")
        .def_readonly("value", &DivergenceRate::value)
        .def_readonly("std_error", &DivergenceRate::std_error)
        .def_readonly("method", &DivergenceRate::method)
        .def("__repr__", [](const DivergenceRate& r) {
            return "DivergenceRate(value=" + fmt17(r.value) +
                   ", std_error=" + fmt17(r.std_error) + ", method=\"" +
                   r.method + "\")";
        });

    py::class_<Ar1ClosedForms>(m, "ClosedForms")
        .def_static("from_process", &Ar1ClosedForms::from, py::arg("process"))
        .def_readonly("rho0", &Ar1ClosedForms::rho0)
        .def_readonly("sigma0", &Ar1ClosedForms::sigma0);
    m.def("h1_closed", &h1_closed, py::arg("rho1"), py::arg("forms"));
    m.def("h_sigma_closed", &h_sigma_closed, py::arg("rho"), py::arg("sigma"),
          py::arg("forms"));
    m.def("h2_theta_closed", &h2_theta_closed, py::arg("forms"));
    m.def("h2_sigma_free_closed", &h2_sigma_free_closed, py::arg("forms"));
    m.def("autocovariance_limit", &autocovariance_limit, py::arg("lag"),
          py::arg("forms"));

    py::class_<ErgodicDiagnostics>(m, "ErgodicDiagnostics")
        .def_readonly("mean_sq", &ErgodicDiagnostics::mean_sq)
        .def_readonly("lag1", &ErgodicDiagnostics::lag1)
        .def_readonly("noise_cross", &ErgodicDiagnostics::noise_cross);
    m.def("ergodic_diagnostics", &ergodic_diagnostics, py::arg("series"));

    m.def("closed_form_rate", &closed_form_rate, py::arg("model"),
          py::arg("theta"), py::arg("process"));
    m.def("kl_rate_mc", &kl_rate_mc, py::arg("model"), py::arg("theta"),
          py::arg("process"), py::arg("n"), py::arg("replications"),
          py::arg("seed"));

    py::class_<EssInfResult>(m, "EssInfResult")
        .def_readonly("h_theta", &EssInfResult::h_theta)
        .def_readonly("argmin", &EssInfResult::argmin);
    m.def(
        "ess_inf_h",
        [](const ModelSpec& model, const TrueProcess& process,
           std::size_t grid_resolution) {
            return ess_inf_h(model, closed_form_rate_fn(model, process),
                             grid_resolution);
        },
        py::arg("model"), py::arg("process"), py::arg("grid_resolution"));
    m.def("ess_inf_h_custom", &ess_inf_h, py::arg("model"),
          py::arg("rate_fn"), py::arg("grid_resolution"));
    m.def(
        "divergence_set_mass",
        [](const ModelSpec& model, const TrueProcess& process,
           double threshold, std::size_t grid_resolution) {
            return divergence_set_mass(model,
                                       closed_form_rate_fn(model, process),
                                       threshold, grid_resolution);
        },
        py::arg("model"), py::arg("process"), py::arg("threshold"),
        py::arg("grid_resolution"));

    py::enum_<QuadRule>(m, "QuadRule")
        .value("midpoint", QuadRule::midpoint)
        .value("gauss_legendre", QuadRule::gauss_legendre);

    py::class_<QuadratureSettings>(m, "QuadratureSettings")
        .def(py::init([](QuadRule rule, std::size_t base_resolution,
                         std::size_t max_resolution, int threads) {
                 QuadratureSettings s;
                 s.rule = rule;
                 s.base_resolution = {base_resolution, base_resolution};
                 s.max_resolution = max_resolution;
                 s.threads = threads;
                 return s;
             }),
             py::arg("rule") = QuadRule::gauss_legendre,
             py::arg("base_resolution") = 0,
             py::arg("max_resolution") = (std::size_t{1} << 20),
             py::arg("threads") = 1)
        .def_readwrite("rule", &QuadratureSettings::rule)
        .def_readwrite("max_resolution", &QuadratureSettings::max_resolution)
        .def_readwrite("threads", &QuadratureSettings::threads);

    py::class_<MarginalResult>(m, "MarginalResult")
        .def_readonly("value", &MarginalResult::value)
        .def_readonly("dims", &MarginalResult::dims)
        .def_readonly("evaluations", &MarginalResult::evaluations)
        .def_property_readonly("resolution", [](const MarginalResult& r) {
            return py::make_tuple(r.resolution[0], r.resolution[1]);
        });

    m.def("refine_until", &refine_until, py::arg("model"), py::arg("series"),
          py::arg("tol"), py::arg("settings") = QuadratureSettings{});
    m.def("quad_auto_resolution", &quad_auto_resolution, py::arg("n"));
    m.def(
        "posterior_logdensity",
        [](const ModelSpec& model, const TimeSeries& series,
           const ParamPoint& theta, std::size_t grid_resolution) {
            return posterior_logdensity(model, series, theta,
                                        probe_grid(model, grid_resolution));
        },
        py::arg("model"), py::arg("series"), py::arg("theta"),
        py::arg("grid_resolution") = 64);
    m.def(
        "log_marginal_identity_residual",
        [](const ModelSpec& model, const TimeSeries& series,
           const ParamPoint& theta, std::size_t grid_resolution) {
            return log_marginal_identity_check(
                model, series, theta, probe_grid(model, grid_resolution));
        },
        py::arg("model"), py::arg("series"), py::arg("theta"),
        py::arg("grid_resolution") = 64);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("checkpoints", &Trajectory::checkpoints)
        .def_readonly("values", &Trajectory::values)
        .def_readonly("seed", &Trajectory::seed)
        .def_readonly("theory_limit", &Trajectory::theory_limit)
        .def_property_readonly("model_pair", [](const Trajectory& t) {
            return py::make_tuple(t.model_pair.first, t.model_pair.second);
        });
    m.def("trajectory", &trajectory, py::arg("process"), py::arg("m1"),
          py::arg("m2"), py::arg("checkpoints"), py::arg("seed"),
          py::arg("tol") = 1e-4,
          py::arg("settings") = QuadratureSettings{});

    py::class_<LimitEstimate>(m, "LimitEstimate")
        .def_readonly("point", &LimitEstimate::point)
        .def_readonly("halfwidth", &LimitEstimate::halfwidth)
        .def_readonly("slope_check", &LimitEstimate::slope_check);
    m.def("fit_limit", &fit_limit, py::arg("trajectories"),
          py::arg("tail_fraction") = 0.25);

    m.def("posterior_logdensity_rate", &posterior_logdensity_rate,
          py::arg("model"), py::arg("process"), py::arg("theta"),
          py::arg("checkpoints"), py::arg("seed"), py::arg("tol") = 1e-4,
          py::arg("settings") = QuadratureSettings{});

    py::class_<SelectionReport>(m, "SelectionReport")
        .def_readonly("winner", &SelectionReport::winner)
        .def_readonly("rates", &SelectionReport::rates)
        .def_readonly("signs_consistent", &SelectionReport::signs_consistent)
        .def_readonly("sign_notes", &SelectionReport::sign_notes);
    m.def("select_model", &select_model, py::arg("process"),
          py::arg("models"), py::arg("n"), py::arg("seeds"),
          py::arg("tol") = 1e-4, py::arg("settings") = QuadratureSettings{});

    m.def("builtin_suite_names", &builtin_suite_names);
    m.def(
        "builtin_suite_json",
        [](const std::string& name) {
            return serialize_config(builtin_suite(name));
        },
        py::arg("name"));
    m.def(
        "config_run_id",
        [](const std::string& text) { return run_id(parse_config(text)); },
        py::arg("config_json"));
    m.def(
        "validate_config",
        [](const std::string& text) { parse_config(text); },
        py::arg("config_json"));
}
