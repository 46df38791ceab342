"""Bayes factor limit laws for AR(1) model comparison.

Thin wrapper around the compiled ``bflim._core`` extension. In an installed
package the extension sits next to this file; for in-tree builds, point
``BFLIM_EXT_DIR`` at the directory CMake wrote the extension into.
"""

import importlib.util
import os
import sys


def _load_core():
    try:
        from . import _core  # packaged layout
        return _core
    except ImportError:
        ext_dir = os.environ.get("BFLIM_EXT_DIR")
        if not ext_dir:
            raise
    for entry in sorted(os.listdir(ext_dir)):
        if entry.startswith("_core") and entry.endswith(".so"):
            spec = importlib.util.spec_from_file_location(
                __name__ + "._core", os.path.join(ext_dir, entry)
            )
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            sys.modules[spec.name] = module
            return module
    raise ImportError(
        f"no _core extension found in BFLIM_EXT_DIR={ext_dir!r}"
    )


_core = _load_core()

__version__ = _core.__version__

ConfigError = _core.ConfigError
NumericError = _core.NumericError

TrueProcess = _core.TrueProcess
Interval = _core.Interval
ParamPoint = _core.ParamPoint
ParameterDomain = _core.ParameterDomain
make_domain1 = _core.make_domain1
make_domain2 = _core.make_domain2
PriorSpec = _core.PriorSpec
uniform_prior = _core.uniform_prior
normal_prior = _core.normal_prior
SigmaSpec = _core.SigmaSpec
Model = _core.Model
make_ar1_model = _core.make_ar1_model
SuffStats = _core.SuffStats
TimeSeries = _core.TimeSeries

simulate_ar1 = _core.simulate_ar1
ar1_loglik = _core.ar1_loglik
log_likelihood_ratio = _core.log_likelihood_ratio

DivergenceRate = _core.DivergenceRate
ClosedForms = _core.ClosedForms
h1_closed = _core.h1_closed
h_sigma_closed = _core.h_sigma_closed
h2_theta_closed = _core.h2_theta_closed
h2_sigma_free_closed = _core.h2_sigma_free_closed
autocovariance_limit = _core.autocovariance_limit
ErgodicDiagnostics = _core.ErgodicDiagnostics
ergodic_diagnostics = _core.ergodic_diagnostics

closed_form_rate = _core.closed_form_rate
kl_rate_mc = _core.kl_rate_mc
EssInfResult = _core.EssInfResult
ess_inf_h = _core.ess_inf_h
ess_inf_h_custom = _core.ess_inf_h_custom
divergence_set_mass = _core.divergence_set_mass

QuadRule = _core.QuadRule
QuadratureSettings = _core.QuadratureSettings
MarginalResult = _core.MarginalResult
refine_until = _core.refine_until
quad_auto_resolution = _core.quad_auto_resolution
posterior_logdensity = _core.posterior_logdensity
log_marginal_identity_residual = _core.log_marginal_identity_residual

Trajectory = _core.Trajectory
trajectory = _core.trajectory
LimitEstimate = _core.LimitEstimate
fit_limit = _core.fit_limit
posterior_logdensity_rate = _core.posterior_logdensity_rate
SelectionReport = _core.SelectionReport
select_model = _core.select_model

builtin_suite_names = _core.builtin_suite_names
builtin_suite_json = _core.builtin_suite_json
config_run_id = _core.config_run_id
validate_config = _core.validate_config

__all__ = [
    "ConfigError",
    "NumericError",
    "TrueProcess",
    "Interval",
    "ParamPoint",
    "ParameterDomain",
    "make_domain1",
    "make_domain2",
    "PriorSpec",
    "uniform_prior",
    "normal_prior",
    "SigmaSpec",
    "Model",
    "make_ar1_model",
    "SuffStats",
    "TimeSeries",
    "simulate_ar1",
    "ar1_loglik",
    "log_likelihood_ratio",
    "DivergenceRate",
    "ClosedForms",
    "h1_closed",
    "h_sigma_closed",
    "h2_theta_closed",
    "h2_sigma_free_closed",
    "autocovariance_limit",
    "ErgodicDiagnostics",
    "ergodic_diagnostics",
    "closed_form_rate",
    "kl_rate_mc",
    "EssInfResult",
    "ess_inf_h",
    "ess_inf_h_custom",
    "divergence_set_mass",
    "QuadRule",
    "QuadratureSettings",
    "MarginalResult",
    "refine_until",
    "quad_auto_resolution",
    "posterior_logdensity",
    "log_marginal_identity_residual",
    "Trajectory",
    "trajectory",
    "LimitEstimate",
    "fit_limit",
    "posterior_logdensity_rate",
    "SelectionReport",
    "select_model",
    "builtin_suite_names",
    "builtin_suite_json",
    "config_run_id",
    "validate_config",
]
