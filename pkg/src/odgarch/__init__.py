"""Observation-driven GARCH-type time series: simulation, MLE, verification."""

from .estimation import FitOptions, FitResult, cls_init_nbin, init_generic, mle_fit
from .likelihood import (FilterTrace, LoglikValue, digamma, filter_series,
                         grad_loglik_nbin, grad_loglik_numeric, iterate_f, loglik)
from .models import log_emission, psi_step, sample_emission, simulate
from .montecarlo import ExperimentConfig, McSummary, loglik_gap, made, run_experiment
from .params import (ModelParams, NbinParams, NmParams, Series, TingParams,
                     spectral_radius, stability_check)
from .reparam import FeasibleMap, feasible_map_for
from .verifier import VerifierReport, verify_model

__version__ = "0.1.0"

__all__ = [
    "FitOptions", "FitResult", "cls_init_nbin", "init_generic", "mle_fit",
    "FilterTrace", "LoglikValue", "digamma", "filter_series",
    "grad_loglik_nbin", "grad_loglik_numeric", "iterate_f", "loglik",
    "log_emission", "psi_step", "sample_emission", "simulate",
    "ExperimentConfig", "McSummary", "loglik_gap", "made", "run_experiment",
    "ModelParams", "NbinParams", "NmParams", "Series", "TingParams",
    "spectral_radius", "stability_check",
    "FeasibleMap", "feasible_map_for",
    "VerifierReport", "verify_model",
]
