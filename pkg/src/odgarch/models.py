"""Model primitives: state update, emission density, exact emission samplers."""

import math
import warnings

import numpy as np

from . import kernels
from .params import NbinParams, NmParams, Series, TingParams


def _check_state(params, x):
    if params.tag == "nm":
        x = np.asarray(x, dtype=float)
        if x.shape != (params.d,):
            raise ValueError(f"state must have shape ({params.d},)")
        if np.any(x <= 0) or not np.all(np.isfinite(x)):
            raise ValueError("state components must be positive and finite")
        return x
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise ValueError("state must be positive and finite")
    return x


def _check_obs(params, y):
    y = float(y)
    if not math.isfinite(y):
        raise ValueError("observation must be finite")
    if params.tag in ("nbin", "ting") and (y < 0 or y != round(y)):
        raise ValueError("count models require non-negative integer observations")
    return y


def psi_step(params, x, y):
    """One application of the state-update map."""
    x = _check_state(params, x)
    y = _check_obs(params, y)
    if params.tag == "nm":
        return params.omega_vec + params.A @ x + y * y * params.b_vec
    return params.omega + params.a * x + params.b * y


def log_emission(params, x, y):
    """Log conditional density/pmf of an observation given the state."""
    x = _check_state(params, x)
    y = _check_obs(params, y)
    if isinstance(params, NbinParams):
        return kernels.nbin_log_pmf(x, y, params.r)
    if isinstance(params, TingParams):
        return kernels.poisson_log_pmf(min(x, params.tau), y)
    if isinstance(params, NmParams):
        return kernels.nm_log_density(x, y, params.gamma)
    raise TypeError(f"unsupported params type {type(params)!r}")


def sample_emission(params, x, rng):
    """One exact draw from the emission distribution at state x."""
    x = _check_state(params, x)
    if isinstance(params, NbinParams):
        # Gamma-Poisson compounding gives NB(r, x/(1+x)) exactly.
        lam = rng.gamma(shape=params.r, scale=x)
        return float(rng.poisson(lam))
    if isinstance(params, TingParams):
        return float(rng.poisson(min(x, params.tau)))
    if isinstance(params, NmParams):
        comp = rng.choice(params.d, p=params.gamma)
        return float(rng.normal(0.0, math.sqrt(x[comp])))
    raise TypeError(f"unsupported params type {type(params)!r}")


def simulate(params, n, x0=None, seed=0, burn_in=500):
    """Simulate n observations, recording the hidden-state trace.

    Starts the chain at x0 (default: the noise-free fixed point), runs
    burn_in discarded steps so recorded samples approximate the
    stationary law, then records n (x, y) pairs. Deterministic given
    the seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    stable = bool(params.stable())
    if not stable:
        warnings.warn("parameters are outside the stability region; "
                      "the simulated path need not be stationary", stacklevel=2)
    x = _check_state(params, params.fixed_point() if x0 is None else x0)
    rng = np.random.default_rng(np.uint64(seed))
    for _ in range(burn_in):
        y = sample_emission(params, x, rng)
        x = psi_step(params, x, y)
    ys = np.empty(n)
    if params.tag == "nm":
        xs = np.empty((n, params.d))
    else:
        xs = np.empty(n)
    for k in range(n):
        xs[k] = x
        ys[k] = sample_emission(params, x, rng)
        x = psi_step(params, x, ys[k])
    return Series(y=ys, model_tag=params.tag, seed=int(seed), x_trace=xs,
                  stable=stable, burn_in=burn_in, params=params)
