"""Kernel backend selection.

The loop kernels in ``_impl`` run either JIT-compiled by numba (default)
or as plain Python/numpy. Set ``ODGARCH_NUMBA=0`` to force the plain
backend; it is also used automatically when numba is not installed.
"""

import os

from . import _impl

# Order matters: callees must be wrapped before their callers so the
# jitted versions are what the callers resolve at compile time.
_KERNEL_NAMES = [
    "digamma",
    "nbin_log_pmf",
    "poisson_log_pmf",
    "nm_log_density",
    "affine_filter",
    "nbin_filter",
    "nbin_loglik",
    "nbin_loglik_grad",
    "ting_loglik",
    "nm_filter",
    "nm_loglik",
]

USE_NUMBA = os.environ.get("ODGARCH_NUMBA", "1") != "0"
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:
        USE_NUMBA = False

if USE_NUMBA:
    for _name in _KERNEL_NAMES:
        setattr(_impl, _name, njit(cache=True)(getattr(_impl, _name)))

digamma = _impl.digamma
nbin_log_pmf = _impl.nbin_log_pmf
poisson_log_pmf = _impl.poisson_log_pmf
nm_log_density = _impl.nm_log_density
affine_filter = _impl.affine_filter
nbin_filter = _impl.nbin_filter
nbin_loglik = _impl.nbin_loglik
nbin_loglik_grad = _impl.nbin_loglik_grad
ting_loglik = _impl.ting_loglik
nm_filter = _impl.nm_filter
nm_loglik = _impl.nm_loglik

__all__ = _KERNEL_NAMES + ["USE_NUMBA"]
