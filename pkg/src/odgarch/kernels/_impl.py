"""Hot inner loops shared by the jitted and plain backends.

Every function here is written in plain loop form so that it can be
compiled as-is by numba's ``@njit`` (see ``kernels/__init__``) or run
unchanged as ordinary Python when the JIT backend is disabled.
"""

import math

import numpy as np

_LOG_2PI = math.log(2.0 * math.pi)


def digamma(x):
    """Digamma via upward recurrence to x >= 10, then the asymptotic series."""
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    # Bernoulli tail of the asymptotic expansion, truncated at x^-14.
    tail = inv2 * (1.0 / 12.0
                   - inv2 * (1.0 / 120.0
                             - inv2 * (1.0 / 252.0
                                       - inv2 * (1.0 / 240.0
                                                 - inv2 * (1.0 / 132.0
                                                           - inv2 * (691.0 / 32760.0
                                                                     - inv2 / 12.0))))))
    return acc + math.log(x) - 0.5 * inv - tail


def nbin_log_pmf(x, y, r):
    return (math.lgamma(y + r) - math.lgamma(r) - math.lgamma(y + 1.0)
            + y * math.log(x) - (y + r) * math.log1p(x))


def poisson_log_pmf(lam, y):
    return -lam + y * math.log(lam) - math.lgamma(y + 1.0)


def nm_log_density(x, y, gamma):
    # log-sum-exp over mixture components; d is small.
    d = gamma.shape[0]
    best = -np.inf
    for l in range(d):
        t = math.log(gamma[l]) - 0.5 * y * y / x[l] - 0.5 * (_LOG_2PI + math.log(x[l]))
        if t > best:
            best = t
    s = 0.0
    for l in range(d):
        t = math.log(gamma[l]) - 0.5 * y * y / x[l] - 0.5 * (_LOG_2PI + math.log(x[l]))
        s += math.exp(t - best)
    return best + math.log(s)


def affine_filter(y, x1, w, a, b):
    """State sequence u[k] = w + a*u[k-1] + b*y[k-1], u[0] = x1 (NBIN/TING)."""
    n = y.shape[0]
    u = np.empty(n)
    u[0] = x1
    for k in range(1, n):
        u[k] = w + a * u[k - 1] + b * y[k - 1]
    return u


def nbin_filter(y, x1, w, a, b):
    """State sequence plus its sensitivity du[k] = d u[k] / d (w, a, b)."""
    n = y.shape[0]
    u = np.empty(n)
    du = np.zeros((n, 3))
    u[0] = x1
    for k in range(1, n):
        u[k] = w + a * u[k - 1] + b * y[k - 1]
        du[k, 0] = 1.0 + a * du[k - 1, 0]
        du[k, 1] = u[k - 1] + a * du[k - 1, 1]
        du[k, 2] = y[k - 1] + a * du[k - 1, 2]
    return u, du


def nbin_loglik(y, x1, w, a, b, r):
    n = y.shape[0]
    u = x1
    s = nbin_log_pmf(u, y[0], r)
    for k in range(1, n):
        u = w + a * u + b * y[k - 1]
        s += nbin_log_pmf(u, y[k], r)
    return s / n


def nbin_loglik_grad(y, x1, w, a, b, r):
    """Normalized log-likelihood and its exact gradient in (w, a, b, r)."""
    n = y.shape[0]
    u = x1
    dw = 0.0
    da = 0.0
    db = 0.0
    s = nbin_log_pmf(u, y[0], r)
    gr = digamma(r + y[0]) - math.log1p(u)
    gw = 0.0
    ga = 0.0
    gb = 0.0
    for k in range(1, n):
        u_prev = u
        u = w + a * u + b * y[k - 1]
        dw = 1.0 + a * dw
        da = u_prev + a * da
        db = y[k - 1] + a * db
        s += nbin_log_pmf(u, y[k], r)
        c = y[k] / u - (y[k] + r) / (1.0 + u)
        gw += c * dw
        ga += c * da
        gb += c * db
        gr += digamma(r + y[k]) - math.log1p(u)
    gr -= n * digamma(r)
    grad = np.empty(4)
    grad[0] = gw / n
    grad[1] = ga / n
    grad[2] = gb / n
    grad[3] = gr / n
    return s / n, grad


def ting_loglik(y, x1, w, a, b, tau):
    n = y.shape[0]
    u = x1
    lam = u if u < tau else tau
    s = poisson_log_pmf(lam, y[0])
    for k in range(1, n):
        u = w + a * u + b * y[k - 1]
        lam = u if u < tau else tau
        s += poisson_log_pmf(lam, y[k])
    return s / n


def nm_filter(y, x1, wv, A, bv):
    n = y.shape[0]
    d = x1.shape[0]
    u = np.empty((n, d))
    for l in range(d):
        u[0, l] = x1[l]
    for k in range(1, n):
        y2 = y[k - 1] * y[k - 1]
        for i in range(d):
            acc = wv[i] + y2 * bv[i]
            for j in range(d):
                acc += A[i, j] * u[k - 1, j]
            u[k, i] = acc
    return u


def nm_loglik(y, x1, wv, A, bv, gamma):
    u = nm_filter(y, x1, wv, A, bv)
    n = y.shape[0]
    s = 0.0
    for k in range(n):
        s += nm_log_density(u[k], y[k], gamma)
    return s / n
