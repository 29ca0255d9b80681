"""Monte Carlo study: replicate scheduling, fitting, MADE aggregation."""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .estimation import FitOptions, mle_fit
from .likelihood import loglik
from .models import simulate
from .params import params_from_dict, params_to_dict


def splitmix64(x):
    """One splitmix64 step; used to derive independent replicate seeds."""
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def replicate_seed(base_seed, n, j):
    return splitmix64(splitmix64(base_seed ^ splitmix64(n)) ^ splitmix64(j + 1))


@dataclass
class ExperimentConfig:
    model_tag: str
    theta_star: object
    sample_sizes: tuple = (128, 256, 512, 1024)
    m: int = 200
    base_seed: int = 0
    x1: object = None  # None: fixed point of the initializer's parameters
    burn_in: int = 500
    options: FitOptions = field(default_factory=FitOptions)
    drop_nonconverged: bool = False

    def __post_init__(self):
        if not self.theta_star.stable():
            raise ValueError("theta_star must be stable")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if any(n < 16 for n in self.sample_sizes):
            raise ValueError("all sample sizes must be >= 16")

    @classmethod
    def from_dict(cls, d):
        theta = params_from_dict(d["model"], d["theta_star"])
        opts = FitOptions(**d.get("optimizer", {}))
        return cls(model_tag=d["model"], theta_star=theta,
                   sample_sizes=tuple(d.get("sample_sizes", (128, 256, 512, 1024))),
                   m=d.get("m", 200), base_seed=d.get("base_seed", 0),
                   x1=d.get("x1"), burn_in=d.get("burn_in", 500),
                   options=opts,
                   drop_nonconverged=d.get("drop_nonconverged", False))

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class McSummary:
    model_tag: str
    theta_star: object
    param_names: tuple
    sample_sizes: tuple
    m: int
    estimates: dict       # n -> (m, p) array of theta_hat
    gaps: dict            # n -> (m,) array of loglik(theta_hat) - loglik(theta_star)
    converged: dict       # n -> (m,) bool array
    seeds: dict           # n -> (m,) uint64 array
    mc_mean: dict = field(init=False)
    made_: dict = field(init=False)
    n_converged: dict = field(init=False)

    def __post_init__(self):
        star = self.theta_star.as_array()
        self.mc_mean = {n: est.mean(axis=0) for n, est in self.estimates.items()}
        self.made_ = {n: np.abs(est - star).mean(axis=0) for n, est in self.estimates.items()}
        self.n_converged = {n: int(c.sum()) for n, c in self.converged.items()}

    def summary_rows(self):
        rows = []
        for n in self.sample_sizes:
            for i, name in enumerate(self.param_names):
                rows.append((self.model_tag, n, name,
                             self.mc_mean[n][i], self.made_[n][i], self.n_converged[n]))
        return rows

    def replicate_rows(self):
        rows = []
        for n in self.sample_sizes:
            for j in range(self.estimates[n].shape[0]):
                rows.append((self.model_tag, n, j, int(self.seeds[n][j]),
                             bool(self.converged[n][j]), float(self.gaps[n][j]),
                             *self.estimates[n][j]))
        return rows


def made(estimates, theta_star):
    """Componentwise mean absolute deviation of estimates from the truth."""
    if len(estimates) == 0:
        raise ValueError("empty estimate list")
    tags = {p.tag for p in estimates}
    if tags != {theta_star.tag}:
        raise ValueError("model tag mismatch")
    arr = np.stack([p.as_array() for p in estimates])
    return np.abs(arr - theta_star.as_array()).mean(axis=0)


def loglik_gap(series, theta_hat, theta_star, x1):
    """loglik(theta_hat) - loglik(theta_star) on the same data and anchor."""
    if theta_hat.tag != theta_star.tag or theta_hat.tag != series.model_tag:
        raise ValueError("model tag mismatch")
    return loglik(theta_hat, x1, series).value - loglik(theta_star, x1, series).value


def _run_replicate(args):
    config, n, j = args
    seed = replicate_seed(config.base_seed, n, j)
    series = simulate(config.theta_star, n, seed=seed, burn_in=config.burn_in)
    fit = mle_fit(series, model_tag=config.model_tag,
                  x1=config.x1, options=config.options)
    gap = loglik_gap(series, fit.theta_hat, config.theta_star, fit.x1_used)
    return n, j, fit.theta_hat.as_array(), gap, fit.converged, seed


def run_experiment(config, jobs=1):
    """Simulate -> fit over all (n, replicate) cells; aggregate means and MADEs.

    Replicates are independent and results are stored by index, so the
    summary does not depend on execution order or parallelism.
    """
    tasks = [(config, n, j) for n in config.sample_sizes for j in range(config.m)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_replicate, tasks, chunksize=8))
    else:
        results = [_run_replicate(t) for t in tasks]

    p = config.theta_star.as_array().size
    estimates = {n: np.empty((config.m, p)) for n in config.sample_sizes}
    gaps = {n: np.empty(config.m) for n in config.sample_sizes}
    converged = {n: np.zeros(config.m, dtype=bool) for n in config.sample_sizes}
    seeds = {n: np.zeros(config.m, dtype=np.uint64) for n in config.sample_sizes}
    for n, j, est, gap, conv, seed in results:
        estimates[n][j] = est
        gaps[n][j] = gap
        converged[n][j] = conv
        seeds[n][j] = seed

    if config.drop_nonconverged:
        estimates = {n: estimates[n][converged[n]] for n in config.sample_sizes}
        gaps = {n: gaps[n][converged[n]] for n in config.sample_sizes}
        seeds = {n: seeds[n][converged[n]] for n in config.sample_sizes}
        converged = {n: converged[n][converged[n]] for n in config.sample_sizes}

    return McSummary(model_tag=config.model_tag, theta_star=config.theta_star,
                     param_names=tuple(config.theta_star.param_names),
                     sample_sizes=tuple(config.sample_sizes), m=config.m,
                     estimates=estimates, gaps=gaps, converged=converged, seeds=seeds)


def config_to_dict(config):
    return {
        "model": config.model_tag,
        "theta_star": params_to_dict(config.theta_star),
        "sample_sizes": list(config.sample_sizes),
        "m": config.m,
        "base_seed": config.base_seed,
        "x1": config.x1,
        "burn_in": config.burn_in,
        "optimizer": {
            "tol": config.options.tol,
            "max_outer": config.options.max_outer,
            "max_inner": config.options.max_inner,
            "margin": config.options.margin,
        },
        "drop_nonconverged": config.drop_nonconverged,
    }
