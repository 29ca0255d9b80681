#!/usr/bin/env python3
"""Compare the numba-jitted kernels against the plain-Python fallback.

Runs the hot paths (likelihood, analytic gradient, a full fit) in two
subprocesses, one per backend, and prints the timings side by side.

    python3 bench/benchmark.py [--n 4096] [--repeats 5]
"""

import argparse
import json
import os
import subprocess
import sys

PROBE = r"""
import json
import sys
import time

from odgarch import NbinParams, NmParams, TingParams, kernels, loglik, mle_fit, simulate
from odgarch.likelihood import grad_loglik_nbin

n = int(sys.argv[1])
repeats = int(sys.argv[2])

p = NbinParams(3.0, 0.2, 0.2, 2.0)
t = TingParams(3.0, 0.35, 0.1, 4.0)
q = NmParams(gamma=[0.4, 0.6], omega_vec=[1.0, 2.0],
             A=[[0.3, 0.1], [0.05, 0.25]], b_vec=[0.2, 0.1])
s_nbin = simulate(p, n, seed=1)
s_ting = simulate(t, n, seed=1)
s_nm = simulate(q, n, seed=1)


def best(fn):
    fn()  # warm-up (includes JIT compilation when enabled)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


results = {
    "backend": "numba" if kernels.USE_NUMBA else "plain",
    "nbin_loglik": best(lambda: loglik(p, 7.5, s_nbin)),
    "nbin_grad": best(lambda: grad_loglik_nbin(p, 7.5, s_nbin)),
    "ting_loglik": best(lambda: loglik(t, 5.0, s_ting)),
    "nm_loglik": best(lambda: loglik(q, q.fixed_point(), s_nm)),
    "nbin_fit": best(lambda: mle_fit(s_nbin)),
}
print(json.dumps(results))
"""


def run_backend(flag, n, repeats):
    env = dict(os.environ, ODGARCH_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", PROBE, str(n), str(repeats)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096, help="series length")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    fast = run_backend("1", args.n, args.repeats)
    slow = run_backend("0", args.n, args.repeats)

    print(f"series length n={args.n}, best of {args.repeats} runs")
    print(f"{'operation':<14} {'plain [ms]':>12} {'numba [ms]':>12} {'speedup':>9}")
    for key in ("nbin_loglik", "nbin_grad", "ting_loglik", "nm_loglik", "nbin_fit"):
        tp = slow[key] * 1e3
        tn = fast[key] * 1e3
        print(f"{key:<14} {tp:>12.3f} {tn:>12.3f} {tp / tn:>8.1f}x")


if __name__ == "__main__":
    main()
