"""Time the numba kernels against their numpy fallbacks.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]

Kernel timings exclude JIT compilation (one warm-up call per shape).  The
``--end-to-end`` option also times a full propagated 256 x 256 response in
two subprocesses, one with ``NLRESPONSE_DISABLE_NUMBA=1``.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from nlresponse import _kernels as kn

E2E = """
import time
from nlresponse import _kernels
from nlresponse.bath import CorrelationMatrix, ObOLineBroadening, ObOParams
from nlresponse.cumulant import PathwaySpec, SystemSpec, uniform_axis
from nlresponse.propagator import r2_via_master
corr = CorrelationMatrix(ObOLineBroadening(ObOParams(100.0, 100.0, 300.0)), 1)
sys_ = SystemSpec.from_wavenumbers([10000.0], [1.0], corr, 10000.0)
ax = uniform_axis(2.0, 256)
r2_via_master(sys_, PathwaySpec(0, 0), ax[:8], ax[:8], 0.0, 1.0)
t0 = time.perf_counter()
r2_via_master(sys_, PathwaySpec(0, 0), ax, ax, 100.0, 1.0)
print(_kernels.USE_NUMBA, time.perf_counter() - t0)
"""


def best(fn, repeat):
    fn()
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def rk4_case(batch, n, rng):
    nodes = np.linspace(0.0, 500.0, n)
    a = -0.01 + 0.1j + 1e-3 * (rng.normal(size=(batch, n)) + 1j * rng.normal(size=(batch, n)))
    mid = 0.5 * (a[:, 1:] + a[:, :-1])
    y0 = np.ones(batch, dtype=np.complex128)
    return nodes, a, mid, y0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)

    print(f"numba available: {kn.numba is not None}, active: {kn.USE_NUMBA}")
    print(f"{'kernel':<22}{'shape':>14}{'numba [ms]':>13}{'numpy [ms]':>13}{'speed-up':>10}")
    for batch, n in ((1, 1001), (64, 1001), (256, 501), (1024, 501)):
        nodes, a, mid, y0 = rk4_case(batch, n, rng)
        t_nb = best(lambda: kn.rk4_linear_numba(nodes, a, mid, y0), args.repeat)
        t_np = best(lambda: kn.rk4_linear_numpy(nodes, a, mid, y0), args.repeat)
        diff = np.max(np.abs(kn.rk4_linear_numba(nodes, a, mid, y0) - kn.rk4_linear_numpy(nodes, a, mid, y0)))
        assert diff <= 1e-12, diff
        print(f"{'rk4_linear':<22}{f'{batch}x{n}':>14}{1e3 * t_nb:13.3f}{1e3 * t_np:13.3f}{t_np / t_nb:10.1f}")
    for n in (1_001, 100_001, 1_000_001):
        f = np.exp((-1e-3 + 0.05j) * np.arange(n))
        t_nb = best(lambda: kn.cumulative_integral_numba(f, 0.5), args.repeat)
        t_np = best(lambda: kn.cumulative_integral_numpy(f, 0.5), args.repeat)
        print(f"{'cumulative_integral':<22}{n:>14}{1e3 * t_nb:13.3f}{1e3 * t_np:13.3f}{t_np / t_nb:10.1f}")

    if args.end_to_end:
        for flag in ("0", "1"):
            env = dict(os.environ, NLRESPONSE_DISABLE_NUMBA=flag)
            out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
            active, seconds = out.stdout.split()
            print(f"propagated 256x256 response, numba={active}: {float(seconds):.2f} s")


if __name__ == "__main__":
    main()
