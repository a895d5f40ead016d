"""Compare the compiled and pure-Python RK4 kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]

Both kernels integrate the same three-level problem; the script reports
wall time per step and the largest difference between their trajectories.
"""
import argparse
import time

import numpy as np

from piezoqubit._core import fallback

try:
    from piezoqubit._core import _rk4
except ImportError:
    _rk4 = None

TWO_PI = 2 * np.pi


def _problem(steps):
    g, kappa = TWO_PI * 100e3, TWO_PI * 2.25e6
    h = 0.05 / kappa
    state0 = np.zeros(9)
    state0[1] = 1.0  # excited qubit
    return (state0, g, 0.0, 0.0, 0.0, kappa, h, steps, max(steps // 100, 1))


def _time(fn, args, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--repeat", type=int, default=3)
    a = p.parse_args(argv)
    args = _problem(a.steps)
    t_py, (s_py, _) = _time(fallback.rk4_propagate, args, a.repeat)
    print(f"python  {a.steps} steps  {t_py:.4f} s  {1e9 * t_py / a.steps:9.1f} ns/step")
    if _rk4 is None:
        print("cython  extension not built")
        return 0
    big = args[:7] + (a.steps * 50, max(a.steps // 2, 1))
    t_cy, (s_cy, _) = _time(_rk4.rk4_propagate, args, a.repeat)
    t_big, _ = _time(_rk4.rk4_propagate, big, a.repeat)
    print(f"cython  {a.steps} steps  {t_cy:.4f} s  {1e9 * t_big / big[7]:9.1f} ns/step (from {big[7]} steps)")
    print(f"speedup {t_py / (t_big / 50):.0f}x")
    print(f"max |python - cython| = {np.max(np.abs(s_py - s_cy)):.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
