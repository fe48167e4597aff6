#!/usr/bin/env python3
"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 200]
"""

import argparse
import math
import timeit

import numpy as np

from geoch import _fallback, catalog, quantum

try:
    from geoch import _kernels
except ImportError:
    _kernels = None


def cases(mod):
    ineq = catalog.make_probability("geometric_tripartite_ch")
    coeffs, m = quantum.coefficient_tensor(ineq)
    rho = quantum.make_state("ghz", [math.pi / 4])
    x = np.random.default_rng(0).uniform(0, 2 * math.pi, 12)
    expect = mod.Problem(coeffs, 3, m, 0.9, 0, 0, "expect", rho=rho)
    eig = mod.Problem(coeffs, 3, m, 0.9, 0, 0, "eig")
    a = np.random.default_rng(1).normal(size=(8, 8)) + 1j * np.random.default_rng(2).normal(size=(8, 8))
    herm = np.ascontiguousarray(a + a.conj().T)
    return {
        "expectation": lambda: expect.evaluate(x),
        "lowest eigenvalue": lambda: eig.evaluate(x),
        "jacobi 8x8": lambda: mod.jacobi_eigh(herm),
        "nelder-mead (eig)": lambda: eig.minimize(x, 0.5, 1e-12, 1e-9, 2000),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    mods = [("python", _fallback)] + ([("cython", _kernels)] if _kernels else [])
    timings = {}
    for label, mod in mods:
        for name, fn in cases(mod).items():
            # a full simplex search is slow in pure Python; one run is enough
            n, r = (1, 1) if name.startswith("nelder") else (args.repeat, 3)
            timings.setdefault(name, {})[label] = min(timeit.repeat(fn, number=n, repeat=r)) / n
    print(f"{'kernel':<20}{'python':>14}{'cython':>14}{'speedup':>10}")
    for name, t in timings.items():
        py, cy = t["python"], t.get("cython")
        cy_s = f"{cy * 1e6:11.1f} us" if cy else "           n/a"
        sp = f"{py / cy:9.1f}x" if cy else "       n/a"
        print(f"{name:<20}{py * 1e6:11.1f} us{cy_s}{sp}")


if __name__ == "__main__":
    main()
