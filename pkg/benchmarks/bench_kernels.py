#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

The two hot loops of the oracle are the Sturm pivot recurrence (dominates
eigenvalue bisection) and the RK4 shooting integrator (dominates the
Wronskian check).  Both backends implement identical floating-point
sequences, so this measures pure dispatch/loop overhead.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from dwcross._kernels import _pure

try:
    from dwcross._kernels import _core
except ImportError:
    _core = None

from dwcross.models import M3Params, UnitsConfig
from dwcross.oracle import OracleConfig, build_hamiltonian, lowest_eigenvalues


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_sturm(n, batch, repeats):
    rng = np.random.default_rng(0)
    diag = rng.normal(size=n) + 4.0
    off = rng.normal(size=n - 1)
    shifts = np.linspace(-1.0, 9.0, batch)
    out = {}
    out["pure"] = timeit(lambda: _pure.sturm_counts(diag, off, shifts), repeats)
    if _core is not None:
        out["compiled"] = timeit(lambda: _core.sturm_counts(diag, off, shifts), repeats)
        assert np.array_equal(
            _pure.sturm_counts(diag, off, shifts), _core.sturm_counts(diag, off, shifts)
        )
    return out


def bench_shooting(n_nodes, repeats):
    x = np.linspace(-6.0, 6.0, 2 * (n_nodes - 1) + 1)
    v_half = x * x
    h = 12.0 / (n_nodes - 1)
    args = (v_half, h, 1.0, 3.0, 0.0, 1.0, True)
    out = {}
    out["pure"] = timeit(lambda: _pure.integrate_schrodinger(*args), repeats)
    if _core is not None:
        out["compiled"] = timeit(lambda: _core.integrate_schrodinger(*args), repeats)
        pa, da = _pure.integrate_schrodinger(*args)
        pb, db = _core.integrate_schrodinger(*args)
        assert np.array_equal(pa, pb) and np.array_equal(da, db)
    return out


def bench_end_to_end(repeats):
    """Five oracle levels of an asymmetric delta-in-harmonic well: the
    realistic workload mixing assembly, counting and bisection."""
    model = M3Params(10.0, 2.0, 1.5)
    units = UnitsConfig(1.0)
    T = build_hamiltonian(model, units, OracleConfig(n_points=4000), e_top=15.0)
    return timeit(lambda: lowest_eigenvalues(T, 5, tol=1e-10), repeats)


def report(label, result):
    pure = result["pure"]
    if "compiled" in result:
        comp = result["compiled"]
        print(f"{label:34s} pure {pure * 1e3:9.2f} ms   compiled {comp * 1e3:8.3f} ms   "
              f"speedup {pure / comp:6.1f}x")
    else:
        print(f"{label:34s} pure {pure * 1e3:9.2f} ms   (compiled core not built)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller sizes, fewer repeats")
    args = parser.parse_args()
    repeats = 3 if args.quick else 7
    sizes = [(4000, 40), (12000, 40)] if args.quick else [(4000, 40), (12000, 40), (24000, 80)]

    print(f"kernel backends available: pure{' + compiled' if _core else ''}\n")
    for n, batch in sizes:
        report(f"sturm_counts n={n} batch={batch}", bench_sturm(n, batch, repeats))
    for n in ([6001] if args.quick else [6001, 24001]):
        report(f"rk4 shooting nodes={n}", bench_shooting(n, repeats))

    t = bench_end_to_end(2 if args.quick else 3)
    print(f"\n5-level oracle solve (n=4000, selected backend): {t * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
