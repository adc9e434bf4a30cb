"""Time the hot kernels under both backends.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call of each kernel is timed separately (JIT or cache load).
"""
import argparse
import time

import numpy as np

from fdcalc import _accel, kernels, verifier
from fdcalc.calculus import FunctionTable, degree_caps
from fdcalc.groups import PGroupShape
from fdcalc.rings import make_fq


def cases():
    rng = np.random.default_rng(7)
    A, B = PGroupShape.elementary(2, 10), PGroupShape.cyclic(2, 2)
    f = FunctionTable.random(A, B, rng)
    args = (f.values, A.moduli_array, B.moduli_array)
    yield "fdeg_search (Z/2)^10 -> Z/4", lambda: kernels.fdeg_search(*args, degree_caps(f))
    yield "coefficients_at_zero (Z/2)^10 -> Z/4", lambda: kernels.coefficients_at_zero(*args, degree_caps(f))

    A2 = PGroupShape(3, (2, 2))
    g = FunctionTable.random(A2, PGroupShape.cyclic(3, 2), rng)
    gargs = (g.values, A2.moduli_array, g.codomain.moduli_array)
    yield "fdeg_search (Z/9)^2 -> Z/9", lambda: kernels.fdeg_search(*gargs, degree_caps(g))

    F9 = make_fq(3, 2)
    pts = np.stack(np.meshgrid(*[np.arange(3)] * 6, indexing="ij"), -1).reshape(-1, 3, 2)
    coeffs = rng.integers(0, 3, size=(6, 2))
    exps = rng.integers(0, 9, size=(6, 3))
    yield "poly_table F9, 3 vars", lambda: kernels.poly_table(pts, coeffs, exps, F9.mult, 3)

    stack = rng.integers(0, 2, size=(3, 1 << 16, 2))
    yield "count_common_zeros 3 x 2^16", lambda: kernels.count_common_zeros(stack)

    S, T = PGroupShape.elementary(2, 4), PGroupShape.cyclic(2, 1)
    yield "sigma_invariant (Z/2)^4 -> Z/2", lambda: verifier.sigma_invariant(S, T)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _accel.NUMBA_AVAILABLE else [])
    print(f"{'kernel':42s} {'numpy':>10s} {'numba 1st':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, fn in cases():
        row = {}
        for b in backends:
            kernels.set_backend(b)
            if b == "numba":
                t0 = time.perf_counter()
                fn()
                row["first"] = time.perf_counter() - t0
            row[b] = best_of(fn, args.repeat)
        nb = row.get("numba")
        cells = [f"{row['numpy'] * 1e3:9.2f}ms"]
        cells += [f"{row['first'] * 1e3:9.2f}ms", f"{nb * 1e3:9.2f}ms", f"{row['numpy'] / nb:7.1f}x"] if nb else ["-"] * 3
        print(f"{name:42s} " + " ".join(f"{c:>10s}" for c in cells))


if __name__ == "__main__":
    main()
