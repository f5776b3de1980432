"""Benchmark the compiled kernels against the pure numpy fallback.

Times the Hermitian eigensolver across sizes, the product-vector threshold
grid scan at the default resolution, and an end-to-end smallest-system
membership solve (which exercises the eigensolver inside the interior-point
iteration).  Usage:

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import time

import numpy as np

from freespec import _kernels, cones, linalg, opsys
from freespec.pencil import MatrixTuple


def time_call(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_eigh(backend, repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n in (2, 4, 8, 16, 32):
        mats = [linalg.random_hermitian(rng, n).mat for _ in range(64)]
        _kernels.set_backend(backend)

        def run():
            for m in mats:
                _kernels.eigh_kernel(m)

        rows.append((n, time_call(run, repeat) / len(mats)))
    return rows

def bench_grid(backend, repeat):
    rng = np.random.default_rng(1)
    params = [(rng.standard_normal(4), rng.standard_normal(4)) for _ in range(4)]
    _kernels.set_backend(backend)

    def run():
        for qn, qm in params:
            _kernels.quartic_grid_scan(qn, qm, 1001, 4000)

    return time_call(run, repeat) / len(params)


def bench_min_membership(backend, repeat):
    _kernels.set_backend(backend)
    sq = cones.square_cone()
    tup = MatrixTuple.of(linalg.SIGMA_Z, linalg.SIGMA_X, np.eye(2))

    def run():
        opsys.min_membership(sq, tup)

    return time_call(run, repeat)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)}\n")

    print("hermitian eigh (per call)")
    results = {b: dict(bench_eigh(b, args.repeat)) for b in backends}
    header = "  n    " + "".join(f"{b:>12}" for b in backends)
    print(header)
    for n in (2, 4, 8, 16, 32):
        cells = "".join(f"{results[b][n] * 1e6:>10.1f}us" for b in backends)
        print(f"  {n:<4} {cells}")

    print("\nthreshold grid scan, 1001 x 4000 points (per call)")
    for b in backends:
        print(f"  {b:>10}: {bench_grid(b, args.repeat) * 1e3:8.1f} ms")

    print("\nsmallest-system membership solve, square cone at level 2")
    for b in backends:
        print(f"  {b:>10}: {bench_min_membership(b, args.repeat) * 1e3:8.1f} ms")


if __name__ == "__main__":
    main()
