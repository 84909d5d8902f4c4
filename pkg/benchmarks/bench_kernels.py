"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--sizes 32 128 512] [--repeat 5]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from paradp import kernels


def cases(rng: np.random.Generator, n: int):
    a = rng.random((n, n)) < 0.05
    b = rng.random((n, n)) < 0.05
    dag = np.triu(rng.random((n, n)) < 4.0 / n, 1) | np.eye(n, dtype=bool)
    le = kernels.transitive_closure(dag)
    mask = rng.random(n) < 0.5
    feas = kernels.bool_matmul(kernels.bool_matmul(le, a), le)
    return {
        "bool_matmul": lambda: kernels.bool_matmul(a, b),
        "transitive_closure": lambda: kernels.transitive_closure(dag),
        "minimal_mask": lambda: kernels.minimal_mask(le, mask),
        "monotone_witness": lambda: kernels.monotone_witness(feas, le, le),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 128, 512])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing python only")
    print(f"{'kernel':<20}{'n':>6}" + "".join(f"{b + ' ms':>14}" for b in backends) + f"{'speedup':>10}")
    for n in args.sizes:
        timings: dict[str, dict[str, float]] = {}
        for backend in backends:
            kernels.use_backend(backend)
            for name, fn in cases(np.random.default_rng(n), n).items():
                number = max(1, int(2e6 // n**3)) if name != "minimal_mask" else 10
                best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
                timings.setdefault(name, {})[backend] = best * 1e3
        for name, row in timings.items():
            speed = row["python"] / row["cython"] if "cython" in row else float("nan")
            cols = "".join(f"{row[b]:>14.3f}" for b in backends)
            print(f"{name:<20}{n:>6}{cols}{speed:>9.1f}x")


if __name__ == "__main__":
    main()
