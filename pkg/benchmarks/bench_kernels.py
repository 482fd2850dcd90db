"""Compare the compiled and pure-Python kernel backends.

Run with ``python benchmarks/bench_kernels.py``.
"""

import argparse
import timeit

import numpy as np

from darboux import kernels


def cases(n_numerov, n_steps):
    x = np.linspace(-8.0, 8.0, n_numerov)
    h = x[1] - x[0]
    q = 1.0 - x * x
    y0 = np.array([2.0, 0.5, 0.3, 0.4])
    prm = np.array([0.5, 0.2, 0.1])
    code = kernels.MODEL_CODES["P1"]
    return {
        "numerov_shoot": lambda b: b.numerov_shoot(q, 0.0, 1e-6, h),
        "numerov_sweep": lambda b: b.numerov_sweep(q, 0.0, 1e-6, h),
        "midpoint_run": lambda b: b.midpoint_run(y0, code, prm, 1e-3, n_steps, 1e-13, 50),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--numerov-points", type=int, default=20001)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing the Python kernels only")
    print(f"{'kernel':<16}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for name, fn in cases(args.numerov_points, args.steps).items():
        times = {b: min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
                 for b, mod in backends.items()}
        row = f"{name:<16}" + "".join(f"{t * 1e3:>12.2f}ms" for t in times.values())
        if "cython" in times:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
