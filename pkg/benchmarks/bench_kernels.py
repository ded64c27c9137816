"""Compare the compiled kernels with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--csv PATH]
"""

import argparse
import csv
import sys
import timeit

import numpy as np

from kmrglue import _core_py

try:
    from kmrglue import _core
except ImportError:  # extension not built
    _core = None


def _cases(rng):
    for n in (64, 256, 512):
        u = np.linspace(0, 2, n)
        U, V = np.meshgrid(u, u)
        P = np.ascontiguousarray(np.stack([U, V, np.sin(U) * np.cosh(V) * 0.1], axis=-1))
        h = u[1] - u[0]
        yield f"mean_curvature_grid {n}x{n}", "mean_curvature_grid", (P, h, h)
    for m, n in ((16, 400), (64, 2000), (256, 4000)):
        a = rng.uniform(0.5, 1, (m, n))
        c = rng.uniform(0.5, 1, (m, n))
        b = 4 + rng.uniform(0, 1, (m, n))
        d = rng.normal(size=(m, n))
        yield f"tridiag_solve_batched {m}x{n}", "tridiag_solve_batched", (a, b, c, d)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled extension not available; build with pip install -e .", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    rows = []
    print(f"{'case':36s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s} {'max diff':>10s}")
    for label, name, inputs in _cases(rng):
        f_py = getattr(_core_py, name)
        f_c = getattr(_core, name)
        diff = float(np.max(np.abs(np.asarray(f_py(*inputs)) - np.asarray(f_c(*inputs)))))
        t_py = min(timeit.repeat(lambda: f_py(*inputs), number=1, repeat=args.repeat)) * 1e3
        t_c = min(timeit.repeat(lambda: f_c(*inputs), number=1, repeat=args.repeat)) * 1e3
        rows.append((label, t_py, t_c, t_py / t_c, diff))
        print(f"{label:36s} {t_py:12.3f} {t_c:14.3f} {t_py / t_c:8.1f} {diff:10.2e}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["case", "python_ms", "compiled_ms", "speedup", "max_abs_diff"])
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
