"""Compiled vs pure-Python moment-grid kernel.

    python benchmarks/bench_kernel.py [--repeat N]

Times ``moment_grid`` on the two published coefficient sets (jet orders 1
and 5) and reports the largest absolute difference between the backends.
"""

import argparse
import timeit

import numpy as np

from critline import _kernel_py
from critline.functional import gauss_legendre
from critline.presets import theorem1_critical, theorem1_simple

try:
    from critline import _kernel_c
except ImportError:
    _kernel_c = None


def cases():
    nodes, weights = gauss_legendre(64)
    for pre in (theorem1_simple(), theorem1_critical()):
        order = pre.shift.poly.degree
        args = (pre.mollifier.as_array(), -pre.R, 1.0, order, -pre.R, 1.0, order, nodes, weights, 0.5)
        yield f"{pre.name} (order {order})", args


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernel_c is None:
        print("compiled kernel not built; only the Python kernel is timed")
    print(f"{'case':<22}{'python ms':>12}{'compiled ms':>14}{'speedup':>10}{'max |diff|':>13}")
    for name, a in cases():
        t_py = min(timeit.repeat(lambda: _kernel_py.moment_grid(*a), number=1, repeat=args.repeat))
        if _kernel_c is None:
            print(f"{name:<22}{1e3 * t_py:>12.2f}")
            continue
        n = 20
        t_c = min(timeit.repeat(lambda: _kernel_c.moment_grid(*a), number=n, repeat=args.repeat)) / n
        diff = np.max(np.abs(_kernel_py.moment_grid(*a) - _kernel_c.moment_grid(*a)))
        print(f"{name:<22}{1e3 * t_py:>12.2f}{1e3 * t_c:>14.3f}{t_py / t_c:>9.0f}x{diff:>13.1e}")


if __name__ == "__main__":
    main()
