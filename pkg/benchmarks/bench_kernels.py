"""Time the compiled and numpy kernel backends on the assembly hot path.

Usage: python benchmarks/bench_kernels.py [--pairs N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from faultstab import kernels
from faultstab.fault_model import ObservationGrid, SineBasis
from faultstab.forward_op import ForwardModel, QuadratureRule
from faultstab.kernels import LameParams, free_space_tables, halfspace_tables

TABLES = {
    "mindlin_d1": lambda P, x, y: halfspace_tables(P, x, y),
    "mindlin_d1 + d1_3": lambda P, x, y: halfspace_tables(P, x, y, dy3=True),
    "kelvin_d1": lambda P, x, y: free_space_tables(P, x, y, "kelvin_d1"),
    "kelvin_d2": lambda P, x, y: free_space_tables(P, x, y, "kelvin_d2"),
}


def points(n, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-3, 3, (n, 3))
    x[:, 2] = 0.0
    y = rng.uniform(-1, 1, (n, 3))
    y[:, 2] = rng.uniform(-3, -1.5, n)
    return x, y


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    P = LameParams(1.0, 1.0)
    x, y = points(args.pairs)
    backends = kernels.available_backends()
    if len(backends) < 2:
        print("compiled backend not built; only numpy available")
    model = ForwardModel(P, ObservationGrid.uniform(-3, 3, -3, 3, 13, 13),
                         QuadratureRule.gauss_legendre(SineBasis(3, 3).rect, 24), SineBasis(3, 3))
    m0 = (0.2, -0.1, -2.0)

    old = kernels.get_backend()
    times = {}
    try:
        for name in backends:
            kernels.set_backend(name)
            for label, fn in TABLES.items():
                times[(label, name)] = best(lambda: fn(P, x, y), args.repeat)
            times[("assemble 507x18", name)] = best(lambda: model.operator(m0), args.repeat)
    finally:
        kernels.set_backend(old)

    labels = list(TABLES) + ["assemble 507x18"]
    head = f"{'kernel':<20}" + "".join(f"{b:>12}" for b in backends)
    if "cython" in backends:
        head += f"{'speedup':>10}"
    print(f"{args.pairs} point pairs, best of {args.repeat} (seconds)")
    print(head)
    for label in labels:
        line = f"{label:<20}" + "".join(f"{times[(label, b)]:>12.4f}" for b in backends)
        if "cython" in backends:
            line += f"{times[(label, 'numpy')] / times[(label, 'cython')]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
