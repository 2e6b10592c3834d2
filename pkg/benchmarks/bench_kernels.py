"""Time the hot kernels on each available backend.

    python3 benchmarks/bench_kernels.py [--repeat N]

Also times a full deterministic construction and a decoder sweep with the
backend forced through the kernels module.
"""

import argparse
import itertools
import random
import statistics
import time

from netecc import kernels
from netecc.code import construct_deterministic, sink_matrices
from netecc.decode import ErrorVector, transmit
from netecc.field import FieldSpec
from netecc.cli import resolve_network


def _time(fn, repeat):
    runs = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - start)
    return statistics.median(runs)


def bench_row_reduce(mod, rnd):
    mats = [[tuple(rnd.randrange(421) for _ in range(8)) for _ in range(8)] for _ in range(300)]
    return lambda: [mod.row_reduce(m, 8, 421) for m in mats]


def bench_scan(mod, rnd):
    cases = []
    for _ in range(200):
        residuals = [[tuple(rnd.randrange(421) for _ in range(4)) for _ in range(2)] for _ in range(40)]
        cases.append(residuals)
    return lambda: [mod.scan_candidates(r, 2, 421) for r in cases]


def bench_exhaustive(mod, rnd):
    net = resolve_network("diamond")
    code, _ = construct_deterministic(net, 1, 1, FieldSpec(17))
    msg, err = sink_matrices(code, "t")
    obs = [transmit(code, (m,), ErrorVector.from_edges(net, {e: 3}, 17))["t"].symbols
           for m, e in itertools.product(range(17), net.edge_ids)]
    return lambda: [mod.exhaustive_search(msg, err, y, 1, len(net.edges), 1, 17) for y in obs]


def bench_construction(mod, rnd):
    net = resolve_network("fig1")

    def run():
        saved = kernels._impl
        kernels._impl = mod
        try:
            construct_deterministic(net, 2, 1, FieldSpec(421))
        finally:
            kernels._impl = saved
    return run


BENCHES = {
    "row_reduce 300x(8x8)": bench_row_reduce,
    "scan_candidates 200 edges": bench_scan,
    "exhaustive_search 102 obs": bench_exhaustive,
    "fig1 construction": bench_construction,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"{'benchmark':<28}" + "".join(f"{n:>12}" for n in backends) + "     speedup")
    for name, make in BENCHES.items():
        times = {b: _time(make(mod, random.Random(0)), args.repeat) for b, mod in backends.items()}
        row = f"{name:<28}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times.values())
        if "cython" in times:
            row += f"{times['python'] / times['cython']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
