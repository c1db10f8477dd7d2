"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--events 20] [--repeat 5]

Both paths are imported directly from the kernel module, so the
``PSAT_DISABLE_NUMBA`` flag does not matter here.  The first numba call
is reported separately because it includes compilation (or a cache load).
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from psat_bounds import _kernels as K
from psat_bounds.expr_core import example_expression, parse_expression
from psat_bounds.sat2graph import _kernel_arrays, sat_to_graph


def random_expression(n: int, clauses: int, rng):
    lines = [f"N={n}"]
    for _ in range(clauses):
        size = int(rng.integers(2, max(3, n // 3)))
        members = sorted(rng.choice(n, size=size, replace=False) + 1)
        lines.append(" ".join(map(str, members)))
    return parse_expression("\n".join(lines) + "\n")


def timed(fn, repeat: int) -> float:
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--events", type=int, default=20)
    ap.add_argument("--clauses", type=int, default=12)
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    expr = random_expression(args.events, args.clauses, rng)
    masks = K.as_mask_array(expr.masks)
    n, full = expr.n_events, 1 << expr.n_events
    x = rng.uniform(0.2, 0.8, n)
    k = n // 2
    uniforms = rng.random((args.trials, k))
    graph = sat_to_graph(example_expression())
    arrays = _kernel_arrays(graph)
    open_ = rng.random((args.trials, graph.n_events)) < 0.5

    cases = [
        ("level_counts", K.level_counts_numba, K.level_counts_numpy, (masks, n, 0, full)),
        ("satisfied_probability", K.satisfied_probability_numba, K.satisfied_probability_numpy, (masks, x, 0, full)),
        ("subset_trials", K.subset_trials_numba, K.subset_trials_numpy, (masks, n, k, uniforms)),
        ("connected_count", K.connected_count_numba, K.connected_count_numpy, (*arrays, open_)),
    ]
    print(f"N={n}, clauses={len(expr)}, trials={args.trials}, repeat={args.repeat} (median seconds)")
    print(f"{'kernel':<24}{'first numba':>12}{'numba':>10}{'numpy':>10}{'speedup':>9}  agree")
    for name, fast, slow, call in cases:
        t0 = time.perf_counter()
        a = fast(*call)
        first = time.perf_counter() - t0
        b = slow(*call)
        agree = np.allclose(a, b, rtol=1e-12, atol=0)
        tf = timed(lambda: fast(*call), args.repeat)
        ts = timed(lambda: slow(*call), args.repeat)
        print(f"{name:<24}{first:>12.4f}{tf:>10.4f}{ts:>10.4f}{ts / tf:>8.1f}x  {agree}")


if __name__ == "__main__":
    main()
