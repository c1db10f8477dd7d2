"""Hot loops over the configuration lattice, in numba and plain numpy.

Both implementations of every kernel are importable (``*_numba`` and
``*_numpy``) so they can be cross-checked and benchmarked; the unprefixed
names dispatch to numba unless ``PSAT_DISABLE_NUMBA`` is set to a truthy
value or numba is unavailable.  Random numbers are always drawn by the
caller, which keeps both paths bit-for-bit identical for a given seed.
"""

from __future__ import annotations

import os

import numpy as np

_BLOCK = 1 << 18

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f


def _flag_off(value: str | None) -> bool:
    return value is None or value.strip().lower() in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and _flag_off(os.environ.get("PSAT_DISABLE_NUMBA"))
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# density of states


@njit(cache=True)
def level_counts_numba(masks, n, start, stop):
    counts = np.zeros(n + 1, dtype=np.int64)
    m = masks.shape[0]
    for c in range(start, stop):
        cfg = np.uint64(c)
        for j in range(m):
            if cfg & masks[j] == masks[j]:
                # popcount
                v = cfg
                bits = 0
                while v:
                    v &= v - np.uint64(1)
                    bits += 1
                counts[bits] += 1
                break
    return counts


def _satisfied_block(masks, cfg):
    sat = np.zeros(cfg.shape[0], dtype=bool)
    for m in masks:
        sat |= (cfg & m) == m
    return sat


def level_counts_numpy(masks, n, start, stop):
    counts = np.zeros(n + 1, dtype=np.int64)
    for lo in range(start, stop, _BLOCK):
        cfg = np.arange(lo, min(lo + _BLOCK, stop), dtype=np.uint64)
        sat = _satisfied_block(masks, cfg)
        bits = np.bitwise_count(cfg[sat])
        counts += np.bincount(bits, minlength=n + 1)[: n + 1]
    return counts


# ---------------------------------------------------------------------------
# heterogeneous satisfiability


@njit(cache=True)
def satisfied_probability_numba(masks, x, start, stop):
    n = x.shape[0]
    m = masks.shape[0]
    total = 0.0
    for c in range(start, stop):
        cfg = np.uint64(c)
        hit = False
        for j in range(m):
            if cfg & masks[j] == masks[j]:
                hit = True
                break
        if hit:
            p = 1.0
            for i in range(n):
                if (cfg >> np.uint64(i)) & np.uint64(1):
                    p *= x[i]
                else:
                    p *= 1.0 - x[i]
            total += p
    return total


def satisfied_probability_numpy(masks, x, start, stop):
    n = x.shape[0]
    total = 0.0
    for lo in range(start, stop, _BLOCK):
        cfg = np.arange(lo, min(lo + _BLOCK, stop), dtype=np.uint64)
        cfg = cfg[_satisfied_block(masks, cfg)]
        p = np.ones(cfg.shape[0])
        for i in range(n):
            bit = ((cfg >> np.uint64(i)) & np.uint64(1)).astype(bool)
            p *= np.where(bit, x[i], 1.0 - x[i])
        total += p.sum()
    return total


# ---------------------------------------------------------------------------
# Monte Carlo estimation of one Bezier coefficient


@njit(cache=True)
def subset_trials_numba(masks, n, k, uniforms):
    trials = uniforms.shape[0]
    m = masks.shape[0]
    perm = np.empty(n, dtype=np.int64)
    hits = 0
    for t in range(trials):
        for i in range(n):
            perm[i] = i
        cfg = np.uint64(0)
        for j in range(k):
            r = j + int(uniforms[t, j] * (n - j))
            if r >= n:
                r = n - 1
            tmp = perm[j]
            perm[j] = perm[r]
            perm[r] = tmp
            cfg |= np.uint64(1) << np.uint64(perm[j])
        for j in range(m):
            if cfg & masks[j] == masks[j]:
                hits += 1
                break
    return hits


def random_subset_masks_numpy(n, k, uniforms):
    """Partial Fisher-Yates, vectorized over trials; returns uint64 masks."""
    trials = uniforms.shape[0]
    perm = np.tile(np.arange(n, dtype=np.int64), (trials, 1))
    rows = np.arange(trials)
    cfg = np.zeros(trials, dtype=np.uint64)
    for j in range(k):
        r = j + (uniforms[:, j] * (n - j)).astype(np.int64)
        np.minimum(r, n - 1, out=r)
        tmp = perm[rows, j].copy()
        perm[rows, j] = perm[rows, r]
        perm[rows, r] = tmp
        cfg |= np.uint64(1) << perm[:, j].astype(np.uint64)
    return cfg


def subset_trials_numpy(masks, n, k, uniforms):
    cfg = random_subset_masks_numpy(n, k, uniforms)
    return int(_satisfied_block(masks, cfg).sum())


# ---------------------------------------------------------------------------
# S-T connectivity on a DAG whose vertex ids are topologically ordered


@njit(cache=True)
def connected_count_numba(src, dst, label, n_vertices, source, sink, open_events):
    samples = open_events.shape[0]
    n_edges = src.shape[0]
    reach = np.zeros(n_vertices, dtype=np.bool_)
    hits = 0
    for s in range(samples):
        reach[:] = False
        reach[source] = True
        for e in range(n_edges):
            if reach[src[e]] and open_events[s, label[e]]:
                reach[dst[e]] = True
        if reach[sink]:
            hits += 1
    return hits


def connected_count_numpy(src, dst, label, n_vertices, source, sink, open_events):
    samples = open_events.shape[0]
    reach = np.zeros((samples, n_vertices), dtype=bool)
    reach[:, source] = True
    for e in range(src.shape[0]):
        reach[:, dst[e]] |= reach[:, src[e]] & open_events[:, label[e]]
    return int(reach[:, sink].sum())


if USE_NUMBA:
    level_counts = level_counts_numba
    satisfied_probability = satisfied_probability_numba
    subset_trials = subset_trials_numba
    connected_count = connected_count_numba
else:
    level_counts = level_counts_numpy
    satisfied_probability = satisfied_probability_numpy
    subset_trials = subset_trials_numpy
    connected_count = connected_count_numpy


def as_mask_array(masks) -> np.ndarray:
    return np.asarray(list(masks), dtype=np.uint64)
