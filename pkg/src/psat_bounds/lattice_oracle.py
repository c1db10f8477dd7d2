"""Exhaustive ground truth over all ``2**N`` configurations."""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import LimitExceededError
from .expr_core import MonotoneExpression

DEFAULT_BRUTE_LIMIT = 24


def brute_limit(limit: int | None = None) -> int:
    """Resolve the brute-force limit: explicit argument, then ``PSAT_BRUTE_LIMIT``."""
    if limit is not None:
        return int(limit)
    env = os.environ.get("PSAT_BRUTE_LIMIT")
    return int(env) if env else DEFAULT_BRUTE_LIMIT


def _check(expr: MonotoneExpression, limit: int | None) -> None:
    lim = brute_limit(limit)
    if expr.n_events > lim:
        raise LimitExceededError(
            f"N={expr.n_events} exceeds brute-force limit {lim} (set PSAT_BRUTE_LIMIT)"
        )
    if expr.n_events > 62:
        raise LimitExceededError("enumeration supports at most 62 events")


def _blocks(n: int, shards: int) -> list[tuple[int, int]]:
    total = 1 << n
    shards = max(1, min(shards, total))
    edges = [total * s // shards for s in range(shards + 1)]
    return list(zip(edges[:-1], edges[1:]))


def density_of_states(
    expr: MonotoneExpression, limit: int | None = None, shards: int = 1
) -> tuple[int, ...]:
    """``n[k]`` = number of satisfying configurations with exactly ``k`` true events.

    ``shards`` splits the lattice into disjoint prefix blocks whose counts
    are summed; the result does not depend on it.
    """
    _check(expr, limit)
    masks = _kernels.as_mask_array(expr.masks)
    total = np.zeros(expr.n_events + 1, dtype=np.int64)
    for lo, hi in _blocks(expr.n_events, shards):
        total += _kernels.level_counts(masks, expr.n_events, lo, hi)
    return tuple(int(v) for v in total)


def exact_bezier(expr: MonotoneExpression, limit: int | None = None) -> tuple[Fraction, ...]:
    """Bezier coefficients ``beta_k = n_k / C(N, k)`` as exact fractions."""
    n = density_of_states(expr, limit)
    N = expr.n_events
    return tuple(Fraction(n[k], comb(N, k)) for k in range(N + 1))


def count_solutions(expr: MonotoneExpression, limit: int | None = None) -> int:
    return sum(density_of_states(expr, limit))


def _as_vector(expr: MonotoneExpression, x) -> list:
    if np.ndim(x) == 0:
        return [x] * expr.n_events
    x = list(x)
    if len(x) != expr.n_events:
        raise ValueError(f"expected {expr.n_events} probabilities, got {len(x)}")
    return x


def _validate(x: Sequence) -> None:
    for v in x:
        if not 0 <= v <= 1:
            raise ValueError(f"probability {v} outside [0, 1]")


def exact_satisfiability(expr: MonotoneExpression, x, limit: int | None = None, exact: bool = False):
    """Probability that ``expr`` holds when event ``i`` occurs with probability ``x[i-1]``.

    A scalar ``x`` means every event has that probability.  With
    ``exact=True`` the sum is carried out in the input's own arithmetic
    (e.g. ``Fraction``) by Shannon expansion; otherwise the enumeration
    kernel is used in float64.
    """
    _check(expr, limit)
    x = _as_vector(expr, x)
    _validate(x)
    if exact:
        return shannon_probability(expr.clauses, x)
    xs = np.asarray([float(v) for v in x], dtype=np.float64)
    masks = _kernels.as_mask_array(expr.masks)
    return float(_kernels.satisfied_probability(masks, xs, 0, 1 << expr.n_events))


def shannon_probability(clauses, x):
    """Exact multi-affine evaluation by recursive conditioning on one event.

    Works for any ring elements supporting ``+``, ``-`` and ``*``
    (fractions, floats, sympy expressions or polynomials).  ``x`` is indexed
    by ``event - 1``.
    """
    one = x[0] * 0 + 1 if len(x) else 1

    @lru_cache(maxsize=None)
    def rec(family: frozenset) -> object:
        if frozenset() in family:
            return one
        if not family:
            return one - one
        # Condition on the most frequent event to keep the recursion shallow.
        freq: dict[int, int] = {}
        for c in family:
            for e in c:
                freq[e] = freq.get(e, 0) + 1
        pivot = min(freq, key=lambda e: (-freq[e], e))
        with_pivot = frozenset(c - {pivot} for c in family)
        without = frozenset(c for c in family if pivot not in c)
        xp = x[pivot - 1]
        return xp * rec(_minimal(with_pivot)) + (one - xp) * rec(without)

    return rec(frozenset(frozenset(c) for c in clauses))


def _minimal(family: frozenset) -> frozenset:
    return frozenset(c for c in family if not any(o < c for o in family))


def homogeneous_polynomial(expr: MonotoneExpression, limit: int | None = None) -> tuple[Fraction, ...]:
    """Power-basis coefficients of ``Xi(E, x)`` obtained from the exact Bezier vector."""
    from .bernstein import bernstein_to_power

    return bernstein_to_power(exact_bezier(expr, limit))
