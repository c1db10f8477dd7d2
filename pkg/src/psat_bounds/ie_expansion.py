"""Truncated Inclusion-Exclusion expansions over minimal struts or cuts.

A depth-``D`` truncation keeps the unions of up to ``D`` clauses.  Every
omitted term is a product over at least ``kappa(D) + 1`` events, so the
truncated polynomial is exact through order ``kappa(D)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import AbstractSet, Iterable, Sequence

from .errors import InconsistencyError, LimitExceededError
from .expr_core import MonotoneExpression, dual as dual_of

DEFAULT_MAX_TERMS = 10**7


@dataclass(frozen=True)
class UnionFamily:
    """Distinct unions of exactly ``depth`` clauses with signed multiplicities."""

    depth: int
    members: dict

    def __len__(self) -> int:
        return len(self.members)

    def sizes(self) -> list[int]:
        return sorted(len(u) for u in self.members)


def _clause_list(clauses) -> list[frozenset[int]]:
    if isinstance(clauses, MonotoneExpression):
        return list(clauses.clauses)
    return [frozenset(c) for c in clauses]


def _budget(m: int, depth: int, max_terms: int) -> None:
    raw = sum(comb(m, k) for k in range(1, depth + 1))
    if raw > max_terms:
        raise LimitExceededError(
            f"{raw} inclusion-exclusion terms at depth {depth} exceed budget {max_terms}"
        )


def build_unions(
    clauses: Iterable[AbstractSet[int]] | MonotoneExpression,
    depth: int,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> list[UnionFamily]:
    """Families ``M_1..M_D``; identical unions are merged and multiplicities summed."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cl = _clause_list(clauses)
    depth = min(depth, len(cl))
    _budget(len(cl), depth, max_terms)
    out = []
    for k in range(1, depth + 1):
        sign = 1 if k % 2 else -1
        acc: dict[frozenset[int], int] = {}
        for combo in combinations(cl, k):
            u = frozenset().union(*combo)
            acc[u] = acc.get(u, 0) + sign
        out.append(UnionFamily(k, {u: v for u, v in acc.items() if v}))
    return out


def min_union_size(clauses, size: int, weights: dict | None = None) -> int | None:
    """Smallest union of ``size`` distinct clauses, or None if there are fewer clauses.

    With ``weights`` the size of a union is the sum of its members'
    weights (default 1 each).  Depth-first with pruning on the running
    union size, which is far cheaper than listing every tuple when clauses
    overlap little.
    """
    cl = _clause_list(clauses)
    if size > len(cl):
        return None

    def weight(u) -> int:
        return len(u) if weights is None else sum(weights[e] for e in u)

    cl.sort(key=weight)
    best = [weight(frozenset().union(*cl[:size]))]

    def rec(start: int, picked: int, acc: frozenset) -> None:
        if weight(acc) >= best[0]:
            return
        if picked == size:
            best[0] = weight(acc)
            return
        for i in range(start, len(cl) - (size - picked) + 1):
            rec(i + 1, picked + 1, acc | cl[i])

    rec(0, 0, frozenset())
    return best[0]


def kappa(clauses, depth: int, n_events: int | None = None) -> int:
    """Highest order guaranteed exact by a depth-``depth`` truncation.

    One less than the smallest union of ``depth + 1`` clauses; ``n_events``
    (the full degree) when fewer clauses exist and the expansion is complete.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if isinstance(clauses, MonotoneExpression):
        n_events = clauses.n_events if n_events is None else n_events
    cl = _clause_list(clauses)
    if n_events is None:
        n_events = max(max(c) for c in cl)
    smallest = min_union_size(cl, depth + 1)
    if smallest is None:
        return n_events
    return smallest - 1


@dataclass(frozen=True)
class TaylorPrefix:
    """Low-order Taylor coefficients of ``Xi`` at one endpoint.

    At ``endpoint=0`` the coefficients are in powers of ``x``; at
    ``endpoint=1`` they are in powers of ``1 - x``.  ``coefficients`` has
    ``kappa + 1`` entries (all of them exact) unless ``full`` is set, in
    which case it is the complete degree-``n_events`` series.
    """

    endpoint: int
    coefficients: tuple
    kappa: int
    full: bool
    n_events: int
    depth: int

    def __post_init__(self):
        if self.endpoint not in (0, 1):
            raise ValueError("endpoint must be 0 or 1")
        if self.coefficients and self.coefficients[0] != self.endpoint:
            raise InconsistencyError(
                f"constant term {self.coefficients[0]} does not match endpoint {self.endpoint}"
            )


def expansion_coefficients(families: Sequence[UnionFamily], degree: int) -> list[int]:
    """Power-series coefficients of ``sum sign * x**|union|`` up to ``degree``."""
    coeffs = [0] * (degree + 1)
    for fam in families:
        for u, mult in fam.members.items():
            coeffs[len(u)] += mult
    return coeffs


def truncated_taylor(
    expr: MonotoneExpression,
    depth: int,
    endpoint: int = 0,
    dual_expr: MonotoneExpression | None = None,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> TaylorPrefix:
    """Homogeneous truncated expansion of ``Xi(E, x)`` at ``x = 0`` or ``x = 1``.

    At ``x = 1`` the dual clauses (the minimal cuts) are expanded in
    ``y = 1 - x`` and mapped back through ``Xi(E, x) = 1 - Xi(dual E, y)``,
    so the returned coefficients start with 1.  ``dual_expr`` may be
    supplied to avoid recomputing the transversals.
    """
    N = expr.n_events
    if endpoint == 0:
        clauses = expr.clauses
    elif endpoint == 1:
        clauses = (dual_expr if dual_expr is not None else dual_of(expr)).clauses
    else:
        raise ValueError("endpoint must be 0 or 1")
    full = depth >= len(clauses)
    k = N if full else kappa(clauses, depth, N)
    coeffs = expansion_coefficients(build_unions(clauses, depth, max_terms), N)
    kept = coeffs if full else coeffs[: k + 1]
    if endpoint == 1:
        kept = [1 - kept[0]] + [-c for c in kept[1:]]
    return TaylorPrefix(
        endpoint=endpoint,
        coefficients=tuple(Fraction(c) for c in kept),
        kappa=k,
        full=full,
        n_events=N,
        depth=depth,
    )
