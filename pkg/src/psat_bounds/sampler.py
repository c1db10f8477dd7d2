"""Sampling minimal struts and cuts through a black-box monotone oracle.

Every maximal chain of the subset lattice (a random ordering of the
events, read as growing prefixes) crosses from unsatisfying to satisfying
exactly once.  The crossing is found by bisection; the first satisfying
prefix is shrunk to a minimal strut and the complement of the last
unsatisfying prefix is shrunk to a minimal cut.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import MonotonicityError
from .expr_core import MonotoneExpression, config_mask
from .sat2graph import ReliabilityGraph, connected


class OracleHandle:
    """Callable wrapper that counts queries and can verify the lattice endpoints."""

    def __init__(self, n_events: int, query: Callable[[frozenset], bool], _counter: list | None = None):
        self.n_events = int(n_events)
        self._query = query
        self._counter = [0] if _counter is None else _counter
        self.universe = frozenset(range(1, self.n_events + 1))

    @property
    def calls(self) -> int:
        return self._counter[0]

    def __call__(self, config: Iterable[int]) -> bool:
        self._counter[0] += 1
        return bool(self._query(frozenset(config)))

    def check_endpoints(self) -> None:
        if self(frozenset()):
            raise MonotonicityError("oracle is satisfied by the empty configuration")
        if not self(self.universe):
            raise MonotonicityError("oracle rejects the full configuration")

    def dual(self) -> "OracleHandle":
        """The oracle ``c -> not query(complement(c))``, sharing this call counter."""
        query, universe = self._query, self.universe
        return OracleHandle(self.n_events, lambda c: not query(universe - c), self._counter)


class SerializedOracle:
    """Wrap a query function that is not safe to call concurrently."""

    def __init__(self, query: Callable[[frozenset], bool]):
        self._query = query
        self._lock = threading.Lock()

    def __call__(self, config: frozenset) -> bool:
        with self._lock:
            return self._query(config)


def expression_oracle(expr: MonotoneExpression) -> OracleHandle:
    masks = expr.masks

    def query(config: frozenset) -> bool:
        m = config_mask(config)
        return any(c & m == c for c in masks)

    return OracleHandle(expr.n_events, query)


def graph_oracle(graph: ReliabilityGraph) -> OracleHandle:
    return OracleHandle(graph.n_events, lambda c: connected(graph, c))


def find_boundary(
    oracle: OracleHandle,
    chain: Sequence[int],
    rng: np.random.Generator | None = None,
) -> frozenset[int]:
    """Shortest satisfying prefix of ``chain`` (the endpoints are assumed checked).

    Bisection alone never observes a reversal, so with ``rng`` one extra
    prefix, drawn away from the probed ones, is queried and must agree
    with the located boundary; otherwise ``MonotonicityError`` is raised.
    """
    chain = list(chain)
    lo, hi = 0, len(chain)
    seen = {0, hi}
    while hi - lo > 1:
        mid = (lo + hi) // 2
        seen.add(mid)
        if oracle(chain[:mid]):
            hi = mid
        else:
            lo = mid
    if rng is not None:
        spare = [j for j in range(len(chain) + 1) if j not in seen]
        if spare:
            j = spare[int(rng.integers(len(spare)))]
            if oracle(chain[:j]) != (j >= hi):
                raise MonotonicityError(f"oracle flips back along chain {chain} at prefix {j}")
    return frozenset(chain[:hi])


def minimize_strut(oracle: OracleHandle, config: Iterable[int], order: Sequence[int] | None = None) -> frozenset[int]:
    """Greedy one-pass deletion; minimal for any monotone oracle.

    ``order`` fixes the deletion order (default ascending event index).
    Once an event cannot be dropped it can never be dropped later, because
    the set only shrinks, so one pass suffices.
    """
    current = set(config)
    if order is None:
        order = sorted(current)
    for e in order:
        if e not in current:
            continue
        current.discard(e)
        if not oracle(current):
            current.add(e)
    return frozenset(current)


def is_minimal(oracle: Callable[[frozenset], bool], config: frozenset) -> bool:
    return bool(oracle(config)) and not any(oracle(config - {e}) for e in config)


def call_cap(n_events: int) -> int:
    """Per-sample worst-case query count of :func:`sample_minimal_sets`."""
    return n_events * (math.ceil(math.log2(n_events + 1)) + 2)


def biased_chain(rng: np.random.Generator, n_events: int, weights: Sequence[float] | None = None) -> list[int]:
    """Random event ordering; heavier events tend to come first.

    Uses exponential keys ``E_i / w_i`` sorted ascending, which draws a
    weighted permutation without replacement.
    """
    if weights is None:
        return [int(e) + 1 for e in rng.permutation(n_events)]
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n_events,) or np.any(w <= 0):
        raise ValueError("weights must be positive, one per event")
    keys = rng.standard_exponential(n_events) / w
    return [int(e) + 1 for e in np.argsort(keys, kind="stable")]


@dataclass(frozen=True)
class SampleReport:
    struts: tuple[frozenset[int], ...]
    cuts: tuple[frozenset[int], ...]
    oracle_calls: int
    seed: int
    n_samples: int
    strut_hits: dict = field(default_factory=dict, compare=False)
    cut_hits: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        def fmt(sets, hits):
            return [{"events": sorted(s), "hits": hits.get(s, 0)} for s in sets]

        return {
            "seed": self.seed,
            "samples": self.n_samples,
            "oracle_calls": self.oracle_calls,
            "unique_struts": len(self.struts),
            "unique_cuts": len(self.cuts),
            "struts": fmt(self.struts, self.strut_hits),
            "cuts": fmt(self.cuts, self.cut_hits),
        }


def _canon(sets) -> tuple[frozenset[int], ...]:
    return tuple(sorted(sets, key=lambda c: (sorted(c), len(c))))


def sample_minimal_sets(
    oracle: OracleHandle,
    n_samples: int,
    seed: int,
    weights: Sequence[float] | None = None,
) -> SampleReport:
    """Run ``n_samples`` independent chain searches and collect the minimal sets found."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    start = oracle.calls
    oracle.check_endpoints()
    dual = oracle.dual()
    struts: dict[frozenset[int], int] = {}
    cuts: dict[frozenset[int], int] = {}
    for _ in range(n_samples):
        chain = biased_chain(rng, oracle.n_events, weights)
        top = find_boundary(oracle, chain, rng)
        below = frozenset(chain[: len(top) - 1])
        order = [int(e) + 1 for e in rng.permutation(oracle.n_events)]
        s = minimize_strut(oracle, top, order)
        c = minimize_strut(dual, oracle.universe - below, order)
        if not s & c:
            # a strut and a cut of a monotone function always share an event
            raise MonotonicityError(f"strut {sorted(s)} and cut {sorted(c)} are disjoint")
        struts[s] = struts.get(s, 0) + 1
        cuts[c] = cuts.get(c, 0) + 1
    return SampleReport(
        struts=_canon(struts),
        cuts=_canon(cuts),
        oracle_calls=oracle.calls - start,
        seed=seed,
        n_samples=n_samples,
        strut_hits=struts,
        cut_hits=cuts,
    )
