"""Bounds and interpolants for the undetermined middle of a partial Bezier vector.

Every satisfiability curve has a nondecreasing Bezier vector, so the last
known prefix value and the first known suffix value bound every missing
coefficient.  The interpolants fill the gap between those two values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .bernstein import PartialBezier
from .errors import InconsistencyError
from .expr_core import MonotoneExpression

METHODS = ("linear", "log", "structureless")


@dataclass(frozen=True)
class BoundedEstimate:
    lower: tuple
    estimate: tuple
    upper: tuple
    method: str

    def __post_init__(self):
        for k, (lo, est, hi) in enumerate(zip(self.lower, self.estimate, self.upper)):
            if not lo <= est <= hi:
                raise InconsistencyError(f"estimate outside bounds at beta_{k}: {lo} {est} {hi}")


def monotone_bounds(partial: PartialBezier) -> tuple[tuple, tuple]:
    """Fill the middle with ``beta_kappa`` (lower) and ``beta_{N-kappa_bar}`` (upper)."""
    gap = partial.undetermined
    lower = partial.filled([partial.prefix[-1]] * len(gap))
    upper = partial.filled([partial.suffix[0]] * len(gap))
    return lower, upper


def _linear(partial: PartialBezier) -> list:
    k0, k1 = partial.kappa, partial.degree - partial.kappa_bar
    b0, b1 = partial.prefix[-1], partial.suffix[0]
    span = k1 - k0
    return [b0 + Fraction(k - k0, span) * (b1 - b0) for k in partial.undetermined]


def _log(partial: PartialBezier) -> list:
    k0, k1 = partial.kappa, partial.degree - partial.kappa_bar
    b0, b1 = partial.prefix[-1], partial.suffix[0]
    if b0 <= 0:
        raise ValueError(f"logarithmic interpolation needs beta_{k0} > 0")
    l0, l1 = math.log(b0), math.log(b1)
    span = k1 - k0
    return _clip([math.exp(l0 + (k - k0) / span * (l1 - l0)) for k in partial.undetermined], b0, b1)


def _clip(values, b0, b1) -> list:
    """Clamp float fills into ``[b0, b1]``, snapping to the exact endpoints."""
    lo, hi = float(b0), float(b1)
    return [b0 if v <= lo else b1 if v >= hi else v for v in values]


def structureless_step(n_k: float, N: int, k: int) -> float:
    """Expected number of solutions of size ``k+1`` generated by ``n_k`` random ones.

    Each size-``k`` solution has ``N - k`` supersets of size ``k + 1``; a
    given ``(k+1)``-subset is missed by one solution with probability
    ``1 - (k+1)/C(N,k)``.
    """
    total_k = comb(N, k)
    total_next = comb(N, k + 1)
    q = (k + 1) / total_k
    if q >= 1.0:
        return float(total_next) if n_k > 0 else 0.0
    # log1p keeps precision when C(N, k) is huge
    p_hit = -math.expm1(n_k * math.log1p(-q))
    return p_hit * total_next


def _structureless(partial: PartialBezier) -> list:
    N = partial.degree
    k0, k1 = partial.kappa, N - partial.kappa_bar
    b0, b1 = float(partial.prefix[-1]), float(partial.suffix[0])
    n = b0 * comb(N, k0)
    raw = []
    for k in range(k0, k1):
        n = structureless_step(n, N, k)
        raw.append(n / comb(N, k + 1))
    # raw[-1] is the recursion's value at k1; rescale so it meets b1 exactly
    reached = raw[-1]
    if reached > b0:
        scale = (b1 - b0) / (reached - b0)
        mid = [b0 + scale * (r - b0) for r in raw[:-1]]
    else:
        mid = [b0 + (b1 - b0) * (j + 1) / (k1 - k0) for j in range(len(raw) - 1)]
    out, top = [], b0
    for v in mid:
        top = min(max(top, v), b1)
        out.append(top)
    return _clip(out, partial.prefix[-1], partial.suffix[0])


def interpolate(partial: PartialBezier, method: str = "linear") -> tuple:
    """Interpolated full vector.  Linear stays exact; the others return floats."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if partial.is_complete:
        return partial.complete()
    if method == "linear":
        mid = _linear(partial)
    elif method == "log":
        mid = _log(partial)
    else:
        mid = _structureless(partial)
    return partial.filled(mid)


def bounded_estimate(partial: PartialBezier, method: str = "linear") -> BoundedEstimate:
    lower, upper = monotone_bounds(partial)
    return BoundedEstimate(lower, interpolate(partial, method), upper, method)


def series_parallel_envelope(N: int, x):
    """``(x**N, 1 - (1-x)**N)``: the series and parallel expressions on ``N`` events."""
    if not 0 <= x <= 1:
        raise ValueError(f"x={x} outside [0, 1]")
    return x**N, 1 - (1 - x) ** N


# ---------------------------------------------------------------------------
# Monte Carlo estimates of single coefficients


@dataclass(frozen=True)
class BetaSample:
    k: int
    trials: int
    successes: int
    seed: int | None = None

    @property
    def estimate(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def confidence_halfwidth(self) -> float:
        return 1.959963984540054 * self.stderr

    def clipped(self, lower, upper) -> float:
        """The estimate restricted to ``[lower, upper]``; the raw value stays available."""
        return min(max(self.estimate, float(lower)), float(upper))


def _shard_uniforms(seed, shard: int, trials: int, k: int) -> np.ndarray:
    ss = np.random.SeedSequence([0 if seed is None else int(seed), shard])
    return np.random.default_rng(ss).random((trials, k))


def mc_estimate_beta(
    oracle: MonotoneExpression | Callable[[frozenset], bool],
    N: int,
    k: int,
    trials: int,
    seed: int,
    shards: int = 1,
) -> BetaSample:
    """Fraction of uniformly random ``k``-subsets that satisfy the oracle.

    An expression oracle runs in the compiled kernel; any other callable
    receives the subset as a frozenset of event indices.  Trials are split
    across ``shards`` streams derived from ``(seed, shard)``.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 <= k <= N:
        raise ValueError(f"k={k} outside [0, {N}]")
    per = [trials // shards + (1 if s < trials % shards else 0) for s in range(shards)]
    hits = 0
    for shard, count in enumerate(per):
        if count == 0:
            continue
        u = _shard_uniforms(seed, shard, count, k)
        if isinstance(oracle, MonotoneExpression):
            masks = _kernels.as_mask_array(oracle.masks)
            hits += int(_kernels.subset_trials(masks, N, k, u))
        else:
            cfgs = _kernels.random_subset_masks_numpy(N, k, u)
            for m in cfgs.tolist():
                events = frozenset(i + 1 for i in range(N) if m >> i & 1)
                hits += bool(oracle(events))
    return BetaSample(k, trials, hits, seed)


def hybrid_fill(
    partial: PartialBezier,
    oracle,
    trials: int,
    seed: int,
    clip: bool = True,
) -> tuple[tuple, list[BetaSample]]:
    """Fill the undetermined middle with Monte Carlo estimates of each ``beta_k``.

    The samples do not move the bounds; by default each estimate is clipped
    to them and made nondecreasing.  The raw samples are returned alongside.
    """
    lower, upper = monotone_bounds(partial)
    samples, mid, top = [], [], float(partial.prefix[-1])
    for j, k in enumerate(partial.undetermined):
        s = mc_estimate_beta(oracle, partial.degree, k, trials, seed + 7919 * j)
        samples.append(s)
        if clip:
            top = max(top, s.clipped(lower[k], upper[k]))
            mid.append(top)
        else:
            mid.append(s.estimate)
    return partial.filled(mid), samples
