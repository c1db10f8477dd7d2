"""Power and Bernstein bases, de Casteljau evaluation and prefix/suffix combination.

Two different "bar" relations are easy to confuse and are kept apart here:

* :func:`reflect` re-expands the *same* function in ``1 - x``; its Bezier
  vector is the reversed coefficient list.
* :func:`dual_complement` maps the dual expression's vector to the primal
  one, ``beta_k = 1 - beta_dual_{N-k}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from .errors import InconsistencyError, MonotonicityError
from .ie_expansion import TaylorPrefix


@lru_cache(maxsize=64)
def transform_matrix(N: int) -> tuple[tuple[Fraction, ...], ...]:
    """Lower-triangular ``T[k][j] = C(k, j) / C(N, j)`` taking power to Bernstein."""
    return tuple(
        tuple(Fraction(comb(k, j), comb(N, j)) for j in range(k + 1)) for k in range(N + 1)
    )


def power_to_bernstein(alpha: Sequence, N: int) -> tuple:
    """Bernstein coefficients of ``sum alpha_j x**j`` at degree ``N``.

    ``alpha`` shorter than ``N + 1`` is zero-padded.  Entries may be any
    numbers that multiply with ``Fraction``.
    """
    if len(alpha) > N + 1:
        raise ValueError(f"{len(alpha)} coefficients do not fit degree {N}")
    T = transform_matrix(N)
    a = list(alpha)
    out = []
    for k in range(N + 1):
        acc = 0
        for j in range(min(k + 1, len(a))):
            acc += a[j] * T[k][j]
        out.append(acc)
    return tuple(out)


def bernstein_prefix(alpha: Sequence, N: int, count: int) -> tuple:
    """First ``count`` Bernstein coefficients; they only need ``alpha[:count]``."""
    T = transform_matrix(N)
    a = list(alpha)
    return tuple(
        sum((a[j] * T[k][j] for j in range(min(k + 1, len(a)))), Fraction(0))
        for k in range(count)
    )


def bernstein_to_power(beta: Sequence) -> tuple:
    """Invert :func:`power_to_bernstein` by forward substitution on the triangular ``T``."""
    N = len(beta) - 1
    T = transform_matrix(N)
    alpha: list = []
    for k in range(N + 1):
        rest = beta[k] - sum((alpha[j] * T[k][j] for j in range(k)), Fraction(0))
        alpha.append(rest / T[k][k])
    return tuple(alpha)


def de_casteljau(beta: Sequence, x):
    """Evaluate the Bezier polynomial by repeated linear interpolation.

    Keeps the arithmetic of its inputs: fractions in, fraction out.
    """
    if not 0 <= x <= 1:
        raise ValueError(f"x={x} outside [0, 1]")
    b = list(beta)
    one_minus = 1 - x
    for r in range(len(b) - 1, 0, -1):
        for i in range(r):
            b[i] = one_minus * b[i] + x * b[i + 1]
    return b[0]


def evaluate_grid(beta: Sequence, xs) -> np.ndarray:
    """Vectorized float de Casteljau over an array of points."""
    xs = np.asarray(xs, dtype=np.float64)
    if np.any((xs < 0) | (xs > 1)):
        raise ValueError("evaluation points must lie in [0, 1]")
    b = np.tile(np.asarray([float(v) for v in beta]), (xs.size, 1))
    xx = xs.reshape(-1, 1)
    for r in range(b.shape[1] - 1, 0, -1):
        b[:, :r] = (1 - xx) * b[:, :r] + xx * b[:, 1 : r + 1]
    return b[:, 0].reshape(xs.shape)


def evaluate(beta: Sequence, x):
    return de_casteljau(beta, x)


def reflect(beta: Sequence) -> tuple:
    """Coefficients of ``x -> f(1 - x)``."""
    return tuple(reversed(tuple(beta)))


def dual_complement(beta_dual: Sequence) -> tuple:
    """Primal vector from the dual's: ``beta_k = 1 - beta_dual_{N-k}``."""
    return tuple(1 - b for b in reversed(tuple(beta_dual)))


def is_nondecreasing(values: Sequence) -> bool:
    return all(a <= b for a, b in zip(values, values[1:]))


def derivative_bernstein(beta: Sequence) -> tuple:
    """Bezier vector (degree ``N - 1``) of the derivative."""
    N = len(beta) - 1
    return tuple(N * (beta[k + 1] - beta[k]) for k in range(N))


@dataclass(frozen=True)
class PartialBezier:
    """Degree-``N`` Bezier vector known at both ends.

    ``prefix`` holds ``beta_0..beta_kappa`` and ``suffix`` holds
    ``beta_{N-kappa_bar}..beta_N``.  Entries strictly between are undetermined.
    With ``strict`` off, the known parts need not be nondecreasing; use
    this for curves whose Bezier vector is not a satisfiability vector.
    """

    degree: int
    prefix: tuple
    suffix: tuple
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        N = self.degree
        if not self.prefix or not self.suffix:
            raise ValueError("prefix and suffix must each hold at least one entry")
        if len(self.prefix) > N + 1 or len(self.suffix) > N + 1:
            raise ValueError("prefix or suffix longer than the vector")
        for name, part in (("prefix", self.prefix), ("suffix", self.suffix)):
            if self.strict and not is_nondecreasing(part):
                raise MonotonicityError(f"{name} is not nondecreasing: {list(map(str, part))}")
        lo = N - self.kappa_bar
        for k in range(lo, self.kappa + 1):
            if self.prefix[k] != self.suffix[k - lo]:
                raise InconsistencyError(
                    f"prefix and suffix disagree at beta_{k}: {self.prefix[k]} vs {self.suffix[k - lo]}"
                )
        if self.strict and self.prefix[-1] > self.suffix[0] and self.kappa < lo:
            raise MonotonicityError(
                f"beta_{self.kappa}={self.prefix[-1]} exceeds beta_{lo}={self.suffix[0]}"
            )

    @property
    def kappa(self) -> int:
        return len(self.prefix) - 1

    @property
    def kappa_bar(self) -> int:
        return len(self.suffix) - 1

    @property
    def undetermined(self) -> range:
        return range(self.kappa + 1, self.degree - self.kappa_bar)

    @property
    def is_complete(self) -> bool:
        return len(self.undetermined) == 0

    def known(self, k: int):
        if k <= self.kappa:
            return self.prefix[k]
        lo = self.degree - self.kappa_bar
        if k >= lo:
            return self.suffix[k - lo]
        return None

    def filled(self, middle: Sequence) -> tuple:
        """Full vector with ``middle`` placed in the undetermined slots."""
        gap = self.undetermined
        if len(middle) != len(gap):
            raise ValueError(f"expected {len(gap)} middle entries, got {len(middle)}")
        lo = self.degree - self.kappa_bar
        tail = self.suffix[self.kappa + 1 + len(gap) - lo :]
        return tuple(self.prefix) + tuple(middle) + tuple(tail)

    def complete(self) -> tuple:
        if not self.is_complete:
            raise InconsistencyError(f"coefficients {list(self.undetermined)} are undetermined")
        return self.filled([])

    def reflected_dual(self) -> "PartialBezier":
        """The dual problem's partial vector, ``beta'_k = 1 - beta_{N-k}``."""
        return PartialBezier(
            self.degree,
            dual_complement(self.suffix),
            dual_complement(self.prefix),
            self.strict,
        )

    def drop(self, k: int) -> "PartialBezier":
        """Forget every coefficient from ``beta_k`` up to the suffix (for experiments)."""
        lo = self.degree - self.kappa_bar
        suffix = self.suffix if k < lo else self.suffix[k + 1 - lo :]
        return PartialBezier(self.degree, self.prefix[:k], suffix, self.strict)


def _prefix_alpha(prefix: TaylorPrefix) -> tuple:
    return tuple(prefix.coefficients if prefix.full else prefix.coefficients[: prefix.kappa + 1])


def combine_dual(
    strut_prefix: TaylorPrefix,
    cut_prefix: TaylorPrefix,
    N: int | None = None,
    strict: bool = True,
) -> PartialBezier:
    """Merge the expansion at ``x = 0`` with the one at ``x = 1`` into one partial vector.

    ``cut_prefix`` is either the primal function expanded in ``1 - x``
    (``endpoint=1``, constant term 1) or the dual expression's own
    expansion at its origin (``endpoint=0``, constant term 0); the
    complement is applied here so callers never pre-negate.
    """
    if strut_prefix.endpoint != 0:
        raise ValueError("strut_prefix must be an expansion at x = 0")
    N = strut_prefix.n_events if N is None else N
    a = _prefix_alpha(strut_prefix)
    k_hi = N if strut_prefix.full else min(strut_prefix.kappa, N)
    prefix = bernstein_prefix(a, N, k_hi + 1)

    c = _prefix_alpha(cut_prefix)
    if cut_prefix.endpoint == 1:
        # from Xi itself in powers of (1 - x) to the dual's own series
        c = (1 - c[0],) + tuple(-v for v in c[1:])
    kb = N if cut_prefix.full else min(cut_prefix.kappa, N)
    dual_head = bernstein_prefix(c, N, kb + 1)
    suffix = tuple(1 - b for b in reversed(dual_head))
    return PartialBezier(N, prefix, suffix, strict)
