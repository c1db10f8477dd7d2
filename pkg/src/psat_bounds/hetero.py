"""Heterogeneous event probabilities.

Unequal probabilities are placed on a one-parameter curve ``x(t)`` that
runs from all-zero at ``t = 0`` to all-one at ``t = 1`` and passes through
the given probabilities at ``t = t*``.  Along the curve the satisfiability
is a polynomial in ``t``, so the homogeneous machinery (truncated
expansions at both ends, Bernstein prefix/suffix, bounds, interpolants)
applies unchanged with the curve's degree in place of ``N``.

Two curves are provided:

* polynomial: ``x_i(t) = t + w_i * s * eps_2n(t)`` where ``eps_2n`` is the
  degree-``2n`` Bernstein approximant of the unit triangle;
* rate: ``x_i = 1 - exp(-rho_i * tau)``; commensurate rates make
  ``x_i = 1 - t**m_i`` with ``t = exp(-g * tau)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Mapping, Sequence

import numpy as np
import sympy

from .bernstein import (
    PartialBezier,
    combine_dual,
    de_casteljau,
    evaluate_grid,
    is_nondecreasing,
    power_to_bernstein,
)
from .bounds_interp import BoundedEstimate, bounded_estimate
from .errors import InconsistencyError, MonotonicityError
from .expr_core import MonotoneExpression, dual as dual_of
from .ie_expansion import DEFAULT_MAX_TERMS, TaylorPrefix, build_unions, min_union_size
from .lattice_oracle import exact_satisfiability, shannon_probability

t = sympy.Symbol("t")
ONE = sympy.Poly(1, t, domain="QQ")
T_POLY = sympy.Poly(t, t, domain="QQ")


def to_fraction(v) -> Fraction:
    """Exact rational for ints, fractions, ``p/q`` strings and floats (via their repr)."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, sympy.Rational):
        return Fraction(int(v.p), int(v.q))
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(repr(float(v)))


def _rat(v) -> sympy.Rational:
    f = to_fraction(v)
    return sympy.Rational(f.numerator, f.denominator)


def poly_coefficients(p: sympy.Poly, upto: int) -> list[Fraction]:
    """Ascending coefficients ``c_0..c_upto`` (zero-padded) as fractions."""
    coeffs = [Fraction(0)] * (upto + 1)
    for (deg,), c in p.terms():
        if deg <= upto:
            coeffs[deg] = Fraction(int(c.p), int(c.q))
    return coeffs


def valuation(p: sympy.Poly) -> int:
    """Lowest degree carrying a nonzero coefficient."""
    terms = p.terms()
    if not terms:
        raise ValueError("zero polynomial has no valuation")
    return min(deg for (deg,), _ in terms)


def _reverse_argument(p: sympy.Poly) -> sympy.Poly:
    """``u -> p(1 - u)``."""
    return p.compose(ONE - T_POLY)


# ---------------------------------------------------------------------------
# polynomial (center / half-width) decomposition


@dataclass(frozen=True)
class HeteroDecomposition:
    """``x_i = center + weights[i] * halfwidth``, extremes at weights +-1."""

    center: Fraction
    halfwidth: Fraction
    weights: tuple[Fraction, ...]

    @property
    def homogeneous(self) -> bool:
        return self.halfwidth == 0

    def probabilities(self) -> tuple[Fraction, ...]:
        return tuple(self.center + w * self.halfwidth for w in self.weights)


def polynomial_decompose(x: Sequence) -> HeteroDecomposition:
    xs = [to_fraction(v) for v in x]
    if any(not 0 <= v <= 1 for v in xs):
        raise ValueError("probabilities must lie in [0, 1]")
    hi, lo = max(xs), min(xs)
    center, half = (hi + lo) / 2, (hi - lo) / 2
    if half == 0:
        return HeteroDecomposition(center, Fraction(0), tuple(Fraction(0) for _ in xs))
    return HeteroDecomposition(center, half, tuple((v - center) / half for v in xs))


def dual_decompose(d: HeteroDecomposition) -> HeteroDecomposition:
    """Parameters of the complementary probabilities ``1 - x_i``.

    The center is complemented, the half-width kept and each event's
    weight negated in place (events keep their indices).
    """
    return HeteroDecomposition(1 - d.center, d.halfwidth, tuple(-w for w in d.weights))


def envelope_coefficients(n: int) -> tuple[Fraction, ...]:
    """Bezier vector of ``eps_2n``: the unit triangle sampled at ``k / 2n``."""
    if n < 1:
        raise ValueError("envelope order must be at least 1")
    m = 2 * n
    return tuple(1 - abs(Fraction(2 * k, m) - 1) for k in range(m + 1))


def envelope(n: int, s):
    return de_casteljau(envelope_coefficients(n), s)


def envelope_peak(n: int) -> Fraction:
    """``eps_2n(1/2) = 1 - C(2n, n) / 4**n``."""
    return 1 - Fraction(comb(2 * n, n), 4**n)


def envelope_poly(n: int) -> sympy.Poly:
    from .bernstein import bernstein_to_power

    alpha = bernstein_to_power(envelope_coefficients(n))
    return sympy.Poly(sum(_rat(a) * t**j for j, a in enumerate(alpha)), t, domain="QQ")


def scale_factor(d: HeteroDecomposition, n: int) -> Fraction:
    """``s = halfwidth / eps_2n(center)``, which anchors the curve at ``t* = center``."""
    if d.homogeneous:
        return Fraction(0)
    peak = envelope(n, d.center)
    if peak == 0:
        raise InconsistencyError("center at 0 or 1 leaves no room for heterogeneity")
    return d.halfwidth / peak


def feasible(d: HeteroDecomposition, n: int) -> bool:
    """Unitarity: ``s * max|w| <= 1/2`` keeps every curve inside [0, 1]."""
    return d.homogeneous or scale_factor(d, n) * max(abs(w) for w in d.weights) <= Fraction(1, 2)


def choose_envelope_order(x: Sequence, max_order: int = 64) -> int:
    """Smallest ``n`` with ``range <= 1 - 2**(1-2n)``, raised until the curve is unitary."""
    d = polynomial_decompose(x)
    width = 2 * d.halfwidth
    n = 1
    while width > 1 - Fraction(2, 4**n):
        n += 1
    while not feasible(d, n):
        n += 1
        if n > max_order:
            raise InconsistencyError("no envelope order keeps the curve inside [0, 1]")
    return n


def _check_feasible(d: HeteroDecomposition, n: int) -> Fraction:
    s = scale_factor(d, n)
    if not feasible(d, n):
        raise InconsistencyError(
            f"envelope order {n} too small: s*max|w| = {float(s * max(map(abs, d.weights))):.4f} > 1/2"
        )
    return s


def curve_probabilities(d: HeteroDecomposition, n: int, s_param) -> tuple:
    """Event probabilities at curve parameter ``s_param``; exact in fractions."""
    s = _check_feasible(d, n)
    e = envelope(n, s_param)
    return tuple(s_param + w * s * e for w in d.weights)


def curve_polys(d: HeteroDecomposition, n: int) -> list[sympy.Poly]:
    s = _check_feasible(d, n)
    env = envelope_poly(n)
    return [T_POLY + env * _rat(w * s) for w in d.weights]


def curve_polynomial(expr: MonotoneExpression, d: HeteroDecomposition, n: int) -> sympy.Poly:
    """Exact satisfiability along the polynomial curve."""
    return shannon_probability(expr.clauses, curve_polys(d, n))


# ---------------------------------------------------------------------------
# truncated expansions with per-event polynomials


def ie_polynomial(clauses, polys: Sequence[sympy.Poly], depth: int, max_terms: int = DEFAULT_MAX_TERMS) -> sympy.Poly:
    """Depth-truncated Inclusion-Exclusion sum with event ``e`` replaced by ``polys[e-1]``."""
    total = ONE - ONE
    cache: dict[frozenset, sympy.Poly] = {}
    for fam in build_unions(clauses, depth, max_terms):
        for u, mult in fam.members.items():
            if u not in cache:
                prod = ONE
                for e in sorted(u):
                    prod = prod * polys[e - 1]
                cache[u] = prod
            total = total + cache[u] * mult
    return total


def curve_taylor(
    clauses,
    polys: Sequence[sympy.Poly],
    depth: int,
    degree: int,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> TaylorPrefix:
    """Expansion at ``t = 0`` truncated at ``depth``, with its exactness order.

    The order is one less than the smallest total valuation over omitted
    ``depth + 1``-fold unions, capped at ``degree``.
    """
    clauses = [frozenset(c) for c in clauses]
    full = depth >= len(clauses)
    p = ie_polynomial(clauses, polys, depth, max_terms)
    if full:
        k = degree
        complete = p.degree() <= degree
    else:
        vals = {e: valuation(polys[e - 1]) for c in clauses for e in c}
        k = min(min_union_size(clauses, depth + 1, vals) - 1, degree)
        complete = False
    return TaylorPrefix(
        endpoint=0,
        coefficients=tuple(poly_coefficients(p, k)),
        kappa=k,
        full=complete,
        n_events=degree,
        depth=depth,
    )


def curve_partial(
    strut_clauses,
    cut_clauses,
    polys: Sequence[sympy.Poly],
    depth: int,
    cut_depth: int,
    degree: int,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> PartialBezier:
    """Degree-``degree`` partial Bezier vector of the satisfiability along a curve."""
    head = curve_taylor(strut_clauses, polys, depth, degree, max_terms)
    dual_polys = [ONE - _reverse_argument(p) for p in polys]
    tail = curve_taylor(cut_clauses, dual_polys, cut_depth, degree, max_terms)
    return combine_dual(head, tail, degree, strict=False)


def truncated_curve_taylor(
    expr: MonotoneExpression,
    d: HeteroDecomposition,
    n: int,
    depth: int,
    endpoint: int = 0,
    degree: int | None = None,
    dual_expr: MonotoneExpression | None = None,
) -> TaylorPrefix:
    """Truncated expansion of the polynomial-curve satisfiability at ``t = 0`` or ``t = 1``.

    The ``endpoint=1`` result is in powers of ``1 - t`` and starts with 1.
    """
    polys = curve_polys(d, n)
    M = curve_degree(expr, polys) if degree is None else degree
    if endpoint == 0:
        return curve_taylor(expr.clauses, polys, depth, M)
    cuts = (dual_expr or dual_of(expr)).clauses
    tp = curve_taylor(cuts, [ONE - _reverse_argument(p) for p in polys], depth, M)
    c = tp.coefficients
    return TaylorPrefix(1, (1 - c[0],) + tuple(-v for v in c[1:]), tp.kappa, tp.full, M, depth)


def curve_degree(expr: MonotoneExpression, polys: Sequence[sympy.Poly]) -> int:
    """Degree bound: sum of the per-event curve degrees over the events in use."""
    return sum(polys[e - 1].degree() for e in expr.support)


# ---------------------------------------------------------------------------
# bounds along a curve


@dataclass(frozen=True)
class CurveBounds:
    """Bounds and estimate along a curve, as Bezier vectors in ``t``.

    When ``complemented`` is set the vectors describe ``1 - Xi``; the
    accessors undo that, so ``lower``/``upper`` below always refer to Xi.
    """

    kind: str
    t_star: float
    degree: int
    partial: PartialBezier
    vectors: BoundedEstimate | None
    estimate_vector: tuple
    method: str
    complemented: bool
    monotone: bool
    diagnostics: tuple[str, ...] = ()

    def _ev(self, vec, s):
        v = float(de_casteljau([float(b) for b in vec], float(s)))
        return 1.0 - v if self.complemented else v

    def estimate(self, s=None) -> float:
        return self._ev(self.estimate_vector, self.t_star if s is None else s)

    def bounds(self, s=None) -> tuple[float, float]:
        if self.vectors is None:
            raise MonotonicityError("bounds withheld: satisfiability is not monotone along the curve")
        s = self.t_star if s is None else s
        a, b = self._ev(self.vectors.lower, s), self._ev(self.vectors.upper, s)
        return (b, a) if self.complemented else (a, b)

    def grid(self, points: int) -> dict[str, np.ndarray]:
        ts = np.linspace(0.0, 1.0, points)

        def ev(vec):
            v = evaluate_grid(vec, ts)
            return 1.0 - v if self.complemented else v

        out = {"t": ts, "estimate": ev(self.estimate_vector)}
        if self.vectors is not None:
            lo, hi = ev(self.vectors.lower), ev(self.vectors.upper)
            out["lower"], out["upper"] = (hi, lo) if self.complemented else (lo, hi)
        return out


def _monotone_on_grid(p: sympy.Poly, increasing: bool, points: int = 1001) -> bool:
    der = [float(c) for c in reversed(p.diff(t).all_coeffs())]
    ts = np.linspace(0.0, 1.0, points)
    vals = np.polynomial.polynomial.polyval(ts, der) if der else np.zeros_like(ts)
    tol = 1e-9 * max(1.0, float(np.max(np.abs(vals))))
    return bool(np.all(vals >= -tol)) if increasing else bool(np.all(vals <= tol))


def _finish(kind, t_star, partial, method, complemented, monotone, diags) -> CurveBounds:
    diags = list(diags)
    if not (is_nondecreasing(partial.prefix) and is_nondecreasing(partial.suffix)):
        diags.append("known Bezier coefficients along the curve are not monotone")
    if monotone:
        vectors = bounded_estimate(partial, method)
        estimate = vectors.estimate
    else:
        from .bounds_interp import interpolate

        vectors = None
        estimate = interpolate(partial, method)
        diags.append("monotonicity check failed; bounds withheld")
    return CurveBounds(
        kind, float(t_star), partial.degree, partial, vectors, estimate, method,
        complemented, monotone, tuple(diags),
    )


def polynomial_curve_bounds(
    expr: MonotoneExpression,
    x: Sequence,
    depth: int = 1,
    cut_depth: int = 1,
    method: str = "linear",
    n: int | None = None,
    degree: int | None = None,
    dual_expr: MonotoneExpression | None = None,
    check_monotone: bool = True,
) -> CurveBounds:
    """Bounds on Xi along the polynomial curve through ``x``; evaluate at ``t_star``.

    ``degree`` defaults to the curve's degree bound; smaller values give a
    lower-degree Bezier approximation.
    """
    d = polynomial_decompose(x)
    n = choose_envelope_order(x) if n is None else n
    polys = curve_polys(d, n)
    M = curve_degree(expr, polys) if degree is None else degree
    cuts = (dual_expr or dual_of(expr)).clauses
    partial = curve_partial(expr.clauses, cuts, polys, depth, cut_depth, M)
    diags = []
    monotone = True
    if check_monotone and not all(_monotone_on_grid(p, True) for p in polys):
        monotone = _monotone_on_grid(curve_polynomial(expr, d, n), True)
        diags.append("some event curves are not monotone; checked Xi(t) directly")
    return _finish("polynomial", d.center, partial, method, False, monotone, diags)


# ---------------------------------------------------------------------------
# rate (logarithmic) decomposition


@dataclass(frozen=True)
class RateDecomposition:
    """Poisson rates ``rho_i = center + weights[i] * spread`` observed at horizon ``tau``."""

    rates: tuple
    center: float
    spread: float
    weights: tuple
    tau: float = 1.0

    def probabilities(self, tau: float | None = None) -> tuple[float, ...]:
        tau = self.tau if tau is None else tau
        return tuple(-math.expm1(-float(r) * tau) for r in self.rates)


def log_decompose(values: Sequence, kind: str = "prob", tau: float = 1.0) -> RateDecomposition:
    """Rates from probabilities (``rho = -ln(1 - x) / tau``) or take them as given."""
    if kind == "prob":
        if any(float(v) >= 1 for v in values):
            raise ValueError("probability 1 means an infinite rate")
        rates = tuple(-math.log1p(-float(v)) / tau for v in values)
    elif kind == "rate":
        rates = tuple(to_fraction(v) if isinstance(v, (str, Fraction, int)) else float(v) for v in values)
    else:
        raise ValueError("kind must be 'prob' or 'rate'")
    if any(r <= 0 for r in rates):
        raise ValueError("rates must be positive")
    hi, lo = max(rates), min(rates)
    center, spread = (hi + lo) / 2, (hi - lo) / 2
    weights = tuple(((r - center) / spread) if spread else 0 for r in rates)
    return RateDecomposition(rates, center, spread, weights, tau)


@dataclass(frozen=True)
class RationalRates:
    """Commensurate rates ``rho_i = m_i * quantum``; ``t = exp(-quantum * tau)``."""

    m: tuple[int, ...]
    quantum: float
    t_star: float

    @property
    def degree(self) -> int:
        return sum(self.m)

    def polys(self) -> list[sympy.Poly]:
        """Event probabilities ``1 - t**m_i`` as polynomials."""
        return [ONE - T_POLY**mi for mi in self.m]


def rational_rates(rd: RateDecomposition, max_denominator: int = 10**4, rtol: float = 1e-9) -> RationalRates | None:
    """Integer multiplicities via continued-fraction approximation of rate ratios."""
    base = min(rd.rates)
    ratios = []
    for r in rd.rates:
        if isinstance(r, Fraction) and isinstance(base, Fraction):
            q = r / base
            if q.denominator > max_denominator:
                return None
        else:
            exact = float(r) / float(base)
            q = Fraction(exact).limit_denominator(max_denominator)
            if abs(float(q) - exact) > rtol * exact:
                return None
        ratios.append(q)
    lcm = 1
    for q in ratios:
        lcm = lcm * q.denominator // gcd(lcm, q.denominator)
    m = [int(q * lcm) for q in ratios]
    g = 0
    for v in m:
        g = gcd(g, v)
    m = tuple(v // g for v in m)
    quantum = float(base) / m[rd.rates.index(base)]
    return RationalRates(m, quantum, math.exp(-quantum * rd.tau))


def rational_rate_poly(rd: RateDecomposition, expr: MonotoneExpression | None = None):
    """``(m, polynomial)``; the polynomial is Xi in ``t`` and needs ``expr``.

    Returns ``(None, None)`` when the rates have no rational structure
    within tolerance.
    """
    rr = rational_rates(rd)
    if rr is None:
        return None, None
    poly = None if expr is None else shannon_probability(expr.clauses, rr.polys())
    return rr.m, poly


def rate_curve_bounds(
    expr: MonotoneExpression,
    rd: RateDecomposition,
    depth: int = 1,
    cut_depth: int = 1,
    method: str = "log",
    degree: int | None = None,
    dual_expr: MonotoneExpression | None = None,
) -> CurveBounds:
    """Bounds on Xi at horizon ``tau`` through the commensurate-rate polynomial.

    In ``t`` the complementary events have probability ``t**m_i``, so the
    natural increasing curve is ``1 - Xi(t)``, the dual expression's
    satisfiability.  Its expansion at ``t = 0`` runs over the cuts and the
    one at ``t = 1`` over the struts; bounds and interpolants are formed
    for that curve and complemented back.
    """
    rr = rational_rates(rd)
    if rr is None:
        raise InconsistencyError("rates have no rational structure within tolerance")
    dual_e = dual_expr or dual_of(expr)
    y = [T_POLY**mi for mi in rr.m]
    M = sum(rr.m[e - 1] for e in expr.support) if degree is None else degree
    partial = curve_partial(dual_e.clauses, expr.clauses, y, cut_depth, depth, M)
    return _finish("rate", rr.t_star, partial, method, True, True, ())


def rate_exact(expr: MonotoneExpression, rd: RateDecomposition, tau: float | None = None) -> float:
    return exact_satisfiability(expr, rd.probabilities(tau))


# ---------------------------------------------------------------------------
# mixed Bernstein-Taylor (gamma) coefficients

lam, eps = sympy.symbols("lambda epsilon")


@dataclass(frozen=True)
class GammaMatrix:
    """Row ``k`` holds the Bernstein coefficients (degree ``N-k``) of the ``eps**k`` slice."""

    rows: tuple[tuple, ...]

    @property
    def n_events(self) -> int:
        return len(self.rows) - 1

    def __getitem__(self, kl):
        k, l = kl
        return self.rows[k][l]

    def evaluate(self, center, halfwidth):
        """``sum_k eps**k sum_l gamma[k][l] B(N-k, l, lambda)``."""
        return sum(halfwidth**k * de_casteljau(row, center) for k, row in enumerate(self.rows))


def _sym(v):
    if isinstance(v, sympy.Basic):
        return v
    return _rat(v)


def _plain(v):
    v = sympy.nsimplify(v) if not isinstance(v, sympy.Basic) else sympy.expand(v)
    if v.is_Rational:
        return Fraction(int(v.p), int(v.q))
    return v


def gamma_matrix(expr: MonotoneExpression, weights: Sequence | Mapping[int, object]) -> GammaMatrix:
    """Expand ``Xi(lambda + w_i eps)`` and convert each ``eps**k`` slice to Bernstein form.

    ``weights`` may be numbers or sympy symbols, indexed by event (a
    sequence starting at event 1, or a mapping).
    """
    N = expr.n_events
    if isinstance(weights, Mapping):
        ws = [_sym(weights.get(i, 0)) for i in range(1, N + 1)]
    else:
        ws = [_sym(w) for w in weights]
    xs = [lam + w * eps for w in ws]
    xi = sympy.expand(shannon_probability(expr.clauses, xs))
    poly = sympy.Poly(xi, eps, lam)
    rows = []
    for k in range(N + 1):
        alpha = [poly.coeff_monomial(eps**k * lam**l) for l in range(N - k + 1)]
        beta = power_to_bernstein([sympy.Rational(1) * a for a in alpha], N - k)
        rows.append(tuple(_plain(b) for b in beta))
    return GammaMatrix(tuple(rows))


def reflected_gamma(g_dual: GammaMatrix) -> GammaMatrix:
    """Primal gamma matrix from the dual's, computed with negated weights."""
    N = g_dual.n_events
    rows = []
    for k, row in enumerate(g_dual.rows):
        m = N - k
        if k == 0:
            rows.append(tuple(1 - row[m - l] for l in range(m + 1)))
        else:
            rows.append(tuple(-row[m - l] for l in range(m + 1)))
    return GammaMatrix(tuple(rows))


# ---------------------------------------------------------------------------
# sensitivity


def _vector(expr, x):
    if np.ndim(x) == 0:
        return [x] * expr.n_events
    return list(x)


def birnbaum_importance(expr: MonotoneExpression, x, i: int, exact: bool = False):
    """``dXi/dx_i = Xi(x_i := 1) - Xi(x_i := 0)`` (Xi is affine in each ``x_i``)."""
    xs = _vector(expr, x)
    hi, lo = list(xs), list(xs)
    hi[i - 1], lo[i - 1] = 1, 0
    return exact_satisfiability(expr, hi, exact=exact) - exact_satisfiability(expr, lo, exact=exact)


def gradient(expr: MonotoneExpression, x, exact: bool = False) -> list:
    return [birnbaum_importance(expr, x, i, exact) for i in range(1, expr.n_events + 1)]


def directional_derivative(expr: MonotoneExpression, x, direction: Sequence, exact: bool = False):
    grad = gradient(expr, x, exact)
    return sum(g * d for g, d in zip(grad, direction))
