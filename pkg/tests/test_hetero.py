import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import expressions
from oracles import brute_xi
from psat_bounds.bernstein import evaluate_grid
from psat_bounds.errors import InconsistencyError, MonotonicityError
from psat_bounds.expr_core import dual
from psat_bounds.hetero import (
    _monotone_on_grid,
    birnbaum_importance,
    choose_envelope_order,
    curve_polynomial,
    curve_polys,
    curve_probabilities,
    directional_derivative,
    dual_decompose,
    envelope,
    envelope_coefficients,
    envelope_peak,
    feasible,
    gamma_matrix,
    gradient,
    log_decompose,
    poly_coefficients,
    polynomial_curve_bounds,
    polynomial_decompose,
    rate_curve_bounds,
    rate_exact,
    rational_rate_poly,
    rational_rates,
    reflected_gamma,
    scale_factor,
    t,
    to_fraction,
    truncated_curve_taylor,
)
from psat_bounds.lattice_oracle import exact_satisfiability

F = Fraction


def classes(a, b, c):
    return [a, b, b, b, b, c, c]


probs = st.fractions(min_value=F(1, 20), max_value=F(19, 20), max_denominator=20)


def test_to_fraction():
    assert to_fraction("3/8") == F(3, 8)
    assert to_fraction(0.25) == F(1, 4)
    assert to_fraction(sympy.Rational(2, 3)) == F(2, 3)


def test_decomposition_of_classes():
    d = polynomial_decompose(classes(F(1, 4), F(3, 8), F(1, 2)))
    assert d.center == F(3, 8) and d.halfwidth == F(1, 8)
    assert d.weights == (-1, 0, 0, 0, 0, 1, 1)


def test_dual_decomposition_complements():
    d = polynomial_decompose(classes(F(1, 4), F(3, 8), F(1, 2)))
    assert dual_decompose(d).probabilities() == tuple(1 - v for v in d.probabilities())


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_envelope_shape(n):
    coeffs = envelope_coefficients(n)
    assert coeffs == tuple(reversed(coeffs))
    assert envelope(n, F(1, 2)) == envelope_peak(n) == 1 - F(math.comb(2 * n, n), 4**n)
    assert envelope(n, 0) == 0 == envelope(n, 1)


def test_envelope_order_rule():
    assert choose_envelope_order(classes(F(1, 4), F(3, 8), F(1, 2))) == 1
    # a range of 0.9 passes the width rule at n = 3, but unitarity needs
    # a peak >= 0.9, which the slowly converging envelope first reaches at 32
    assert choose_envelope_order([F(1, 20), F(19, 20)]) == 32
    assert feasible(polynomial_decompose([F(1, 20), F(19, 20)]), 32)


def test_infeasible_order_rejected():
    d = polynomial_decompose([F(1, 20), F(19, 20)])
    assert not feasible(d, 1)
    with pytest.raises(InconsistencyError):
        curve_probabilities(d, 1, F(1, 2))


@given(st.lists(probs, min_size=2, max_size=6))
def test_anchor_and_unitarity(x):
    d = polynomial_decompose(x)
    n = choose_envelope_order(x)
    assert curve_probabilities(d, n, d.center) == tuple(x)
    ts = np.linspace(0, 1, 1001)
    # Bernstein form: power-basis Horner is unstable at high envelope order
    env = evaluate_grid(envelope_coefficients(n), ts)
    s = float(scale_factor(d, n))
    for w in d.weights:
        vals = ts + float(w) * s * env
        assert np.all(vals >= -1e-12) and np.all(vals <= 1 + 1e-12)


@given(expressions(max_n=6), st.data())
def test_endpoint_exactness(e, data):
    x = [data.draw(probs) for _ in range(e.n_events)]
    d = polynomial_decompose(x)
    n = choose_envelope_order(x)
    exact = curve_polynomial(e, d, n)
    depth = data.draw(st.integers(1, 2))
    head = truncated_curve_taylor(e, d, n, depth, 0)
    assert list(head.coefficients) == poly_coefficients(exact, head.kappa)
    tail = truncated_curve_taylor(e, d, n, depth, 1, dual_expr=dual(e))
    reflected = exact.compose(sympy.Poly(1 - t, t, domain="QQ"))
    assert list(tail.coefficients) == poly_coefficients(reflected, tail.kappa)


def test_curve_polynomial_at_anchor(example):
    x = classes(F(1, 4), F(3, 8), F(1, 2))
    d = polynomial_decompose(x)
    p = curve_polynomial(example, d, 1)
    assert p.eval(F(3, 8)) == brute_xi(example.clauses, x)


def test_curve_bounds_sandwich(example):
    for x in (classes(F(1, 4), F(3, 8), F(1, 2)), classes(F(1, 2), F(5, 8), F(3, 4))):
        cb = polynomial_curve_bounds(example, x, 1, 1, "linear")
        lo, hi = cb.bounds()
        ex = float(brute_xi(example.clauses, x))
        assert lo <= cb.estimate() <= hi and lo <= ex <= hi
        g = cb.grid(11)
        assert np.all(g["lower"] <= g["estimate"] + 1e-12) and np.all(g["estimate"] <= g["upper"] + 1e-12)


def test_monotone_guard_helper():
    assert _monotone_on_grid(sympy.Poly(t**2, t), True)
    assert not _monotone_on_grid(sympy.Poly(t - t**2, t), True)


def test_rate_classes():
    ln2 = math.log(2)
    rd = log_decompose(classes(ln2, 1.5 * ln2, 2 * ln2), "rate")
    rr = rational_rates(rd)
    assert rr.m == (2, 3, 3, 3, 3, 4, 4)
    assert rr.t_star == pytest.approx(2**-0.5)
    xs = rd.probabilities()
    assert xs[0] == pytest.approx(0.5) and xs[1] == pytest.approx(1 - 2**-1.5) and xs[6] == pytest.approx(0.75)


def test_rate_poly_matches_exact(example):
    rd = log_decompose(classes(F(1, 4), F(3, 8), F(1, 2)), "rate")
    m, poly = rational_rate_poly(rd, example)
    assert m == (2, 3, 3, 3, 3, 4, 4)
    rr = rational_rates(rd)
    assert float(poly.eval(rr.t_star)) == pytest.approx(rate_exact(example, rd), rel=1e-12)


def test_homogeneous_rates():
    rd = log_decompose([F(1, 3)] * 4, "rate")
    assert rational_rates(rd).m == (1, 1, 1, 1)


def test_irrational_rates(example):
    rd = log_decompose(classes(1.0, math.sqrt(2), math.pi), "rate")
    assert rational_rates(rd) is None
    assert rational_rate_poly(rd, example) == (None, None)
    with pytest.raises(InconsistencyError):
        rate_curve_bounds(example, rd)


def test_infinite_rate_rejected():
    with pytest.raises(ValueError):
        log_decompose([0.5, 1.0], "prob")


def test_rate_bounds_sandwich(example):
    rd = log_decompose(classes(F(1, 4), F(3, 8), F(1, 2)), "rate")
    cb = rate_curve_bounds(example, rd, 1, 1, "log")
    lo, hi = cb.bounds()
    assert lo <= rate_exact(example, rd) <= hi
    assert lo <= cb.estimate() <= hi


def test_gamma_row_zero(example):
    g = gamma_matrix(example, [1, 0, 0, 0, 0, -1, -1])
    assert g.rows[0] == (0, 0, F(1, 21), F(1, 5), F(18, 35), F(19, 21), 1, 1)


def test_gamma_evaluates_to_xi(example):
    w = [1, 0, 0, 0, 0, -1, -1]
    g = gamma_matrix(example, w)
    lam, eps = F(2, 5), F(1, 10)
    x = [lam + wi * eps for wi in w]
    assert g.evaluate(lam, eps) == brute_xi(example.clauses, x)


def test_gamma_symbolic_weights(example):
    a, b, c = sympy.symbols("a b c")
    g = gamma_matrix(example, [a, b, b, b, b, c, c])
    num = gamma_matrix(example, [1, 0, 0, 0, 0, -1, -1])
    assert sympy.simplify(g[2, 1].subs({a: 1, b: 0, c: -1}) - num[2, 1]) == 0


@given(expressions(max_n=5), st.lists(st.sampled_from([-1, 0, 1]), min_size=5, max_size=5))
def test_gamma_duality(e, w):
    w = w[: e.n_events]
    g = gamma_matrix(e, w)
    g_dual = gamma_matrix(dual(e), [-v for v in w])
    assert reflected_gamma(g_dual) == g


@given(expressions(max_n=6), st.data())
def test_gradient_finite_differences(e, data):
    x = [float(data.draw(probs)) for _ in range(e.n_events)]
    i = data.draw(st.integers(1, e.n_events))
    h = 1e-6
    up, dn = list(x), list(x)
    up[i - 1] += h
    dn[i - 1] -= h
    fd = (exact_satisfiability(e, up) - exact_satisfiability(e, dn)) / (2 * h)
    assert birnbaum_importance(e, x, i) == pytest.approx(fd, rel=1e-5, abs=1e-9)


@given(expressions(max_n=6), st.data())
def test_multi_affine(e, data):
    x = [data.draw(probs) for _ in range(e.n_events)]
    i = data.draw(st.integers(0, e.n_events - 1))
    lo, hi, mid = list(x), list(x), list(x)
    lo[i], hi[i], mid[i] = F(0), F(1), F(1, 2)
    assert brute_xi(e.clauses, mid) == (brute_xi(e.clauses, lo) + brute_xi(e.clauses, hi)) / 2


@given(expressions(max_n=7), st.fractions(0, 1, max_denominator=10))
def test_importance_nonnegative(e, x):
    assert all(g >= 0 for g in gradient(e, x, exact=True))


def test_direction_sign_change(example):
    d = [2, 0, 0, 0, 0, -1, -1]
    assert directional_derivative(example, 0.61, d) < 0 < directional_derivative(example, 0.63, d)


def test_exact_direction_polynomial(example):
    d = [2, 0, 0, 0, 0, -1, -1]
    xb = F(1, 3)
    assert directional_derivative(example, xb, d, exact=True) == -2 * xb * (xb**3 - 2 * xb + 1)


def test_bounds_withheld_message(example):
    from psat_bounds.hetero import CurveBounds

    cb = polynomial_curve_bounds(example, classes(F(1, 4), F(3, 8), F(1, 2)))
    withheld = CurveBounds(**{**cb.__dict__, "vectors": None, "monotone": False})
    with pytest.raises(MonotonicityError):
        withheld.bounds()


def test_tabulated_gamma_is_anchored_at_the_top(example):
    # The reference matrix for the midpoint-B case is reproduced with lambda
    # at the largest probability and eps = 2 (x_C - x_A), i.e. these weights.
    g = gamma_matrix(example, classes(F(-1, 2), F(-1, 4), 0))
    assert g[2, 1] == F(1, 8) and g[3, 0] == F(-1, 16)
    assert g.rows[5] == (F(1, 512), F(1, 512), 0)
    assert g.rows[1] == (0, 0, F(-2, 15), F(-2, 5), F(-17, 30), F(-1, 6), 0)
    assert reflected_gamma(gamma_matrix(dual(example), classes(F(1, 2), F(1, 4), 0))) == g
