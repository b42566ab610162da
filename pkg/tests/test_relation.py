import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmhl.arith import PrecisionContext
from cmhl.errors import DomainError, PrecisionTooLow
from cmhl.relation import (
    cyclotomic_poly,
    evaluate_expression,
    evaluate_span,
    independent_sines,
    logspan_basis,
    logspan_member,
    logspan_search,
    pslq,
    pslq_search,
    rational_recover,
)


def L(p):
    return mpmath.log(p)


def test_pslq_examples(ctx):
    assert pslq([L(2), L(4)], ctx) == [2, -1]
    assert pslq([1, L(2), L(3), L(6)], ctx) == [0, 1, 1, -1]


def test_pslq_none_carries_bound(ctx):
    res = pslq_search([1, mpmath.pi, L(2)], ctx)
    assert res.relation is None
    assert res.norm_bound > 10**6


def test_pslq_requires_precision():
    with pytest.raises(PrecisionTooLow):
        pslq([1, 2], PrecisionContext(bits=96))


def test_pslq_needs_two_values(ctx):
    with pytest.raises(DomainError):
        pslq([1], ctx)


def test_pslq_zero_entry(ctx):
    assert pslq([mpmath.pi, 0, L(3)], ctx) == [0, 1, 0]


def test_planted_relations_small_sample(ctx):
    rng = random.Random(11)
    for _ in range(20):
        k = rng.randint(2, 8)
        basis = [mpmath.mpf(rng.random()) + mpmath.rand() for _ in range(k)]
        coeffs = [rng.randint(-50, 50) for _ in range(k)]
        target = mpmath.fsum(c * b for c, b in zip(coeffs, basis))
        rel = pslq([target] + basis, ctx)
        assert rel is not None and rel[0] != 0
        assert [Fraction(-r, rel[0]) for r in rel[1:]] == coeffs


def test_rational_recover(ctx):
    assert rational_recover(mpmath.mpf(1) / 2, 10, ctx) == Fraction(1, 2)
    assert rational_recover(mpmath.mpf(-355) / 113, 1000, ctx) == Fraction(-355, 113)
    assert rational_recover(mpmath.euler, 10**6, ctx) is None
    assert rational_recover(mpmath.pi, 10**6, ctx) is None
    with pytest.raises(DomainError):
        rational_recover(1, 0, ctx)


@settings(max_examples=40, deadline=None)
@given(st.integers(-10**6, 10**6), st.integers(1, 10**4))
def test_rational_recover_round_trip(p, q):
    ctx = PrecisionContext()
    with ctx.workprec():
        x = mpmath.mpf(p) / q
        assert rational_recover(x, 10**4, ctx) == Fraction(p, q)


def test_cyclotomic_polynomials():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)
    assert len(cyclotomic_poly(120)) - 1 == 32


def test_independent_sines():
    assert independent_sines(4) == ()
    assert independent_sines(8) == (1,)
    assert independent_sines(12) == (2,)
    assert independent_sines(5) == (1, 2)
    assert independent_sines(30) == (1, 2, 3, 4)


def test_basis_matches_real_subfield_dimension():
    # span{1, sin(2 pi j/n)} has dimension at most phi(4n)/2 / ... ; check a few directly
    assert len(independent_sines(7)) == 3
    assert len(independent_sines(9)) == 3


def test_logspan_planted(ctx):
    x = L(2) - 3 * L(3) + mpmath.sin(2 * mpmath.pi / 5) * L(5)
    coeffs = logspan_member(x, 30, ctx=ctx)
    assert coeffs is not None
    assert abs(evaluate_span(coeffs, 30, ctx=ctx) - x) < mpmath.mpf(10) ** -70
    assert coeffs["log(2)"] == 1 and coeffs["log(3)"] == -3


def test_logspan_zero(ctx):
    coeffs = logspan_member(0, 12, ctx=ctx)
    assert coeffs and all(v == 0 for v in coeffs.values())


def test_logspan_euler_gamma_none(ctx):
    res = logspan_search(mpmath.euler, 30, ctx=ctx)
    assert res.coefficients is None
    assert res.norm_bound is not None


def test_basis_labels_unique(ctx):
    labels = [lab for lab, _ in logspan_basis(60, ctx=ctx)]
    assert len(labels) == len(set(labels))


def test_expressions(ctx):
    assert abs(evaluate_expression("log2", ctx) - L(2)) < mpmath.mpf(10) ** -80
    assert abs(evaluate_expression("sin(2pi/5)*log5", ctx) - mpmath.sin(2 * mpmath.pi / 5) * L(5)) < mpmath.mpf(10) ** -80
    assert abs(evaluate_expression("1/2*log3 - 2pi", ctx) - (L(3) / 2 - 2 * mpmath.pi)) < mpmath.mpf(10) ** -80
    with pytest.raises(DomainError):
        evaluate_expression("__import__('os')", ctx)
    with pytest.raises(DomainError):
        evaluate_expression("sin(2)", ctx)
