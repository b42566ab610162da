from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmhl import arith
from cmhl.arith import PrecisionContext
from cmhl.errors import DomainError, PoleError


def close(a, b, digits=80):
    return abs(a - b) < mpmath.mpf(10) ** -digits


def test_context_rejects_low_precision():
    with pytest.raises(DomainError):
        PrecisionContext(bits=32)


def test_tolerance_scale(ctx):
    assert ctx.tolerance(0.25) == mpmath.mpf(10) ** -64


def test_elementary_family(ctx):
    assert close(arith.exp(arith.log(7, ctx), ctx), 7)
    assert close(arith.atan2(1, 1, ctx), mpmath.pi / 4)
    assert close(arith.sqrt(2, ctx) ** 2, 2)
    with pytest.raises(DomainError):
        arith.log(-1, ctx)
    with pytest.raises(DomainError):
        arith.div(1, 0, ctx)


def test_rational_turns_exact(ctx):
    assert arith.sin_2pi(Fraction(1, 4), ctx) == 1
    assert arith.cos_2pi(Fraction(1, 2), ctx) == -1
    assert arith.sin_2pi(Fraction(1, 2), ctx) == 0
    t = Fraction(3, 7)
    assert arith.sin_2pi(-t, ctx) == -arith.sin_2pi(t, ctx)


def test_bernoulli():
    assert arith.bernoulli(1) == Fraction(-1, 2)
    assert arith.bernoulli(2) == Fraction(1, 6)
    assert arith.bernoulli(12) == Fraction(-691, 2730)
    assert arith.bernoulli(7) == 0


@pytest.mark.parametrize("x", [Fraction(1, 3), Fraction(1, 4), Fraction(7, 2), mpmath.mpf("0.01"), 25])
def test_log_gamma_and_digamma_against_mpmath(ctx, x):
    xm = mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)
    assert close(arith.log_gamma(x, ctx), mpmath.loggamma(xm))
    assert close(arith.digamma(x, ctx), mpmath.digamma(xm))


def test_gamma_negative_non_integer(ctx):
    assert close(arith.gamma(mpmath.mpf("-0.1"), ctx), mpmath.gamma(mpmath.mpf("-0.1")), 75)


def test_digamma_half(ctx):
    assert close(arith.digamma(Fraction(1, 2), ctx), -mpmath.euler - 2 * mpmath.log(2))


@pytest.mark.parametrize("s", ["-0.5", "0", "0.3", "2.2", "-3"])
@pytest.mark.parametrize("a", [Fraction(1, 3), Fraction(5, 8), 1])
def test_hurwitz_against_mpmath(ctx, s, a):
    s = mpmath.mpf(s)
    am = mpmath.mpf(a.numerator) / a.denominator if isinstance(a, Fraction) else mpmath.mpf(a)
    z, dz = arith.hurwitz_pair(s, a, ctx)
    assert close(z, mpmath.zeta(s, am), 75)
    assert close(dz, mpmath.zeta(s, am, 1), 75)


def test_hurwitz_pole(ctx):
    with pytest.raises(PoleError):
        arith.hurwitz_zeta(1, Fraction(1, 2), ctx)


def test_hurwitz_zero_values(ctx):
    # zeta(0, a) = 1/2 - a
    assert close(arith.hurwitz_zeta(0, Fraction(1, 5), ctx), mpmath.mpf(3) / 10)


def test_precision_consistency():
    """Raising the precision by 64 bits moves results by at most a few ulp."""
    lo, hi = PrecisionContext(256), PrecisionContext(320)
    for f in (
        lambda c: arith.log_gamma(Fraction(1, 7), c),
        lambda c: arith.hurwitz_zeta_ds(0, Fraction(2, 5), c),
        lambda c: arith.digamma(Fraction(3, 11), c),
    ):
        a, b = f(lo), f(hi)
        with hi.workprec():
            assert abs(a - b) <= 4 * lo.eps() * max(1, abs(b))


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=Fraction(1, 100), max_value=20))
def test_gamma_recurrence(x):
    ctx = PrecisionContext()
    with ctx.workprec():
        lhs = arith.log_gamma(x + 1, ctx)
        rhs = arith.log_gamma(x, ctx) + mpmath.log(mpmath.mpf(x.numerator) / x.denominator)
        assert abs(lhs - rhs) < mpmath.mpf(10) ** -70


def test_to_fraction_keeps_sign():
    assert arith.to_fraction(mpmath.mpf(-3) / 4) == Fraction(-3, 4)
    assert arith.to_fraction(mpmath.inf) is None
