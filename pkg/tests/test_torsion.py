import random
from fractions import Fraction

import mpmath
import pytest

from cmhl.errors import DomainError
from cmhl.lfunctions import r_rot
from cmhl.torsion import (
    TorsionInstance,
    binom_alternating,
    eigenspace_trace,
    torsion_closed_form,
    torsion_spectral_oracle,
    zeta_collapse_check,
)
from cmhl.verify import random_torsion_instance

# Z'(0) at (nu=1, phi=pi/2), frozen from mpmath.lerchphi at 60 digits
Z_QUARTER = (
    "1.03972077083991796412584818218726485211325020154038288118102",
    "-0.527344140497835965308384389506506611771187357867756764511821",
)


def tiny(k=70):
    return mpmath.mpf(10) ** -k


def half_turn(ltr=1):
    return TorsionInstance(((1, Fraction(1, 2)),), ltr)


def test_eta_anchor(ctx):
    assert abs(torsion_closed_form(half_turn(), ctx) - mpmath.log(2)) < tiny()
    assert abs(torsion_spectral_oracle(half_turn(), ctx) - mpmath.log(2)) < tiny()


def test_linear_in_ltr(ctx):
    assert torsion_closed_form(half_turn(0), ctx) == 0


def test_zero_eigenvalues_vanish(ctx):
    inst = TorsionInstance(((0, Fraction(1, 3)), (0, Fraction(1, 5))), 1)
    assert torsion_closed_form(inst, ctx) == 0


def test_quarter_turn(ctx):
    inst = TorsionInstance(((1, Fraction(1, 4)),), 1)
    z = torsion_spectral_oracle(inst, ctx)
    assert abs(z - mpmath.mpc(*Z_QUARTER)) < tiny(58)
    # the imaginary part is R^rot(pi/2) plus -log(2 pi) Im(1/(e^{-i phi} - 1)) = -(1/2) log 2 pi
    assert abs(z.imag + mpmath.log(2 * mpmath.pi) / 2 - r_rot(1, 4, ctx)) < tiny()
    assert abs(torsion_closed_form(inst, ctx) - z) < tiny()


def test_mutual_oracle_nu3(ctx):
    inst = TorsionInstance(((3, Fraction(1, 3)),), 1)
    assert abs(torsion_closed_form(inst, ctx) - torsion_spectral_oracle(inst, ctx)) < tiny()


def test_theorem_sign_gap(ctx):
    gap = torsion_closed_form(half_turn(), ctx) - torsion_closed_form(half_turn(), ctx, theorem_sign=True)
    assert abs(gap - mpmath.log(2 * mpmath.pi)) < tiny()


def test_negative_nu_flips_sign(ctx):
    pos = TorsionInstance(((2, Fraction(2, 7)),), 1)
    neg = TorsionInstance(((-2, Fraction(2, 7)),), 1)
    assert abs(torsion_closed_form(pos, ctx) + torsion_closed_form(neg, ctx)) < tiny()


def test_oracle_rejects_nonpositive(ctx):
    with pytest.raises(DomainError):
        torsion_spectral_oracle(TorsionInstance(((-1, Fraction(1, 3)),), 1), ctx)


def test_zero_angle_rejected():
    with pytest.raises(DomainError):
        TorsionInstance(((1, Fraction(1)),), 1)
    with pytest.raises(DomainError):
        TorsionInstance(((1, 0.5),), 1)


@pytest.mark.parametrize("seed", range(5))
def test_conjugation_and_additivity(ctx, seed):
    rng = random.Random(seed)
    a = random_torsion_instance(rng, ctx=ctx)
    b = TorsionInstance(random_torsion_instance(rng, ctx=ctx).eigenpairs, a.ltr)
    ta = torsion_closed_form(a, ctx)
    assert abs(torsion_closed_form(a.conjugate(), ctx) - mpmath.conj(ta)) < tiny()
    tb = torsion_closed_form(b, ctx)
    assert abs(torsion_closed_form(a + b, ctx) - (ta + tb)) < tiny()


def test_binom_alternating():
    assert binom_alternating(1) == 1
    assert binom_alternating(0) == 0
    assert binom_alternating(7) == 0
    with pytest.raises(DomainError):
        binom_alternating(-1)


def test_eigenspace_trace(ctx):
    angles = (Fraction(1, 5), Fraction(1, 3))
    v = eigenspace_trace((1, 0), 0, angles, 1, ctx)
    assert abs(v - mpmath.expjpi(mpmath.mpf(2) / 5)) < tiny()
    assert eigenspace_trace((1, 1), 3 - 1, angles, 2, ctx) != 0
    with pytest.raises(DomainError):
        eigenspace_trace((1, 0), 3, angles)


def test_collapse():
    assert zeta_collapse_check(1, [Fraction(1, 7)], 6)
    assert zeta_collapse_check(2, [Fraction(1, 3), Fraction(1, 4)], 4)
    assert zeta_collapse_check(3, [Fraction(1, 3), Fraction(1, 4), Fraction(2, 5)], 3)
