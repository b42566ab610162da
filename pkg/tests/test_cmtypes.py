import random
from fractions import Fraction

import mpmath
import pytest

from cmhl.characters import SubfieldDescriptor, characters, unit_group
from cmhl.cmtypes import (
    all_types,
    conductor_term,
    conductor_term_rational,
    lift_type,
    pairing,
    pairing_closed_form,
    random_type,
    standard_type,
    validate_type,
)
from cmhl.errors import GroupMismatch, NotACMType, NotCMField


def tiny():
    return mpmath.mpf(10) ** -70


def test_validate_type():
    phi = validate_type(5, [2, 1])
    assert phi.members == (1, 2) and phi.d == 2
    for bad in ([1, 4], [1], [1, 2, 3], [1, 1], [1, 5]):
        with pytest.raises(NotACMType):
            validate_type(5, bad)
    with pytest.raises(NotACMType):
        validate_type(12, [1, 2])


def test_validate_type_on_quotient():
    Q = SubfieldDescriptor.create(12, [5]).quotient
    assert validate_type(Q, [5]).members == (1,)
    with pytest.raises(NotCMField):
        from cmhl.characters import QuotientGroup

        validate_type(QuotientGroup(unit_group(12), [11]), [1])


def test_type_counts():
    assert len(all_types(5)) == 4
    assert len(all_types(15)) == 16


def test_standard_type():
    assert standard_type(12).members == (1, 5)
    assert str(standard_type(7)) == "1,2,3"


def test_translate_and_conjugate():
    phi = validate_type(7, [1, 2, 4])
    assert phi.conjugate().members == (3, 5, 6)
    assert phi.translate(2).members == (1, 2, 4)
    assert phi.dual().members == (1, 2, 4)


@pytest.mark.parametrize("n", [3, 4, 5, 7, 8, 12, 15, 16, 20, 24])
def test_half_sum(ctx, n):
    rng = random.Random(n)
    odd = characters(n, "odd")
    for _ in range(5):
        phi = random_type(n, rng)
        total = mpmath.fsum(pairing(phi, chi, ctx) for chi in odd)
        assert abs(total - mpmath.mpf(1) / 2) < tiny()


@pytest.mark.parametrize("n", [5, 12, 16, 21])
def test_pairing_matches_closed_form_and_is_nonnegative(ctx, n):
    rng = random.Random(n)
    phi = random_type(n, rng)
    for chi in characters(n):
        p = pairing(phi, chi, ctx)
        assert p > -tiny()
        assert abs(p - pairing_closed_form(phi, chi, ctx)) < tiny()


def test_even_nonprincipal_pairings_vanish(ctx):
    phi = standard_type(15)
    for chi in characters(15, "even"):
        if not chi.is_principal:
            assert pairing(phi, chi, ctx) < tiny()


@pytest.mark.parametrize("n", [7, 13, 20])
def test_translation_and_conjugation_symmetry(ctx, n):
    rng = random.Random(2 * n)
    G = unit_group(n)
    phi = random_type(n, rng)
    sigma = rng.choice(G.elements)
    for chi in characters(n, "odd"):
        p = pairing(phi, chi, ctx)
        assert abs(p - pairing(phi.translate(sigma), chi, ctx)) < tiny()
        assert abs(p - pairing(phi.conjugate(), chi.conjugate(), ctx)) < tiny()


def test_pairing_group_mismatch(ctx):
    with pytest.raises(GroupMismatch):
        pairing(standard_type(5), characters(7, "odd")[0], ctx)


def test_lift_type_examples():
    desc = SubfieldDescriptor.create(12, [7])
    phi = lift_type(desc, validate_type(desc.quotient, [1]))
    assert phi.members == (1, 7)
    desc = SubfieldDescriptor.create(12, [5])
    assert lift_type(desc, validate_type(desc.quotient, [1])).members == (1, 5)


def test_lifted_pairings_agree(ctx):
    desc = SubfieldDescriptor.create(15, [4])
    Q = desc.quotient
    phi_e = validate_type(Q, [1, 2])
    phi = lift_type(desc, phi_e)
    for chi in characters(Q, "odd"):
        assert abs(pairing(phi_e, chi, ctx) - pairing(phi, chi, ctx)) < tiny()


def test_conductor_term_n4(ctx):
    assert conductor_term_rational(standard_type(4), ctx) == {2: Fraction(1)}
    total, _ = conductor_term(standard_type(4), ctx)
    assert abs(total - mpmath.log(2)) < tiny()


def test_conductor_term_rational_coefficients(ctx):
    coeffs = conductor_term_rational(standard_type(12), ctx)
    assert set(coeffs) == {2, 3}
    assert all(isinstance(c, Fraction) for c in coeffs.values())
