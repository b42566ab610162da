import random
from fractions import Fraction

import mpmath
import pytest

from cmhl.arith import PrecisionContext
from cmhl.characters import SubfieldDescriptor, characters, unit_group
from cmhl.cmtypes import random_type, standard_type, validate_type
from cmhl.errors import CalibrationFailed, GroupMismatch, SingularSystem, ZeroCharacterPairing
from cmhl.heights import (
    HeightSystem,
    build_system,
    compare_routes,
    extension_invariance_check,
    height_character_route,
    height_system_route,
    solve_characters,
    solve_elimination,
)
from cmhl.verify import random_odd_function

# frozen from mpmath.loggamma at 60 digits
LP4 = "0.391594392706836776471945346899111028090210115770026648305331"
LP3 = "0.31606627555754027004622947396510845452289980513332979145766"
H3 = "-0.94819882667262081013868842189532536356869941539998937437298"


def close(a, b, digits=58):
    return abs(a - mpmath.mpf(b)) < mpmath.mpf(10) ** -digits


def test_system_n4(ctx):
    s = build_system(standard_type(4), ctx)
    assert s.M == [[mpmath.mpf(1) / 2]]
    assert close(s.Y[0], -4 * mpmath.mpf(LP4))
    X = solve_elimination(s, ctx)
    assert close(X[0], -8 * mpmath.mpf(LP4))
    assert close(height_system_route(standard_type(4), ctx), -mpmath.mpf(LP4))


def test_system_n3(ctx):
    s = build_system(standard_type(3), ctx)
    assert close(s.M[0][0], 1 / (2 * mpmath.sqrt(3)), 80)
    assert close(s.Y[0], -2 * mpmath.sqrt(3) * mpmath.mpf(LP3))
    assert close(solve_elimination(s, ctx)[0], -12 * mpmath.mpf(LP3))
    assert close(height_system_route(standard_type(3), ctx), -mpmath.mpf(3) / 2 * mpmath.mpf(LP3))


def test_character_route_anchors(ctx):
    h4 = height_character_route(standard_type(4), ctx).h_character
    with ctx.workprec():
        cs = -mpmath.log(mpmath.pi / mpmath.agm(1, mpmath.sqrt(2)) ** 2)
    assert abs(h4 - cs) < mpmath.mpf(10) ** -70
    assert close(height_character_route(standard_type(3), ctx).h_character, H3)


def test_breakdown_fields(ctx):
    rep = height_character_route(standard_type(12), ctx)
    assert [r.character_index for r in rep.per_character] == [1, 2]
    assert sorted(r.conductor for r in rep.per_character) == [3, 4]
    assert abs(mpmath.fsum(r.pairing for r in rep.per_character) - mpmath.mpf(1) / 2) < mpmath.mpf(10) ** -70
    assert "modulo" in rep.note


def test_n5_types_and_breakdowns(ctx):
    a = height_character_route(validate_type(5, [1, 2]), ctx)
    b = height_character_route(validate_type(5, [1, 3]), ctx)
    assert abs(a.h_character - b.h_character) < mpmath.mpf(10) ** -70
    ca = sorted((r.contribution.real, r.contribution.imag) for r in a.per_character)
    cb = sorted((r.contribution.real, r.contribution.imag) for r in b.per_character)
    for x, y in zip(ca, cb):
        assert abs(x[0] - y[0]) < mpmath.mpf(10) ** -70 and abs(x[1] - y[1]) < mpmath.mpf(10) ** -70


@pytest.mark.parametrize("n", [7, 13, 15])
def test_character_route_symmetries(ctx, n):
    rng = random.Random(n)
    phi = random_type(n, rng)
    h = height_character_route(phi, ctx).h_character
    sigma = rng.choice(unit_group(n).elements)
    assert abs(h - height_character_route(phi.translate(sigma), ctx).h_character) < mpmath.mpf(10) ** -70
    assert abs(h - height_character_route(phi.conjugate(), ctx).h_character) < mpmath.mpf(10) ** -70


@pytest.mark.parametrize("n", [5, 9, 16])
def test_system_translation_invariance(ctx, n):
    rng = random.Random(3 * n)
    G = unit_group(n)
    phi = random_type(G, rng)
    sigma = rng.choice(G.elements)
    s1 = build_system(phi, ctx)
    s2 = build_system(phi.translate(sigma), ctx)
    x1 = dict(zip(phi.members, solve_elimination(s1, ctx)))
    x2 = dict(zip(s2.members, solve_elimination(s2, ctx)))
    for a, v in x1.items():
        assert abs(v - x2[G.mul(sigma, a)]) < mpmath.mpf(10) ** -70
    assert abs(mpmath.fsum(x1.values()) - mpmath.fsum(x2.values())) < mpmath.mpf(10) ** -70


@pytest.mark.parametrize("n", [5, 8, 11, 24])
def test_solvers_agree(ctx, n):
    rng = random.Random(n)
    G = unit_group(n)
    for _ in range(5):
        phi = random_type(G, rng)
        f = random_odd_function(G, rng, ctx)
        Y = [mpmath.mpf(rng.random()) for _ in phi.members]
        s = build_system(phi, ctx, f=f, Y=Y)
        xe = solve_elimination(s, ctx)
        xc = solve_characters(s, ctx=ctx)
        assert max(abs(a - b) for a, b in zip(xe, xc)) < mpmath.mpf(10) ** -70
        assert s.residual(xe, ctx) < mpmath.mpf(10) ** -70


def test_height_system_default_solvers_agree(ctx):
    s = build_system(standard_type(12), ctx)
    xe = solve_elimination(s, ctx)
    xc = solve_characters(s, ctx=ctx)
    assert max(abs(a - b) for a, b in zip(xe, xc)) < mpmath.mpf(10) ** -70


def test_singular_system(ctx):
    s = HeightSystem(5, (1, 2), [[mpmath.mpf(1), mpmath.mpf(2)], [mpmath.mpf(2), mpmath.mpf(4)]], [mpmath.mpf(1), mpmath.mpf(1)])
    with pytest.raises(SingularSystem):
        solve_elimination(s, ctx)


def test_zero_character_pairing(ctx):
    G = unit_group(5)
    from cmhl.characters import GroupFunction

    zero = GroupFunction.from_callable(G, lambda a: 0, ctx)
    s = build_system(standard_type(5), ctx)
    with pytest.raises(ZeroCharacterPairing):
        solve_characters(s, f=zero, ctx=ctx)


def test_build_system_needs_full_group(ctx):
    Q = SubfieldDescriptor.create(12, [5]).quotient
    with pytest.raises(GroupMismatch):
        build_system(validate_type(Q, [1]), ctx)


@pytest.mark.parametrize("n", [3, 4, 5, 8, 12])
def test_calibration_constant(ctx, n):
    rep = compare_routes(standard_type(n), ctx)
    assert rep.calibration.c == 2
    assert all(q.denominator <= 10**4 for q in rep.calibration.coefficients.values())
    assert rep.calibration.residual < mpmath.mpf(10) ** -60


def test_calibration_zero_for_prime_and_four(ctx):
    for n in (3, 4, 5, 7):
        rep = compare_routes(standard_type(n), ctx)
        assert all(q == 0 for q in rep.calibration.coefficients.values())


def test_calibration_needs_precision():
    with pytest.raises(CalibrationFailed):
        compare_routes(standard_type(4), PrecisionContext(bits=128))


def test_extension_invariance(ctx):
    for gens in ([5], [7], []):
        desc = SubfieldDescriptor.create(12, gens)
        res = extension_invariance_check(desc, validate_type(desc.quotient, [1] if gens else [1, 5]), ctx)
        assert res.residual < mpmath.mpf(10) ** -70
        assert res.max_vanishing < mpmath.mpf(10) ** -70


def test_extension_invariance_trivial_subgroup_exact(ctx):
    desc = SubfieldDescriptor.create(7, [])
    res = extension_invariance_check(desc, validate_type(desc.quotient, [1, 2, 4]), ctx)
    assert res.residual == 0


def test_precision_consistency():
    lo, hi = PrecisionContext(256), PrecisionContext(320)
    a = height_character_route(standard_type(5), lo).h_character
    b = height_character_route(standard_type(5), hi).h_character
    with hi.workprec():
        assert abs(a - b) <= 4 * lo.eps() * max(1, abs(b))
