"""Bundled verification suites.  Each suite returns a list of :class:`Case`; a case
passes when its residual is below its tolerance (or, for boolean checks, when the
check holds)."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import DEFAULT_CONTEXT, PrecisionContext
from .characters import GroupFunction, SubfieldDescriptor, characters, unit_group
from .cmtypes import conjugate_pairs, pairing, random_type, standard_type, validate_type
from .errors import CMHLError
from .heights import build_system, compare_routes, extension_invariance_check, solve_characters, solve_elimination
from .lfunctions import check_cotangent_identity, check_functional_equation
from .torsion import TorsionInstance, binom_alternating, torsion_closed_form, torsion_spectral_oracle, zeta_collapse_check

SUITES = (
    "functional-equation",
    "cotangent",
    "half-sum",
    "waslem",
    "system-vs-character",
    "torsion",
    "invariance",
    "collapse",
)

IDENTITY_MODULI = (3, 4, 5, 7, 8, 12)
HALF_SUM_MODULI = (3, 4, 5, 7, 8, 12, 15, 16, 20, 24)
CALIBRATION_MODULI = (3, 4, 5, 8, 12)
FE_POINTS = ("-0.5", "0.3", "2.2")


@dataclass
class Case:
    suite: str
    name: str
    residual: object
    tolerance: object
    passed: bool
    detail: str = ""


def _case(suite, name, residual, tol, detail=""):
    return Case(suite, name, residual, tol, bool(residual < tol), detail)


def suite_functional_equation(ctx=DEFAULT_CONTEXT, moduli=IDENTITY_MODULI, points=FE_POINTS, **_):
    tol = ctx.tolerance(0.23)
    out = []
    for n in moduli:
        for chi in characters(n, "odd"):
            for s in points:
                r = check_functional_equation(n, chi, mpmath.mpf(s), ctx)
                out.append(_case("functional-equation", f"n={n} chi#{chi.index} s={s}", r, tol))
    return out


def suite_cotangent(ctx=DEFAULT_CONTEXT, moduli=IDENTITY_MODULI, **_):
    tol = ctx.tolerance(0.23)
    return [
        _case("cotangent", f"n={n} chi#{chi.index}", check_cotangent_identity(n, chi, ctx), tol)
        for n in moduli
        for chi in characters(n, "odd")
    ]


def suite_half_sum(ctx=DEFAULT_CONTEXT, moduli=HALF_SUM_MODULI, trials=20, seed=0, **_):
    tol = ctx.tolerance(0.23)
    out = []
    for n in moduli:
        rng = random.Random(f"{seed}:{n}")
        odd = characters(n, "odd")
        for t in range(trials):
            phi = random_type(n, rng)
            with ctx.workprec():
                total = mpmath.fsum(pairing(phi, chi, ctx) for chi in odd)
                dev = abs(total - mpmath.mpf(1) / 2)
            out.append(_case("half-sum", f"n={n} trial={t} type={phi}", dev, tol))
    return out


def random_odd_function(G, rng: random.Random, ctx=DEFAULT_CONTEXT) -> GroupFunction:
    vals = {}
    with ctx.workprec():
        for a, b in conjugate_pairs(G):
            v = mpmath.mpf(rng.random()) - mpmath.mpf(1) / 2
            vals[a], vals[b] = v, -v
    return GroupFunction.from_callable(G, lambda a: vals[a], ctx)


def suite_waslem(ctx=DEFAULT_CONTEXT, moduli=tuple(range(3, 25)), trials=50, seed=0, **_):
    """Character closed form against Gaussian elimination on random odd kernels."""
    tol = ctx.tolerance(0.23)
    out = []
    for n in moduli:
        G = unit_group(n)
        rng = random.Random(f"{seed}:{n}")
        worst = mpmath.mpf(0)
        for _ in range(trials):
            phi = random_type(G, rng)
            f = random_odd_function(G, rng, ctx)
            Y = [mpmath.mpf(rng.random()) - mpmath.mpf(1) / 2 for _ in phi.members]
            system = build_system(phi, ctx, f=f, Y=Y)
            xe = solve_elimination(system, ctx)
            xc = solve_characters(system, ctx=ctx)
            with ctx.workprec():
                worst = max(worst, max(abs(a - b) for a, b in zip(xe, xc)))
        out.append(_case("waslem", f"n={n} instances={trials}", worst, tol))
    return out


def suite_system_vs_character(ctx=DEFAULT_CONTEXT, moduli=CALIBRATION_MODULI, **_):
    """One calibration constant c must serve every modulus."""
    out = []
    constants = {}
    tol = ctx.tolerance(0.2)
    for n in moduli:
        phi = standard_type(n)
        try:
            rep = compare_routes(phi, ctx)
        except CMHLError as exc:
            out.append(Case("system-vs-character", f"n={n}", None, tol, False, f"{exc.kind}: {exc}"))
            continue
        cal = rep.calibration
        constants[n] = cal.c
        coeffs = {k: str(v) for k, v in cal.coefficients.items() if v}
        out.append(_case("system-vs-character", f"n={n}", cal.residual, tol, f"c={cal.c} coefficients={coeffs}"))
    distinct = set(constants.values())
    out.append(
        Case(
            "system-vs-character",
            "single constant",
            None,
            None,
            len(distinct) == 1 and len(constants) == len(moduli),
            "c values: " + ", ".join(f"n={n}:{c}" for n, c in sorted(constants.items())),
        )
    )
    return out


NU_CHOICES = (Fraction(1, 3), 1, 2, 7)


def random_torsion_instance(rng: random.Random, max_blocks=3, max_den=24, ctx=DEFAULT_CONTEXT) -> TorsionInstance:
    pairs = []
    for _ in range(rng.randint(1, max_blocks)):
        n = rng.randint(2, max_den)
        a = rng.randint(1, n - 1)
        pairs.append((rng.choice(NU_CHOICES), Fraction(a, n)))
    with ctx.workprec():
        ltr = mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return TorsionInstance(tuple(pairs), ltr)


def suite_torsion(ctx=DEFAULT_CONTEXT, trials=100, seed=0, **_):
    tol = ctx.tolerance(0.2)
    rng = random.Random(seed)
    out = []
    for t in range(trials):
        inst = random_torsion_instance(rng, ctx=ctx)
        with ctx.workprec():
            r = abs(torsion_closed_form(inst, ctx) - torsion_spectral_oracle(inst, ctx))
        out.append(_case("torsion", f"trial={t}", r, tol))
    # the alternative sign of the leading term misses the eta anchor by log(2 pi)
    anchor = TorsionInstance(((1, Fraction(1, 2)),), 1)
    with ctx.workprec():
        gap = torsion_spectral_oracle(anchor, ctx) - torsion_closed_form(anchor, ctx, theorem_sign=True)
        off = abs(gap - mpmath.log(2 * mpmath.pi))
    out.append(_case("torsion", "theorem-sign gap at (nu=1, phi=pi) equals log(2 pi)", off, tol))
    return out


def suite_invariance(ctx=DEFAULT_CONTEXT, **_):
    tol = ctx.tolerance(0.2)
    out = []
    for n, gens in ((12, (5,)), (12, (7,)), (12, ()), (15, (4,)), (20, (9,))):
        desc = SubfieldDescriptor.create(n, gens)
        Q = desc.quotient
        for phi_e in (validate_type(Q, standard_reps(Q)),):
            res = extension_invariance_check(desc, phi_e, ctx)
            name = f"n={n} H={list(Q.subgroup)} type={phi_e}"
            out.append(_case("invariance", name, res.residual, tol))
            out.append(_case("invariance", name + " vanishing", res.max_vanishing, tol))
    return out


def standard_reps(Q):
    """One representative of each conjugate pair of G/H, taking the smaller residue."""
    chosen = []
    seen = set()
    for a in Q.elements:
        if a in seen:
            continue
        b = Q.mul(Q.conj, a)
        seen |= {a, b}
        chosen.append(min(a, b))
    return chosen


def suite_collapse(ctx=DEFAULT_CONTEXT, **_):
    out = []
    ok = all(binom_alternating(k) == (1 if k == 1 else 0) for k in range(31))
    out.append(Case("collapse", "binom_alternating k<=30", None, None, ok))
    angles = (Fraction(1, 3), Fraction(1, 4), Fraction(2, 5))
    for d in (1, 2, 3):
        for K in (2, 3, 4):
            out.append(Case("collapse", f"d={d} K={K}", None, None, zeta_collapse_check(d, angles[:d], K)))
    return out


_RUNNERS = {
    "functional-equation": suite_functional_equation,
    "cotangent": suite_cotangent,
    "half-sum": suite_half_sum,
    "waslem": suite_waslem,
    "system-vs-character": suite_system_vs_character,
    "torsion": suite_torsion,
    "invariance": suite_invariance,
    "collapse": suite_collapse,
}


def run_suite(name: str, ctx: PrecisionContext = DEFAULT_CONTEXT, **params) -> list[Case]:
    if name == "all":
        out = []
        for suite in SUITES:
            out.extend(_RUNNERS[suite](ctx=ctx, **params))
        return out
    if name not in _RUNNERS:
        raise KeyError(name)
    return _RUNNERS[name](ctx=ctx, **params)
