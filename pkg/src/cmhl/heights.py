"""Two routes to the Faltings height of a CM abelian variety with CM by Q(mu_n).

* the character route: h = -d sum_{chi odd} <Phi*Phi^v, chi> 2 L'/L(chi_prim, 0);
* the system route: solve M X = Y with M_{l,k} = (1/2) cot(pi a/n) for a = a_k^-1 a_l
  and Y_l = -4 sum_k R^rot(2 pi a_k^-1 a_l / n), then h = (1/8) sum_j X_j.

Both are defined only modulo the log-span S_n (see :mod:`cmhl.relation`).
``compare_routes`` measures the rational constant c with c h_sys - h_char in S_n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .arith import DEFAULT_CONTEXT, PrecisionContext
from .characters import GroupFunction, SubfieldDescriptor, UnitGroup, characters
from .cmtypes import CMType, lift_type, pairing
from .errors import CalibrationFailed, GroupMismatch, SingularSystem, ZeroCharacterPairing
from .lfunctions import cot_half_arg, l_at_0, l_derivative_at_0, r_rot
from .relation import logspan_basis, logspan_search, pslq_search


@dataclass
class CharacterContribution:
    character_index: int
    conductor: int
    pairing: object
    l_ratio: object
    contribution: object


@dataclass
class Calibration:
    c: Fraction
    coefficients: dict[str, Fraction]
    residual: object


@dataclass
class HeightReport:
    modulus: int
    type: tuple[int, ...]
    h_character: object
    per_character: list[CharacterContribution]
    h_system: object = None
    calibration: Calibration | None = None
    basis: list[str] = field(default_factory=list)
    note: str = "defined modulo the Q-span of Im(alpha) log p, alpha in mu_n, p | n"


@dataclass
class HeightSystem:
    modulus: int
    members: tuple[int, ...]
    M: list[list[object]]
    Y: list[object]
    f: GroupFunction | None = None
    X: list[object] | None = None

    @property
    def d(self) -> int:
        return len(self.members)

    def residual(self, X=None, ctx=DEFAULT_CONTEXT):
        """max_l |(M X - Y)_l|."""
        X = X if X is not None else self.X
        with ctx.workprec():
            return max(abs(mpmath.fsum(m * x for m, x in zip(row, X)) - y) for row, y in zip(self.M, self.Y))

    def solution_by_member(self) -> dict[int, object]:
        return dict(zip(self.members, self.X))


def l_ratio(chi, ctx=DEFAULT_CONTEXT):
    """L'/L(chi_prim, 0) for odd chi."""
    prim = chi.primitive_part
    with ctx.workprec():
        return l_derivative_at_0(prim, ctx) / l_at_0(prim, ctx)


def height_character_route(phi: CMType, ctx: PrecisionContext = DEFAULT_CONTEXT) -> HeightReport:
    rows = []
    with ctx.workprec():
        for chi in characters(phi.group, "odd"):
            w = pairing(phi, chi, ctx)
            r = l_ratio(chi, ctx)
            rows.append(
                CharacterContribution(chi.index, chi.conductor, w, r, -phi.d * 2 * w * r)
            )
        h = mpmath.re(mpmath.fsum(row.contribution for row in rows))
    return HeightReport(phi.modulus, phi.members, h, rows)


def _default_f(G: UnitGroup, ctx) -> GroupFunction:
    n = G.modulus
    return GroupFunction.from_callable(G, lambda a: cot_half_arg(a, n, ctx) / 2, ctx)


def build_system(phi: CMType, ctx: PrecisionContext = DEFAULT_CONTEXT, f: GroupFunction | None = None, Y=None) -> HeightSystem:
    """The d x d system M X = Y for the type ``phi``.

    ``f`` replaces the kernel (1/2) cot(pi a/n) and ``Y`` the right-hand side; both
    default to the height system.
    """
    G = phi.group
    if not isinstance(G, UnitGroup):
        raise GroupMismatch("the height system is built on the full unit group")
    n = G.modulus
    f = f if f is not None else _default_f(G, ctx)
    members = phi.members
    with ctx.workprec():
        M = [[f(G.mul(G.inv(ak), al)) for ak in members] for al in members]
        if Y is None:
            rot = {}
            Y = []
            for al in members:
                acc = mpmath.mpf(0)
                for ak in members:
                    a = G.mul(G.inv(ak), al)
                    if a not in rot:
                        rot[a] = r_rot(a, n, ctx)
                    acc += rot[a]
                Y.append(-4 * acc)
        else:
            Y = [mpmath.mpf(y) for y in Y]
    return HeightSystem(n, members, M, list(Y), f)


def solve_elimination(system: HeightSystem, ctx: PrecisionContext = DEFAULT_CONTEXT) -> list:
    """Gaussian elimination with partial pivoting at the working precision."""
    d = system.d
    with ctx.workprec():
        A = [list(row) + [y] for row, y in zip(system.M, system.Y)]
        tiny = mpmath.ldexp(mpmath.mpf(1), -(int(ctx.bits) // 2))
        for col in range(d):
            piv = max(range(col, d), key=lambda r: abs(A[r][col]))
            if abs(A[piv][col]) < tiny:
                raise SingularSystem(f"pivot {mpmath.nstr(A[piv][col], 5)} in column {col}")
            A[col], A[piv] = A[piv], A[col]
            p = A[col][col]
            for r in range(col + 1, d):
                t = A[r][col] / p
                if t:
                    Ar, Ac = A[r], A[col]
                    for k in range(col, d + 1):
                        Ar[k] -= t * Ac[k]
        X = [mpmath.mpf(0)] * d
        for r in range(d - 1, -1, -1):
            X[r] = (A[r][d] - mpmath.fsum(A[r][k] * X[k] for k in range(r + 1, d))) / A[r][r]
    system.X = X
    return X


def solve_characters(system: HeightSystem, f: GroupFunction | None = None, Y=None, ctx: PrecisionContext = DEFAULT_CONTEXT) -> list:
    """X_j = sum_{chi odd} chi(a_j) sum_l conj(chi(a_l)) Y_l / (d^2 <f, chi>),
    with <f, chi> = (1/2d) sum_sigma f(sigma) conj(chi(sigma))."""
    f = f if f is not None else system.f
    Y = Y if Y is not None else system.Y
    members = system.members
    G = f.group
    d = system.d
    with ctx.workprec():
        tiny = mpmath.ldexp(mpmath.mpf(1), -(int(ctx.bits) // 2))
        X = [mpmath.mpc(0)] * d
        for chi in characters(G, "odd"):
            fc = mpmath.fsum(f(s) * mpmath.conj(chi.value(s, ctx)) for s in G.elements) / (2 * d)
            if abs(fc) < tiny:
                raise ZeroCharacterPairing(f"<f, chi> vanishes for character #{chi.index}")
            coeff = mpmath.fsum(mpmath.conj(chi.value(a, ctx)) * y for a, y in zip(members, Y)) / (d * d * fc)
            X = [x + chi.value(a, ctx) * coeff for x, a in zip(X, members)]
        return [mpmath.re(x) for x in X]


def height_system_route(phi: CMType, ctx: PrecisionContext = DEFAULT_CONTEXT) -> object:
    system = build_system(phi, ctx)
    X = solve_elimination(system, ctx)
    with ctx.workprec():
        return mpmath.fsum(X) / 8


def compare_routes(phi: CMType, ctx: PrecisionContext = DEFAULT_CONTEXT, max_c_den: int = 16, max_coeff_den: int = 10**4) -> HeightReport:
    """Measure c with c h_sys - h_char in S_n.

    A joint integer relation among (h_char, h_sys, basis) proposes c; the proposal is
    then confirmed by an independent log-span search on c h_sys - h_char.
    """
    if ctx.bits < 192:
        raise CalibrationFailed("route comparison needs at least 192 bits")
    n = phi.modulus
    report = height_character_route(phi, ctx)
    h_sys = height_system_route(phi, ctx)
    report.h_system = h_sys
    basis = logspan_basis(n, ctx=ctx)
    report.basis = [lab for lab, _ in basis]
    with ctx.workprec():
        res = pslq_search([report.h_character, h_sys] + [v for _, v in basis], ctx)
        if not res.found or res.relation[0] == 0 or res.relation[1] == 0:
            raise CalibrationFailed(
                f"no relation between the routes for n={n}; norm bound {mpmath.nstr(res.norm_bound, 5)}"
            )
        m_char, m_sys = res.relation[0], res.relation[1]
        c = Fraction(-m_sys, m_char)
        if c.denominator > max_c_den:
            raise CalibrationFailed(f"calibration constant {c} has denominator above {max_c_den}")
        target = mpmath.mpf(c.numerator) / c.denominator * h_sys - report.h_character
        span = logspan_search(target, n, ctx=ctx, max_den=max_coeff_den)
        if span.coefficients is None:
            raise CalibrationFailed(f"c = {c} proposed but c h_sys - h_char is not in the log-span")
        value = mpmath.fsum(
            mpmath.mpf(q.numerator) / q.denominator * v for (lab, v) in basis for q in [span.coefficients[lab]]
        )
        report.calibration = Calibration(c, span.coefficients, abs(target - value))
    return report


@dataclass
class InvarianceResult:
    residual: object
    quotient_sum: object
    lifted_sum: object
    max_vanishing: object


def extension_invariance_check(desc: SubfieldDescriptor, phi_e: CMType, ctx: PrecisionContext = DEFAULT_CONTEXT) -> InvarianceResult:
    """Compare sum_chi <Phi*Phi^v, chi> L'/L(chi_prim, 0) over G/H with the same sum for
    the lifted type over G, after checking that characters nontrivial on H drop out."""
    Q = desc.quotient
    lifted = lift_type(desc, phi_e)
    with ctx.workprec():
        q_sum = mpmath.fsum(pairing(phi_e, chi, ctx) * l_ratio(chi, ctx) for chi in characters(Q, "odd"))
        terms = []
        vanish = mpmath.mpf(0)
        for chi in characters(Q.parent, "odd"):
            w = pairing(lifted, chi, ctx)
            if chi.is_trivial_on(Q.subgroup):
                terms.append(w * l_ratio(chi, ctx))
            else:
                vanish = max(vanish, abs(w))
        g_sum = mpmath.fsum(terms)
        return InvarianceResult(abs(q_sum - g_sum), mpmath.re(q_sum), mpmath.re(g_sum), vanish)
