"""Equivariant analytic torsion of a line bundle on a complex torus, for an automorphism
with eigenvalues e^{i phi_j} (phi_j = 2 pi t_j, t_j rational) on the tangent space and
nu_j on the hermitian form.

Two independent evaluations are provided: the digamma/log-Gamma closed form and
Z'(0) of the spectral zeta function Z(s) = sum_j sum_k e^{ik phi_j} (2 pi k nu_j)^-s L_Tr,
assembled from the periodic zeta function.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import DEFAULT_CONTEXT, PrecisionContext, digamma, root_of_unity, to_fraction, to_number
from .errors import DomainError
from .lfunctions import periodic_zeta, periodic_zeta_ds, r_rot_loggamma


@dataclass(frozen=True)
class TorsionInstance:
    """``eigenpairs`` holds (nu_j, t_j) with the angle phi_j = 2 pi t_j."""

    eigenpairs: tuple[tuple[object, Fraction], ...]
    ltr: object = 1

    def __post_init__(self):
        pairs = []
        for nu, t in self.eigenpairs:
            t = to_fraction(t)
            if t is None:
                raise DomainError("angles must be exact rationals (fractions of a full turn)")
            t %= 1
            if t == 0:
                raise DomainError("angle is 0 mod 2 pi; the automorphism must have isolated fixed points")
            pairs.append((nu, t))
        object.__setattr__(self, "eigenpairs", tuple(pairs))

    def conjugate(self) -> TorsionInstance:
        """Angles negated and L_Tr conjugated."""
        return TorsionInstance(tuple((nu, (-t) % 1) for nu, t in self.eigenpairs), mpmath.conj(self.ltr))

    def __add__(self, other: TorsionInstance) -> TorsionInstance:
        if self.ltr != other.ltr:
            raise DomainError("blocks must share L_Tr")
        return TorsionInstance(self.eigenpairs + other.eigenpairs, self.ltr)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def torsion_closed_form(inst: TorsionInstance, ctx: PrecisionContext = DEFAULT_CONTEXT, theorem_sign: bool = False):
    """sum_j sign(nu_j) [ -log(2 pi |nu_j|)/(e^{-i phi_j} - 1) + i R^rot(phi_j)
        - (1/4)(2 log 2 pi + 2 gamma + psi(t_j) + psi(1 - t_j)) ] L_Tr.

    Blocks with nu_j = 0 contribute nothing.  ``theorem_sign`` flips the sign of the
    first term for comparison with the alternative printed convention.
    """
    with ctx.workprec():
        ltr = to_number(inst.ltr, ctx)
        log2pi = mpmath.log(2 * mpmath.pi)
        total = mpmath.mpc(0)
        for nu, t in inst.eigenpairs:
            nu = to_number(nu, ctx)
            sg = _sign(nu)
            if sg == 0:
                continue
            lead = mpmath.log(2 * mpmath.pi * abs(nu)) / (mpmath.conj(root_of_unity(t, ctx)) - 1)
            if not theorem_sign:
                lead = -lead
            rot = r_rot_loggamma(t.numerator, t.denominator, ctx)
            const = (2 * log2pi + 2 * mpmath.euler + digamma(t, ctx) + digamma(1 - t, ctx)) / 4
            total += sg * (lead + mpmath.mpc(0, rot) - const)
        return total * ltr


def torsion_spectral_oracle(inst: TorsionInstance, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Z'(0) = sum_j (-log(2 pi nu_j) L(e^{i phi_j}, 0) + L'(e^{i phi_j}, 0)) L_Tr, nu_j > 0."""
    with ctx.workprec():
        ltr = to_number(inst.ltr, ctx)
        total = mpmath.mpc(0)
        for nu, t in inst.eigenpairs:
            nu = to_number(nu, ctx)
            if not nu > 0:
                raise DomainError("the spectral oracle needs nu_j > 0")
            a, n = t.numerator, t.denominator
            total += -mpmath.log(2 * mpmath.pi * nu) * periodic_zeta(a, n, 0, ctx) + periodic_zeta_ds(a, n, 0, ctx)
        return total * ltr


def binom_alternating(k: int) -> int:
    """sum_{q=0}^{k} (-1)^(q+1) q binom(k, q), which is 1 for k = 1 and 0 otherwise."""
    if k < 0:
        raise DomainError("k must be non-negative")
    return sum((-1) ** (q + 1) * q * math.comb(k, q) for q in range(k + 1))


def _trace_exact(nvec, q: int, angles) -> tuple[int, Fraction]:
    """(integer coefficient, turn) with trace = coefficient * e^{2 pi i turn} * L_Tr."""
    k = sum(1 for m in nvec if m)
    turn = sum((m * to_fraction(t) for m, t in zip(nvec, angles)), Fraction(0)) % 1
    return math.comb(k, q), turn


def eigenspace_trace(nvec, q: int, angles, ltr=1, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """binom(#{j : n_j != 0}, q) L_Tr prod_j e^{i n_j phi_j} with phi_j = 2 pi t_j."""
    if q > len(nvec):
        raise DomainError("q exceeds the dimension")
    coeff, turn = _trace_exact(nvec, q, angles)
    with ctx.workprec():
        return coeff * root_of_unity(turn, ctx) * to_number(ltr, ctx)


def zeta_collapse_check(d: int, angles, K: int) -> bool:
    """For every multi-index with |n| <= K, sum_q (-1)^(q+1) q trace(q, n) is zero unless
    exactly one n_j is nonzero, in which case it is e^{i n_j phi_j} (times L_Tr).

    Root-of-unity sums are kept as {turn: integer} dictionaries, so the check is exact.
    """
    if len(angles) != d:
        raise DomainError("need one angle per dimension")
    for nvec in itertools.product(range(K + 1), repeat=d):
        if sum(nvec) > K:
            continue
        acc: dict[Fraction, int] = {}
        for q in range(d + 1):
            coeff, turn = _trace_exact(nvec, q, angles)
            acc[turn] = acc.get(turn, 0) + (-1) ** (q + 1) * q * coeff
        acc = {t: c for t, c in acc.items() if c}
        nonzero = [j for j, m in enumerate(nvec) if m]
        if len(nonzero) == 1:
            j = nonzero[0]
            expected = {(nvec[j] * to_fraction(angles[j])) % 1: 1}
        else:
            expected = {}
        if acc != expected:
            return False
    return True
