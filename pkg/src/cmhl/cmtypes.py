"""CM types of Q(mu_n) and of its CM subfields E = Q(mu_n)^H.

A type is stored as a set of group elements: the embedding sigma_a: zeta -> zeta^a is
the residue a, so Phi_k^-1 o Phi_l is the residue a_k^-1 a_l.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import DEFAULT_CONTEXT, PrecisionContext
from .characters import (
    DirichletCharacter,
    GroupFunction,
    QuotientGroup,
    SubfieldDescriptor,
    UnitGroup,
    characters,
    convolve,
    dual,
    factorize,
    inner,
    unit_group,
)
from .errors import GroupMismatch, NotACMType, NotCMField


@dataclass(frozen=True)
class CMType:
    group: UnitGroup | QuotientGroup
    members: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.group.modulus

    @property
    def d(self) -> int:
        return len(self.members)

    def indicator(self, ctx=DEFAULT_CONTEXT) -> GroupFunction:
        return GroupFunction.indicator(self.group, self.members, ctx)

    def translate(self, sigma: int) -> CMType:
        return CMType(self.group, tuple(sorted(self.group.mul(sigma, a) for a in self.members)))

    def conjugate(self) -> CMType:
        return self.translate(self.group.conj)

    def dual(self) -> CMType:
        return CMType(self.group, tuple(sorted(self.group.inv(a) for a in self.members)))

    def __str__(self):
        return ",".join(str(a) for a in self.members)


def _group_of(n_or_group):
    if isinstance(n_or_group, (UnitGroup, QuotientGroup)):
        return n_or_group
    return unit_group(int(n_or_group))


def validate_type(n_or_group, members) -> CMType:
    """Accept ``members`` iff it contains exactly one element of each pair {a, -a}."""
    grp = _group_of(n_or_group)
    if isinstance(grp, QuotientGroup) and not grp.is_cm():
        raise NotCMField("-1 lies in H")
    try:
        reps = [grp.reduce(int(a)) for a in members]
    except Exception as exc:
        raise NotACMType(f"type members must be units: {exc}") from exc
    chosen = set(reps)
    if len(chosen) != len(reps):
        raise NotACMType("repeated type member")
    c = grp.conj
    for a in grp.elements:
        hits = (a in chosen) + (grp.mul(c, a) in chosen)
        if hits != 1:
            raise NotACMType(f"conjugate pair of {a} is hit {hits} times")
    return CMType(grp, tuple(sorted(chosen)))


def conjugate_pairs(grp) -> list[tuple[int, int]]:
    seen = set()
    pairs = []
    for a in grp.elements:
        if a in seen:
            continue
        b = grp.mul(grp.conj, a)
        seen |= {a, b}
        pairs.append((a, b))
    return pairs


def random_type(grp, rng: random.Random) -> CMType:
    grp = _group_of(grp)
    return CMType(grp, tuple(sorted(rng.choice(p) for p in conjugate_pairs(grp))))


def all_types(grp) -> list[CMType]:
    grp = _group_of(grp)
    return [CMType(grp, tuple(sorted(choice))) for choice in itertools.product(*conjugate_pairs(grp))]


def standard_type(n: int) -> CMType:
    """The type {a : 0 < a < n/2}."""
    grp = unit_group(n)
    return CMType(grp, tuple(a for a in grp.elements if 2 * a < n))


def _check_char(phi: CMType, chi: DirichletCharacter):
    if chi.modulus != phi.modulus:
        raise GroupMismatch("character and type live on different moduli")
    if isinstance(phi.group, QuotientGroup) and not chi.is_trivial_on(phi.group.subgroup):
        raise GroupMismatch("character is not trivial on H")


def pairing(phi: CMType, chi: DirichletCharacter, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """<Phi * Phi^v, chi>, real and non-negative."""
    _check_char(phi, chi)
    ind = phi.indicator(ctx)
    val = inner(convolve(ind, dual(ind), ctx), chi, ctx)
    with ctx.workprec():
        return mpmath.re(val)


def pairing_closed_form(phi: CMType, chi: DirichletCharacter, ctx=DEFAULT_CONTEXT):
    """2 |<1_Phi, chi>|^2, the value the convolution route must reproduce."""
    _check_char(phi, chi)
    with ctx.workprec():
        s = mpmath.fsum(mpmath.conj(chi.value(a, ctx)) for a in phi.members)
        return 2 * abs(s) ** 2 / phi.group.order**2


def odd_characters_of(phi: CMType) -> list[DirichletCharacter]:
    return characters(phi.group, "odd")


def lift_type(desc: SubfieldDescriptor, phi_e: CMType) -> CMType:
    """Full preimage of Phi_E under G -> G/H."""
    Q = desc.quotient
    if not Q.is_cm():
        raise NotCMField("-1 lies in H")
    if phi_e.group != Q:
        raise GroupMismatch("type does not live on the quotient of this descriptor")
    G = Q.parent
    members = sorted(a for a in G.elements if Q.reduce(a) in phi_e.members)
    return CMType(G, tuple(members))


def conductor_term(phi: CMType, ctx=DEFAULT_CONTEXT):
    """sum_{chi odd} <Phi*Phi^v, chi> log f_chi = sum_p c_p log p.

    Returns ``(total, {p: c_p})``; each c_p is rational (checked by the caller).
    """
    odd = odd_characters_of(phi)
    with ctx.workprec():
        per_prime: dict[int, object] = {}
        for p, _ in factorize(phi.modulus):
            per_prime[p] = mpmath.mpf(0)
        for chi in odd:
            w = pairing(phi, chi, ctx)
            for p, e in factorize(chi.conductor):
                per_prime[p] += w * e
        total = mpmath.fsum(c * mpmath.log(p) for p, c in per_prime.items())
        return total, per_prime


def conductor_term_rational(phi: CMType, ctx=DEFAULT_CONTEXT, max_den: int | None = None) -> dict[int, Fraction]:
    """conductor_term coefficients recovered as exact rationals."""
    from .relation import rational_recover

    max_den = max_den or 2 * phi.group.order * phi.group.order
    _, per_prime = conductor_term(phi, ctx)
    out = {}
    for p, c in per_prime.items():
        r = rational_recover(c, max_den, ctx)
        if r is None:
            raise ArithmeticError(f"coefficient at p={p} is not a small rational")
        out[p] = r
    return out
