"""The unit group (Z/n)^x, identified with Gal(Q(mu_n)/Q) via a -> (zeta -> zeta^a),
its quotients G/H, Dirichlet characters and complex functions on these groups.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path

import mpmath

from .arith import DEFAULT_CONTEXT, PrecisionContext, root_of_unity, to_number
from .errors import DomainError, GroupMismatch, InvalidModulus, NotCMField

CACHE_SCHEMA = "cmhl.unitgroup.v1"


def factorize(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def euler_phi(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result = result // p * (p - 1)
    return result


def _primitive_root_prime_power(p: int, e: int) -> int:
    q = p**e
    order = q // p * (p - 1)
    factors = prime_divisors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in factors):
            break
    else:  # p == 2 never reaches here; p == 3 yields g == 2
        g = 1
    if e > 1 and pow(g, p - 1, p * p) == 1:
        g += p
    assert pow(g, order, q) == 1
    return g % q


@dataclass(frozen=True)
class Component:
    """One cyclic factor of (Z/n)^x."""

    prime_power: int
    generator: int  # residue mod n: local generator mod prime_power, 1 mod the cofactor
    local_generator: int
    order: int


class UnitGroup:
    """(Z/n)^x with a CRT decomposition into cyclic factors and full discrete-log tables.

    Elements are residues in [1, n).  The element -1 = n - 1 is complex conjugation.
    """

    def __init__(self, n: int, components=None, dlog=None):
        if n < 1:
            raise InvalidModulus(f"modulus must be positive, got {n}")
        self.modulus = int(n)
        self.factorization = factorize(n)
        self.components = tuple(components) if components is not None else self._build_components()
        self.dlog = dlog if dlog is not None else self._build_dlog()
        self.elements = tuple(sorted(self.dlog))
        self.index = {a: i for i, a in enumerate(self.elements)}
        self.order = len(self.elements)

    def _build_components(self):
        n = self.modulus
        comps = []
        for p, e in self.factorization:
            q = p**e
            cof = n // q
            local = []
            if p == 2:
                if e == 2:
                    local.append((3, 2))
                elif e >= 3:
                    local.append((q - 1, 2))
                    local.append((5, 2 ** (e - 2)))
            else:
                local.append((_primitive_root_prime_power(p, e), q // p * (p - 1)))
            for g, order in local:
                # CRT: x = g mod q, x = 1 mod cof
                if cof == 1:
                    x = g % q
                else:
                    x = (g * cof * pow(cof, -1, q) + q * pow(q, -1, cof)) % n
                comps.append(Component(q, x, g, order))
        return comps

    def _build_dlog(self):
        n = self.modulus
        if n <= 2:
            return {1: ()}
        table = {}
        ranges = [range(c.order) for c in self.components]
        for exps in itertools.product(*ranges):
            x = 1
            for c, k in zip(self.components, exps):
                x = x * pow(c.generator, k, n) % n
            table[x] = exps
        return table

    # group protocol
    @property
    def identity(self) -> int:
        return 1

    @property
    def conj(self) -> int:
        return self.reduce(-1)

    @property
    def unit_group(self) -> UnitGroup:
        return self

    def reduce(self, a: int) -> int:
        if self.modulus <= 2:
            return 1
        r = a % self.modulus
        if r not in self.index:
            raise DomainError(f"{a} is not a unit modulo {self.modulus}")
        return r

    def is_unit(self, a: int) -> bool:
        return math.gcd(a, self.modulus) == 1

    def mul(self, a: int, b: int) -> int:
        return self.reduce(a * b)

    def inv(self, a: int) -> int:
        if self.modulus <= 2:
            return 1
        return pow(a, -1, self.modulus)

    def orders(self) -> tuple[int, ...]:
        return tuple(c.order for c in self.components)

    def __eq__(self, other):
        return isinstance(other, UnitGroup) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("UnitGroup", self.modulus))

    def __repr__(self):
        return f"UnitGroup({self.modulus})"

    # on-disk cache
    def to_json(self) -> dict:
        return {
            "schema": CACHE_SCHEMA,
            "modulus": self.modulus,
            "components": [
                [c.prime_power, c.generator, c.local_generator, c.order] for c in self.components
            ],
            "dlog": {str(a): list(e) for a, e in sorted(self.dlog.items())},
        }

    @classmethod
    def from_json(cls, blob: dict) -> UnitGroup:
        if blob.get("schema") != CACHE_SCHEMA:
            raise ValueError("unrecognised unit-group cache schema")
        comps = [Component(*c) for c in blob["components"]]
        dlog = {int(a): tuple(e) for a, e in blob["dlog"].items()}
        return cls(int(blob["modulus"]), comps, dlog)


@lru_cache(maxsize=256)
def _unit_group_cached(n: int) -> UnitGroup:
    return UnitGroup(n)


def unit_group(n: int, cache_dir: str | os.PathLike | None = None) -> UnitGroup:
    """The unit group modulo n >= 3.  ``cache_dir`` (or ``$CMHL_CACHE_DIR``) holds JSON tables."""
    if n < 3:
        raise InvalidModulus(f"modulus must be at least 3, got {n}")
    cache_dir = cache_dir or os.environ.get("CMHL_CACHE_DIR")
    if not cache_dir:
        return _unit_group_cached(n)
    path = Path(cache_dir) / f"unitgroup-{n}.json"
    if path.exists():
        try:
            G = UnitGroup.from_json(json.loads(path.read_text()))
            if G.modulus == n and len(G.dlog) == euler_phi(n):
                return G
        except (ValueError, KeyError, TypeError):
            pass
    G = _unit_group_cached(n)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(G.to_json(), sort_keys=True))
    except OSError:
        pass
    return G


class QuotientGroup:
    """G/H for a subgroup H of (Z/n)^x; elements are the least residues of the cosets."""

    def __init__(self, G: UnitGroup, subgroup):
        self.parent = G
        self.modulus = G.modulus
        gens = {G.reduce(h) for h in subgroup}
        H = {1}
        while True:
            grown = H | {G.mul(h, g) for h in H for g in gens}
            if grown == H:
                break
            H = grown
        self.subgroup = tuple(sorted(H))
        rep = {}
        for a in G.elements:
            if a in rep:
                continue
            coset = [G.mul(a, h) for h in self.subgroup]
            r = min(coset)
            for x in coset:
                rep[x] = r
        self._rep = rep
        self.elements = tuple(sorted(set(rep.values())))
        self.index = {a: i for i, a in enumerate(self.elements)}
        self.order = len(self.elements)

    @property
    def identity(self) -> int:
        return self._rep[1]

    @property
    def conj(self) -> int:
        return self._rep[self.parent.conj]

    @property
    def unit_group(self) -> UnitGroup:
        return self.parent

    def reduce(self, a: int) -> int:
        return self._rep[self.parent.reduce(a)]

    def mul(self, a: int, b: int) -> int:
        return self._rep[self.parent.mul(a, b)]

    def inv(self, a: int) -> int:
        return self._rep[self.parent.inv(a)]

    def coset(self, a: int) -> tuple[int, ...]:
        r = self.reduce(a)
        return tuple(x for x in self.parent.elements if self._rep[x] == r)

    def is_cm(self) -> bool:
        return self.parent.conj not in self.subgroup

    def __eq__(self, other):
        return (
            isinstance(other, QuotientGroup)
            and other.modulus == self.modulus
            and other.subgroup == self.subgroup
        )

    def __hash__(self):
        return hash(("QuotientGroup", self.modulus, self.subgroup))

    def __repr__(self):
        return f"QuotientGroup({self.modulus}, H={list(self.subgroup)})"


@dataclass(frozen=True)
class SubfieldDescriptor:
    """An abelian CM field E inside Q(mu_n), described by H = Gal(Q(mu_n)/E)."""

    modulus: int
    subgroup: tuple[int, ...]

    @cached_property
    def quotient(self) -> QuotientGroup:
        return QuotientGroup(unit_group(self.modulus), self.subgroup)

    @classmethod
    def create(cls, n: int, generators) -> SubfieldDescriptor:
        Q = QuotientGroup(unit_group(n), generators)
        if not Q.is_cm():
            raise NotCMField(f"-1 lies in H = {list(Q.subgroup)}; the fixed field is totally real")
        return cls(n, Q.subgroup)

    @property
    def representatives(self) -> tuple[int, ...]:
        return self.quotient.elements


# -- characters ------------------------------------------------------------------


@dataclass(frozen=True)
class DirichletCharacter:
    """A character of (Z/n)^x, given by one exponent per cyclic component:
    chi(g_i) = exp(2 pi i e_i / ord_i)."""

    group: UnitGroup = field(compare=False, repr=False)
    exponents: tuple[int, ...]
    modulus: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "modulus", self.group.modulus)
        orders = self.group.orders()
        if len(orders) != len(self.exponents):
            raise DomainError("exponent tuple does not match the group decomposition")
        object.__setattr__(
            self, "exponents", tuple(int(e) % o for e, o in zip(self.exponents, orders))
        )

    def value_arg(self, a: int) -> Fraction:
        """chi(a) = exp(2 pi i * value_arg(a)); value_arg in [0, 1)."""
        if self.modulus <= 2:
            return Fraction(0)
        logs = self.group.dlog[self.group.reduce(a)]
        t = sum(
            (Fraction(e * k, c.order) for e, k, c in zip(self.exponents, logs, self.group.components)),
            Fraction(0),
        )
        return t - math.floor(t)

    def value(self, a: int, ctx: PrecisionContext = DEFAULT_CONTEXT):
        if not self.group.is_unit(a):
            return mpmath.mpc(0)
        return root_of_unity(self.value_arg(a), ctx)

    def __call__(self, a: int, ctx: PrecisionContext = DEFAULT_CONTEXT):
        return self.value(a, ctx)

    @cached_property
    def order(self) -> int:
        o = 1
        for e, c in zip(self.exponents, self.group.components):
            o = math.lcm(o, c.order // math.gcd(e, c.order))
        return o

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @cached_property
    def parity(self) -> int:
        if self.modulus <= 2:
            return 1
        return 1 if self.value_arg(self.group.conj) == 0 else -1

    @property
    def is_odd(self) -> bool:
        return self.parity == -1

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    @cached_property
    def index(self) -> int:
        """Position in the lexicographic enumeration of exponent tuples."""
        idx = 0
        for e, o in zip(self.exponents, self.group.orders()):
            idx = idx * o + e
        return idx

    def conjugate(self) -> DirichletCharacter:
        return DirichletCharacter(self.group, tuple(-e for e in self.exponents))

    def __mul__(self, other: DirichletCharacter) -> DirichletCharacter:
        if other.modulus != self.modulus:
            raise GroupMismatch("characters of different moduli")
        return DirichletCharacter(self.group, tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def is_trivial_on(self, elements) -> bool:
        return all(self.value_arg(h) == 0 for h in elements)

    @cached_property
    def conductor(self) -> int:
        n = self.modulus
        for f in sorted(d for d in range(1, n + 1) if n % d == 0):
            if all(self.value_arg(a) == 0 for a in self.group.elements if (a - 1) % f == 0):
                return f
        return n

    @cached_property
    def primitive_part(self) -> DirichletCharacter:
        f = self.conductor
        if f == self.modulus:
            return self
        Gf = UnitGroup(f) if f < 3 else unit_group(f)
        exps = []
        for c in Gf.components:
            lift = c.generator
            while math.gcd(lift, self.modulus) != 1:
                lift += f
            t = self.value_arg(lift) * c.order
            assert t.denominator == 1, "character does not factor through its conductor"
            exps.append(int(t))
        return DirichletCharacter(Gf, tuple(exps))

    def __repr__(self):
        return f"DirichletCharacter(mod {self.modulus}, #{self.index}, exps={self.exponents})"


def _as_group(n_or_group):
    if isinstance(n_or_group, (UnitGroup, QuotientGroup)):
        return n_or_group
    return unit_group(int(n_or_group))


def characters(n_or_group, filter: str = "all") -> list[DirichletCharacter]:  # noqa: A002
    """All (or the odd / even) characters of (Z/n)^x, or of a quotient G/H
    (realised as the characters of G trivial on H), in index order."""
    grp = _as_group(n_or_group)
    G = grp.unit_group
    out = []
    for exps in itertools.product(*(range(o) for o in G.orders())):
        chi = DirichletCharacter(G, exps)
        if isinstance(grp, QuotientGroup) and not chi.is_trivial_on(grp.subgroup):
            continue
        if filter == "odd" and not chi.is_odd:
            continue
        if filter == "even" and chi.is_odd:
            continue
        out.append(chi)
    if filter not in ("all", "odd", "even"):
        raise ValueError(f"unknown character filter {filter!r}")
    return out


def value(chi: DirichletCharacter, a: int, ctx: PrecisionContext = DEFAULT_CONTEXT):
    return chi.value(a, ctx)


def value_arg(chi: DirichletCharacter, a: int) -> Fraction:
    return chi.value_arg(a)


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor


def primitive_part(chi: DirichletCharacter) -> DirichletCharacter:
    return chi.primitive_part


# -- functions on the group ------------------------------------------------------


class GroupFunction:
    """A complex-valued function on (Z/n)^x or on a quotient G/H."""

    def __init__(self, group, values, ctx: PrecisionContext = DEFAULT_CONTEXT):
        values = list(values)
        if len(values) != group.order:
            raise GroupMismatch("value array length differs from the group order")
        self.group = group
        self.ctx = ctx
        with ctx.workprec():
            self.values = [to_number(v, ctx) for v in values]

    @classmethod
    def from_callable(cls, group, func, ctx=DEFAULT_CONTEXT) -> GroupFunction:
        return cls(group, [func(a) for a in group.elements], ctx)

    @classmethod
    def indicator(cls, group, members, ctx=DEFAULT_CONTEXT) -> GroupFunction:
        members = {group.reduce(a) for a in members}
        return cls(group, [1 if a in members else 0 for a in group.elements], ctx)

    @classmethod
    def from_character(cls, group, chi: DirichletCharacter, ctx=DEFAULT_CONTEXT) -> GroupFunction:
        return cls(group, [chi.value(a, ctx) for a in group.elements], ctx)

    def __call__(self, a: int):
        return self.values[self.group.index[self.group.reduce(a)]]

    def compose_conj(self) -> GroupFunction:
        """sigma -> f(c . sigma)."""
        c = self.group.conj
        return GroupFunction.from_callable(self.group, lambda a: self(self.group.mul(c, a)), self.ctx)

    def conjugate(self) -> GroupFunction:
        with self.ctx.workprec():
            return GroupFunction(self.group, [mpmath.conj(v) for v in self.values], self.ctx)

    def is_odd(self, tol=0) -> bool:
        g = self.compose_conj()
        with self.ctx.workprec():
            return all(abs(u + v) <= tol for u, v in zip(self.values, g.values))

    def lift(self, G: UnitGroup) -> GroupFunction:
        """f o p for the projection p: G -> G/H."""
        if self.group.unit_group != G:
            raise GroupMismatch("lift target is not the parent group")
        return GroupFunction.from_callable(G, self, self.ctx)

    def __add__(self, other):
        _check_same(self, other)
        with self.ctx.workprec():
            return GroupFunction(self.group, [u + v for u, v in zip(self.values, other.values)], self.ctx)

    def __sub__(self, other):
        _check_same(self, other)
        with self.ctx.workprec():
            return GroupFunction(self.group, [u - v for u, v in zip(self.values, other.values)], self.ctx)

    def scale(self, c) -> GroupFunction:
        with self.ctx.workprec():
            return GroupFunction(self.group, [c * v for v in self.values], self.ctx)

    def __repr__(self):
        vals = ", ".join(mpmath.nstr(v, 8) for v in self.values)
        return f"GroupFunction({self.group!r}, [{vals}])"


def _check_same(f: GroupFunction, g: GroupFunction):
    if f.group != g.group:
        raise GroupMismatch(f"{f.group!r} vs {g.group!r}")


def _coerce(group, g, ctx):
    if isinstance(g, DirichletCharacter):
        return GroupFunction.from_character(group, g, ctx)
    return g


def inner(f: GroupFunction, g, ctx: PrecisionContext | None = None):
    """<f, g> = (1/|G|) sum_sigma f(sigma) conj(g(sigma))."""
    ctx = ctx or f.ctx
    g = _coerce(f.group, g, ctx)
    _check_same(f, g)
    with ctx.workprec():
        total = mpmath.fsum(u * mpmath.conj(v) for u, v in zip(f.values, g.values))
        return total / f.group.order


def convolve(f: GroupFunction, g: GroupFunction, ctx: PrecisionContext | None = None) -> GroupFunction:
    """(f * g)(sigma) = (1/d) sum_tau f(tau) g(sigma tau^-1), with d = |G|/2.

    With this scaling the pairing <Phi * Phi^v, chi> summed over odd chi is 1/2
    for every CM type, and convolution commutes exactly with lifting along G -> G/H.
    """
    ctx = ctx or f.ctx
    _check_same(f, g)
    grp = f.group
    with ctx.workprec():
        scale = mpmath.mpf(2) / grp.order
        out = []
        inverses = {t: grp.inv(t) for t in grp.elements}
        for s in grp.elements:
            acc = mpmath.fsum(
                fv * g(grp.mul(s, inverses[t])) for t, fv in zip(grp.elements, f.values) if fv != 0
            )
            out.append(scale * acc)
    return GroupFunction(grp, out, ctx)


def dual(f: GroupFunction) -> GroupFunction:
    """f^v(sigma) = f(sigma^-1)."""
    grp = f.group
    return GroupFunction.from_callable(grp, lambda a: f(grp.inv(a)), f.ctx)
