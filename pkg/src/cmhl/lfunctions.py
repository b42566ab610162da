"""Dirichlet L-functions, the periodic zeta L(z, s) at roots of unity, its imaginary
part L^Im(z, s) and the rotation derivative R^rot, all via finite Hurwitz combinations.

``L(chi, s)`` always means the L-series of ``chi`` at its own modulus, i.e. without the
Euler factors at primes dividing the modulus but not the conductor.  Pass
``chi.primitive_part`` for the primitive L-function.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import (
    DEFAULT_CONTEXT,
    PrecisionContext,
    cos_2pi,
    digamma,
    gamma,
    hurwitz_pair,
    log_gamma,
    root_of_unity,
    sin_2pi,
    to_number,
)
from .characters import DirichletCharacter, characters, euler_phi, prime_divisors, unit_group
from .errors import DomainError, PoleError, UnsupportedCharacter


@dataclass(frozen=True)
class LValue:
    value: object
    s: object
    descriptor: str
    primitive: bool


def _units(n):
    return [a for a in range(1, n + 1) if _gcd(a, n) == 1]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# -- Dirichlet L -------------------------------------------------------------------


def dirichlet_l(chi: DirichletCharacter, s, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """L(chi, s) = n^-s sum_{a=1}^{n} chi(a) zeta(s, a/n)."""
    n = chi.modulus
    with ctx.workprec():
        s = to_number(s, ctx)
        if s == 1:
            if chi.is_principal:
                raise PoleError("principal L-function has a pole at s = 1")
            # zeta(s, x) = 1/(s-1) - psi(x) + O(s-1) and sum chi(a) = 0
            total = mpmath.fsum(chi.value(a, ctx) * digamma(Fraction(a, n), ctx) for a in _units(n))
            return _tidy(-total / n, chi)
        total = mpmath.fsum(chi.value(a, ctx) * hurwitz_pair(s, Fraction(a, n), ctx)[0] for a in _units(n))
        return _tidy(mpmath.power(n, -s) * total, chi)


def dirichlet_l_ds(chi: DirichletCharacter, s, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """d/ds L(chi, s) by termwise differentiation of the Hurwitz combination (s != 1)."""
    n = chi.modulus
    with ctx.workprec():
        s = to_number(s, ctx)
        if s == 1:
            raise DomainError("derivative at s = 1 is not implemented")
        val = mpmath.mpf(0)
        der = mpmath.mpf(0)
        for a in _units(n):
            z, dz = hurwitz_pair(s, Fraction(a, n), ctx)
            c = chi.value(a, ctx)
            val += c * z
            der += c * dz
        ns = mpmath.power(n, -s)
        return _tidy(ns * (der - mpmath.log(n) * val), chi)


def l_value(chi: DirichletCharacter, s, ctx=DEFAULT_CONTEXT, primitive=False) -> LValue:
    target = chi.primitive_part if primitive else chi
    return LValue(dirichlet_l(target, s, ctx), s, repr(target), primitive)


def _tidy(x, chi):
    # real characters have real L-values
    if chi.is_real and isinstance(x, mpmath.mpc):
        return x.real
    return x


def l_at_0(chi: DirichletCharacter, ctx=DEFAULT_CONTEXT):
    """L(chi, 0) = -(1/n) sum a chi(a) for non-principal chi."""
    if chi.is_principal:
        raise UnsupportedCharacter("principal character")
    n = chi.modulus
    with ctx.workprec():
        return _tidy(-mpmath.fsum(a * chi.value(a, ctx) for a in _units(n)) / n, chi)


def l_derivative_at_0(chi: DirichletCharacter, ctx=DEFAULT_CONTEXT):
    """L'(chi, 0) = -log(n) L(chi, 0) + sum_a chi(a) log Gamma(a/n) for non-principal chi."""
    if chi.is_principal:
        raise UnsupportedCharacter("L'(chi, 0) is only provided for non-principal characters")
    n = chi.modulus
    with ctx.workprec():
        lg = mpmath.fsum(chi.value(a, ctx) * log_gamma(Fraction(a, n), ctx) for a in _units(n))
        return _tidy(lg - mpmath.log(n) * l_at_0(chi, ctx), chi)


def euler_factor_correction(chi: DirichletCharacter, s=1, ctx=DEFAULT_CONTEXT):
    """sum_{p | n} chi_prim(p) p^-s log p / (1 - chi_prim(p) p^-s).

    This is L'/L(chi, s) - L'/L(chi_prim, s).
    """
    if chi.is_principal:
        raise UnsupportedCharacter("principal character")
    prim = chi.primitive_part
    with ctx.workprec():
        s = to_number(s, ctx)
        total = mpmath.mpf(0)
        for p in prime_divisors(chi.modulus):
            if prim.modulus % p == 0:
                continue
            t = prim.value(p, ctx) * mpmath.power(p, -s)
            total += t * mpmath.log(p) / (1 - t)
        return _tidy(total, chi) if total != 0 else mpmath.mpf(0)


# -- periodic zeta, L^Im, R^rot ------------------------------------------------------


def _check_angle(a, n):
    if n < 2:
        raise DomainError("modulus must be at least 2")
    if a % n == 0:
        raise DomainError("a = 0 mod n gives the Riemann zeta pole line")


def _periodic(a, n, s, ctx, weight):
    _check_angle(a, n)
    with ctx.workprec():
        s = to_number(s, ctx)
        if s == 1:
            raise PoleError("s = 1 is not supported for the periodic zeta")
        val = 0
        der = 0
        for b in range(1, n + 1):
            w = weight(Fraction(a * b, n))
            if w == 0:
                continue
            z, dz = hurwitz_pair(s, Fraction(b, n), ctx)
            val += w * z
            der += w * dz
        ns = mpmath.power(n, -s)
        return ns * val, ns * (der - mpmath.log(n) * val)


def periodic_zeta(a: int, n: int, s, ctx=DEFAULT_CONTEXT):
    """L(e^{2 pi i a/n}, s) = sum_{k>=1} e^{2 pi i k a/n} k^-s."""
    return _periodic(a, n, s, ctx, lambda t: root_of_unity(t, ctx))[0]


def periodic_zeta_ds(a: int, n: int, s, ctx=DEFAULT_CONTEXT):
    return _periodic(a, n, s, ctx, lambda t: root_of_unity(t, ctx))[1]


def l_im(a: int, n: int, s, ctx=DEFAULT_CONTEXT):
    """L^Im(e^{2 pi i a/n}, s) = sum_{k>=1} sin(2 pi k a/n) k^-s (the k = 0 term vanishes)."""
    val = _periodic(a, n, s, ctx, lambda t: sin_2pi(t, ctx))[0]
    return val.real if isinstance(val, mpmath.mpc) else val


def l_im_ds(a: int, n: int, s, ctx=DEFAULT_CONTEXT):
    der = _periodic(a, n, s, ctx, lambda t: sin_2pi(t, ctx))[1]
    return der.real if isinstance(der, mpmath.mpc) else der


def r_rot(a: int, n: int, ctx=DEFAULT_CONTEXT):
    """R^rot(2 pi a/n) = d/ds L^Im(e^{2 pi i a/n}, s) at s = 0."""
    return l_im_ds(a, n, 0, ctx)


def r_rot_loggamma(a: int, n: int, ctx=DEFAULT_CONTEXT):
    """R^rot(2 pi a/n) through log Gamma only:
    sum_b sin(2 pi ab/n) log Gamma(b/n) + (log n / n) sum_b b sin(2 pi ab/n)."""
    _check_angle(a, n)
    with ctx.workprec():
        lg = mpmath.mpf(0)
        lin = mpmath.mpf(0)
        for b in range(1, n):
            w = sin_2pi(Fraction(a * b, n), ctx)
            if w == 0:
                continue
            lg += w * log_gamma(Fraction(b, n), ctx)
            lin += b * w
        return lg + mpmath.log(n) * lin / n


# -- identity checks ----------------------------------------------------------------


def _gamma_poles(s):
    if isinstance(s, mpmath.mpc) and s.imag != 0:
        return False
    s = mpmath.re(s)
    x1 = 1 - s / 2
    x2 = (s + 1) / 2
    return any(x <= 0 and x == mpmath.floor(x) for x in (x1, x2))


def functional_equation_sides(n: int, chi: DirichletCharacter, s, ctx=DEFAULT_CONTEXT):
    """Both sides of
    (1/2d) sum_sigma conj(chi(sigma)) L^Im(sigma(zeta), s)
        = (1/2d) n^{1-s} Gamma(1 - s/2)/Gamma((s+1)/2) pi^{s-1/2} L(conj(chi), 1 - s).
    The left side goes through periodic_zeta, the right through dirichlet_l."""
    if chi.modulus != n:
        raise DomainError("character modulus differs from n")
    if not chi.is_odd:
        raise DomainError("the identity is stated for odd characters")
    with ctx.workprec():
        s = to_number(s, ctx)
        if _gamma_poles(s):
            raise DomainError("s hits a pole of one of the Gamma factors")
        d2 = euler_phi(n)
        two_i = mpmath.mpc(0, 2)
        lhs = 0
        for a in unit_group(n).elements:
            lim = (periodic_zeta(a, n, s, ctx) - periodic_zeta(n - a, n, s, ctx)) / two_i
            lhs += mpmath.conj(chi.value(a, ctx)) * lim
        lhs /= d2
        if isinstance(s, mpmath.mpc):
            g = mpmath.gamma(1 - s / 2) / mpmath.gamma((s + 1) / 2)
        else:
            g = gamma(1 - s / 2, ctx) / gamma((s + 1) / 2, ctx)
        rhs = (
            mpmath.power(n, 1 - s)
            * g
            * mpmath.power(mpmath.pi, s - mpmath.mpf(0.5))
            * dirichlet_l(chi.conjugate(), 1 - s, ctx)
            / d2
        )
        return lhs, rhs


def check_functional_equation(n: int, chi: DirichletCharacter, s, ctx=DEFAULT_CONTEXT):
    """Relative residual |LHS - RHS| / (1 + |RHS|)."""
    lhs, rhs = functional_equation_sides(n, chi, s, ctx)
    with ctx.workprec():
        return abs(lhs - rhs) / (1 + abs(rhs))


def cot_half_arg(a: int, n: int, ctx=DEFAULT_CONTEXT):
    """cot(arg(zeta^a)/2) = cot(pi a/n)."""
    t = Fraction(a, 2 * n)
    with ctx.workprec():
        return cos_2pi(t, ctx) / sin_2pi(t, ctx)


def cotangent_sides(n: int, chi: DirichletCharacter, ctx=DEFAULT_CONTEXT):
    """sum_sigma cot(arg(sigma(zeta))/2) chi(sigma)  and  (2n/pi) L(chi, 1)."""
    if not chi.is_odd:
        raise DomainError("the identity is stated for odd characters")
    with ctx.workprec():
        lhs = mpmath.fsum(cot_half_arg(a, n, ctx) * chi.value(a, ctx) for a in unit_group(n).elements)
        rhs = 2 * n / mpmath.pi * dirichlet_l(chi, 1, ctx)
        return lhs, rhs


def check_cotangent_identity(n: int, chi: DirichletCharacter, ctx=DEFAULT_CONTEXT):
    lhs, rhs = cotangent_sides(n, chi, ctx)
    with ctx.workprec():
        return abs(lhs - rhs)


def odd_characters(n: int):
    return characters(n, "odd")
