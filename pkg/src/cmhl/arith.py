"""Arbitrary-precision scalars and the special functions built on them.

Scalars are :mod:`mpmath` ``mpf``/``mpc`` values.  Every public function takes a
:class:`PrecisionContext` and evaluates under ``workprec(bits + guard_bits)``;
results keep that working precision.  Callers doing further arithmetic on the
results should do so inside ``ctx.workprec()`` as well.

The log-gamma, digamma and Hurwitz zeta routines are implemented here directly
(Stirling series and Euler-Maclaurin summation with exact Bernoulli numbers);
mpmath supplies only the elementary functions.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath
from mpmath import mp

from .errors import DomainError, PoleError

__all__ = [
    "PrecisionContext",
    "DEFAULT_CONTEXT",
    "to_real",
    "to_number",
    "to_fraction",
    "add",
    "mul",
    "div",
    "pow",
    "exp",
    "log",
    "sin",
    "cos",
    "atan2",
    "sqrt",
    "const_pi",
    "const_euler_gamma",
    "bernoulli",
    "log_gamma",
    "digamma",
    "gamma",
    "hurwitz_zeta",
    "hurwitz_zeta_ds",
    "hurwitz_pair",
    "sin_2pi",
    "cos_2pi",
    "root_of_unity",
]


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision: ``bits`` of mantissa plus ``guard_bits`` of headroom."""

    bits: int = 256
    guard_bits: int = 32

    def __post_init__(self):
        if int(self.bits) < 64:
            raise DomainError(f"precision must be at least 64 bits, got {self.bits}")
        if int(self.guard_bits) < 0:
            raise DomainError("guard_bits must be non-negative")

    @property
    def working_bits(self) -> int:
        return int(self.bits) + int(self.guard_bits)

    @property
    def dps(self) -> int:
        return int(self.bits * math.log10(2))

    def workprec(self):
        return mp.workprec(self.working_bits)

    def eps(self):
        """2^-bits as an mpf."""
        return mpmath.ldexp(mpmath.mpf(1), -int(self.bits))

    def tolerance(self, fraction: float):
        """10^-(fraction * bits), the form used by the tolerance statements."""
        return mpmath.mpf(10) ** (-int(fraction * self.bits))


DEFAULT_CONTEXT = PrecisionContext()


# -- conversions -------------------------------------------------------------


def to_fraction(x) -> Fraction | None:
    """Exact rational value of ``x`` if it has one cheaply, else None."""
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, (int, Fraction)) or isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError:
            return None
    if isinstance(x, mpmath.mpf):
        if not mpmath.isfinite(x):
            return None
        # man_exp drops the sign
        sign, man, exp_, _ = x._mpf_
        return (-1 if sign else 1) * Fraction(int(man)) * (Fraction(2) ** int(exp_))
    return None


def to_real(x, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Convert int/Fraction/str/float/mpf to an mpf at the working precision."""
    with ctx.workprec():
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        if isinstance(x, mpmath.mpc):
            if x.imag != 0:
                raise DomainError("expected a real number")
            return +x.real
        return mpmath.mpf(x)


def to_number(x, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Like :func:`to_real` but keeps complex inputs complex."""
    if isinstance(x, (mpmath.mpc, complex)):
        with ctx.workprec():
            return mpmath.mpc(x)
    return to_real(x, ctx)


# -- elementary family -------------------------------------------------------


def add(x, y, ctx=DEFAULT_CONTEXT):
    with ctx.workprec():
        return to_number(x, ctx) + to_number(y, ctx)


def mul(x, y, ctx=DEFAULT_CONTEXT):
    with ctx.workprec():
        return to_number(x, ctx) * to_number(y, ctx)


def div(x, y, ctx=DEFAULT_CONTEXT):
    with ctx.workprec():
        y = to_number(y, ctx)
        if y == 0:
            raise DomainError("division by zero")
        return to_number(x, ctx) / y


def pow(x, y, ctx=DEFAULT_CONTEXT):  # noqa: A001 - part of the elementary family
    with ctx.workprec():
        x = to_number(x, ctx)
        y = to_number(y, ctx)
        if x == 0 and mpmath.re(y) <= 0:
            raise DomainError("0 raised to a non-positive power")
        return mpmath.power(x, y)


def exp(x, ctx=DEFAULT_CONTEXT):
    with ctx.workprec():
        return mpmath.exp(to_number(x, ctx))


def log(x, ctx=DEFAULT_CONTEXT):
    with ctx.workprec():
        x = to_number(x, ctx)
        if x == 0:
            raise DomainError("log(0)")
        if isinstance(x, mpmath.mpf) and x < 0:
            raise DomainError("log of a negative real; pass a complex value for the principal branch")
        return mpmath.log(x)


def sin(x, ctx=DEFAULT_CONTEXT):
    with ctx.workprec():
        return mpmath.sin(to_number(x, ctx))


def cos(x, ctx=DEFAULT_CONTEXT):
    with ctx.workprec():
        return mpmath.cos(to_number(x, ctx))


def atan2(y, x, ctx=DEFAULT_CONTEXT):
    with ctx.workprec():
        y = to_real(y, ctx)
        x = to_real(x, ctx)
        if x == 0 and y == 0:
            raise DomainError("atan2(0, 0)")
        return mpmath.atan2(y, x)


def sqrt(x, ctx=DEFAULT_CONTEXT):
    with ctx.workprec():
        x = to_number(x, ctx)
        if isinstance(x, mpmath.mpf) and x < 0:
            raise DomainError("sqrt of a negative real")
        return mpmath.sqrt(x)


def const_pi(ctx=DEFAULT_CONTEXT):
    with ctx.workprec():
        return +mpmath.pi


def const_euler_gamma(ctx=DEFAULT_CONTEXT):
    with ctx.workprec():
        return +mpmath.euler


# -- exact trigonometry at rational turns -------------------------------------


def _reduce_turn(t) -> Fraction:
    t = Fraction(t)
    return t - (t.numerator // t.denominator)


def sin_2pi(t, ctx=DEFAULT_CONTEXT):
    """sin(2*pi*t) for rational t, exact at multiples of 1/4 and odd in t bit-for-bit."""
    r = _reduce_turn(t)
    if r > Fraction(1, 2):
        return -sin_2pi(1 - r, ctx)
    if r == 0 or r == Fraction(1, 2):
        return mpmath.mpf(0)
    if r == Fraction(1, 4):
        return mpmath.mpf(1)
    if r > Fraction(1, 4):
        r = Fraction(1, 2) - r
    with ctx.workprec():
        return mpmath.sinpi(2 * to_real(r, ctx))


def cos_2pi(t, ctx=DEFAULT_CONTEXT):
    """cos(2*pi*t) for rational t; even in t bit-for-bit."""
    r = _reduce_turn(t)
    if r > Fraction(1, 2):
        r = 1 - r
    if r == 0:
        return mpmath.mpf(1)
    if r == Fraction(1, 2):
        return mpmath.mpf(-1)
    if r == Fraction(1, 4):
        return mpmath.mpf(0)
    if r > Fraction(1, 4):
        return -cos_2pi(Fraction(1, 2) - r, ctx)
    with ctx.workprec():
        return mpmath.cospi(2 * to_real(r, ctx))


def root_of_unity(t, ctx=DEFAULT_CONTEXT):
    """exp(2*pi*i*t) for rational t."""
    with ctx.workprec():
        return mpmath.mpc(cos_2pi(t, ctx), sin_2pi(t, ctx))


# -- Bernoulli numbers ---------------------------------------------------------

_bernoulli_cache: list[Fraction] = [Fraction(1), Fraction(-1, 2)]
_bernoulli_lock = threading.Lock()


def bernoulli(m: int) -> Fraction:
    """Exact Bernoulli number B_m (convention B_1 = -1/2)."""
    if m < 0:
        raise DomainError("Bernoulli index must be non-negative")
    if m < len(_bernoulli_cache):
        return _bernoulli_cache[m]
    with _bernoulli_lock:
        cache = _bernoulli_cache
        while len(cache) <= m:
            k = len(cache)
            if k % 2 == 1:
                cache.append(Fraction(0))
                continue
            # sum_{j<k} C(k+1, j) B_j = -(k+1) B_k
            total = Fraction(0)
            binom = 1  # C(k+1, 0)
            for j in range(k):
                if cache[j]:
                    total += binom * cache[j]
                binom = binom * (k + 1 - j) // (j + 1)
            cache.append(-total / (k + 1))
        return cache[m]


@lru_cache(maxsize=None)
def _stirling_coeff(k: int, prec: int):
    # B_{2k} / (2k (2k-1))
    b = bernoulli(2 * k)
    with mp.workprec(prec):
        return mpmath.mpf(b.numerator) / (b.denominator * 2 * k * (2 * k - 1))


@lru_cache(maxsize=None)
def _em_coeff(j: int, prec: int):
    # B_{2j} / (2j)!
    b = bernoulli(2 * j)
    with mp.workprec(prec):
        return mpmath.mpf(b.numerator) / (b.denominator * math.factorial(2 * j))


# -- log-gamma, digamma, gamma -------------------------------------------------


def _stirling_shift(x, prec: int) -> int:
    threshold = 0.2 * prec + 10
    xf = float(x)
    return max(0, int(math.ceil(threshold - xf)))


def _positive_real(x, ctx, name):
    xr = to_real(x, ctx)
    if xr <= 0:
        raise DomainError(f"{name} requires x > 0, got {mpmath.nstr(xr, 10)}")
    return xr


def log_gamma(x, ctx=DEFAULT_CONTEXT):
    """log Gamma(x) for real x > 0 (upward recurrence, then Stirling series)."""
    prec = ctx.working_bits
    x = _positive_real(x, ctx, "log_gamma")
    with mp.workprec(prec + 16):
        shift = _stirling_shift(x, prec)
        prod = mpmath.mpf(1)
        for j in range(shift):
            prod *= x + j
        y = x + shift
        logy = mpmath.log(y)
        s = (y - mpmath.mpf(0.5)) * logy - y + mpmath.log(2 * mpmath.pi) / 2
        tol = mpmath.ldexp(abs(s) + 1, -(prec + 8))
        y2 = y * y
        ypow = y
        k = 1
        while True:
            term = _stirling_coeff(k, prec + 16) / ypow
            s += term
            if abs(term) < tol:
                break
            ypow *= y2
            k += 1
        result = s - mpmath.log(prod) if shift else s
    with mp.workprec(prec):
        return +result


def digamma(x, ctx=DEFAULT_CONTEXT):
    """psi(x) = (log Gamma)'(x) for real x > 0."""
    prec = ctx.working_bits
    x = _positive_real(x, ctx, "digamma")
    with mp.workprec(prec + 16):
        shift = _stirling_shift(x, prec)
        corr = mpmath.fsum(1 / (x + j) for j in range(shift)) if shift else mpmath.mpf(0)
        y = x + shift
        s = mpmath.log(y) - 1 / (2 * y)
        tol = mpmath.ldexp(abs(s) + 1, -(prec + 8))
        y2 = y * y
        ypow = y2
        k = 1
        while True:
            b = bernoulli(2 * k)
            term = (mpmath.mpf(b.numerator) / (b.denominator * 2 * k)) / ypow
            s -= term
            if abs(term) < tol:
                break
            ypow *= y2
            k += 1
        result = s - corr
    with mp.workprec(prec):
        return +result


def gamma(x, ctx=DEFAULT_CONTEXT):
    """Gamma(x) = exp(log_gamma(x)) for x > 0.

    Negative non-integer arguments are brought into (0, 1] by the recurrence
    Gamma(x) = Gamma(x + k) / (x (x+1) ... (x+k-1)).
    """
    prec = ctx.working_bits
    xr = to_real(x, ctx)
    if xr > 0:
        with mp.workprec(prec):
            return mpmath.exp(log_gamma(xr, ctx))
    if xr == mpmath.floor(xr):
        raise PoleError(f"Gamma has a pole at {int(xr)}")
    k = int(mpmath.floor(-xr)) + 1
    with mp.workprec(prec + 16):
        denom = mpmath.mpf(1)
        for j in range(k):
            denom *= xr + j
        val = mpmath.exp(log_gamma(xr + k, PrecisionContext(ctx.bits, ctx.guard_bits + 16))) / denom
    with mp.workprec(prec):
        return +val


# -- Hurwitz zeta --------------------------------------------------------------


def _hurwitz_key(a):
    fa = to_fraction(a)
    return fa if fa is not None else a


def _em_sum(s, a, prec, n_terms):
    """Euler-Maclaurin value and s-derivative of zeta(s, a); None if the tail failed to converge."""
    one = mpmath.mpf(1)
    head = mpmath.mpf(0)
    dhead = mpmath.mpf(0)
    for k in range(n_terms):
        lk = mpmath.log(a + k)
        t = mpmath.exp(-s * lk)
        head += t
        dhead -= lk * t
    w = a + n_terms
    lw = mpmath.log(w)
    wp = mpmath.exp(-s * lw)
    sm1 = s - one
    tail = w * wp / sm1 + wp / 2
    dtail = -lw * w * wp / sm1 - w * wp / (sm1 * sm1) - lw * wp / 2
    tol = mpmath.ldexp(one, -prec)
    r = s  # rising product s (s+1) ... (s+2j-2)
    dr = one
    wpow = wp / w
    w2 = w * w
    prev = None
    j = 1
    while True:
        c = _em_coeff(j, prec)
        t = c * r * wpow
        dt = c * (dr - lw * r) * wpow
        tail += t
        dtail += dt
        size = abs(t) + abs(dt)
        scale = abs(tail) + abs(head) + abs(dtail) + abs(dhead) + 1
        if size < tol * scale:
            return head + tail, dhead + dtail
        if prev is not None and size > prev and j > 3:
            return None
        prev = size
        for m in (2 * j - 1, 2 * j):
            dr = dr * (s + m) + r
            r = r * (s + m)
        wpow /= w2
        j += 1


@lru_cache(maxsize=8192)
def _hurwitz_cached(s, a_key, bits: int, guard: int):
    prec = bits + guard
    with mp.workprec(prec + 16):
        if isinstance(a_key, Fraction):
            a = mpmath.mpf(a_key.numerator) / a_key.denominator
        else:
            a = mpmath.mpf(a_key)
        s = +s
        n_terms = max(int(math.ceil(bits * 0.35)), int(math.ceil(abs(s))) + 10)
        while True:
            res = _em_sum(s, a, prec + 8, n_terms)
            if res is not None:
                break
            n_terms *= 2
    with mp.workprec(prec):
        return +res[0], +res[1]


def hurwitz_pair(s, a, ctx=DEFAULT_CONTEXT):
    """(zeta(s, a), d/ds zeta(s, a)) for a in (0, 1], s != 1."""
    with ctx.workprec():
        s = to_number(s, ctx)
        if s == 1:
            raise PoleError("Hurwitz zeta has a pole at s = 1")
        ar = to_real(a, ctx)
        if not (0 < ar <= 1):
            raise DomainError("Hurwitz parameter a must lie in (0, 1]")
    if isinstance(s, mpmath.mpc) and s.imag == 0:
        s = s.real
    return _hurwitz_cached(s, _hurwitz_key(a), int(ctx.bits), int(ctx.guard_bits))


def hurwitz_zeta(s, a, ctx=DEFAULT_CONTEXT):
    """zeta(s, a) = sum_{k>=0} (k + a)^-s, continued to s != 1."""
    return hurwitz_pair(s, a, ctx)[0]


def hurwitz_zeta_ds(s, a, ctx=DEFAULT_CONTEXT):
    """d/ds zeta(s, a), by termwise differentiation of the Euler-Maclaurin expansion."""
    return hurwitz_pair(s, a, ctx)[1]
