"""Integer relation detection (PSLQ) and membership in the rational log-span

    S_n = { sum_k q_k Im(alpha_k) log p_k : q_k rational, alpha_k in mu_n, p_k | n }.

A negative answer is never a proof of non-membership: it only says that no relation
with Euclidean norm below ``norm_bound`` exists among the given numbers.
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath

from .arith import DEFAULT_CONTEXT, PrecisionContext, sin_2pi, to_fraction, to_real
from .characters import prime_divisors
from .errors import DomainError, PrecisionTooLow

GAMMA = "2/sqrt(3)"


@dataclass
class RelationResult:
    relation: list[int] | None
    norm_bound: object  # mpf: no relation of smaller norm exists (when relation is None)
    iterations: int
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.relation is not None


def _nint(x) -> int:
    return int(mpmath.nint(x))


def pslq_search(values, ctx: PrecisionContext = DEFAULT_CONTEXT, max_iter=None, max_norm=None) -> RelationResult:
    """PSLQ with gamma = 2/sqrt(3) on real ``values``.

    A relation m is accepted when |sum m_i x_i| < 2^-(3 bits/4) |x| and |m| <= max_norm
    (default 2^(bits / (2 (len - 1)))).  A random vector of length k only admits
    near-relations of norm N with residual about N^-(k-1), so this pair of limits keeps
    a margin of 2^(bits/4) against spurious hits.  The search stops after
    ``10 * len(values) * bits`` iterations, or once the certified lower bound on the
    norm of any relation exceeds ``max_norm``.
    """
    n = len(values)
    if n < 2:
        raise DomainError("PSLQ needs at least two values")
    if ctx.bits < 128:
        raise PrecisionTooLow(f"PSLQ needs at least 128 bits, got {ctx.bits}")
    bits = int(ctx.bits)
    max_iter = max_iter or 10 * n * bits
    with ctx.workprec():
        x = [to_real(v, ctx) for v in values]
        tol = mpmath.ldexp(mpmath.mpf(1), -(3 * bits // 4))
        if max_norm is None:
            max_norm = mpmath.ldexp(mpmath.mpf(1), bits // (2 * (n - 1)))
        max_norm = mpmath.mpf(max_norm)
        norm = mpmath.sqrt(mpmath.fsum(v * v for v in x))
        if norm == 0:
            raise DomainError("all values are zero")
        x = [v / norm for v in x]
        for i, v in enumerate(x):
            if abs(v) < tol:
                rel = [0] * n
                rel[i] = 1
                return RelationResult(rel, mpmath.mpf(1), 0, "zero entry")

        g = 2 / mpmath.sqrt(3)
        A = [[int(i == j) for j in range(n)] for i in range(n)]
        B = [[int(i == j) for j in range(n)] for i in range(n)]
        s = [mpmath.sqrt(mpmath.fsum(x[j] ** 2 for j in range(k, n))) for k in range(n)]
        y = [v / s[0] for v in x]
        s = [v / s[0] for v in s]
        H = [[mpmath.mpf(0)] * (n - 1) for _ in range(n)]
        for i in range(n):
            for j in range(min(i + 1, n - 1)):
                if i == j:
                    H[i][j] = s[j + 1] / s[j]
                else:
                    H[i][j] = -y[i] * y[j] / (s[j] * s[j + 1])

        def reduce_rows(rows):
            for i, jmax in rows:
                for j in range(jmax, -1, -1):
                    if H[j][j] == 0:
                        continue
                    t = _nint(H[i][j] / H[j][j])
                    if t == 0:
                        continue
                    y[j] += t * y[i]
                    Hi, Hj = H[i], H[j]
                    for k in range(j + 1):
                        Hi[k] -= t * Hj[k]
                    Ai, Aj = A[i], A[j]
                    for k in range(n):
                        Ai[k] -= t * Aj[k]
                        B[k][j] += t * B[k][i]

        reduce_rows([(i, i - 1) for i in range(1, n)])

        bound = mpmath.mpf(0)
        for it in range(1, max_iter + 1):
            # pick m maximising g^(m+1) |H_mm|
            best = -1
            m = 0
            gp = mpmath.mpf(1)
            for i in range(n - 1):
                gp *= g
                v = gp * abs(H[i][i])
                if v > best:
                    best = v
                    m = i
            y[m], y[m + 1] = y[m + 1], y[m]
            A[m], A[m + 1] = A[m + 1], A[m]
            H[m], H[m + 1] = H[m + 1], H[m]
            for row in B:
                row[m], row[m + 1] = row[m + 1], row[m]
            if m < n - 2:
                t0 = mpmath.sqrt(H[m][m] ** 2 + H[m][m + 1] ** 2)
                if t0 == 0:
                    return RelationResult(None, bound, it, "precision exhausted")
                t1 = H[m][m] / t0
                t2 = H[m][m + 1] / t0
                for i in range(m, n):
                    t3 = H[i][m]
                    t4 = H[i][m + 1]
                    H[i][m] = t1 * t3 + t2 * t4
                    H[i][m + 1] = -t2 * t3 + t1 * t4
            reduce_rows([(i, min(i - 1, m + 1)) for i in range(m + 1, n)])

            jmin = min(range(n), key=lambda j: abs(y[j]))
            if abs(y[jmin]) < tol:
                rel = [B[k][jmin] for k in range(n)]
                resid = abs(mpmath.fsum(c * v for c, v in zip(rel, x)))
                rnorm = mpmath.sqrt(sum(c * c for c in rel))
                if resid < tol and any(rel) and rnorm <= max_norm:
                    g0 = 0
                    for c in rel:
                        g0 = math.gcd(g0, c)
                    rel = [c // g0 for c in rel]
                    first = next(c for c in rel if c)
                    if first < 0:
                        rel = [-c for c in rel]
                    return RelationResult(rel, bound, it, "relation")
            hmax = max(abs(H[j][j]) for j in range(n - 1))
            if hmax == 0:
                return RelationResult(None, bound, it, "precision exhausted")
            bound = max(bound, 1 / hmax)
            if bound > max_norm:
                return RelationResult(None, bound, it, "norm bound exceeded")
        return RelationResult(None, bound, max_iter, "iteration limit")


def pslq(values, ctx: PrecisionContext = DEFAULT_CONTEXT, **kwargs) -> list[int] | None:
    """Integer relation among ``values`` or None."""
    return pslq_search(values, ctx, **kwargs).relation


def rational_recover(x, H: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Fraction | None:
    """Continued-fraction convergent p/q with q <= H and |x - p/q| < 1/(2^(bits/3) q^2)."""
    if H < 1:
        raise DomainError("denominator bound must be at least 1")
    with ctx.workprec():
        xr = to_real(x, ctx)
        exact = to_fraction(+xr)
        cand = exact.limit_denominator(H)
        err = abs(xr - mpmath.mpf(cand.numerator) / cand.denominator)
        limit = mpmath.ldexp(mpmath.mpf(1), -(int(ctx.bits) // 3)) / cand.denominator**2
        return cand if err < limit else None


# -- exact cyclotomic bookkeeping for sin(2 pi j/n) ------------------------------------


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Division by a monic integer polynomial (coefficients low to high)."""
    num = list(num)
    dd = len(den) - 1
    q = [0] * max(len(num) - dd, 1)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c:
            q[k - dd] = c
            for i in range(dd + 1):
                num[k - dd + i] -= c * den[i]
    return q, num[:dd]


@lru_cache(maxsize=None)
def cyclotomic_poly(N: int) -> tuple[int, ...]:
    poly = [-1] + [0] * (N - 1) + [1]
    for d in range(1, N):
        if N % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_poly(d)))
            assert not any(rem)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


def _root_power_vector(e: int, N: int) -> list[Fraction]:
    phi = cyclotomic_poly(N)
    deg = len(phi) - 1
    mono = [0] * (e % N) + [1]
    _, rem = _poly_divmod(mono, list(phi)) if len(mono) > deg else ([], mono + [0] * (deg - len(mono)))
    return [Fraction(c) for c in rem]


def _sine_vector(j: int, n: int) -> list[Fraction]:
    # sin(2 pi j/n) = (zeta_N^(4j-n) - zeta_N^(-4j-n)) / 2 with N = 4n
    N = 4 * n
    u = _root_power_vector(4 * j - n, N)
    v = _root_power_vector(-4 * j - n, N)
    return [(a - b) / 2 for a, b in zip(u, v)]


def _try_extend(echelon: list[tuple[int, list[Fraction]]], vec: list[Fraction]) -> bool:
    vec = list(vec)
    for pivot, row in echelon:
        if vec[pivot]:
            c = vec[pivot] / row[pivot]
            vec = [a - c * b for a, b in zip(vec, row)]
    for i, c in enumerate(vec):
        if c:
            echelon.append((i, vec))
            return True
    return False


@lru_cache(maxsize=None)
def independent_sines(n: int) -> tuple[int, ...]:
    """Indices j (1 <= j < n/2) with {1} and {sin(2 pi j/n)} linearly independent over Q."""
    echelon: list[tuple[int, list[Fraction]]] = []
    N = 4 * n
    _try_extend(echelon, _root_power_vector(0, N))
    kept = []
    for j in range(1, (n + 1) // 2):
        if 2 * j == n:
            continue
        if _try_extend(echelon, _sine_vector(j, n)):
            kept.append(j)
    return tuple(kept)


def logspan_basis(n: int, primes=None, ctx: PrecisionContext = DEFAULT_CONTEXT) -> list[tuple[str, object]]:
    """Q-independent generators {log p} + {sin(2 pi j/n) log p} of S_n."""
    primes = list(primes) if primes is not None else prime_divisors(n)
    with ctx.workprec():
        basis = [(f"log({p})", mpmath.log(p)) for p in primes]
        for j in independent_sines(n):
            s = sin_2pi(Fraction(j, n), ctx)
            for p in primes:
                basis.append((f"sin(2pi*{j}/{n})*log({p})", s * mpmath.log(p)))
    return basis


@dataclass
class SpanResult:
    coefficients: dict[str, Fraction] | None
    norm_bound: object = None
    basis: list[str] = field(default_factory=list)


def logspan_search(x, n: int, primes=None, ctx: PrecisionContext = DEFAULT_CONTEXT, max_den: int | None = None) -> SpanResult:
    basis = logspan_basis(n, primes, ctx)
    labels = [lab for lab, _ in basis]
    with ctx.workprec():
        xr = to_real(x, ctx)
        scale = 1 + mpmath.fsum(abs(v) for _, v in basis)
        if abs(xr) < mpmath.ldexp(scale, -(int(ctx.bits) // 2)):
            return SpanResult({lab: Fraction(0) for lab in labels}, None, labels)
        res = pslq_search([xr] + [v for _, v in basis], ctx)
        if not res.found or res.relation[0] == 0:
            return SpanResult(None, res.norm_bound, labels)
        m0 = res.relation[0]
        coeffs = {lab: Fraction(-m, m0) for lab, m in zip(labels, res.relation[1:])}
        if max_den is not None and any(c.denominator > max_den for c in coeffs.values()):
            return SpanResult(None, res.norm_bound, labels)
        return SpanResult(coeffs, res.norm_bound, labels)


def logspan_member(x, n: int, primes=None, ctx: PrecisionContext = DEFAULT_CONTEXT, max_den: int | None = None):
    """Rational coefficients of x over the S_n basis, or None when no relation was found."""
    return logspan_search(x, n, primes, ctx, max_den).coefficients


def evaluate_span(coeffs: dict[str, Fraction], n: int, primes=None, ctx=DEFAULT_CONTEXT):
    basis = dict(logspan_basis(n, primes, ctx))
    with ctx.workprec():
        return mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * basis[k] for k, c in coeffs.items())


# -- tiny expression language for the CLI ---------------------------------------------

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div)


def _normalise(expr: str) -> str:
    e = expr.replace(" ", "")
    e = e.replace("π", "pi")
    e = re.sub(r"log(\d+)", r"log(\1)", e)
    e = re.sub(r"(\d)pi", r"\1*pi", e)
    e = re.sub(r"\)\(", ")*(", e)
    return e


def _exact(node):
    """Exact rational value of a literal arithmetic node, or None."""
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Fraction(node.value)
    if isinstance(node, ast.Constant) and isinstance(node.value, float):
        return None
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        v = _exact(node.operand)
        return None if v is None else -v
    if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
        a, b = _exact(node.left), _exact(node.right)
        if a is None or b is None:
            return None
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        return a / b
    return None


def _sin_argument(node) -> Fraction:
    """Turns t with the argument equal to 2 pi t; the argument must read (rational) * pi."""
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Div):
        num = _sin_argument(node.left)
        den = _exact(node.right)
        if den is None:
            raise DomainError("sin argument must be a rational multiple of pi")
        return num / den
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Mult):
        for a, b in ((node.left, node.right), (node.right, node.left)):
            if isinstance(b, ast.Name) and b.id == "pi":
                c = _exact(a)
                if c is not None:
                    return c / 2
            c = _exact(a)
            if c is not None:
                return c * _sin_argument(b)
    if isinstance(node, ast.Name) and node.id == "pi":
        return Fraction(1, 2)
    raise DomainError("sin argument must be a rational multiple of pi")


def evaluate_expression(expr: str, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """Evaluate an expression over {log p, sin(r*pi), rationals, +, -, *, /}."""
    tree = ast.parse(_normalise(expr), mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        exact = _exact(node)
        if exact is not None:
            return mpmath.mpf(exact.numerator) / exact.denominator
        if isinstance(node, ast.Constant) and isinstance(node.value, float):
            return mpmath.mpf(repr(node.value))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            return a / b
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and len(node.args) == 1:
            name = node.func.id
            if name == "log":
                p = _exact(node.args[0])
                if p is None or p <= 0:
                    raise DomainError("log takes a positive rational literal")
                return mpmath.log(mpmath.mpf(p.numerator) / p.denominator)
            if name == "sin":
                return sin_2pi(_sin_argument(node.args[0]), ctx)
        if isinstance(node, ast.Name) and node.id == "pi":
            return +mpmath.pi
        raise DomainError(f"unsupported expression element: {ast.dump(node)[:60]}")

    with ctx.workprec():
        return ev(tree)
