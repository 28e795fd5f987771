"""Certified solutions of the defining equations of the extremal constants.

Every solver returns a :class:`CertifiedRoot`: the defining function is
evaluated with a rigorous error radius at both ends of a bracket of width
``10**-digits`` and must show opposite signs there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath

from .errors import DomainError, PrecisionEscalationError, RedirectError
from .numerics import PrecisionContext, exact_complex, format_decimal, phase_digits, prime_divisors, primes_up_to
from .zeta_eval import (
    EvalMethod,
    EvalResult,
    _log_zeta_minus_direct,
    hurwitz_jet,
    log_zeta,
    zeta,
    zeta_jet,
)

RealFunction = Callable[[mpmath.mpf, PrecisionContext], EvalResult]

GUARD = 10
LOW_DIGITS = 15


@dataclass(frozen=True)
class CertifiedRoot:
    value: mpmath.mpf
    enclosure_width: mpmath.mpf
    bracket: tuple
    residual: mpmath.mpf
    digits: int
    name: str = ""

    def contains(self, x) -> bool:
        return self.bracket[0] <= x <= self.bracket[1]

    def disjoint_from(self, other: "CertifiedRoot") -> bool:
        return self.bracket[1] < other.bracket[0] or other.bracket[1] < self.bracket[0]

    def decimal(self, digits: int | None = None) -> str:
        return format_decimal(self.value, (digits or self.digits) + 1)

    def to_dict(self) -> dict:
        d = self.digits
        return {
            "name": self.name,
            "value": self.decimal(),
            "enclosure": [format_decimal(self.bracket[0], d + 3), format_decimal(self.bracket[1], d + 3)],
            "enclosure_width": format_decimal(self.enclosure_width, 3),
            "residual": format_decimal(self.residual, 3),
            "digits": d,
        }


def _as_result(r) -> EvalResult:
    if isinstance(r, EvalResult):
        return r
    v, e = r
    return EvalResult(mpmath.mpc(v), mpmath.mpf(e))


def _sign(fn: RealFunction, x, ctx: PrecisionContext, max_digits: int):
    """Certified sign of fn(x): +1, -1, 0 for an exact zero, None if undecided
    even at ``max_digits``."""
    d = ctx.digits
    while True:
        c = PrecisionContext(d, ctx.guard_digits)
        r = _as_result(fn(x, c))
        v = mpmath.mpc(r.value).real
        if r.error_radius == 0 and v == 0:
            return 0, r
        if abs(v) > r.error_radius:
            return (1 if v > 0 else -1), r
        if d >= max_digits:
            return None, r
        d = min(max_digits, 2 * d)


def verified_bisect(
    fn: RealFunction,
    bracket,
    digits: int,
    derivative: RealFunction | None = None,
    guard: int = GUARD,
    name: str = "",
) -> CertifiedRoot:
    """Root of ``fn`` inside ``bracket`` to ``digits`` decimals.

    ``fn(x, ctx)`` returns an :class:`EvalResult` (or ``(value, radius)``)
    for a real function.  Bisection runs at low precision down to width
    1e-6; Newton (or the secant method when ``derivative`` is None) then
    doubles precision each step.  The answer is re-certified by evaluating
    the signs at ``value -+ 10**-digits / 2``.
    """
    if digits < 1:
        raise DomainError("digits must be positive")
    top = digits + guard
    ctx_top = PrecisionContext(max(10, top), max(5, guard))
    low = PrecisionContext(min(LOW_DIGITS, max(10, top)), 5)
    with mpmath.workdps(top + 10):
        a, b = (mpmath.mpf(x) for x in bracket)
    if not a < b:
        raise DomainError("bracket must satisfy lo < hi")

    sa, _ = _sign(fn, a, low, top)
    sb, _ = _sign(fn, b, low, top)
    if sa == 0:
        return _finish(fn, a, sa, digits, ctx_top, name)
    if sb == 0:
        return _finish(fn, b, sb, digits, ctx_top, name)
    if sa is None or sb is None:
        raise PrecisionEscalationError("cannot certify signs at bracket endpoints", 2 * top)
    if sa == sb:
        raise DomainError("no certified sign change on bracket")

    with mpmath.workdps(top + 10):
        while b - a > mpmath.mpf("1e-6"):
            m = (a + b) / 2
            sm, _ = _sign(fn, m, low, top)
            if sm == 0:
                return _finish(fn, m, sa, digits, ctx_top, name)
            if sm is None:
                a = b = m
                break
            if sm == sa:
                a = m
            else:
                b = m
        x = (a + b) / 2
        prev = None
        d = LOW_DIGITS
        tol = mpmath.mpf(10) ** (-(digits + 3))
        for _ in range(200):
            c = PrecisionContext(max(10, min(top, d)), 5)
            fx = _as_result(fn(x, c))
            v = mpmath.mpc(fx.value).real
            if v == 0 and fx.error_radius == 0:
                break
            if derivative is not None:
                slope = mpmath.mpc(_as_result(derivative(x, PrecisionContext(max(10, min(top, d // 2 + 5)), 5))).value).real
            elif prev is not None and prev[0] != x:
                slope = (v - prev[1]) / (x - prev[0])
            else:
                h = max(mpmath.mpf(10) ** (-d // 2), tol)
                vh = mpmath.mpc(_as_result(fn(x + h, c)).value).real
                slope = (vh - v) / h
            if slope == 0:
                break
            step = v / slope
            prev = (x, v)
            x_new = x - step
            if a < b and not (a <= x_new <= b):
                x_new = (a + b) / 2 if not (a <= x <= b) else (x + (a if x_new < a else b)) / 2
            x = x_new
            if abs(step) < tol and d >= top:
                break
            if abs(step) < mpmath.mpf(10) ** (-d // 2) or d < top:
                d = min(top, 2 * d)
    return _finish(fn, x, sa, digits, ctx_top, name)


def _finish(fn, x, sa, digits, ctx_top, name):
    top = ctx_top.digits
    with mpmath.workdps(top + 10):
        w = mpmath.mpf(10) ** (-digits)
        for attempt in range(4):
            lo, hi = x - w / 2, x + w / 2
            s_lo, _ = _sign(fn, lo, ctx_top, top + 10 * attempt)
            s_hi, _ = _sign(fn, hi, ctx_top, top + 10 * attempt)
            if s_lo is not None and s_hi is not None and s_lo * s_hi <= 0 and (s_lo, s_hi) != (0, 0):
                if sa is not None and sa != 0 and s_lo != 0 and s_lo != sa:
                    raise PrecisionEscalationError("orientation of final enclosure inconsistent", top + 20)
                fx = _as_result(fn(x, ctx_top))
                return CertifiedRoot(
                    value=+x,
                    enclosure_width=hi - lo,
                    bracket=(+lo, +hi),
                    residual=abs(mpmath.mpc(fx.value).real),
                    digits=digits,
                    name=name,
                )
            if s_lo is not None and s_hi is not None and s_lo == s_hi:
                # x is off by more than w/2: take secant steps at full precision
                f0 = mpmath.mpc(_as_result(fn(lo, ctx_top)).value).real
                f1 = mpmath.mpc(_as_result(fn(hi, ctx_top)).value).real
                if f1 == f0:
                    break
                x = lo - f0 * (hi - lo) / (f1 - f0)
        raise PrecisionEscalationError(
            f"could not certify an enclosure of width 1e-{digits}", top + 40
        )


def _find_bracket(fn, lo, hi, increasing_to_sign, ctx, expand="up"):
    """Walk outward until fn(lo) and fn(hi) have certified opposite signs."""
    for _ in range(200):
        slo, _ = _sign(fn, lo, ctx, ctx.digits)
        shi, _ = _sign(fn, hi, ctx, ctx.digits)
        if slo is not None and shi is not None and slo * shi < 0:
            return lo, hi
        if slo is None or slo == increasing_to_sign:
            lo = 1 + (lo - 1) / 2
        if shi is None or shi != increasing_to_sign:
            hi = 2 * hi
    raise DomainError("could not bracket the root")


# ---------------------------------------------------------------------------
# defining functions


def _zeta_real(x, ctx, order=0):
    with ctx.workdps(5):
        x = mpmath.mpf(x)
    return zeta_jet(x, order, EvalMethod("euler_maclaurin"), ctx)


def _real(r: EvalResult, extra=0) -> EvalResult:
    return EvalResult(mpmath.mpc(mpmath.mpc(r.value).real), r.error_radius + extra)


def _eps(ctx):
    return mpmath.mpf(10) ** (-(ctx.working_digits - 2))


def sigma_one_eq1(x, ctx):
    """zeta(x) - (2^x+1)/(2^x-1)."""
    z = _zeta_real(x, ctx)[0]
    with ctx.workdps():
        w = mpmath.power(2, x)
        return _real(EvalResult(z.value - (w + 1) / (w - 1), z.error_radius), _eps(ctx))


def sigma_one_eq1_derivative(x, ctx):
    z = _zeta_real(x, ctx, 1)[1]
    with ctx.workdps():
        w = mpmath.power(2, x)
        return _real(EvalResult(z.value + 2 * w * mpmath.log(2) / (w - 1) ** 2, z.error_radius))


def sigma_one_eq2(x, ctx):
    """(2^x-1) zeta(x) - 2^x - 1."""
    z = _zeta_real(x, ctx)[0]
    with ctx.workdps():
        w = mpmath.power(2, x)
        return _real(EvalResult((w - 1) * z.value - w - 1, (w - 1) * z.error_radius), _eps(ctx))


def e_equation(x, ctx):
    """2^{x+1} log2 / (4^x - 1) + zeta'(x)/zeta(x)."""
    z0, z1 = _zeta_real(x, ctx, 1)
    with ctx.workdps():
        w = mpmath.power(2, x)
        q = z1.value / z0.value
        rq = (z1.error_radius + abs(q) * z0.error_radius) / (abs(z0.value) - z0.error_radius)
        return _real(EvalResult(2 * w * mpmath.log(2) / (w * w - 1) + q, rq), _eps(ctx))


def e_equation_derivative(x, ctx):
    z0, z1, z2 = _zeta_real(x, ctx, 2)
    with ctx.workdps():
        L = mpmath.log(2)
        w = mpmath.power(2, x)
        q = z1.value / z0.value
        dq = z2.value / z0.value - q * q
        return _real(EvalResult(-2 * L * L * w * (w * w + 1) / (w * w - 1) ** 2 + dq, 0))


def e_split_form(x, ctx):
    """log2/(2^x+1) + log2/(2^x-1) - sum_p log p/(p^x-1), the second form of the E equation."""
    from .zeta_eval import zeta_log_derivative

    with ctx.workdps():
        x = mpmath.mpf(x)
    ld = zeta_log_derivative(x, ctx)
    with ctx.workdps():
        w = mpmath.power(2, x)
        L = mpmath.log(2)
        return _real(EvalResult(L / (w + 1) + L / (w - 1) + ld.value, ld.error_radius), _eps(ctx))


def _ratio_2s_s(x, ctx):
    """zeta(2x)/zeta(x) with radius."""
    with ctx.workdps(5):
        x2 = 2 * mpmath.mpf(x)
    a = _zeta_real(x2, ctx)[0]
    b = _zeta_real(x, ctx)[0]
    with ctx.workdps():
        q = a.value / b.value
        r = (a.error_radius + abs(q) * b.error_radius) / (abs(b.value) - b.error_radius)
        return mpmath.mpc(q).real, r


def arcsin_coefficient(m: int):
    """c_m = binom(2m, m) / (4^m (2m+1)), the Taylor coefficients of arcsin."""
    return mpmath.mpf(math.comb(2 * m, m)) / (mpmath.mpf(4) ** m * (2 * m + 1))


class _LogZetaCache:
    """log zeta(j * sigma) for one fixed real sigma, computed on demand."""

    def __init__(self, sigma, ctx):
        self.sigma = mpmath.mpf(sigma)
        self.ctx = ctx
        self.store: dict[int, EvalResult] = {}

    def __call__(self, j: int) -> EvalResult:
        r = self.store.get(j)
        if r is None:
            x = j * self.sigma
            if j == 1 or x < 2:
                r = log_zeta(x, self.ctx)
            else:
                r = _log_zeta_minus_direct(x, self.ctx)
                if r is None:
                    z = zeta(x, EvalMethod("euler_maclaurin"), self.ctx)
                    r = EvalResult(mpmath.log(z.value), z.error_radius / (abs(z.value) - z.error_radius))
            self.store[j] = r
        return r


def _prime_zeta_cached(mult: int, cache: _LogZetaCache, target):
    """P(mult * sigma) = sum_k mu(k)/k log zeta(k*mult*sigma), with tail bound."""
    from .numerics import mobius

    x = float(mult * cache.sigma)
    total = mpmath.mpf(0)
    radius = mpmath.mpf(0)
    k = 0
    while True:
        k += 1
        if k * x >= 2:
            tail = 3 * 2.0 ** (-k * x) / (1 - 2.0**-x)
            if tail < target:
                radius += tail
                break
        mu = mobius(k)
        if mu:
            r = cache(k * mult)
            total += mu * mpmath.mpc(r.value).real / k
            radius += r.error_radius / k
    return total, radius


def arcsin_prime_sum(x, ctx) -> EvalResult:
    """sum_p arcsin(p^-x) = sum_m c_m P((2m+1)x), truncated in m with a bound."""
    with ctx.workdps(2):
        x = mpmath.mpf(x)
        target = 10.0 ** -(ctx.working_digits + 2)
        cache = _LogZetaCache(x, ctx)
        total = mpmath.mpf(0)
        radius = mpmath.mpf(0)
        xf = float(x)
        m = 0
        while True:
            c = arcsin_coefficient(m)
            tail = 3 * float(arcsin_coefficient(m)) * 2.0 ** (-(2 * m + 1) * xf) / (1 - 4.0**-xf)
            if (2 * m + 1) * xf >= 2 and tail < target:
                radius += tail
                break
            p, rp = _prime_zeta_cached(2 * m + 1, cache, target)
            total += c * p
            radius += c * rp
            m += 1
        return EvalResult(mpmath.mpc(total), radius)


def a_equation(x, ctx):
    r = arcsin_prime_sum(x, ctx)
    with ctx.workdps():
        return _real(EvalResult(r.value - mpmath.pi / 2, r.error_radius), _eps(ctx))


def arcsin_prime_sum_direct(x, prime_limit: int = 10**6):
    """Direct float sum over primes <= limit plus an upper tail bound.

    Returns (lower, upper) bounds on sum_p arcsin(p^-x) for x > 1.
    """
    import numpy as np

    from .zeta_eval import PI_CONST

    primes = primes_up_to(prime_limit).primes.astype(np.float64)
    head = math.fsum(np.arcsin(primes**-x))
    P = float(prime_limit)
    # arcsin(y) <= y / sqrt(1 - y^2) <= 1.0001 y for y <= P^-1
    tail = 1.0001 * PI_CONST * x * P ** (1 - x) / ((x - 1) * math.log(P))
    slack = 1e-12 * len(primes)
    return head - slack, head + tail + slack


# ---------------------------------------------------------------------------
# solvers


def _digits_ok(digits):
    if digits < 10:
        raise DomainError("digits must be >= 10")


def _to_mpf(a, digits):
    with mpmath.workdps(digits + GUARD + 10):
        if isinstance(a, Fraction):
            return mpmath.mpf(a.numerator) / a.denominator
        if isinstance(a, str) and "/" in a:
            n, d = a.split("/")
            return mpmath.mpf(n) / mpmath.mpf(d)
        return mpmath.mpf(a)


def solve_sigma_a(a, digits: int = 30) -> CertifiedRoot:
    """sigma(a) for a > 0, a != 1.

    a > 1: the root sigma > 1 of zeta(sigma) = a.
    0 < a < 1: the root sigma > 1 of zeta(2 sigma)/zeta(sigma) = a.
    """
    _digits_ok(digits)
    av = _to_mpf(a, digits)
    if av <= 0:
        raise DomainError("a must be positive")
    if av == 1:
        raise RedirectError("a = 1 is a separate case; use solve_sigma_one", "solve_sigma_one")
    ctx = PrecisionContext(LOW_DIGITS, 5)
    if av > 1:

        def fn(x, c):
            z = _zeta_real(x, c)[0]
            return _real(EvalResult(z.value - av, z.error_radius), _eps(c))

        def dfn(x, c):
            return _real(_zeta_real(x, c, 1)[1])

        lo = 1 + 1 / (4 * av)
        hi = max(mpmath.mpf(3), 2 + mpmath.log(3 / (av - 1), 2))
        lo, hi = _find_bracket(fn, lo, hi, -1, ctx)
        return verified_bisect(fn, (lo, hi), digits, dfn, name=f"sigma({mpmath.nstr(av, 15)})")

    def gn(x, c):
        v, r = _ratio_2s_s(x, c)
        with c.workdps():
            return EvalResult(mpmath.mpc(v - av), r + _eps(c))

    lo = 1 + av / 8
    hi = mpmath.mpf(3) + mpmath.log(3 / (1 - av), 2)
    lo, hi = _find_bracket(gn, lo, hi, 1, ctx)
    return verified_bisect(gn, (lo, hi), digits, name=f"sigma({mpmath.nstr(av, 15)})")


def solve_sigma_one(digits: int = 45, form: str = "eq1") -> CertifiedRoot:
    """sigma(1): root of zeta(sigma) = (2^sigma+1)/(2^sigma-1) (``form="eq1"``)
    or of the equivalent (2^sigma-1) zeta(sigma) - 2^sigma = 1 (``form="eq2"``)."""
    _digits_ok(digits)
    if form == "eq1":
        return verified_bisect(sigma_one_eq1, (1.5, 2.5), digits, sigma_one_eq1_derivative, name="sigma(1)")
    if form == "eq2":
        return verified_bisect(sigma_one_eq2, (1.5, 2.5), digits, name="sigma(1)")
    raise DomainError(f"unknown form {form!r}")


def solve_E(digits: int = 45) -> CertifiedRoot:
    """E: root in (2, 3) of 2^{s+1} log 2/(4^s - 1) = -zeta'(s)/zeta(s)."""
    _digits_ok(digits)
    return verified_bisect(e_equation, (2, 3), digits, e_equation_derivative, name="E")


def solve_A(digits: int = 45) -> CertifiedRoot:
    """A: root of sum_p arcsin(p^-sigma) = pi/2."""
    _digits_ok(digits)
    return verified_bisect(a_equation, (1.1, 1.3), digits, name="A")


def l_bound_equation(q: int, a):
    """Defining function of the L-function bound for modulus q and level a."""
    q = int(q)
    if q < 1:
        raise DomainError("modulus must be a positive integer")
    divs = prime_divisors(q) if q > 1 else []
    p0 = next(int(p) for p in primes_up_to(100 + 2 * q) if q % int(p))

    if a == 1:

        def fn(x, c):
            z = _zeta_real(x, c)[0]
            with c.workdps():
                prod = 1 - mpmath.power(p0, -x)
                for p in divs:
                    prod *= 1 - mpmath.power(p, -x)
                v = z.value * prod - (1 + mpmath.power(p0, -x))
                return _real(EvalResult(v, z.error_radius * abs(prod)), _eps(c))

        return fn, -1

    def gn(x, c):
        v, r = _ratio_2s_s(x, c)
        with c.workdps():
            prod = mpmath.mpf(1)
            for p in divs:
                prod *= 1 + mpmath.power(p, -x)
            return EvalResult(mpmath.mpc(prod * v - a), prod * r + _eps(c))

    return gn, 1


def solve_l_bound(q: int, a=1, digits: int = 30) -> CertifiedRoot:
    """Bound for L(s, chi) = a, chi mod q.

    a = 1: (1 + p0^-s) = zeta(s) (1 - p0^-s) prod_{p | q} (1 - p^-s), p0 the
    least prime not dividing q.  0 < a < 1: prod_{p | q}(1 + p^-s)
    zeta(2s)/zeta(s) = a.
    """
    _digits_ok(digits)
    if int(q) != q or q < 1:
        raise DomainError(f"unsupported modulus {q!r}")
    av = _to_mpf(a, digits)
    if not (0 < av <= 1):
        raise DomainError("a must lie in (0, 1]")
    fn, direction = l_bound_equation(int(q), 1 if av == 1 else av)
    ctx = PrecisionContext(LOW_DIGITS, 5)
    lo = mpmath.mpf("1.01") if av == 1 else 1 + av / 8
    hi = mpmath.mpf(4) if av == 1 else mpmath.mpf(3) + mpmath.log(3 / (1 - av), 2)
    lo, hi = _find_bracket(fn, lo, hi, direction, ctx)
    return verified_bisect(fn, (lo, hi), digits, name=f"L-bound(q={q}, a={mpmath.nstr(av, 15)})")


@dataclass(frozen=True)
class ConstantSpec:
    kind: str
    digits: int = 45
    a: object = None
    modulus: int | None = None

    def __post_init__(self):
        if self.kind not in ("sigma_of_a", "sigma_one", "turning_bound_E", "real_part_bound_A", "l_bound"):
            raise DomainError(f"unknown constant {self.kind!r}")
        if self.kind == "sigma_of_a" and self.a is not None and _to_mpf(self.a, 15) == 1:
            raise RedirectError("a = 1 routes to sigma_one", "solve_sigma_one")


def solve(spec: ConstantSpec) -> CertifiedRoot:
    if spec.kind == "sigma_of_a":
        return solve_sigma_a(spec.a, spec.digits)
    if spec.kind == "sigma_one":
        return solve_sigma_one(spec.digits)
    if spec.kind == "turning_bound_E":
        return solve_E(spec.digits)
    if spec.kind == "real_part_bound_A":
        return solve_A(spec.digits)
    return solve_l_bound(spec.modulus, 1 if spec.a is None else spec.a, spec.digits)


# ---------------------------------------------------------------------------
# Dirichlet characters and L-functions


def _primitive_root(q: int) -> int:
    phi = sum(1 for r in range(1, q) if math.gcd(r, q) == 1)
    for g in range(2, q):
        if math.gcd(g, q) == 1 and len({pow(g, k, q) for k in range(phi)}) == phi:
            return g
    raise DomainError(f"(Z/{q}Z)* is not cyclic")


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod q.  ``turns[r]`` is the value's argument as a fraction
    of a full turn for each unit residue r; non-units map to 0."""

    modulus: int
    turns: dict = field(hash=False)
    index: int = 0

    @property
    def values(self) -> dict:
        out = {}
        for r in range(self.modulus):
            if r in self.turns:
                f = self.turns[r]
                out[r] = complex(mpmath.expjpi(2 * mpmath.mpf(f.numerator) / f.denominator))
                if f.denominator <= 2:
                    out[r] = complex(round(out[r].real), 0)
                elif f.denominator == 4:
                    out[r] = complex(0, round(out[r].imag))
            else:
                out[r] = 0j
        return out

    @property
    def is_principal(self) -> bool:
        return all(f == 0 for f in self.turns.values())

    def __call__(self, n: int):
        f = self.turns.get(n % self.modulus)
        if f is None:
            return mpmath.mpc(0)
        if f.denominator <= 2:
            return mpmath.mpc(1 if f == 0 else -1)
        return mpmath.expjpi(2 * mpmath.mpf(f.numerator) / f.denominator)


def character_table(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod q, q in {4, 7}; index 0 is principal."""
    if q not in (4, 7):
        raise DomainError(f"character tables are provided for q in {{4, 7}}, not {q}")
    g = _primitive_root(q)
    phi = sum(1 for r in range(1, q) if math.gcd(r, q) == 1)
    log_g = {pow(g, k, q): k for k in range(phi)}
    return [
        DirichletCharacter(q, {r: Fraction(j * k % phi, phi) for r, k in log_g.items()}, index=j)
        for j in range(phi)
    ]


def l_function(s, chi: DirichletCharacter, ctx: PrecisionContext | None = None, order: int = 0):
    """L(s, chi) = q^-s sum_a chi(a) zeta(s, a/q) via Hurwitz Euler-Maclaurin.

    Returns an EvalResult (or a jet list when ``order`` > 0).
    """
    ctx = ctx or PrecisionContext()
    s = exact_complex(s)
    if s.real <= 1:
        raise DomainError("L(s, chi) is evaluated for Re s > 1")
    q = chi.modulus
    with ctx.workdps(phase_digits(s.imag) + 2):
        vals = [mpmath.mpc(0)] * (order + 1)
        radii = [mpmath.mpf(0)] * (order + 1)
        for r in sorted(chi.turns):
            c = chi(r)
            jet = hurwitz_jet(s, mpmath.mpf(r) / q, order, ctx)
            for j in range(order + 1):
                vals[j] += c * jet[j].value
                radii[j] += jet[j].error_radius
        L = mpmath.log(q)
        qs = mpmath.power(q, -s)
        scale = [qs, -L * qs, L * L * qs][: order + 1]
        from .zeta_eval import _jmul

        out = _jmul(scale, vals)
        aq = abs(qs)
        rad = [aq * radii[0]]
        if order >= 1:
            rad.append(aq * (radii[1] + L * radii[0]))
        if order >= 2:
            rad.append(aq * (radii[2] + 2 * L * radii[1] + L * L * radii[0]))
        res = [EvalResult(+v, +r + mpmath.mpf(10) ** (-ctx.working_digits)) for v, r in zip(out, rad)]
    return res if order else res[0]
