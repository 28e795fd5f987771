"""Evaluation of zeta, its first two derivatives, log zeta, zeta'/zeta and the
prime zeta function, every value paired with a rigorous truncation radius.

Three evaluators are available:

* ``euler_maclaurin``: truncated Hurwitz/Dirichlet sum plus integral and
  Bernoulli corrections.  Remainders use Backlund's bound for the value and
  a Cauchy estimate on a circle of radius 1/2 for derivatives.
* ``dirichlet_series``: plain partial sum with an integral tail bound.
* ``euler_product``: product over primes <= P.  Phases t*log(p) are reduced
  mod 2*pi in exact fixed-point integer arithmetic, so arbitrarily large
  heights cost the same as small ones; the product itself is accumulated
  in double precision and the radius covers both the prime tail (via the
  Rosser-Schoenfeld bounds on pi(x) and theta(x)) and rounding.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import DomainError, PoleProximityError, PrecisionEscalationError
from .numerics import (
    PrecisionContext,
    exact_complex,
    big_omega_table,
    mobius,
    phase_digits,
    primes_up_to,
    two_adic_table,
)

KINDS = ("euler_maclaurin", "dirichlet_series", "euler_product", "prime_zeta_mobius")
DEFAULT_PRIME_LIMIT = 10**6
EM_MAX_T = 10**5

# pi(x) < PI_CONST * x / log x and theta(x) < THETA_CONST * x for x > 1
PI_CONST = 1.25506
THETA_CONST = 1.01624

_EPS = 2.0**-52


@dataclass(frozen=True)
class EvalResult:
    value: mpmath.mpc
    error_radius: mpmath.mpf

    def __post_init__(self):
        if not (self.error_radius >= 0 and mpmath.isfinite(self.error_radius)):
            raise ValueError(f"invalid error radius {self.error_radius}")
        if not isinstance(self.value, mpmath.mpc):
            # widen first so the conversion is exact
            with mpmath.workprec(4000):
                object.__setattr__(self, "value", mpmath.mpc(self.value))

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def contains(self, z) -> bool:
        return abs(exact_complex(z) - self.value) <= self.error_radius

    def agrees_with(self, other: "EvalResult", slack=0) -> bool:
        return abs(self.value - other.value) <= self.error_radius + other.error_radius + slack


@dataclass(frozen=True)
class EvalMethod:
    kind: str = "euler_maclaurin"
    truncation: int | None = None
    correction_terms: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown evaluation method {self.kind!r}")
        if self.truncation is not None and self.truncation < 1:
            raise DomainError("truncation must be >= 1")
        if self.correction_terms is not None and self.correction_terms < 1:
            raise DomainError("correction_terms must be >= 1")

    @classmethod
    def auto(cls, s) -> "EvalMethod":
        s = mpmath.mpc(s)
        if abs(s.imag) <= EM_MAX_T:
            return cls("euler_maclaurin")
        if s.real >= 1.5:
            return cls("euler_product", truncation=DEFAULT_PRIME_LIMIT)
        raise DomainError(f"no evaluator for Re s = {float(s.real)} at |t| = {float(abs(s.imag)):.3g}")

    def check(self, s):
        sigma = exact_complex(s).real
        if self.kind == "euler_maclaurin" and sigma <= 0:
            raise DomainError("Euler-Maclaurin evaluation needs Re s > 0")
        if self.kind == "dirichlet_series" and sigma <= 1:
            raise DomainError("Dirichlet series needs Re s > 1")
        if self.kind == "euler_product" and sigma < 1.5:
            raise DomainError("truncated Euler product needs Re s >= 1.5")
        if self.kind == "prime_zeta_mobius":
            raise DomainError("prime_zeta_mobius evaluates P(s), not zeta(s); call prime_zeta")


# ---------------------------------------------------------------------------
# jets: [f, f', f''] as raw derivatives


def _jmul(a, b):
    out = [a[0] * b[0]]
    if len(a) > 1:
        out.append(a[1] * b[0] + a[0] * b[1])
    if len(a) > 2:
        out.append(a[2] * b[0] + 2 * a[1] * b[1] + a[0] * b[2])
    return out


def _exp_jet(x, L, order):
    # jet of x^{-s} = exp(-s L) given its value x
    return [x, -L * x, L * L * x][: order + 1]


def _check_pole(s, ctx):
    if abs(s - 1) < mpmath.mpf(10) ** (-ctx.digits):
        raise PoleProximityError(f"|s - 1| < 1e-{ctx.digits}")


@functools.lru_cache(maxsize=512)
def _bernoulli_coeff(k, prec):
    with mpmath.workprec(prec):
        return mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k)


def _em_core(s, alpha, order, N, M, target):
    """Hurwitz zeta(s, alpha) jet by Euler-Maclaurin.  Returns (vals, radii) or
    None if the Bernoulli terms start growing before reaching ``target``."""
    sigma = s.real
    prec = mpmath.mp.prec
    vals = [mpmath.mpc(0)] * (order + 1)
    abs_sum = [0.0] * (order + 1)
    sf = float(sigma)
    for n in range(N):
        x = n + alpha
        L = mpmath.log(x)
        term = mpmath.exp(-s * L)
        jet = _exp_jet(term, L, order)
        Lf = float(L)
        mag = math.exp(-sf * Lf)
        for j in range(order + 1):
            vals[j] += jet[j]
            abs_sum[j] += mag * Lf**j
    a = N + alpha
    La = mpmath.log(a)
    aps = mpmath.exp(-s * La)
    inv = 1 / (s - 1)
    head = _jmul(_exp_jet(a * aps, La, order), [inv, -inv**2, 2 * inv**3][: order + 1])
    half = _exp_jet(aps / 2, La, order)
    for j in range(order + 1):
        vals[j] += head[j] + half[j]
        abs_sum[j] += float(abs(head[j]) + abs(half[j]))

    rho = mpmath.mpf(0.5)
    poch = [s, mpmath.mpf(1), mpmath.mpf(0)][: order + 1]
    poch_abs = abs(s)  # |(s)_{2k-1}|
    poch_circle = abs(s) + rho  # product of (|s+i|+rho) over the same factors
    pw = aps / a
    prev_mag = None
    k = 0
    radii = None
    while True:
        k += 1
        if M is not None and k > M:
            break
        coeff = _bernoulli_coeff(k, prec)
        term = _jmul(poch, _exp_jet(pw, La, order))
        for j in range(order + 1):
            vals[j] += coeff * term[j]
            abs_sum[j] += float(abs(coeff * term[j]))
        # extend (s)_{2k-1} to (s)_{2k+1}
        f1, f2 = s + 2 * k - 1, s + 2 * k
        poch = _jmul(_jmul(poch, [f1, 1, 0][: order + 1]), [f2, 1, 0][: order + 1])
        poch_abs *= abs(f1) * abs(f2)
        poch_circle *= (abs(f1) + rho) * (abs(f2) + rho)
        pw = pw / (a * a)
        nxt = abs(_bernoulli_coeff(k + 1, prec))
        tail_mag = nxt * poch_abs * a ** (-sigma - 2 * k - 1)
        r0 = tail_mag * abs(s + 2 * k + 1) / (sigma + 2 * k + 1)
        circ = (
            nxt
            * poch_circle
            * a ** (-(sigma - rho) - 2 * k - 1)
            * (abs(s + 2 * k + 1) + rho)
            / (sigma - rho + 2 * k + 1)
        )
        radii = [r0] + [math.factorial(j) * circ / rho**j for j in range(1, order + 1)]
        if M is None:
            if max(radii) < target:
                break
            if prev_mag is not None and tail_mag > prev_mag:
                return None
            prev_mag = tail_mag
            if k > 4 * prec:
                return None
    rnd = 2.0 ** (-prec + 4) * (N + 2 * k + 8)
    radii = [radii[j] + mpmath.mpf(rnd * abs_sum[j]) for j in range(order + 1)]
    return vals, radii


def _em_parameters(s, method):
    N = method.truncation or max(50, int(math.ceil(2 * abs(float(s.imag)))))
    return N, method.correction_terms


def hurwitz_jet(s, alpha, order, ctx: PrecisionContext, method: EvalMethod | None = None):
    """[zeta(s, alpha), d/ds, d2/ds2] up to ``order`` by Euler-Maclaurin."""
    method = method or EvalMethod("euler_maclaurin")
    s = exact_complex(s)
    if s.real <= 0:
        raise DomainError("Euler-Maclaurin evaluation needs Re s > 0")
    N, M = _em_parameters(s, method)
    extra = phase_digits(s.imag) + len(str(N)) + 2
    with ctx.workdps(extra):
        s = mpmath.mpc(s)
        alpha = mpmath.mpf(alpha)
        target = mpmath.mpf(10) ** (-ctx.working_digits)
        for _ in range(12):
            out = _em_core(s, alpha, order, N, M, target)
            if out is not None:
                vals, radii = out
                return [EvalResult(+v, +r) for v, r in zip(vals, radii)]
            N *= 2
    raise PrecisionEscalationError("Euler-Maclaurin did not converge", ctx.digits * 2)


def _dirichlet_tail(N, sigma, j):
    """Upper bound for sum_{n>N} n^-sigma log(n)^j, sigma > 1."""
    N = mpmath.mpf(N)
    d = sigma - 1
    L = mpmath.log(N)
    integral = [1 / d, L / d + 1 / d**2, L**2 / d + 2 * L / d**2 + 2 / d**3][j] * N ** (1 - sigma)
    peak = max(N ** (-sigma) * L**j, (mpmath.mpf(j) / (sigma * mpmath.e)) ** j if j else 0)
    return integral + peak


def _dirichlet_jet(s, order, ctx, method):
    sigma = s.real
    if method.truncation is None:
        d = float(sigma - 1)
        need = (10 ** ctx.working_digits / d) ** (1 / d)
        N = int(min(need, 10**5)) + 1
    else:
        N = method.truncation
    with ctx.workdps(phase_digits(s.imag) + len(str(N))):
        s = mpmath.mpc(s)
        vals = [mpmath.mpc(0)] * (order + 1)
        for n in range(1, N + 1):
            L = mpmath.log(n)
            jet = _exp_jet(mpmath.exp(-s * L), L, order)
            for j in range(order + 1):
                vals[j] += jet[j]
        rnd = 2.0 ** (-mpmath.mp.prec + 4) * N
        radii = []
        for j in range(order + 1):
            r = _dirichlet_tail(N, sigma, j)
            radii.append(r + rnd * (1 + float(sigma) / float(sigma - 1)) * (1 + math.log(N)) ** j)
        return [EvalResult(+v, +r) for v, r in zip(vals, radii)]


# ---------------------------------------------------------------------------
# Euler product with exact phase reduction


def _to_fraction(t) -> Fraction:
    if isinstance(t, Fraction):
        return t
    if isinstance(t, int):
        return Fraction(t)
    m = mpmath.mpf(t)
    man, exp = m.man_exp
    man = int(man) * (-1 if m < 0 else 1)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


@functools.lru_cache(maxsize=8)
def _fixed_logs(prime_limit, F):
    primes = primes_up_to(prime_limit).primes
    with mpmath.workprec(F + 40):
        scale = mpmath.mpf(2) ** F
        logs = [int(mpmath.floor(mpmath.log(int(p)) * scale)) for p in primes]
        two_pi = int(mpmath.floor(2 * mpmath.pi * scale))
    return np.array(logs, dtype=object), two_pi


def reduced_phases(t, primes_limit: int) -> np.ndarray:
    """t*log(p) mod 2*pi for every prime p <= limit, as float64 in [0, 2*pi).

    ``t`` may be an int, Fraction or mpf and is used exactly.  Absolute
    error is below 2^-60 whatever the size of t.
    """
    tq = _to_fraction(t)
    F = max(128, ((abs(tq.numerator) // max(1, tq.denominator)).bit_length() + 96 + 63) // 64 * 64)
    logs, two_pi = _fixed_logs(primes_limit, F)
    num, den = tq.numerator, tq.denominator
    prod = logs * num
    if den & (den - 1) == 0:
        prod = prod >> (den.bit_length() - 1)
    else:
        prod = prod // den
    rem = prod % two_pi
    shift = F - 60
    top = np.array([int(v) >> shift for v in rem], dtype=np.float64)
    return top * 2.0**-60


class EulerProduct:
    """Truncated Euler product around a fixed (possibly huge) height.

    Points are addressed as ``sigma + i*(height + tau)`` with small ``tau``;
    the large part of every phase is reduced once, exactly, at construction.
    """

    def __init__(self, height=0, prime_limit: int = DEFAULT_PRIME_LIMIT):
        self.height = _to_fraction(height)
        self.prime_limit = int(prime_limit)
        table = primes_up_to(self.prime_limit)
        self.P = int(table.primes[-1])
        self.logp = np.log(table.primes.astype(np.float64))
        self.phase = reduced_phases(self.height, self.prime_limit) if self.height else np.zeros(len(self.logp))

    def tail_bounds(self, sigma: float):
        """Bounds on the neglected parts of log zeta, zeta'/zeta and (zeta'/zeta)'."""
        P, x = float(self.prime_limit), float(sigma)
        if x <= 1:
            return math.inf, math.inf, math.inf
        q = P**-x
        lp = math.log(P)
        t0 = PI_CONST * x * P ** (1 - x) / ((x - 1) * lp) + P ** (1 - 2 * x) / ((2 * x - 1) * (1 - q))
        t1 = THETA_CONST * x * P ** (1 - x) / ((x - 1) * (1 - q))
        t2 = THETA_CONST * x * P ** (1 - x) * (lp / (x - 1) + 1 / (x - 1) ** 2) / (1 - q) ** 2
        return t0, t1, t2

    def _z(self, sigma, tau):
        sigma = np.atleast_1d(np.asarray(sigma, dtype=np.float64))
        tau = np.atleast_1d(np.asarray(tau, dtype=np.float64))
        ang = self.phase[None, :] + tau[:, None] * self.logp[None, :]
        return np.exp(-sigma[:, None] * self.logp[None, :]) * np.exp(-1j * ang)

    def log_terms(self, sigma, tau):
        """(log zeta_P, zeta'/zeta_P, (zeta'/zeta_P)', abs sums) as complex arrays."""
        z = self._z(sigma, tau)
        w = z / (1 - z)
        lz = -np.log1p(-z).sum(axis=1)
        l1 = -(w * self.logp).sum(axis=1)
        l2 = ((w / (1 - z)) * self.logp**2).sum(axis=1)
        mags = np.abs(w)
        a0 = mags.sum(axis=1) * 2
        a1 = (mags * self.logp).sum(axis=1)
        a2 = (mags / np.abs(1 - z) * self.logp**2).sum(axis=1)
        return lz, l1, l2, (a0, a1, a2)

    def jet(self, sigma: float, tau: float = 0.0, order: int = 2):
        """Values and radii of [zeta, zeta', zeta''] at sigma + i(height + tau)."""
        vals, radii = self.jet_many([sigma], [tau], order)
        return [complex(v[0]) for v in vals], [float(r[0]) for r in radii]

    def jet_many(self, sigmas, taus, order: int = 2, chunk: int = 64):
        """Vectorised :meth:`jet`; returns (values, radii), each a list of arrays."""
        sigmas = np.atleast_1d(np.asarray(sigmas, dtype=np.float64))
        taus = np.broadcast_to(np.asarray(taus, dtype=np.float64), sigmas.shape)
        n = len(sigmas)
        vals = [np.empty(n, complex) for _ in range(order + 1)]
        radii = [np.empty(n) for _ in range(order + 1)]
        step = max(1, chunk * 30000 // max(1, len(self.logp)))
        for lo in range(0, n, step):
            sl = slice(lo, lo + step)
            lz, l1, l2, (a0, a1, a2) = self.log_terms(sigmas[sl], taus[sl])
            rnd = 64 * len(self.logp) * _EPS
            bounds = np.array([self.tail_bounds(x) for x in sigmas[sl]])
            t0 = bounds[:, 0] + rnd * (a0 + 1)
            t1 = bounds[:, 1] + rnd * (a1 + 1)
            t2 = bounds[:, 2] + rnd * (a2 + 1)
            zeta = np.exp(lz)
            az = np.abs(zeta)
            e0 = az * np.expm1(t0) + rnd * az
            vals[0][sl], radii[0][sl] = zeta, e0
            if order >= 1:
                d1 = zeta * l1
                vals[1][sl] = d1
                radii[1][sl] = _mul_err(az, e0, np.abs(l1), t1) + rnd * np.abs(d1)
            if order >= 2:
                q = l1 * l1 + l2
                eq = _mul_err(np.abs(l1), t1, np.abs(l1), t1) + t2
                d2 = zeta * q
                vals[2][sl] = d2
                radii[2][sl] = _mul_err(az, e0, np.abs(q), eq) + rnd * np.abs(d2)
        return vals, radii


def _mul_err(a, da, b, db):
    return a * db + b * da + da * db


@functools.lru_cache(maxsize=4)
def _euler_product_at(height, prime_limit):
    return EulerProduct(height, prime_limit)


def _euler_jet(s, order, ctx, method):
    P = method.truncation or DEFAULT_PRIME_LIMIT
    s = exact_complex(s)
    with ctx.workdps(phase_digits(s.imag)):
        height = _to_fraction(s.imag)
    ep = _euler_product_at(height, P)
    vals, radii = ep.jet(float(s.real), 0.0, order)
    return [EvalResult(mpmath.mpc(v), mpmath.mpf(r)) for v, r in zip(vals, radii)]


# ---------------------------------------------------------------------------
# public API


def zeta_jet(s, order: int = 0, method: EvalMethod | None = None, ctx: PrecisionContext | None = None):
    """[zeta(s), zeta'(s), zeta''(s)] truncated to ``order`` as EvalResults."""
    ctx = ctx or PrecisionContext()
    s = exact_complex(s)
    method = method or EvalMethod.auto(s)
    method.check(s)
    _check_pole(s, ctx)
    if method.kind == "euler_maclaurin":
        return hurwitz_jet(s, 1, order, ctx, method)
    if method.kind == "dirichlet_series":
        return _dirichlet_jet(s, order, ctx, method)
    return _euler_jet(s, order, ctx, method)


def zeta(s, method: EvalMethod | None = None, ctx: PrecisionContext | None = None) -> EvalResult:
    return zeta_jet(s, 0, method, ctx)[0]


def zeta_derivative(s, order: int = 1, method: EvalMethod | None = None, ctx: PrecisionContext | None = None) -> EvalResult:
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    return zeta_jet(s, order, method, ctx)[order]


def _ratio(a: EvalResult, b: EvalResult, ctx: PrecisionContext) -> EvalResult:
    with ctx.workdps(5):
        mb = abs(b.value)
        if mb <= b.error_radius:
            raise PrecisionEscalationError("denominator not bounded away from zero", 2 * ctx.digits)
        q = a.value / b.value
        return EvalResult(q, (a.error_radius + abs(q) * b.error_radius) / (mb - b.error_radius) + mpmath.eps * abs(q))


def _require_right_half(s, what):
    if exact_complex(s).real <= 1:
        raise DomainError(f"{what} is restricted to Re s > 1")


def _series_branch_imag(s, limit):
    """Approximate Im sum_p sum_k p^{-ks}/k with a crude error bound."""
    sigma, t = float(s.real), float(s.imag)
    primes = primes_up_to(limit).primes.astype(np.float64)
    logp = np.log(primes)
    z = np.exp(-(sigma + 1j * t) * logp)
    approx = float((-np.log1p(-z)).imag.sum())
    P = float(primes[-1])
    bound = PI_CONST * sigma * P ** (1 - sigma) / ((sigma - 1) * math.log(P)) + P ** (1 - 2 * sigma) / (2 * sigma - 1)
    return approx, bound + 1e-9 * len(primes)


def log_zeta(s, ctx: PrecisionContext | None = None, method: EvalMethod | None = None) -> EvalResult:
    """log zeta(s) on the branch given by sum_p sum_k p^{-ks}/k (Re s > 1)."""
    ctx = ctx or PrecisionContext()
    s = exact_complex(s)
    _require_right_half(s, "log zeta")
    method = method or EvalMethod.auto(s)
    if method.kind == "euler_product":
        ep = _euler_product_at(_to_fraction(s.imag), method.truncation or DEFAULT_PRIME_LIMIT)
        lz, _, _, (a0, _, _) = ep.log_terms(float(s.real), 0.0)
        t0 = ep.tail_bounds(float(s.real))[0] + 64 * len(ep.logp) * _EPS * (a0[0] + 1)
        return EvalResult(mpmath.mpc(complex(lz[0])), mpmath.mpf(t0))
    z = zeta(s, method, ctx)
    with ctx.workdps(phase_digits(s.imag)):
        if z.error_radius >= abs(z.value):
            raise PrecisionEscalationError("zeta value not separated from 0", ctx.digits * 2)
        val = mpmath.log(z.value)
        rad = z.error_radius / (abs(z.value) - z.error_radius)
        if s.imag != 0:
            for limit in (10**5, 10**6, 10**7):
                approx, bound = _series_branch_imag(s, limit)
                if bound < 1.0:
                    break
            else:
                raise PrecisionEscalationError("cannot fix branch of log zeta this close to sigma = 1", ctx.digits)
            k = round((approx - float(val.imag)) / (2 * math.pi))
            val += 2j * mpmath.pi * k
        return EvalResult(+val, +rad)


def zeta_log_derivative(
    s, ctx: PrecisionContext | None = None, path: str = "ratio", prime_limit: int = DEFAULT_PRIME_LIMIT
) -> EvalResult:
    """zeta'(s)/zeta(s).

    ``path="ratio"`` divides the two Euler-Maclaurin (or auto) results;
    ``path="prime_sum"`` evaluates -sum_{p<=P} log p/(p^s - 1) with a tail bound.
    """
    ctx = ctx or PrecisionContext()
    s = exact_complex(s)
    _require_right_half(s, "zeta'/zeta")
    if path == "ratio":
        z0, z1 = zeta_jet(s, 1, None, ctx)
        return _ratio(z1, z0, ctx)
    if path == "prime_sum":
        ep = _euler_product_at(_to_fraction(s.imag), prime_limit)
        _, l1, _, (_, a1, _) = ep.log_terms(float(s.real), 0.0)
        r = ep.tail_bounds(float(s.real))[1] + 64 * len(ep.logp) * _EPS * (a1[0] + 1)
        return EvalResult(mpmath.mpc(complex(l1[0])), mpmath.mpf(r))
    raise DomainError(f"unknown path {path!r}")


def _log_zeta_minus_direct(x, ctx):
    """log zeta(x) for real or complex x with Re x large, by a short direct sum,
    or None if more than 60 terms would be needed."""
    sigma = mpmath.mpc(x).real
    D = ctx.working_digits
    if sigma * math.log(60) < D * math.log(10) + 5:
        return None
    sf = float(sigma)

    def tail_bound(n):
        # sum_{m>n} m^-sigma <= (n+1)^-sigma (1 + (n+1)/(sigma-1))
        return (n + 1) ** -sf * (1 + (n + 1) / (sf - 1))

    nmax = 2
    while tail_bound(nmax) > 10.0**-D:
        nmax += 1
    acc = mpmath.mpc(0)
    for n in range(2, nmax + 1):
        acc += mpmath.power(n, -x)
    tail = mpmath.mpf(nmax + 1) ** (-sigma) * (1 + (nmax + 1) / (sigma - 1))
    val = mpmath.log1p(acc)
    return EvalResult(val, tail / (1 - abs(acc) - tail) + mpmath.mpf(10) ** (-D))


def prime_zeta(s, ctx: PrecisionContext | None = None) -> EvalResult:
    """P(s) = sum_p p^-s via sum_k mu(k)/k log zeta(ks)."""
    ctx = ctx or PrecisionContext()
    s = exact_complex(s)
    _require_right_half(s, "prime zeta")
    sigma = float(s.real)
    target = 10.0 ** -(ctx.working_digits)
    with ctx.workdps(phase_digits(s.imag) + 2):
        total = mpmath.mpc(0)
        radius = mpmath.mpf(0)
        k = 0
        while True:
            k += 1
            if k * sigma >= 2:
                tail = 3 * 2.0 ** (-k * sigma) / (1 - 2.0**-sigma)
                if tail < target:
                    radius += tail
                    break
            mu = mobius(k)
            if mu == 0:
                continue
            ks = k * s
            if k == 1:
                lz = log_zeta(ks, ctx)
            else:
                lz = _log_zeta_minus_direct(ks, ctx)
                if lz is None:
                    z = zeta(ks, EvalMethod("euler_maclaurin"), ctx)
                    lz = EvalResult(mpmath.log(z.value), z.error_radius / (abs(z.value) - z.error_radius))
            total += mpmath.mpf(mu) / k * lz.value
            radius += lz.error_radius / k
        return EvalResult(+total, +radius)


def prime_zeta_direct(s, prime_limit: int, ctx: PrecisionContext | None = None) -> EvalResult:
    """sum_{p <= limit} p^-s plus a tail bound (independent of the Moebius route)."""
    ctx = ctx or PrecisionContext()
    s = exact_complex(s)
    _require_right_half(s, "prime zeta")
    table = primes_up_to(prime_limit)
    sigma = float(s.real)
    with ctx.workdps(phase_digits(s.imag)):
        acc = mpmath.fsum(mpmath.power(int(p), -s) for p in table.primes)
    P = float(prime_limit)
    tail = PI_CONST * sigma * P ** (1 - sigma) / ((sigma - 1) * math.log(P))
    return EvalResult(acc, mpmath.mpf(tail) + mpmath.mpf(10) ** (-ctx.digits))


def _signed_series(s, N, signs, ctx):
    s = exact_complex(s)
    _require_right_half(s, "series")
    if N < 1:
        raise DomainError("N must be >= 1")
    sigma = s.real
    tail = mpmath.mpf(N) ** (1 - sigma) / (sigma - 1)
    if N <= 2000:
        with ctx.workdps(phase_digits(s.imag)):
            acc = mpmath.fsum(int(signs[n]) * mpmath.power(n, -s) for n in range(1, N + 1))
        return EvalResult(acc, tail + mpmath.mpf(10) ** (-ctx.working_digits))
    logn = np.log(np.arange(1, N + 1, dtype=np.float64))
    terms = signs[1:] * np.exp(-complex(s) * logn)
    acc = complex(math.fsum(terms.real), math.fsum(terms.imag))
    rnd = 8 * _EPS * float(np.abs(terms).sum()) * (1 + float(abs(s)) * 40)
    return EvalResult(mpmath.mpc(acc), tail + mpmath.mpf(rnd))


def limit_series_half(s, N: int, ctx: PrecisionContext | None = None) -> EvalResult:
    """sum_{n<=N} (-1)^{nu(n)} n^-s, nu the 2-adic valuation; limit (2^s-1)/(2^s+1) zeta(s)."""
    signs = 1 - 2 * (two_adic_table(N) % 2)
    return _signed_series(s, N, signs, ctx or PrecisionContext())


def limit_series_liouville(s, N: int, ctx: PrecisionContext | None = None) -> EvalResult:
    """sum_{n<=N} (-1)^{Omega(n)} n^-s; limit zeta(2s)/zeta(s)."""
    signs = 1 - 2 * (big_omega_table(N) % 2)
    return _signed_series(s, N, signs, ctx or PrecisionContext())


def limit_function_half(s, ctx: PrecisionContext | None = None, order: int = 0):
    """Jet of (2^s-1)/(2^s+1) * zeta(s) with radii."""
    ctx = ctx or PrecisionContext()
    s = exact_complex(s)
    zj = zeta_jet(s, order, None, ctx)
    with ctx.workdps(phase_digits(s.imag)):
        L = mpmath.log(2)
        w = mpmath.power(2, s)
        # r(s) = 1 - 2/(2^s+1)
        d = w + 1
        r = [1 - 2 / d, 2 * L * w / d**2, 2 * L**2 * w * (1 - w) / d**3][: order + 1]
        vals = _jmul(r, [z.value for z in zj])
        rabs = [abs(x) for x in r]
        radii = []
        for j in range(order + 1):
            coeffs = [1, j, 1] if j == 2 else [1, 1] if j == 1 else [1]
            radii.append(sum(c * rabs[i] * zj[j - i].error_radius for i, c in enumerate(coeffs)))
        return [EvalResult(v, r * (1 + mpmath.mpf(10) ** (-ctx.digits))) for v, r in zip(vals, radii)]
