"""Turning-point geometry of the real curves Im f(s) = 0.

A turning point of an analytic f is a solution of Im f(s) = 0, Re f'(s) = 0,
i.e. a point where a curve Im f = 0 has a vertical tangent.  The module holds
the comparison functions f, g, U, H and u(t) that bound the real parts of the
turning points of zeta by E, curve tracing, 2-D Newton for turning points and
winding-number certificates.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .constants import CertifiedRoot, solve_E, verified_bisect
from .errors import DomainError, NoRootError, NoTurningPointError, PrecisionEscalationError, ZeroOnContourError
from .height_search import _Evaluator
from .numerics import PrecisionContext, exact_complex, exact_real, format_decimal
from .zeta_eval import EM_MAX_T, DEFAULT_PRIME_LIMIT, EulerProduct, EvalResult, _to_fraction, limit_function_half, zeta_log_derivative

TRACE_TOL = 1e-9
HEAVY_MAX_T = 10**4
KINDS = ("I1", "I2", "unknown")


# ---------------------------------------------------------------------------
# f, g, U, H and u(t)


def _mp(x):
    return exact_real(x) if not isinstance(x, Fraction) else mpmath.mpf(x.numerator) / x.denominator


def half_period(ctx: PrecisionContext | None = None):
    """pi/log 2, the height where f vanishes and g is most negative."""
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        return +mpmath.pi / mpmath.log(2)


def f_g_tail_bound(sigma, N: int):
    with mpmath.workdps(20):
        q = mpmath.power(2, -_mp(sigma))
        return q**N / (1 - q)


def f_g_eval(sigma, t, mode: str = "closed", N: int | None = None, ctx: PrecisionContext | None = None):
    """(f, g) at (sigma, t).

    ``f = sum_k sin(k t log2)/(k 2^(k sigma))`` and ``g = df/dt``.  The
    ``series`` mode truncates after ``N`` terms; its error is at most
    :func:`f_g_tail_bound`.
    """
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        sigma, t = _mp(sigma), _mp(t)
        if sigma <= 0:
            raise DomainError("f and g need sigma > 0")
        L = mpmath.log(2)
        phi = t * L
        if mode == "closed":
            w = mpmath.power(2, sigma)
            c, s = mpmath.cos(phi), mpmath.sin(phi)
            f = mpmath.atan(s / (w - c))
            g = -(1 - w * c) * L / (1 + w * w - 2 * w * c)
            return +f, +g
        if mode == "series":
            if not N or N < 1:
                raise DomainError("series mode needs N >= 1")
            q = mpmath.power(2, -sigma)
            f = g = mpmath.mpf(0)
            qk = mpmath.mpf(1)
            for k in range(1, N + 1):
                qk *= q
                f += mpmath.sin(k * phi) * qk / k
                g += mpmath.cos(k * phi) * qk
            return f, g * L
    raise DomainError(f"unknown mode {mode!r}")


def U_eval(sigma, t, ctx: PrecisionContext | None = None):
    """U = 4^sigma f^2 + (2^sigma/log 2)^2 g^2."""
    ctx = ctx or PrecisionContext()
    f, g = f_g_eval(sigma, t, "closed", ctx=ctx)
    with ctx.workdps():
        w = mpmath.power(2, _mp(sigma))
        return w * w * f * f + (w / mpmath.log(2)) ** 2 * g * g


def _H_result(sigma, ctx: PrecisionContext) -> EvalResult:
    with ctx.workdps():
        sigma = _mp(sigma)
        if sigma <= 1:
            raise DomainError("H is defined for sigma > 1")
        ld = zeta_log_derivative(sigma, ctx)
        L = mpmath.log(2)
        w = mpmath.power(2, sigma)
        c2 = (w / L) ** 2
        D = ld.real + L / (w - 1)
        H = c2 * D * D
        r = c2 * (2 * abs(D) * ld.error_radius + ld.error_radius**2) + abs(H) * mpmath.mpf(10) ** (-ctx.working_digits + 2)
        return EvalResult(mpmath.mpc(H), r)


def H_eval(sigma, ctx: PrecisionContext | None = None):
    """H = (2^sigma/log 2)^2 (zeta'/zeta(sigma) + log 2/(2^sigma - 1))^2 for sigma > 1."""
    return _H_result(sigma, ctx or PrecisionContext()).real


def _u_equation(t):
    def fn(x, ctx):
        H = _H_result(x, ctx)
        U = U_eval(x, t, ctx)
        with ctx.workdps():
            r = H.error_radius + abs(U) * mpmath.mpf(10) ** (-ctx.working_digits + 2)
            return EvalResult(mpmath.mpc(U - H.real), r)

    return fn


def solve_u_of_t(t, digits: int = 30, sigma_hi: float = 8.0, step: float = 0.05) -> CertifiedRoot:
    """Largest root u(t) of U(sigma, t) = H(sigma).

    Scans downward from ``sigma_hi`` until U - H first turns negative; every
    sample above that point is certified positive, then the last bracket is
    refined by :func:`verified_bisect`.
    """
    fn = _u_equation(t)
    low = PrecisionContext(15)
    hi_x = mpmath.mpf(sigma_hi)
    prev = hi_x
    x = hi_x
    while True:
        digits_try = 15
        while True:
            r = fn(x, low.with_digits(digits_try))
            if abs(r.real) > r.error_radius:
                break
            digits_try *= 2
            if digits_try > 240:
                raise PrecisionEscalationError("cannot certify sign of U - H", digits_try)
        if r.real < 0:
            break
        prev = x
        x = x - step
        if x <= 1:
            raise NoRootError("U - H stayed positive down to sigma = 1")
    if x == hi_x:
        raise DomainError("U - H is not positive at the scan start; raise sigma_hi")
    return verified_bisect(fn, (x, prev), digits, name="u(t)")


# ---------------------------------------------------------------------------
# inequality grids


@dataclass(frozen=True)
class Violation:
    x: float
    phi: float
    lhs: mpmath.mpf
    rhs: mpmath.mpf

    def to_dict(self) -> dict:
        return {"x": repr(self.x), "phi": repr(self.phi), "lhs": format_decimal(self.lhs, 20), "rhs": format_decimal(self.rhs, 20)}


def a3_lhs(x, phi):
    c, s = mpmath.cos(phi), mpmath.sin(phi)
    d = 1 + x * x - 2 * x * c
    return mpmath.atan(x * s / (1 - x * c)) ** 2 + (x * (x - c) / d) ** 2


def check_inequality_A3(grid_x: int = 100, grid_phi: int = 100, digits: int = 30) -> list[Violation]:
    """Check arctan^2(x sin p/(1 - x cos p)) + (x(x - cos p)/(1 + x^2 - 2x cos p))^2 >= (x/(1+x))^2
    on an interior grid of (0, 1) x (0, 2 pi).  Returns the violations."""
    if grid_x < 10 or grid_phi < 10:
        raise DomainError("grids need at least 10 points each")
    out = []
    with mpmath.workdps(digits + 5):
        tol = mpmath.mpf(10) ** (-(digits - 2))
        for i in range(1, grid_x + 1):
            x = mpmath.mpf(i) / (grid_x + 1)
            rhs = (x / (1 + x)) ** 2
            for j in range(1, grid_phi + 1):
                phi = 2 * mpmath.pi * j / (grid_phi + 1)
                lhs = a3_lhs(x, phi)
                if lhs < rhs - tol:
                    out.append(Violation(float(x), float(phi), lhs, rhs))
    return out


def check_U_minimum(grid_sigma: int = 50, grid_t: int = 50, sigma_max: float = 4.0, digits: int = 30) -> list[Violation]:
    """U(sigma, t) >= U(sigma, pi/log 2) on sigma in (1, sigma_max], t in (0, 2 pi/log 2].
    Violations carry (sigma, t) in the ``x``/``phi`` fields."""
    ctx = PrecisionContext(digits)
    out = []
    with ctx.workdps():
        tol = mpmath.mpf(10) ** (-(digits - 2))
        T = half_period(ctx)
        for i in range(1, grid_sigma + 1):
            sigma = 1 + (mpmath.mpf(sigma_max) - 1) * i / grid_sigma
            rhs = U_eval(sigma, T, ctx)
            for j in range(1, grid_t + 1):
                t = 2 * T * j / grid_t
                lhs = U_eval(sigma, t, ctx)
                if lhs < rhs - tol * max(1, abs(rhs)):
                    out.append(Violation(float(sigma), float(t), lhs, rhs))
    return out


def check_H_decreasing(n: int = 100, sigma_min: float = 1.05, sigma_max: float = 8.0, digits: int = 30) -> list[tuple]:
    """Pairs of consecutive grid points where H fails to decrease strictly."""
    ctx = PrecisionContext(digits)
    xs = [sigma_min + (sigma_max - sigma_min) * k / (n - 1) for k in range(n)]
    vals = [_H_result(x, ctx) for x in xs]
    return [
        (xs[k], xs[k + 1])
        for k in range(n - 1)
        if not vals[k].real - vals[k + 1].real > vals[k].error_radius + vals[k + 1].error_radius
    ]


def check_u_bound(ts: Sequence = (0.5, 1.0, 2.0, 3.0), digits: int = 20, slack: float = 1e-10) -> list[dict]:
    """u(t) - E at each sample height; ``ok`` is u(t) <= E + slack."""
    E = solve_E(digits + 5).value
    out = []
    for t in ts:
        u = solve_u_of_t(t, digits)
        out.append({"t": str(t), "u": u.decimal(digits), "u_minus_E": format_decimal(u.value - E, 5), "ok": bool(u.value <= E + slack)})
    return out


# ---------------------------------------------------------------------------
# analytic functions for tracing


_BERNOULLI = [float(mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k)) for k in range(0, 24)]


def _jmul(a, b):
    out = [a[0] * b[0]]
    if len(a) > 1:
        out.append(a[1] * b[0] + a[0] * b[1])
    if len(a) > 2:
        out.append(a[2] * b[0] + 2 * a[1] * b[1] + a[0] * b[2])
    return out


def em_float_jet(s, order: int = 1, M: int = 20, chunk: int = 4096):
    """Vectorised double-precision Euler-Maclaurin jet [zeta, zeta', zeta''][:order+1].

    A screening evaluator for grids and curve continuation; the cutoff is
    chosen so the neglected Bernoulli term is below about 4^-M relative.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    shape = s.shape
    s = s.ravel()
    if s.size == 0:
        return [s.reshape(shape) for _ in range(order + 1)]
    T = float(np.abs(s).max())
    N = int((T + 2 * M + 10) / math.pi) + 10
    logn = np.log(np.arange(1, N, dtype=float))
    vals = [np.zeros(s.size, complex) for _ in range(order + 1)]
    rows = max(1, chunk * 256 // max(N, 1))
    for lo in range(0, s.size, rows):
        sc = s[lo : lo + rows]
        E = np.exp(-np.outer(sc, logn))
        for k in range(order + 1):
            vals[k][lo : lo + rows] = (E * (-logn) ** k).sum(axis=1)
    L = math.log(N)
    EN = np.exp(-s * L)
    e = [EN, -L * EN, L * L * EN][: order + 1]
    g = 1 / (s - 1)
    gj = [g, -g * g, 2 * g**3][: order + 1]
    acc = [v + N * a + 0.5 * b for v, a, b in zip(vals, _jmul(e, gj), e)]
    # Q_k = s(s+1)...(s+2k-2) / N^(2k-1)
    Q = [s / N, np.ones_like(s) / N, np.zeros_like(s)][: order + 1]
    for k in range(1, M + 1):
        term = _jmul(Q, e)
        acc = [a + _BERNOULLI[k] * t for a, t in zip(acc, term)]
        for j in (2 * k - 1, 2 * k):
            Q = _jmul(Q, [(s + j) / N, np.ones_like(s) / N, np.zeros_like(s)][: order + 1])
    return [a.reshape(shape) for a in acc]


class CurveFunction:
    """An analytic function near a fixed reference height.

    Points are addressed as ``sigma + i(height + tau)``; ``fast`` returns
    double-precision jets for arrays of (sigma, tau), ``jet`` returns
    high-precision values and radii at one point.
    """

    name = "function"
    height = Fraction(0)
    # precision a jet can honour; turning-point residuals are held to 10^-(digits/2)
    default_digits = 20

    def fast(self, sigma, tau, order: int = 1) -> list:
        raise NotImplementedError

    def jet(self, sigma, tau, order: int, ctx: PrecisionContext):
        raise NotImplementedError

    def point(self, sigma, tau):
        with mpmath.workdps(len(str(abs(int(self.height)))) + max(30, mpmath.mp.dps)):
            return mpmath.mpc(_mp(sigma), _mp(self.height) + _mp(tau))

    def local(self, s):
        s = exact_complex(s)
        with mpmath.workdps(len(str(abs(int(self.height)))) + 30):
            return float(s.real), float(s.imag - _mp(self.height))


class ZetaFunction(CurveFunction):
    """zeta near ``height``: Euler-Maclaurin below 10^5, truncated Euler product above."""

    name = "zeta"

    def __init__(self, height=0, prime_limit: int = DEFAULT_PRIME_LIMIT):
        self.height = Fraction(height)
        self.prime_limit = prime_limit
        self.large = abs(self.height) > EM_MAX_T
        self._ep = EulerProduct(self.height, prime_limit) if self.large else None
        # double-precision product: radii near 1e-9 at best
        self.default_digits = 16 if self.large else 20
        self._evaluators = {}

    def fast(self, sigma, tau, order=1):
        sigma = np.asarray(sigma, float)
        tau = np.asarray(tau, float)
        if self.large:
            shape = np.broadcast(sigma, tau).shape
            vals, _ = self._ep.jet_many(np.broadcast_to(sigma, shape).ravel(), np.broadcast_to(tau, shape).ravel(), order)
            return [v.reshape(shape) for v in vals]
        return em_float_jet(sigma + 1j * (float(self.height) + tau), order)

    def jet(self, sigma, tau, order, ctx):
        key = ctx.digits
        if key not in self._evaluators:
            self._evaluators[key] = _Evaluator(self.height, ctx, self.prime_limit)
        return self._evaluators[key].jet(sigma, tau, order)


class LimitFunction(CurveFunction):
    """(2^s - 1)/(2^s + 1) zeta(s), the limit of zeta(s + i t_k) along heights with 2^(-i t_k) -> -1."""

    name = "limit_half"

    def fast(self, sigma, tau, order=1):
        s = np.asarray(sigma, float) + 1j * np.asarray(tau, float)
        z = em_float_jet(s, order)
        L = math.log(2)
        w = np.exp(s * L)
        d = w + 1
        r = [1 - 2 / d, 2 * L * w / d**2, 2 * L * L * w * (1 - w) / d**3][: order + 1]
        return _jmul(r, z)

    def jet(self, sigma, tau, order, ctx):
        res = limit_function_half(self.point(sigma, tau), ctx, order)
        return [r.value for r in res], [r.error_radius for r in res]


class PolynomialFunction(CurveFunction):
    """Polynomial with coefficients ``coeffs[k]`` of z^k (exact in both paths)."""

    name = "polynomial"

    def __init__(self, coeffs: Sequence):
        self.coeffs = [complex(c) for c in coeffs]

    def _derivs(self, order):
        out = [list(self.coeffs)]
        for _ in range(order):
            c = out[-1]
            out.append([k * c[k] for k in range(1, len(c))] or [0j])
        return out

    def fast(self, sigma, tau, order=1):
        z = np.asarray(sigma, float) + 1j * np.asarray(tau, float)
        return [np.polynomial.polynomial.polyval(z, c) * np.ones_like(z) for c in self._derivs(order)]

    def jet(self, sigma, tau, order, ctx):
        with ctx.workdps():
            z = self.point(sigma, tau)
            vals = [mpmath.polyval([mpmath.mpc(x) for x in reversed(c)], z) for c in self._derivs(order)]
        return vals, [mpmath.mpf(0)] * (order + 1)


class CallableFunction(CurveFunction):
    """Wraps ``fn(s, order) -> [f(s), f'(s), ...]`` evaluated with mpmath."""

    def __init__(self, fn: Callable, name: str = "callable"):
        self.fn = fn
        self.name = name

    def fast(self, sigma, tau, order=1):
        z = np.asarray(sigma, float) + 1j * np.asarray(tau, float)
        flat = z.ravel()
        out = [np.empty(flat.size, complex) for _ in range(order + 1)]
        with mpmath.workdps(17):
            for i, v in enumerate(flat):
                for k, x in enumerate(self.fn(mpmath.mpc(v), order)[: order + 1]):
                    out[k][i] = complex(x)
        return [o.reshape(z.shape) for o in out]

    def jet(self, sigma, tau, order, ctx):
        with ctx.workdps():
            vals = [mpmath.mpc(x) for x in self.fn(self.point(sigma, tau), order)[: order + 1]]
        return vals, [mpmath.mpf(0)] * (order + 1)


class RotatedFunction(CurveFunction):
    """c * fn, so that Im(c fn) = 0 traces other level sets (c = i gives Re fn = 0)."""

    def __init__(self, base: CurveFunction, factor=1j):
        self.base = base
        self.factor = factor
        self.height = base.height
        self.name = f"{base.name}*{factor}"

    def fast(self, sigma, tau, order=1):
        return [self.factor * v for v in self.base.fast(sigma, tau, order)]

    def jet(self, sigma, tau, order, ctx):
        vals, radii = self.base.jet(sigma, tau, order, ctx)
        with ctx.workdps():
            return [mpmath.mpc(self.factor) * v for v in vals], radii


def as_curve_function(fn) -> CurveFunction:
    if isinstance(fn, CurveFunction):
        return fn
    if callable(fn):
        return CallableFunction(fn)
    raise DomainError("expected a CurveFunction or a callable fn(s, order)")


# ---------------------------------------------------------------------------
# windows, segments, tracing


def _frac(x) -> Fraction:
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise DomainError(f"not a decimal: {x!r}") from exc
    if isinstance(x, (mpmath.mpf, float)):
        return _to_fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class Window:
    """Rectangle [sigma_min, sigma_max] x [t_min, t_max] with a square grid step."""

    sigma_min: Fraction
    sigma_max: Fraction
    t_min: Fraction
    t_max: Fraction
    grid_step: Fraction | None = None

    def __post_init__(self):
        for name in ("sigma_min", "sigma_max", "t_min", "t_max"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if not (self.sigma_min < self.sigma_max and self.t_min < self.t_max):
            raise DomainError("window needs sigma_min < sigma_max and t_min < t_max")
        width = self.sigma_max - self.sigma_min
        step = width / 20 if self.grid_step is None else _frac(self.grid_step)
        if not 0 < step <= width / 10:
            raise DomainError("grid_step must be positive and at most (sigma_max - sigma_min)/10")
        object.__setattr__(self, "grid_step", step)

    @classmethod
    def parse(cls, text: str, grid_step=None) -> "Window":
        parts = text.split(",")
        if len(parts) != 4:
            raise DomainError("window must be sigma_min,sigma_max,t_min,t_max")
        return cls(*parts, grid_step=grid_step)

    def default_height(self) -> Fraction:
        c = (self.t_min + self.t_max) / 2
        return Fraction(round(c)) if abs(c) > HEAVY_MAX_T else Fraction(0)

    def axes(self, height: Fraction):
        def ax(lo, hi, shift):
            n = math.ceil((hi - lo) / self.grid_step)
            return np.array([float(min(lo + k * self.grid_step, hi) - shift) for k in range(n + 1)])

        return ax(self.sigma_min, self.sigma_max, 0), ax(self.t_min, self.t_max, height)

    def to_dict(self) -> dict:
        return {k: _fraction_str(getattr(self, k)) for k in ("sigma_min", "sigma_max", "t_min", "t_max", "grid_step")}


def _fraction_str(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    with mpmath.workdps(len(str(abs(x.numerator) // x.denominator)) + 20):
        return mpmath.nstr(mpmath.mpf(x.numerator) / x.denominator, len(str(abs(x.numerator) // x.denominator)) + 15)


@dataclass
class CurveSegment:
    """A traced piece of Im f = 0.  Coordinates are kept as (sigma, tau) doubles
    relative to ``height``; ``points`` rebuilds the absolute complex points."""

    sigma: np.ndarray
    tau: np.ndarray
    window: Window
    height: Fraction = Fraction(0)
    kind: str = "unknown"
    closed: bool = False
    ends: tuple = ("interior", "interior")

    def __len__(self):
        return len(self.sigma)

    @property
    def points(self) -> list:
        with mpmath.workdps(len(str(abs(int(self.height)))) + 20):
            h = _mp(self.height)
            return [mpmath.mpc(float(x), h + float(y)) for x, y in zip(self.sigma, self.tau)]

    def t_strings(self) -> list[str]:
        if self.height == 0:
            return [repr(float(y)) for y in self.tau]
        d = len(str(abs(int(self.height)))) + 15
        with mpmath.workdps(d + 5):
            h = _mp(self.height)
            return [mpmath.nstr(h + mpmath.mpf(float(y)), d, min_fixed=-5, max_fixed=d + 1) for y in self.tau]


def _edge_label(x, y, window: Window, tau_lo, tau_hi, tol):
    if abs(x - float(window.sigma_min)) < tol:
        return "left"
    if abs(x - float(window.sigma_max)) < tol:
        return "right"
    if abs(y - tau_lo) < tol:
        return "bottom"
    if abs(y - tau_hi) < tol:
        return "top"
    return "interior"


def classify_segment(seg: CurveSegment) -> str:
    """I2: both ends on the left edge; I1: ends on the left and right edges; otherwise unknown."""
    a, b = seg.ends
    if a == b == "left":
        return "I2"
    if {a, b} == {"left", "right"}:
        return "I1"
    return "unknown"


class _Tracer:
    def __init__(self, window: Window, fn: CurveFunction, tol: float):
        self.window = window
        self.fn = fn
        self.tol = tol
        self.xs, self.ys = window.axes(fn.height)
        self.step = float(window.grid_step)
        self.xlo, self.xhi = self.xs[0], self.xs[-1]
        self.ylo, self.yhi = self.ys[0], self.ys[-1]
        self.consumed_v = set()
        self.consumed_h = set()

    def eval(self, z, order=1):
        return [complex(np.ravel(v)[0]) for v in self.fn.fast(np.array([z.real]), np.array([z.imag]), order)]

    def inside(self, z):
        e = 1e-12
        return self.xlo - e <= z.real <= self.xhi + e and self.ylo - e <= z.imag <= self.yhi + e

    def correct(self, p, iters=12):
        for _ in range(iters):
            f, f1 = self.eval(p)
            if f1 == 0:
                return None
            dp = -1j * f.imag / f1
            p = p + dp
            if abs(f.imag) <= self.tol * max(1.0, abs(f)) * 1e-2 or abs(dp) < 1e-15 * max(1.0, abs(p)):
                f, _ = self.eval(p)
                return p if abs(f.imag) <= self.tol else None
        f, _ = self.eval(p)
        return p if abs(f.imag) <= self.tol else None

    def correct_on_edge(self, q, vertical: bool):
        # 1-D Newton along the boundary line through q
        for _ in range(30):
            f, f1 = self.eval(q)
            d = f1.real if vertical else f1.imag
            if d == 0:
                break
            delta = -f.imag / d
            q = complex(q.real, q.imag + delta) if vertical else complex(q.real + delta, q.imag)
            if abs(delta) < 1e-15 * max(1.0, abs(q)):
                break
        return complex(min(max(q.real, self.xlo), self.xhi), min(max(q.imag, self.ylo), self.yhi))

    def clip(self, z, p):
        lam, vertical = 1.0, True
        d = p - z
        for bound, comp, vert in ((self.xlo, "r", True), (self.xhi, "r", True), (self.ylo, "i", False), (self.yhi, "i", False)):
            a, b = (z.real, d.real) if comp == "r" else (z.imag, d.imag)
            if b != 0:
                l = (bound - a) / b
                if 0 <= l < lam:
                    lam, vertical = l, vert
        q = z + lam * d
        if vertical:
            q = complex(self.xlo if abs(q.real - self.xlo) < abs(q.real - self.xhi) else self.xhi, q.imag)
        else:
            q = complex(q.real, self.ylo if abs(q.imag - self.ylo) < abs(q.imag - self.yhi) else self.yhi)
        return self.correct_on_edge(q, vertical)

    def march(self, z0, direction):
        h0 = self.step / 2
        pts = [z0]
        z = z0
        f, f1 = self.eval(z)
        if abs(f1) < 1e-14:
            return pts, False
        T = direction * np.conj(f1) / abs(f1)
        max_steps = int(40 * ((self.xhi - self.xlo) + (self.yhi - self.ylo)) / self.step * 8) + 100
        for _ in range(max_steps):
            h = h0
            while True:
                p = self.correct(z + h * T)
                if p is not None and 0.3 * h < abs(p - z) < 1.7 * h:
                    f, f1 = self.eval(p)
                    if abs(f1) > 1e-14:
                        Tn = np.conj(f1) / abs(f1)
                        if (Tn * np.conj(T)).real < 0:
                            Tn = -Tn
                        if (Tn * np.conj(T)).real > 0.8:
                            break
                h /= 2
                if h < self.step / 512:
                    return pts, False
            if not self.inside(p):
                pts.append(self.clip(z, p))
                return pts, False
            if len(pts) > 3 and abs(p - pts[0]) < 0.75 * h0:
                pts.append(pts[0])
                return pts, True
            pts.append(p)
            z, T = p, Tn
        return pts, False

    def consume(self, pts):
        xs, ys = self.xs, self.ys
        for a, b in zip(pts, pts[1:]):
            lo, hi = sorted((a.real, b.real))
            for i in range(np.searchsorted(xs, lo), np.searchsorted(xs, hi, side="right")):
                if b.real != a.real:
                    y = a.imag + (xs[i] - a.real) * (b.imag - a.imag) / (b.real - a.real)
                    j = int(np.searchsorted(ys, y, side="right")) - 1
                    for jj in (j - 1, j, j + 1):
                        self.consumed_v.add((i, jj))
            lo, hi = sorted((a.imag, b.imag))
            for j in range(np.searchsorted(ys, lo), np.searchsorted(ys, hi, side="right")):
                if b.imag != a.imag:
                    x = a.real + (ys[j] - a.imag) * (b.real - a.real) / (b.imag - a.imag)
                    i = int(np.searchsorted(xs, x, side="right")) - 1
                    for ii in (i - 1, i, i + 1):
                        self.consumed_h.add((ii, j))

    def edge_root(self, a, b):
        fa = self.eval(a, 0)[0].imag
        for _ in range(60):
            m = (a + b) / 2
            fm = self.eval(m, 0)[0].imag
            if (fm > 0) == (fa > 0) and fm != 0:
                a, fa = m, fm
            else:
                b = m
            if abs(b - a) < 1e-13 * max(1.0, abs(a)):
                break
        return (a + b) / 2


def _near_polyline(z, polylines, radius):
    for P in polylines:
        a, b = P[:-1], P[1:]
        d = b - a
        L2 = np.abs(d) ** 2
        lam = np.where(L2 > 0, ((np.conj(d) * (z - a)).real) / np.where(L2 > 0, L2, 1), 0)
        lam = np.clip(lam, 0, 1)
        if len(a) and np.min(np.abs(a + lam * d - z)) < radius:
            return True
        if len(P) == 1 and abs(P[0] - z) < radius:
            return True
    return False


def sign_change_edges(window: Window, fn: CurveFunction):
    """Grid axes, Im-values at the nodes and the vertical/horizontal edges whose endpoints differ in sign."""
    xs, ys = window.axes(fn.height)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    im = fn.fast(X, Y, 0)[0].imag
    pos = im >= 0
    v = np.argwhere(pos[:, :-1] != pos[:, 1:])
    h = np.argwhere(pos[:-1, :] != pos[1:, :])
    return xs, ys, im, [tuple(e) for e in v], [tuple(e) for e in h]


def _check_window_domain(window: Window, fn: CurveFunction, heavy: bool):
    if not isinstance(fn, ZetaFunction):
        return
    smin = float(window.sigma_min)
    tmax = max(abs(float(window.t_min)), abs(float(window.t_max)))
    if fn.large:
        if smin < 1.5:
            raise DomainError("the truncated Euler product needs sigma >= 1.5")
    elif heavy:
        if smin < 0.1 or tmax > HEAVY_MAX_T:
            raise DomainError("heavy mode needs sigma >= 0.1 and |t| <= 10^4")
    elif smin <= 1.05:
        raise DomainError("default tracing needs sigma > 1.05 (use heavy mode below that)")


def trace_real_curves(
    window: Window,
    fn: CurveFunction | Callable | None = None,
    ctx: PrecisionContext | None = None,
    heavy: bool = False,
    tol: float = TRACE_TOL,
) -> list[CurveSegment]:
    """Trace every curve Im fn = 0 crossing the window.

    Marching squares seeds one continuation per unconsumed sign-change edge
    of the grid; continuation is predictor (unit tangent conj(f')) plus
    corrector ``s -> s - i Im f(s)/f'(s)``, a Newton step normal to the curve.
    """
    fn = ZetaFunction(window.default_height()) if fn is None else as_curve_function(fn)
    _check_window_domain(window, fn, heavy)
    tr = _Tracer(window, fn, tol)
    xs, ys, _, vedges, hedges = sign_change_edges(window, fn)
    seeds = [("v", e) for e in vedges] + [("h", e) for e in hedges]
    segments: list[CurveSegment] = []
    polylines: list[np.ndarray] = []
    for kind, (i, j) in seeds:
        if (kind == "v" and (i, j) in tr.consumed_v) or (kind == "h" and (i, j) in tr.consumed_h):
            continue
        if kind == "v":
            a, b = complex(xs[i], ys[j]), complex(xs[i], ys[j + 1])
        else:
            a, b = complex(xs[i], ys[j]), complex(xs[i + 1], ys[j])
        z0 = tr.edge_root(a, b)
        z0 = tr.correct_on_edge(z0, kind == "v")
        if _near_polyline(z0, polylines, tr.step / 8):
            (tr.consumed_v if kind == "v" else tr.consumed_h).add((i, j))
            continue
        fwd, closed = tr.march(z0, 1)
        if closed:
            pts = fwd
        else:
            bwd, _ = tr.march(z0, -1)
            pts = bwd[::-1][:-1] + fwd
        (tr.consumed_v if kind == "v" else tr.consumed_h).add((i, j))
        tr.consume(pts)
        arr = np.array(pts)
        polylines.append(arr)
        e = 1e-9 * max(1.0, tr.step)
        ends = ("interior", "interior") if closed else (
            _edge_label(arr[0].real, arr[0].imag, window, tr.ylo, tr.yhi, e),
            _edge_label(arr[-1].real, arr[-1].imag, window, tr.ylo, tr.yhi, e),
        )
        seg = CurveSegment(arr.real.copy(), arr.imag.copy(), window, fn.height, closed=closed, ends=ends)
        seg.kind = classify_segment(seg)
        segments.append(seg)
    segments.sort(key=lambda s: (float(s.tau[0]), float(s.sigma[0])))
    return segments


def covered_cells(
    segments: Sequence[CurveSegment], window: Window, height: Fraction | None = None, samples: int = 8, margin: float | None = None
) -> set:
    """Grid cells (i, j) met by the traced polylines, each cell widened by
    ``margin`` (default grid_step/50) to absorb chord-versus-arc error."""
    height = segments[0].height if height is None and segments else (height or Fraction(0))
    xs, ys = window.axes(height)
    margin = float(window.grid_step) / 50 if margin is None else margin
    shifts = [0j] if margin == 0 else [0j, margin, -margin, 1j * margin, -1j * margin]
    cells = set()
    for seg in segments:
        P = seg.sigma + 1j * seg.tau
        if len(P) == 1:
            P = np.concatenate([P, P])
        lam = np.linspace(0, 1, samples, endpoint=False)
        Z = (P[:-1, None] + lam[None, :] * (P[1:] - P[:-1])[:, None]).ravel()
        Z = np.concatenate([Z, P[-1:]])
        for sh in shifts:
            W = Z + sh
            i = np.clip(np.searchsorted(xs, W.real, side="right") - 1, 0, len(xs) - 2)
            j = np.clip(np.searchsorted(ys, W.imag, side="right") - 1, 0, len(ys) - 2)
            cells.update(zip(i.tolist(), j.tolist()))
    return cells


def sign_change_cells(window: Window, fn: CurveFunction | None = None) -> set:
    """Cells whose four corners do not share the sign of Im fn."""
    fn = ZetaFunction(window.default_height()) if fn is None else fn
    xs, ys, im, _, _ = sign_change_edges(window, fn)
    pos = im >= 0
    c = pos[:-1, :-1].astype(int) + pos[1:, :-1] + pos[:-1, 1:] + pos[1:, 1:]
    return {tuple(e) for e in np.argwhere((c > 0) & (c < 4)).tolist()}


# ---------------------------------------------------------------------------
# turning points


@dataclass(frozen=True)
class TurningPoint:
    location: mpmath.mpc
    residual_im: mpmath.mpf
    residual_re_prime: mpmath.mpf
    iterations: int
    function: str
    winding_certificate: tuple | None = None

    @property
    def residual(self):
        return max(self.residual_im, self.residual_re_prime)

    def to_dict(self, digits: int = 20) -> dict:
        re = format_decimal(self.location.real, digits)
        im_digits = digits + len(str(abs(int(self.location.imag))))
        d = {
            "re": re,
            "im": format_decimal(self.location.imag, im_digits),
            "residual_im": format_decimal(self.residual_im, 3),
            "residual_re_prime": format_decimal(self.residual_re_prime, 3),
            "iterations": self.iterations,
            "function": self.function,
        }
        if self.winding_certificate:
            c, r, w = self.winding_certificate
            d["winding"] = {"center": [format_decimal(c.real, digits), format_decimal(c.imag, im_digits)], "radius": format_decimal(r, 5), "omega": w}
        return d


def find_turning_points(
    seed,
    fn: CurveFunction | Callable | None = None,
    ctx: PrecisionContext | None = None,
    certify: bool = False,
    max_iter: int = 60,
) -> TurningPoint:
    """2-D Newton for (Im f, Re f') = 0.

    The Jacobian follows from Cauchy-Riemann:
    d/dsigma Im f = Im f', d/dt Im f = Re f', d/dsigma Re f' = Re f'', d/dt Re f' = -Im f''.
    A Levenberg term keeps the step defined where the Jacobian is singular,
    as at a real turning point with f' = 0.
    """
    fn = ZetaFunction() if fn is None else as_curve_function(fn)
    ctx = ctx or PrecisionContext(fn.default_digits)
    if isinstance(seed, tuple):
        sigma, tau = seed
    else:
        sigma, tau = fn.local(seed)
    tol = mpmath.mpf(10) ** (-(ctx.digits // 2))
    with ctx.workdps(5):
        sigma, tau = mpmath.mpf(sigma), mpmath.mpf(tau)
        sigma0, tau0 = sigma, tau
        lam_scale = mpmath.mpf(10) ** (-2 * ctx.working_digits)
        for it in range(1, max_iter + 1):
            vals, radii = fn.jet(sigma, tau, 2, ctx)
            f, f1, f2 = vals
            F = (f.imag, f1.real)
            a, b = f1.imag, f1.real
            c, d = f2.real, -f2.imag
            # (J^T J + lam I) x = -J^T F
            jtj = [[a * a + c * c, a * b + c * d], [a * b + c * d, b * b + d * d]]
            lam = lam_scale * (jtj[0][0] + jtj[1][1] + 1)
            jtj[0][0] += lam
            jtj[1][1] += lam
            g0 = -(a * F[0] + c * F[1])
            g1 = -(b * F[0] + d * F[1])
            det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0]
            if det == 0:
                raise NoTurningPointError("singular Newton system")
            ds = (g0 * jtj[1][1] - g1 * jtj[0][1]) / det
            dt = (jtj[0][0] * g1 - jtj[1][0] * g0) / det
            size = abs(ds) + abs(dt)
            if size > 0.25:
                ds, dt = ds * 0.25 / size, dt * 0.25 / size
            sigma += ds
            tau += dt
            if abs(sigma - sigma0) + abs(tau - tau0) > 2:
                raise NoTurningPointError("Newton iteration for the turning point diverged")
            if abs(ds) + abs(dt) < tol * mpmath.mpf(10) ** (-ctx.digits // 4):
                break
        else:
            raise NoTurningPointError("no convergence")
        vals, radii = fn.jet(sigma, tau, 1, ctx)
        r_im = abs(vals[0].imag) + radii[0]
        r_re = abs(vals[1].real) + radii[1]
        loc = fn.point(sigma, tau)
    if not (r_im < tol and r_re < tol):
        raise NoTurningPointError(f"residuals {float(r_im):.2e}, {float(r_re):.2e} exceed tolerance")
    cert = None
    if certify:
        radius = 1e-3
        cert = (loc, radius, winding_number((float(sigma), float(tau)), radius, fn, ctx))
    return TurningPoint(loc, r_im, r_re, it, fn.name, cert)


def turning_point_seeds(seg: CurveSegment, fn: CurveFunction) -> list[tuple]:
    """Midpoints of segment steps where Re f' changes sign (vertical tangent)."""
    if len(seg) < 2:
        return []
    d = fn.fast(seg.sigma, seg.tau, 1)[1].real
    idx = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]
    return [((seg.sigma[k] + seg.sigma[k + 1]) / 2, (seg.tau[k] + seg.tau[k + 1]) / 2) for k in idx]


def turning_points_on(segments: Sequence[CurveSegment], fn: CurveFunction, ctx: PrecisionContext | None = None) -> list[TurningPoint]:
    """Refine every vertical-tangent seed found along the traced segments."""
    out: list[TurningPoint] = []
    for seg in segments:
        for seed in turning_point_seeds(seg, fn):
            try:
                tp = find_turning_points(seed, fn, ctx)
            except NoRootError:
                continue
            if all(abs(tp.location - o.location) > 1e-8 for o in out):
                out.append(tp)
    return out


def verify_turning_bound(points: Sequence[TurningPoint], digits: int = 30, slack: float = 1e-10) -> dict:
    """Re b - E for each point; a positive value beyond ``slack`` plus the residual is a falsification."""
    if not points:
        return {"E": None, "entries": [], "falsified": False}
    E = solve_E(digits).value
    entries = []
    for p in points:
        diff = p.location.real - E
        bad = bool(diff > slack + p.residual)
        entries.append({"re": format_decimal(p.location.real, digits), "re_minus_E": format_decimal(diff, 5), "falsified": bad})
    return {"E": format_decimal(E, digits), "entries": entries, "falsified": any(e["falsified"] for e in entries)}


# ---------------------------------------------------------------------------
# winding numbers


def _contour_values(fn, cs, ct, radius, phis, of):
    z = np.exp(1j * phis)
    order = 2 if of == "turning" else 1
    vals = fn.fast(cs + radius * z.real, ct + radius * z.imag, order)
    dz = 1j * radius * z
    if of == "turning":
        h = vals[0].imag + 1j * vals[1].real
        dh = (vals[1] * dz).imag + 1j * (vals[2] * dz).real
    else:
        h = vals[0]
        dh = vals[1] * dz
    return h, dh


def winding_number(
    center,
    radius,
    fn: CurveFunction | Callable,
    ctx: PrecisionContext | None = None,
    of: str = "turning",
    samples: int = 64,
    max_samples: int = 1 << 20,
) -> int:
    """Winding number about 0 of phi -> h(center + r e^(i phi)).

    ``of="turning"`` uses h = Im f + i Re f', whose zeros are turning points;
    ``of="value"`` uses h = f itself (the argument principle).  Arcs are
    bisected until each has |delta arg h| < pi/2 and sampled modulus above
    the variation bound (twice the larger endpoint |dh/dphi|, times half the
    arc).  ``samples`` sets the initial uniform sampling.
    """
    if of not in ("turning", "value"):
        raise DomainError("of must be 'turning' or 'value'")
    fn = as_curve_function(fn)
    cs, ct = center if isinstance(center, tuple) else fn.local(center)
    cs, ct, radius = float(cs), float(ct), float(radius)
    phis = 2 * np.pi * np.arange(samples + 1) / samples
    h, dh = _contour_values(fn, cs, ct, radius, phis, of)
    total = samples
    while True:
        width = np.diff(phis)
        lip = 2 * np.maximum(np.abs(dh[:-1]), np.abs(dh[1:]))
        ok_mod = np.minimum(np.abs(h[:-1]), np.abs(h[1:])) > lip * width / 2
        inc = np.angle(h[1:] / np.where(h[:-1] == 0, 1, h[:-1]))
        bad = ~(ok_mod & (np.abs(inc) < np.pi / 2))
        if not bad.any():
            return int(round(inc.sum() / (2 * np.pi)))
        idx = np.nonzero(bad)[0]
        total += len(idx)
        if total > max_samples or np.min(width[idx]) < 1e-14:
            raise ZeroOnContourError("h vanishes on, or too close to, the contour")
        mids = (phis[idx] + phis[idx + 1]) / 2
        hm, dhm = _contour_values(fn, cs, ct, radius, mids, of)
        phis = np.insert(phis, idx + 1, mids)
        h = np.insert(h, idx + 1, hm)
        dh = np.insert(dh, idx + 1, dhm)


# ---------------------------------------------------------------------------
# output formats


def segment_csv(seg: CurveSegment) -> str:
    buf = io.StringIO()
    w = seg.window.to_dict()
    buf.write(f"# kind={seg.kind}\n# window={w['sigma_min']},{w['sigma_max']},{w['t_min']},{w['t_max']} grid_step={w['grid_step']}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sigma", "t"])
    for x, t in zip(seg.sigma, seg.t_strings()):
        writer.writerow([repr(float(x)), t])
    return buf.getvalue()


def write_csv(segments: Sequence[CurveSegment], directory) -> list:
    """One CSV file per segment, ``segment_000.csv`` and so on."""
    from pathlib import Path

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, seg in enumerate(segments):
        p = d / f"segment_{k:03d}.csv"
        p.write_text(segment_csv(seg))
        paths.append(p)
    return paths


def segments_svg(
    segments: Sequence[CurveSegment],
    window: Window,
    re_zero: Sequence[CurveSegment] = (),
    turning: Sequence[TurningPoint] = (),
    width: int = 600,
) -> str:
    """Static SVG: solid paths for Im = 0, dashed for Re = 0, reference lines at sigma = 0 and 1."""
    height = segments[0].height if segments else window.default_height()
    x0, x1 = float(window.sigma_min), float(window.sigma_max)
    y0, y1 = float(window.t_min - height), float(window.t_max - height)
    H = max(100, min(4000, int(width * (y1 - y0) / (x1 - x0))))

    def px(x, y):
        return f"{(x - x0) / (x1 - x0) * width:.3f},{(y1 - y) / (y1 - y0) * H:.3f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{H}" viewBox="0 0 {width} {H}">',
        f'<rect x="0" y="0" width="{width}" height="{H}" fill="white" stroke="black"/>',
    ]
    for ref in (0, 1):
        if x0 <= ref <= x1:
            out.append(f'<line class="ref" x1="{px(ref, y0).split(",")[0]}" y1="0" x2="{px(ref, y0).split(",")[0]}" y2="{H}" stroke="gray"/>')
    for segs, style in ((segments, ""), (re_zero, ' stroke-dasharray="4,3"')):
        for seg in segs:
            d = "M " + " L ".join(px(x, y) for x, y in zip(seg.sigma, seg.tau))
            out.append(f'<path class="{seg.kind}" d="{d}" fill="none" stroke="black"{style}/>')
    for tp in turning:
        with mpmath.workdps(40):
            x, y = float(tp.location.real), float(tp.location.imag - _mp(height))
        c = px(x, y).split(",")
        out.append(f'<circle cx="{c[0]}" cy="{c[1]}" r="3" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
