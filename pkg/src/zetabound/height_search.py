"""Lattice search for heights t where the prime phases t*log p hit chosen
targets, and Newton polishing of the nearby solutions of zeta(s) = 1 and
zeta'(s) = 0.

With targets pi for p = 2 and 0 for odd p, the Euler factors at such a t
mimic the limit function (2^s-1)/(2^s+1) zeta(s), whose extremal points are
sigma(1) (for zeta = 1) and E (for zeta' = 0).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import (
    DependentRowsError,
    DomainError,
    NoRootError,
    NoSentinelRowError,
    OutOfRegionError,
    PrecisionEscalationError,
)
from .numerics import PrecisionContext, exact_complex, format_decimal, nth_primes
from .zeta_eval import DEFAULT_PRIME_LIMIT, EM_MAX_T, EulerProduct, EvalMethod, _to_fraction, zeta_jet

SIGMA_ONE_SEED = 1.9401016837436253
E_SEED = 2.8130140202528984
E_MINUS_SIGMA_ONE = mpmath.mpf("0.872912336509273081509785761686132085615894")
SIGMA_CAP = {"zeta_equals_one": 4.0, "zeta_prime_zero": 5.0}


@dataclass(frozen=True)
class LatticeParams:
    n: int = 10
    nu: int = 90
    r: int = 30
    weights_base: str = "1.15"
    weights: tuple | None = None
    thetas: tuple | None = None

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("n must be >= 2")
        if not (self.nu > self.r >= 0):
            raise DomainError("need nu > r >= 0")
        if self.weights is not None:
            if len(self.weights) != self.n or any(mpmath.mpf(w) <= 0 for w in self.weights):
                raise DomainError("weights must be n positive numbers")
        if self.thetas is not None and len(self.thetas) != self.n:
            raise DomainError("need one target phase per prime")

    @property
    def primes(self) -> list[int]:
        return nth_primes(self.n)

    def weight_values(self):
        """w_j as mpf at the current precision."""
        if self.weights is not None:
            return [mpmath.mpf(w) for w in self.weights]
        base = mpmath.mpf(self.weights_base)
        return [base ** (40 - j) for j in range(1, self.n + 1)]

    def theta_values(self):
        if self.thetas is not None:
            return [mpmath.mpf(x) if not isinstance(x, str) else _parse_theta(x) for x in self.thetas]
        return [+mpmath.pi] + [mpmath.mpf(0)] * (self.n - 1)

    @property
    def self_conjugate(self) -> bool:
        """True when every target is 0 or pi, so t and -t are equally good."""
        with mpmath.workdps(30):
            return all(abs(x) < 1e-25 or abs(x - mpmath.pi) < 1e-25 for x in self.theta_values())

    def to_dict(self) -> dict:
        out = {"n": self.n, "nu": self.nu, "r": self.r, "weights_base": self.weights_base}
        if self.weights is not None:
            out["weights"] = [str(w) for w in self.weights]
        if self.thetas is not None:
            out["thetas"] = [str(x) for x in self.thetas]
        return out


def _parse_theta(text: str):
    text = text.strip().lower()
    if text == "pi":
        return +mpmath.pi
    if text.endswith("pi"):
        return mpmath.mpf(text[:-2].rstrip("*")) * mpmath.pi
    return mpmath.mpf(text)


@dataclass(frozen=True)
class LatticeBasis:
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(int(x) for x in r) for r in self.rows))

    @property
    def dimension(self) -> int:
        return len(self.rows)

    def gram_determinant(self) -> int:
        """det(B B^T) computed exactly (fraction-free Bareiss elimination)."""
        g = [[sum(a * b for a, b in zip(u, v)) for v in self.rows] for u in self.rows]
        return _bareiss_det(g)

    def as_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def _bareiss_det(m) -> int:
    m = [list(r) for r in m]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _floor_checked(x, what):
    f = mpmath.floor(x)
    frac = x - f
    guard = mpmath.mpf(10) ** (-(mpmath.mp.dps - 15))
    if frac < guard or 1 - frac < guard:
        raise PrecisionEscalationError(f"floor of {what} is ambiguous", mpmath.mp.dps * 2)
    return int(f)


def build_lattice(params: LatticeParams) -> LatticeBasis:
    """The n+2 generators: scaled 2*pi diagonal, the log-prime row and the target row."""
    n, nu, r = params.n, params.nu, params.r
    with mpmath.workdps(int(nu * 0.30103) + 40):
        w = params.weight_values()
        theta = params.theta_values()
        scale = mpmath.mpf(2) ** nu
        rows = []
        for j in range(n):
            row = [0] * (n + 2)
            row[j] = _floor_checked(2 * mpmath.pi * w[j] * scale, f"2pi w_{j + 1} 2^nu")
            rows.append(row)
        v = [_floor_checked(w[j] * mpmath.mpf(2) ** (nu - r) * mpmath.log(p), f"w_{j + 1} 2^(nu-r) log p") for j, p in enumerate(params.primes)]
        rows.append(v + [0, 1])
        vp = []
        for j in range(n):
            x = w[j] * theta[j] * scale
            vp.append(0 if x == 0 else -_floor_checked(x, f"w_{j + 1} theta_{j + 1} 2^nu"))
        rows.append(vp + [sentinel(params), 0])
    return LatticeBasis(rows)


def sentinel(params: LatticeParams) -> int:
    return 2**params.nu * params.n**4


def lll_reduce(basis: LatticeBasis, delta=Fraction(3, 4)) -> LatticeBasis:
    """Integral LLL (all Gram-Schmidt data kept as exact integers).

    Follows the classical fraction-free formulation: ``d[i]`` are the
    leading Gram minors and ``lam[k][j] = d[j+1] * mu[k][j]``.
    """
    delta = Fraction(delta)
    if not (Fraction(1, 4) < delta < 1):
        raise DomainError("delta must lie in (1/4, 1)")
    b = basis.as_lists()
    n = len(b)
    if n == 0:
        return basis

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    d = [1] + [0] * n
    lam = [[0] * n for _ in range(n)]
    dn, dd = delta.numerator, delta.denominator

    def reduce(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k, kmax):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        mu = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + mu * mu) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - mu * t) // d[k]
            lam[i][k - 1] = (B * t + mu * lam[i][k]) // d[k + 1]
        d[k] = B

    d[1] = dot(b[0], b[0])
    if d[1] == 0:
        raise DependentRowsError("zero row in basis")
    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = dot(b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise DependentRowsError("basis rows are linearly dependent")
                    d[k + 1] = u
        reduce(k, k - 1)
        if dd * d[k + 1] * d[k - 1] < dn * d[k] * d[k] - dd * lam[k][k - 1] ** 2:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                reduce(k, l)
            k += 1
    return LatticeBasis(b)


def gram_schmidt_check(basis: LatticeBasis, delta=Fraction(3, 4)) -> bool:
    """Exact rational check of size reduction and the Lovasz condition."""
    b = [[Fraction(x) for x in r] for r in basis.rows]
    n = len(b)
    bstar, B = [], []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        v = list(b[i])
        for j in range(i):
            mu[i][j] = sum(x * y for x, y in zip(b[i], bstar[j])) / B[j]
            v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
        bstar.append(v)
        B.append(sum(x * x for x in v))
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for k in range(1, n):
        if B[k] < (Fraction(delta) - mu[k][k - 1] ** 2) * B[k - 1]:
            return False
    return True


def lattice_coordinates(basis: LatticeBasis, vector) -> list[Fraction]:
    """Coefficients c with sum c_i rows_i = vector (square full-rank basis)."""
    n = basis.dimension
    # solve B^T c = v by exact Gauss-Jordan elimination
    m = [[Fraction(basis.rows[j][i]) for j in range(n)] + [Fraction(vector[i])] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise DependentRowsError("basis is singular")
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


@dataclass(frozen=True)
class HeightCandidate:
    x: int
    r: int
    t: Fraction
    residuals: tuple
    score: mpmath.mpf
    weighted_score: mpmath.mpf
    conjugated: bool = False
    row: tuple = field(default=(), compare=False)

    @property
    def t_decimal(self) -> str:
        return _fraction_decimal(self.t, 30)

    def to_dict(self) -> dict:
        return {
            "x": str(self.x),
            "r": self.r,
            "t": self.t_decimal,
            "t_exact": f"{self.t.numerator}/{self.t.denominator}",
            "conjugated": self.conjugated,
            "residuals": [format_decimal(v, 12) for v in self.residuals],
            "score": format_decimal(self.score, 12),
            "weighted_score": format_decimal(self.weighted_score, 12),
        }


def _fraction_decimal(q: Fraction, digits: int) -> str:
    mag = len(str(abs(q.numerator) // q.denominator)) if q else 1
    with mpmath.workdps(mag + digits + 5):
        return format_decimal(mpmath.mpf(q.numerator) / q.denominator, mag + digits)


def phase_residuals(t, primes, thetas):
    """(t log p - theta) reduced to (-pi, pi], computed with enough digits
    that the integer part of t log p / 2pi is exact."""
    tq = Fraction(t)
    mag = max(1, len(str(abs(tq.numerator) // tq.denominator)))
    with mpmath.workdps(mag + 40):
        tm = mpmath.mpf(tq.numerator) / tq.denominator
        out = []
        two_pi = 2 * mpmath.pi
        for p, th in zip(primes, thetas):
            x = tm * mpmath.log(p) - th
            x = x - two_pi * mpmath.floor(x / two_pi)
            if x > mpmath.pi:
                x -= two_pi
            out.append(x)
    return out


def make_candidate(x: int, params: LatticeParams, row=(), conjugated=False) -> HeightCandidate:
    t = Fraction(x, 2**params.r)
    with mpmath.workdps(40):
        thetas = params.theta_values()
        w = params.weight_values()
    res = phase_residuals(t, params.primes, thetas)
    with mpmath.workdps(40):
        score = max(abs(v) for v in res)
        wscore = max(abs(v) * wj for v, wj in zip(res, w))
    return HeightCandidate(x, params.r, t, tuple(res), +score, +wscore, conjugated, tuple(row))


def extract_heights(reduced: LatticeBasis, params: LatticeParams) -> list[HeightCandidate]:
    """Candidates from every reduced row carrying +-sentinel in column n+1."""
    n = params.n
    S = sentinel(params)
    out = []
    for row in reduced.rows:
        c = row[n]
        if abs(c) != S:
            continue
        if c < 0:
            row = tuple(-v for v in row)
        x = row[n + 1]
        conj = False
        if x < 0 and params.self_conjugate:
            x, conj = -x, True
        out.append(make_candidate(x, params, row, conj))
    if not out:
        raise NoSentinelRowError("no reduced row carries the sentinel; strengthen nu or r")
    out.sort(key=lambda c: (c.score, c.x))
    return out


def diagnose_limits(t, primes=None, ctx: PrecisionContext | None = None) -> dict[int, float]:
    """|2^{it} + 1| for p = 2 and |p^{it} - 1| for odd p."""
    if isinstance(t, HeightCandidate):
        t = t.t
    primes = list(primes if primes is not None else nth_primes(10))
    ctx = ctx or PrecisionContext(20)
    tq = t if isinstance(t, Fraction) else None
    if tq is None:
        with ctx.workdps():
            tm = exact_complex(t).real
        mag = max(1, int(mpmath.log10(abs(tm) + 1)) + 1)
    else:
        mag = max(1, len(str(abs(tq.numerator) // tq.denominator)))
    out = {}
    with ctx.workdps(mag + 5):
        if tq is not None:
            tm = mpmath.mpf(tq.numerator) / tq.denominator
        for p in primes:
            z = mpmath.expj(tm * mpmath.log(p))
            out[int(p)] = float(abs(z + 1) if p == 2 else abs(z - 1))
    return out


@dataclass(frozen=True)
class RefinedRoot:
    value: mpmath.mpc
    residual: mpmath.mpf
    iterations: int
    evaluator: str

    def to_dict(self, digits=20) -> dict:
        return {
            "re": format_decimal(self.value.real, digits),
            "im": format_decimal(self.value.imag, len(str(int(abs(self.value.imag)))) + digits),
            "residual": format_decimal(self.residual, 3),
            "iterations": self.iterations,
            "evaluator": self.evaluator,
        }


class _Evaluator:
    """zeta jets near a fixed height: Euler-Maclaurin for moderate t, the
    truncated Euler product (exact phase reduction) above EM_MAX_T."""

    def __init__(self, height, ctx: PrecisionContext, prime_limit=DEFAULT_PRIME_LIMIT):
        self.height = Fraction(height)
        self.ctx = ctx
        self.large = abs(self.height) > EM_MAX_T
        if self.large:
            self.ep = EulerProduct(self.height, prime_limit)
        self.name = "euler_product" if self.large else "euler_maclaurin"

    def jet(self, sigma, tau, order):
        if self.large:
            if sigma < 1.5:
                raise OutOfRegionError(f"iterate left the Euler-product region (sigma = {float(sigma):.4f})")
            vals, radii = self.ep.jet(float(sigma), float(tau), order)
            return [mpmath.mpc(v) for v in vals], [mpmath.mpf(r) for r in radii]
        with self.ctx.workdps(len(str(abs(int(self.height)))) + 5):
            s = mpmath.mpc(sigma, mpmath.mpf(self.height.numerator) / self.height.denominator + tau)
        jet = zeta_jet(s, order, EvalMethod("euler_maclaurin"), self.ctx)
        return [j.value for j in jet], [j.error_radius for j in jet]

    def point(self, sigma, tau):
        with mpmath.workdps(len(str(abs(int(self.height)))) + 30):
            return mpmath.mpc(sigma, mpmath.mpf(self.height.numerator) / self.height.denominator + tau)


def refine_root(kind: str, seed, ctx: PrecisionContext | None = None, prime_limit: int = DEFAULT_PRIME_LIMIT) -> RefinedRoot:
    """Complex Newton for zeta(s) = 1 (``zeta_equals_one``) or zeta'(s) = 0
    (``zeta_prime_zero``) starting at ``seed``.

    The height of ``seed`` is kept exactly; iterates move by small offsets
    from it, so large heights lose no phase accuracy.
    """
    if kind not in ("zeta_equals_one", "zeta_prime_zero"):
        raise DomainError(f"unknown root kind {kind!r}")
    ctx = ctx or PrecisionContext(20)
    if isinstance(seed, tuple):
        sigma0, height = seed
        height = Fraction(height)
    else:
        seed = exact_complex(seed)
        sigma0 = seed.real
        height = _to_fraction(seed.imag)
    if float(sigma0) <= 1.1:
        raise DomainError("seed must satisfy Re s > 1.1")
    ev = _Evaluator(height, ctx, prime_limit)
    d = 1 if kind == "zeta_equals_one" else 2
    with ctx.workdps(5):
        sigma = mpmath.mpf(sigma0)
        tau = mpmath.mpf(0)
        tol = mpmath.mpf(10) ** (-(ctx.digits // 2))
        for it in range(1, 51):
            vals, radii = ev.jet(sigma, tau, d)
            F = vals[d - 1] - (1 if d == 1 else 0)
            dF = vals[d]
            if dF == 0:
                raise NoRootError("vanishing Newton derivative")
            step = F / dF
            sigma -= step.real
            tau -= step.imag
            if sigma < 1.05:
                raise OutOfRegionError(f"Newton iterate drifted to sigma = {float(sigma):.4f}")
            # no solutions lie right of sigma(1) (resp. E); beyond that Newton only chases sigma -> oo
            if sigma > SIGMA_CAP[kind] or abs(tau) > 50:
                raise NoRootError("Newton iteration diverged")
            floor = 4 * radii[d - 1] / abs(dF)
            if abs(step) < max(tol, floor):
                vals, radii = ev.jet(sigma, tau, d)
                F = abs(vals[d - 1] - (1 if d == 1 else 0))
                if F > max(mpmath.mpf(10) ** (-(ctx.digits // 4)), 8 * radii[d - 1]):
                    raise NoRootError("Newton stalled away from a root")
                return RefinedRoot(ev.point(sigma, tau), F + radii[d - 1], it, ev.name)
    raise NoRootError("Newton did not converge in 50 iterations")


@dataclass(frozen=True)
class ExtremalPair:
    s_one: RefinedRoot
    rho: RefinedRoot
    delta: mpmath.mpc
    candidate: HeightCandidate | None = None

    @property
    def delta_gap(self):
        """|Re delta - (E - sigma(1))|."""
        return abs(self.delta.real - E_MINUS_SIGMA_ONE)

    def bound_violations(self, slack=1e-10) -> list[str]:
        out = []
        if self.s_one.value.real > SIGMA_ONE_SEED + slack:
            out.append("Re s_one exceeds sigma(1)")
        if self.rho.value.real > E_SEED + slack:
            out.append("Re rho exceeds E")
        return out

    def to_dict(self) -> dict:
        return {
            "s_one": self.s_one.to_dict(),
            "rho": self.rho.to_dict(),
            "delta": [format_decimal(self.delta.real, 15), format_decimal(self.delta.imag, 15)],
            "delta_gap": format_decimal(self.delta_gap, 6),
            "bound_violations": self.bound_violations(),
        }


def pair_at(height, ctx: PrecisionContext | None = None, prime_limit: int = DEFAULT_PRIME_LIMIT, candidate=None) -> ExtremalPair:
    """Refine both extremal roots seeded at sigma(1) + ih and E + ih."""
    ctx = ctx or PrecisionContext(20)
    h = Fraction(height)
    s_one = refine_root("zeta_equals_one", (SIGMA_ONE_SEED, h), ctx, prime_limit)
    rho = refine_root("zeta_prime_zero", (E_SEED, h), ctx, prime_limit)
    with mpmath.workdps(60):
        delta = rho.value - s_one.value
    return ExtremalPair(s_one, rho, +delta, candidate)


def paired_search(params: LatticeParams | None = None, ctx: PrecisionContext | None = None, prime_limit: int = DEFAULT_PRIME_LIMIT) -> ExtremalPair:
    """Full pipeline: lattice, LLL, best candidate, both refinements."""
    params = params or LatticeParams()
    cands = extract_heights(lll_reduce(build_lattice(params)), params)
    best = cands[0]
    return pair_at(best.t, ctx, prime_limit, best)


def _grid_minima(ev: _Evaluator, sigma, d, taus, keep):
    """Offsets tau where |F(sigma + i(h + tau))| has its smallest local minima."""
    if ev.large:
        vals, _ = ev.ep.jet_many(np.full(len(taus), float(sigma)), taus, d)
        F = np.abs(vals[d - 1] - (1 if d == 1 else 0))
    else:
        low = _Evaluator(ev.height, PrecisionContext(10, 5))
        F = np.array([float(abs(low.jet(sigma, tau, d - 1)[0][d - 1] - (1 if d == 1 else 0))) for tau in taus])
    idx = [i for i in range(1, len(F) - 1) if F[i] <= F[i - 1] and F[i] <= F[i + 1]]
    idx.sort(key=lambda i: F[i])
    return [float(taus[i]) for i in idx[:keep]]


def best_root_near(kind: str, height, window=3.0, ctx: PrecisionContext | None = None, prime_limit: int = DEFAULT_PRIME_LIMIT, step=0.01) -> RefinedRoot:
    """Root of largest real part with |Im s - height| <= window.

    Seeds are the local minima of |F| on a horizontal line just left of the
    extremal abscissa.
    """
    ctx = ctx or PrecisionContext(20)
    h = Fraction(height)
    ev = _Evaluator(h, ctx, prime_limit)
    d = 1 if kind == "zeta_equals_one" else 2
    sigma = SIGMA_ONE_SEED - 0.04 if d == 1 else E_SEED - 0.06
    taus = np.arange(-window, window + step / 2, step)
    found = []
    for tau in _grid_minima(ev, sigma, d, taus, 6):
        try:
            root = refine_root(kind, (sigma, h + Fraction(tau)), ctx, prime_limit)
        except (NoRootError, OutOfRegionError):
            continue
        if abs(root.value.imag - (mpmath.mpf(h.numerator) / h.denominator)) <= window:
            found.append(root)
    if not found:
        raise NoRootError(f"no {kind} root within {window} of the height")
    return max(found, key=lambda r: r.value.real)


def verify_height(h, ctx: PrecisionContext | None = None, prime_limit: int = DEFAULT_PRIME_LIMIT, window=3.0) -> ExtremalPair:
    """Direct verification near a published height, skipping the search:
    the extremal roots of zeta = 1 and zeta' = 0 in the strip |t - h| <= window."""
    ctx = ctx or PrecisionContext(20)
    s_one = best_root_near("zeta_equals_one", h, window, ctx, prime_limit)
    rho = best_root_near("zeta_prime_zero", h, window, ctx, prime_limit)
    with mpmath.workdps(60):
        delta = rho.value - s_one.value
    return ExtremalPair(s_one, rho, +delta)


def search_report(params: LatticeParams, refine: bool = True, ctx: PrecisionContext | None = None, prime_limit: int = DEFAULT_PRIME_LIMIT, keep: int = 5) -> dict:
    """Everything the search produces, as a JSON-ready dict."""
    basis = build_lattice(params)
    reduced = lll_reduce(basis)
    cands = extract_heights(reduced, params)
    best = cands[0]
    report = {
        "params": params.to_dict(),
        "candidates": [c.to_dict() for c in cands[:keep]],
        "diagnostics": {str(p): format_decimal(v, 8) for p, v in diagnose_limits(best, params.primes).items()},
    }
    if refine:
        report["pair"] = pair_at(best.t, ctx, prime_limit, best).to_dict()
    return report


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
