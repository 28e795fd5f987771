"""Precision substrate: working-precision context, decimal I/O, primes and
small arithmetic functions.

Real and complex scalars are mpmath ``mpf``/``mpc`` values.  Precision is
never read from mpmath's global state by callers; every operation that needs
more than double precision takes a :class:`PrecisionContext` and enters it
explicitly with :meth:`PrecisionContext.workdps`.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DomainError, EmptyTableError

BigFloat = mpmath.mpf
BigComplex = mpmath.mpc

_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class PrecisionContext:
    """Decimal working precision.

    ``digits`` is the precision promised to the caller; ``guard_digits`` are
    carried on top of it internally.
    """

    digits: int = 30
    guard_digits: int = 10

    def __post_init__(self):
        if self.digits < 10:
            raise DomainError(f"digits must be >= 10, got {self.digits}")
        if self.guard_digits < 5:
            raise DomainError(f"guard_digits must be >= 5, got {self.guard_digits}")

    @property
    def working_digits(self) -> int:
        return self.digits + self.guard_digits

    @property
    def target(self):
        """Absolute accuracy goal 10^-digits as an mpf."""
        return mpmath.mpf(10) ** (-self.digits)

    def workdps(self, extra: int = 0):
        """Context manager running mpmath at ``digits + guard + extra``."""
        return mpmath.workdps(self.working_digits + max(0, int(extra)))

    def with_digits(self, digits: int) -> "PrecisionContext":
        return PrecisionContext(digits=digits, guard_digits=self.guard_digits)


def exact_complex(z):
    """Convert to mpc without rounding to the ambient mpmath precision."""
    if isinstance(z, mpmath.mpc):
        return z
    with mpmath.workprec(4000):
        return mpmath.mpc(z)


def exact_real(x):
    if isinstance(x, mpmath.mpf):
        return x
    with mpmath.workprec(4000):
        return mpmath.mpf(x)


def phase_digits(t) -> int:
    """Extra decimal digits needed so that t*log(n) keeps full precision mod 2*pi."""
    at = abs(float(t))
    if at < 10:
        return 1
    return int(math.ceil(math.log10(at))) + 1


def parse_decimal(text: str, ctx: PrecisionContext | None = None):
    """Parse a plain decimal string (no locale separators) into an mpf."""
    text = text.strip()
    if not _DECIMAL_RE.match(text):
        raise DomainError(f"not a decimal number: {text!r}")
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        return +mpmath.mpf(text)


def format_decimal(x, digits: int) -> str:
    """Render ``x`` with ``digits`` significant digits.

    Output matches ``[+-]digits[.digits][e+-exp]``; trailing zeros are
    stripped so exactly representable inputs round-trip unchanged.
    """
    with mpmath.workdps(max(digits + 5, mpmath.mp.dps)):
        x = mpmath.mpf(x)
        if x == 0:
            return "0.0"
        return mpmath.nstr(x, digits, min_fixed=-5, max_fixed=digits + 1)


def format_complex(z, digits: int) -> list[str]:
    with mpmath.workdps(max(digits + 5, mpmath.mp.dps)):
        z = mpmath.mpc(z)
    return [format_decimal(z.real, digits), format_decimal(z.imag, digits)]


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """All primes <= ``limit``, ascending, stored in a read-only int64 array."""

    limit: int
    primes: np.ndarray

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return (int(p) for p in self.primes)

    def __getitem__(self, i):
        return int(self.primes[i]) if isinstance(i, (int, np.integer)) else self.primes[i]

    def __contains__(self, n):
        i = np.searchsorted(self.primes, n)
        return bool(i < len(self.primes) and self.primes[i] == n)

    def first(self, n: int) -> list[int]:
        if n > len(self.primes):
            raise DomainError(f"table up to {self.limit} holds only {len(self.primes)} primes")
        return [int(p) for p in self.primes[:n]]


@functools.lru_cache(maxsize=16)
def primes_up_to(limit: int) -> PrimeTable:
    """Sieve of Eratosthenes.  Tables are cached and shared read-only."""
    limit = int(limit)
    if limit < 2:
        raise EmptyTableError(f"no primes <= {limit}")
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    primes = np.flatnonzero(sieve).astype(np.int64)
    primes.flags.writeable = False
    return PrimeTable(limit=limit, primes=primes)


def nth_primes(n: int) -> list[int]:
    """The first ``n`` primes."""
    if n < 1:
        raise DomainError("n must be >= 1")
    bound = 15 if n < 6 else int(n * (math.log(n) + math.log(math.log(n)))) + 3
    return primes_up_to(bound).first(n)


def _check_positive(n):
    if int(n) != n or n < 1:
        raise DomainError(f"expected a positive integer, got {n!r}")
    return int(n)


def two_adic_valuation(n: int) -> int:
    """Exponent of 2 in n."""
    n = _check_positive(n)
    return (n & -n).bit_length() - 1


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def big_omega(n: int) -> int:
    """Number of prime factors of n counted with multiplicity."""
    return sum(_factor(_check_positive(n)).values())


def small_omega(n: int) -> int:
    """Number of distinct prime factors of n."""
    return len(_factor(_check_positive(n)))


def mobius(n: int) -> int:
    f = _factor(_check_positive(n))
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def prime_divisors(n: int) -> list[int]:
    return sorted(_factor(_check_positive(n)))


def two_adic_table(N: int) -> np.ndarray:
    """nu(n) for n = 0..N (entry 0 unused)."""
    n = np.arange(N + 1, dtype=np.int64)
    n[0] = 1
    return np.log2(n & -n).round().astype(np.int64)


def big_omega_table(N: int) -> np.ndarray:
    """Omega(n) for n = 0..N via a sieve over prime powers (entry 0 unused)."""
    out = np.zeros(N + 1, dtype=np.int64)
    if N < 2:
        return out
    for p in primes_up_to(N):
        q = p
        while q <= N:
            out[q::q] += 1
            q *= p
    return out
