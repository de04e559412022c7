"""Exact arithmetic foundations: prime powers, f_q(n), group orders and partitions.

All exact quantities are ``fractions.Fraction`` values or Python integers; nothing in
this module rounds.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

from .errors import InconsistencyError, UsageError

logger = logging.getLogger(__name__)

# Deterministic Miller-Rabin witnesses; correct for every n below MR_LIMIT.
MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_LIMIT = 3_317_044_064_679_887_385_961_981


def is_prime(p: int) -> bool:
    """Deterministic primality test for p < MR_LIMIT.

    Raises:
        UsageError: If p is too large for the witness set to be conclusive.
    """
    if p < 2:
        return False
    for w in MR_WITNESSES:
        if p % w == 0:
            return p == w
    if p >= MR_LIMIT:
        raise UsageError(f"Cannot certify primality of {p}; it exceeds {MR_LIMIT}.")

    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for w in MR_WITNESSES:
        x = pow(w, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimePower:
    """The size q = p^r of a finite field F_q."""

    p: int
    r: int = 1
    q: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.p, int) or not isinstance(self.r, int):
            raise UsageError(f"p and r must be integers, got p={self.p!r}, r={self.r!r}.")
        if self.r < 1:
            raise UsageError(f"The exponent r must be at least 1, got {self.r}.")
        if not is_prime(self.p):
            raise UsageError(f"{self.p} is not prime.")
        object.__setattr__(self, "q", self.p**self.r)

    @classmethod
    def from_pr(cls, p: int, r: int = 1) -> "PrimePower":
        return cls(p, r)

    @classmethod
    def from_q(cls, q: int) -> "PrimePower":
        """Decompose q into p^r.

        Raises:
            UsageError: If q is not a prime power.
        """
        if not isinstance(q, int) or q < 2:
            raise UsageError(f"q must be an integer prime power >= 2, got {q!r}.")
        p = _smallest_prime_factor(q)
        r, rest = 0, q
        while rest % p == 0:
            rest //= p
            r += 1
        if rest != 1:
            raise UsageError(f"{q} is not a prime power.")
        return cls(p, r)

    def __str__(self) -> str:
        return str(self.q) if self.r == 1 else f"{self.q} ({self.p}^{self.r})"


QLike = Union[PrimePower, int]


def as_prime_power(q: QLike) -> PrimePower:
    """Accept a PrimePower or a plain integer q."""
    if isinstance(q, PrimePower):
        return q
    return _prime_power_of(q)


@lru_cache(maxsize=256)
def _prime_power_of(q: int) -> PrimePower:
    return PrimePower.from_q(q)


def _smallest_prime_factor(q: int) -> int:
    if q % 2 == 0:
        return 2
    d = 3
    while d * d <= q:
        if q % d == 0:
            return d
        d += 2
    return q


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 0:
        raise UsageError(f"n must be a non-negative integer, got {n!r}.")


def f_q(q: QLike, n: int) -> Fraction:
    """Return f_q(n) = prod_{j=1}^{n} (1 - q^{-j}) exactly; f_q(0) = 1."""
    _check_n(n)
    return _f_q_cached(as_prime_power(q).q, n)


@lru_cache(maxsize=4096)
def _f_q_cached(q: int, n: int) -> Fraction:
    if n == 0:
        return Fraction(1)
    return _f_q_cached(q, n - 1) * Fraction(q**n - 1, q**n)


def gl_order(q: QLike, n: int) -> int:
    """Return |GL_n(F_q)| = q^{n^2} f_q(n).

    Raises:
        InconsistencyError: If the product is not integral.
    """
    _check_n(n)
    qq = as_prime_power(q).q
    value = qq ** (n * n) * f_q(qq, n)
    if value.denominator != 1:
        raise InconsistencyError(f"q^(n^2) f_q(n) is not integral for q={qq}, n={n}: {value}.")
    return value.numerator


@dataclass(frozen=True)
class Partition:
    """An integer partition of n in frequency form.

    freq[k - 1] is b_k, the number of parts equal to k; len(freq) == n.
    """

    n: int
    freq: tuple[int, ...]

    def __post_init__(self):
        if len(self.freq) != self.n or any(b < 0 for b in self.freq):
            raise UsageError(f"Invalid frequency vector {self.freq} for n={self.n}.")
        if sum(k * b for k, b in enumerate(self.freq, start=1)) != self.n:
            raise UsageError(f"Frequencies {self.freq} do not sum to {self.n}.")

    @classmethod
    def from_parts(cls, parts) -> "Partition":
        n = sum(parts)
        freq = [0] * n
        for part in parts:
            freq[part - 1] += 1
        return cls(n, tuple(freq))

    @property
    def parts(self) -> tuple[int, ...]:
        """Parts in non-increasing order."""
        return tuple(k for k in range(self.n, 0, -1) for _ in range(self.freq[k - 1]))

    @property
    def num_parts(self) -> int:
        return sum(self.freq)

    def nonzero(self) -> Iterator[tuple[int, int]]:
        """Yield (k, b_k) for the part sizes that occur."""
        for k, b in enumerate(self.freq, start=1):
            if b:
                yield k, b


def partitions(n: int) -> Iterator[Partition]:
    """Yield every partition of n exactly once.

    Order: part lists compared lexicographically, decreasing, so the largest
    part never increases along the stream (n=4: 4, 31, 22, 211, 1111).
    n = 0 yields the single empty partition.
    """
    _check_n(n)
    for parts in _descending_parts(n, n):
        freq = [0] * n
        for part in parts:
            freq[part - 1] += 1
        yield Partition(n, tuple(freq))


def _descending_parts(n: int, max_part: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in _descending_parts(n - k, k):
            yield (k,) + rest


def partition_count(n: int) -> int:
    """Number of partitions of n by Euler's pentagonal-number recurrence."""
    _check_n(n)
    counts = [1] + [0] * n
    for m in range(1, n + 1):
        total, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * counts[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * counts[m - g2]
            k += 1
        counts[m] = total
    return counts[n]
