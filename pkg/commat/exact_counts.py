"""Exact counts of commuting pairs, nilpotent matrices and commuting nilpotent pairs.

Counts are returned both raw and normalized by |GL_n(F_q)|, because the generating
functions are power series in the normalized values:

    sum_n Q_q(n) / |GL_n| w^n                    = prod_{l>=1, j>=0} 1 / (1 - q^{1-j} w^l)
    sum_n |Nilp_n| / |GL_n| w^n                  = prod_{j>=1} 1 / (1 - q^{-j} w)
    sum_n #{commuting nilpotent pairs} / |GL_n| w^n = prod_{l>=1, j>=0} 1 / (1 - q^{-1-j} w^l)
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import islice

from .arith import PrimePower, QLike, as_prime_power, f_q, gl_order, partitions
from .errors import InconsistencyError, UsageError
from .run_config import run_config

logger = logging.getLogger(__name__)

# Partitions handed to one worker at a time when a sum runs in parallel.
PARTITION_CHUNK = 2000


@dataclass(frozen=True)
class CountResult:
    """An exact count together with its value normalized by |GL_n(F_q)|."""

    q: PrimePower
    n: int
    value: int
    normalized: Fraction

    def __post_init__(self):
        if self.value < 0:
            raise InconsistencyError(f"Negative count {self.value} for q={self.q.q}, n={self.n}.")
        if self.normalized * gl_order(self.q, self.n) != self.value:
            raise InconsistencyError(
                f"Count {self.value} does not equal {self.normalized} * |GL_{self.n}|."
            )


def _count_from_normalized(q: PrimePower, n: int, normalized: Fraction, what: str) -> CountResult:
    value = normalized * gl_order(q, n)
    if value.denominator != 1:
        raise InconsistencyError(
            f"{what} for q={q.q}, n={n} is not integral: |GL_n| * {normalized} = {value}."
        )
    return CountResult(q=q, n=n, value=value.numerator, normalized=normalized)


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 0:
        raise UsageError(f"n must be a non-negative integer, got {n!r}.")


# --- Partition sums ---


def _partition_chunk_sum(q: int, sign: int, freqs: list[tuple[int, ...]]) -> Fraction:
    """Sum q^{sign * sum b_k} / prod f_q(b_k) over a chunk of frequency vectors."""
    total = Fraction(0)
    for freq in freqs:
        num_parts = 0
        denominator = Fraction(1)
        for b in freq:
            if b:
                num_parts += b
                denominator *= f_q(q, b)
        total += Fraction(q) ** (sign * num_parts) / denominator
    return total


def _partition_sum(q: PrimePower, n: int, sign: int, workers: int | None = None) -> Fraction:
    """Sum over all partitions of n; terms are independent so chunks reduce in any order."""
    workers = workers or run_config.workers
    stream = (partition.freq for partition in partitions(n))
    if workers <= 1:
        return _partition_chunk_sum(q.q, sign, list(stream))

    chunks = []
    while chunk := list(islice(stream, PARTITION_CHUNK)):
        chunks.append(chunk)
    logger.debug("Partition sum n=%d over %d chunks with %d workers", n, len(chunks), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        partials = pool.map(_partition_chunk_sum, [q.q] * len(chunks), [sign] * len(chunks), chunks)
        return sum(partials, Fraction(0))


# --- Commuting pairs ---


def commuting_pairs(q: QLike, n: int, workers: int | None = None) -> CountResult:
    """Q_q(n) = |GL_n| * sum_{lambda |- n} q^{sum b_k} / prod_k f_q(b_k).

    Raises:
        InconsistencyError: If the partition sum times |GL_n| is not an integer.
    """
    _check_n(n)
    q = as_prime_power(q)
    normalized = _partition_sum(q, n, sign=1, workers=workers)
    return _count_from_normalized(q, n, normalized, "Commuting pair count")


def _euler_factor(q: int, ell: int, n_max: int) -> list[Fraction]:
    """prod_{j>=0} 1/(1 - q^{1-j} w^ell) = sum_k q^k w^{ell k} / f_q(k), truncated at w^n_max."""
    coeffs = [Fraction(0)] * (n_max + 1)
    for k in range(n_max // ell + 1):
        coeffs[ell * k] = Fraction(q**k) / f_q(q, k)
    return coeffs


def _mul_truncated(a: list[Fraction], b: list[Fraction], n_max: int) -> list[Fraction]:
    result = [Fraction(0)] * (n_max + 1)
    b_support = [(i, c) for i, c in enumerate(b) if c]
    for i, a_i in enumerate(a):
        if not a_i:
            continue
        for j, b_j in b_support:
            if i + j > n_max:
                break
            result[i + j] += a_i * b_j
    return result


@lru_cache(maxsize=32)
def _commuting_series(q: int, n_max: int) -> tuple[Fraction, ...]:
    series = [Fraction(1)] + [Fraction(0)] * n_max
    for ell in range(1, n_max + 1):
        series = _mul_truncated(series, _euler_factor(q, ell, n_max), n_max)
    return tuple(series)


def commuting_series_coeffs(q: QLike, n_max: int) -> tuple[Fraction, ...]:
    """Coefficients of w^0 .. w^n_max of prod_{l>=1, j>=0} 1/(1 - q^{1-j} w^l).

    Computed as a product of the per-l Euler factors, without the partition sum.
    Factors with l > n_max and terms with l*k > n_max cannot reach w^n_max, so
    the truncation is exact.
    """
    _check_n(n_max)
    return _commuting_series(as_prime_power(q).q, n_max)


def commuting_series_coeff(q: QLike, n: int) -> Fraction:
    """Coefficient of w^n in the commuting-pairs generating function."""
    return commuting_series_coeffs(q, n)[n]


def peeled_series_coeffs(q: QLike, n_max: int) -> tuple[Fraction, ...]:
    """Coefficients of (1 - q w) * sum_n Q_q(n)/|GL_n| w^n.

    Removing the simple pole at w = 1/q raises the radius of convergence to
    q^{-1/2}, so these coefficients grow like q^{n/2} rather than q^n.
    """
    qq = as_prime_power(q).q
    coeffs = commuting_series_coeffs(qq, n_max)
    return tuple(c - (qq * coeffs[i - 1] if i else 0) for i, c in enumerate(coeffs))


def q_plane_ratio(q: QLike, n: int) -> Fraction:
    """Exact Q_q(n) / q^{n^2 + n}; tends to prod_{j>=1} (1 - q^{-j})^{-j}."""
    q = as_prime_power(q)
    return Fraction(commuting_pairs(q, n).value, q.q ** (n * n + n))


# --- Nilpotent matrices ---


def nilpotent_series_coeff(q: QLike, n: int) -> Fraction:
    """|Nilp_n(F_q)| / |GL_n(F_q)| = q^{-n} / f_q(n)."""
    _check_n(n)
    qq = as_prime_power(q).q
    return Fraction(1, qq**n) / f_q(qq, n)


def nilpotent_count(q: QLike, n: int) -> CountResult:
    """|Nilp_n(F_q)|, which equals q^{n^2 - n}."""
    q = as_prime_power(q)
    return _count_from_normalized(q, n, nilpotent_series_coeff(q, n), "Nilpotent count")


def nilpotent_commuting_series_coeff(q: QLike, n: int, workers: int | None = None) -> Fraction:
    """Coefficient of w^n in prod_{l>=1, j>=0} 1/(1 - q^{-1-j} w^l).

    Each l-factor expands by Euler's identity to sum_k q^{-k} w^{l k} / f_q(k), so the
    coefficient is sum_{lambda |- n} q^{-sum b_k} / prod_k f_q(b_k).
    """
    _check_n(n)
    return _partition_sum(as_prime_power(q), n, sign=-1, workers=workers)


def nilpotent_commuting_pairs(q: QLike, n: int, workers: int | None = None) -> CountResult:
    """Number of ordered pairs of commuting nilpotent n x n matrices over F_q."""
    q = as_prime_power(q)
    normalized = nilpotent_commuting_series_coeff(q, n, workers=workers)
    return _count_from_normalized(q, n, normalized, "Commuting nilpotent pair count")
