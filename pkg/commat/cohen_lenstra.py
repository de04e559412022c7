"""The convergent series for |Nilp_n(F_q)| / |GL_n(F_q)|.

Expanding 1 / prod_{j>=1} (1 - q^{-j} w) in partial fractions over its simple zeros
w = q^m gives, for every n >= 0,

    |Nilp_n| / |GL_n| = sum_{m>=1} Z_m(q^m) q^{-nm},
    Z_m(w) = prod_{j>=1, j!=m} (1 - q^{-j} w)^{-1}.

Truncating the outer sum at M terms and each product at N factors makes every term
an exact rational; the sum is kept exact and rounded once at the end.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

from .analytic import GUARD_DIGITS, CertifiedReal, make_context
from .arith import PrimePower, QLike, as_prime_power
from .errors import PoleProximityError, UsageError
from .exact_counts import nilpotent_series_coeff
from .run_config import run_config

logger = logging.getLogger(__name__)

# Guard digits for rounding the exact sum; the n = 0 row cancels heavily.
SUM_GUARD = 20
DEFAULT_SCHEDULE = ((1, 10), (2, 20), (5, 50), (10, 100))


@dataclass(frozen=True)
class CLSeriesParams:
    """Truncation of the series: M outer terms, N factors in each product."""

    q: PrimePower
    n: int
    M: int
    N: int
    digits: int

    def __post_init__(self):
        object.__setattr__(self, "q", as_prime_power(self.q))
        if not isinstance(self.n, int) or self.n < 0:
            raise UsageError(f"n must be a non-negative integer, got {self.n!r}.")
        if self.M < 1:
            raise UsageError(f"The outer truncation M must be at least 1, got {self.M}.")
        if self.N < self.M:
            raise UsageError(
                f"The inner truncation N={self.N} must be at least M={self.M}, so every "
                "product keeps the factors j <= M."
            )
        if self.digits < 1:
            raise UsageError(f"digits must be positive, got {self.digits}.")

    @classmethod
    def from_settings(cls, q: QLike, n: int, M=None, N=None, digits=None) -> "CLSeriesParams":
        """Fill unset truncations and precision from the run configuration."""
        return cls(
            as_prime_power(q),
            n,
            M or run_config.cl_outer,
            N or run_config.cl_inner,
            digits or run_config.digits,
        )


def z_m_truncated(q: QLike, m: int, N: int, w) -> Fraction:
    """prod_{1 <= j <= N, j != m} (1 - q^{-j} w)^{-1}, exactly, for rational w.

    Raises:
        PoleProximityError: If a retained factor vanishes.
    """
    qq = as_prime_power(q).q
    if not 1 <= m <= N:
        raise UsageError(f"Need 1 <= m <= N, got m={m}, N={N}.")
    w = Fraction(w)
    denominator = Fraction(1)
    for j in range(1, N + 1):
        if j == m:
            continue
        factor = 1 - w / qq**j
        if factor == 0:
            raise PoleProximityError(j, 0, 0)
        denominator *= factor
    return 1 / denominator


def nilp_ratio_terms(params: CLSeriesParams) -> tuple[Fraction, ...]:
    """The exact terms Z_m(q^m) q^{-nm} for m = 1 .. M."""
    q = params.q.q
    return tuple(
        z_m_truncated(q, m, params.N, q**m) / q ** (params.n * m) for m in range(1, params.M + 1)
    )


def nilp_ratio_exact(params: CLSeriesParams) -> Fraction:
    """The truncated series as an exact rational."""
    return sum(nilp_ratio_terms(params), Fraction(0))


def nilp_ratio_series(params: CLSeriesParams) -> CertifiedReal:
    """The truncated series rounded to params.digits; the error is rounding only."""
    ctx = make_context(params.digits + SUM_GUARD + GUARD_DIGITS)
    exact = nilp_ratio_exact(params)
    value = ctx.mpf(exact.numerator) / exact.denominator
    logger.debug(
        "Cohen-Lenstra series q=%d n=%d (M=%d, N=%d): %s",
        params.q.q, params.n, params.M, params.N, ctx.nstr(value, params.digits),
    )
    return CertifiedReal(value, abs(value) * ctx.eps, params.digits)


@dataclass(frozen=True)
class ConvergencePoint:
    M: int
    N: int
    value: CertifiedReal
    abs_diff: Fraction


def convergence_report(
    q: QLike, n: int, schedule=DEFAULT_SCHEDULE, digits: int | None = None
) -> list[ConvergencePoint]:
    """|series - q^{-n}/f_q(n)| for each (M, N) in schedule.

    The series converges; the rate is observed here rather than asserted.
    """
    exact = nilpotent_series_coeff(q, n)
    report = []
    for M, N in schedule:
        params = CLSeriesParams.from_settings(q, n, M, N, digits)
        report.append(
            ConvergencePoint(M, N, nilp_ratio_series(params), abs(nilp_ratio_exact(params) - exact))
        )
    return report
