"""Asymptotic expansion of the normalized commuting-pair counts.

With w_j = zeta_m^{-j} q^{-1/m} and c_{m,j} = P_{m,q}(w_j) F_q(w_j),

    C_{m,q}(n) = (1/m) sum_{j=0}^{m-1} c_{m,j} zeta_m^{nj}
    Q_q(n) / |GL_n(F_q)| = sum_{m=1}^{N} C_{m,q}(n) q^{n/m} + O(q^{n/(N+1)})

C_{m,q}(n) only depends on n mod m. Residues are stored as n mod m and displayed
with residue 0 shown as m.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .analytic import (
    GUARD_DIGITS,
    BigComplex,
    CertifiedReal,
    EvalResult,
    convert,
    eval_F,
    eval_P,
    make_context,
    plane_constant,
    unit_root,
    zeta_value,
)
from .arith import PrimePower, QLike, as_prime_power
from .errors import InconsistencyError, UsageError
from .exact_counts import commuting_series_coeffs

logger = logging.getLogger(__name__)

# Digits added to inner product evaluations on top of the requested precision.
INNER_DIGITS = 5


def _check_m(m: int) -> None:
    if not isinstance(m, int) or m < 1:
        raise UsageError(f"m must be a positive integer, got {m!r}.")


def _check_n(n: int, name: str = "n") -> None:
    if not isinstance(n, int) or n < 0:
        raise UsageError(f"{name} must be a non-negative integer, got {n!r}.")


def display_residue(n: int, m: int) -> int:
    """n mod m in 1..m, the indexing used for printed coefficient tables."""
    return n % m or m


def _pole_point(q: int, m: int, j: int, digits: int) -> BigComplex:
    """w_j = zeta_m^{-j} q^{-1/m}."""
    ctx = make_context(digits + GUARD_DIGITS)
    radius = ctx.mpf(q) ** (-ctx.mpf(1) / m)
    return BigComplex.from_polar(radius, Fraction(-j, m), digits)


def _times(ctx, a: EvalResult, b: EvalResult):
    """Product of two certified values: (value, error)."""
    av, bv = a.value.to_mpc(ctx), b.value.to_mpc(ctx)
    ea, eb = a.certified_abs_error, b.certified_abs_error
    return av * bv, abs(av) * eb + abs(bv) * ea + ea * eb


@lru_cache(maxsize=128)
def pole_terms(q: int, m: int, digits: int) -> tuple[tuple, ...]:
    """The m values c_{m,j} as (real, imag, error) triples, j = 0 .. m-1."""
    _check_m(m)
    inner = digits + INNER_DIGITS
    ctx = make_context(inner + GUARD_DIGITS)
    terms = []
    for j in range(m):
        w = _pole_point(q, m, j, inner + GUARD_DIGITS)
        value, error = _times(ctx, eval_P(m, q, w, inner), eval_F(q, w, inner))
        terms.append((value.real, value.imag, error))
        logger.debug("c_{%d,%d} for q=%d: %s", m, j, q, ctx.nstr(value, 12))
    return tuple(terms)


def coeff_C(q: QLike, m: int, n: int, digits: int) -> CertifiedReal:
    """C_{m,q}(n), certified and verified to be real.

    Raises:
        InconsistencyError: If the imaginary part exceeds the certified error.
        PoleProximityError: Propagated from the product evaluations.
    """
    _check_m(m)
    qq = as_prime_power(q).q
    ctx = make_context(digits + INNER_DIGITS + GUARD_DIGITS)
    total = ctx.mpc(0)
    error = ctx.mpf(0)
    for j, (re, im, err) in enumerate(pole_terms(qq, m, digits)):
        total += ctx.mpc(re, im) * unit_root(ctx, Fraction(n * j, m))
        error += err
    total /= m
    error /= m
    # the evaluation points themselves are rounded at the inner precision
    error += abs(total) * ctx.mpf(10) ** (-(digits + INNER_DIGITS))
    if abs(total.imag) > error:
        raise InconsistencyError(
            f"C_{{{m},{qq}}}({n}) has imaginary part {ctx.nstr(total.imag, 5)} above its "
            f"certified error {ctx.nstr(error, 5)}."
        )
    return CertifiedReal(total.real, error + abs(total.imag), digits)


@dataclass(frozen=True)
class CoefficientTable:
    """C_{m,q}(r) for m = 1 .. m_max and every residue r = n mod m."""

    q: PrimePower
    digits: int
    entries: dict = field(default_factory=dict)

    @property
    def m_max(self) -> int:
        return max((m for m, _ in self.entries), default=0)

    def get(self, m: int, n: int) -> CertifiedReal:
        try:
            return self.entries[(m, n % m)]
        except KeyError:
            raise UsageError(
                f"The table for q={self.q.q} stops at m={self.m_max}; asked for m={m}."
            )

    def rows(self):
        """(m, displayed residue, value) in table order."""
        for m in range(1, self.m_max + 1):
            for shown in range(1, m + 1):
                yield m, shown, self.entries[(m, shown % m)]


@lru_cache(maxsize=32)
def _coefficient_table(q: int, m_max: int, digits: int) -> CoefficientTable:
    entries = {
        (m, residue): coeff_C(q, m, residue, digits)
        for m in range(1, m_max + 1)
        for residue in range(m)
    }
    return CoefficientTable(as_prime_power(q), digits, entries)


def coefficient_table(q: QLike, m_max: int, digits: int) -> CoefficientTable:
    """Build (once) the read-only table of C_{m,q} for m <= m_max."""
    _check_m(m_max)
    return _coefficient_table(as_prime_power(q).q, m_max, digits)


def _expansion(ctx, q: int, n: int, N: int, digits: int):
    """sum_{m=1}^{N} C_{m,q}(n) q^{n/m} in ctx, with its error bound."""
    table = coefficient_table(q, N, digits) if N else None
    total = ctx.mpf(0)
    error = ctx.mpf(0)
    for m in range(1, N + 1):
        coefficient = table.get(m, n)
        scale = ctx.mpf(q) ** (ctx.mpf(n) / m)
        total += coefficient.value * scale
        error += coefficient.certified_abs_error * scale
    return total, error + abs(total) * ctx.eps * (2 * N + 2)


def expansion_eval(q: QLike, n: int, N: int, digits: int) -> CertifiedReal:
    """The truncated expansion sum_{m=1}^{N} C_{m,q}(n) q^{n/m}."""
    _check_n(n)
    _check_m(N)
    qq = as_prime_power(q).q
    ctx = make_context(digits + GUARD_DIGITS)
    total, error = _expansion(ctx, qq, n, N, digits)
    return CertifiedReal(total, error, digits)


def leading_term(q: QLike, n: int, digits: int) -> CertifiedReal:
    """q^{n^2+n} prod_{j>=1} (1 - q^{-j})^{-j}."""
    _check_n(n)
    qq = as_prime_power(q).q
    constant = plane_constant(qq, digits)
    scale = qq ** (n * n + n)
    return CertifiedReal(constant.value * scale, constant.certified_abs_error * scale, digits)


def _remainder_digits(q: int, n: int, digits: int) -> int:
    """Precision that survives cancelling the O(q^n) leading part."""
    return digits + math.ceil(n * math.log10(q)) + 5


def remainder(q: QLike, n: int, N: int, digits: int) -> CertifiedReal:
    """Q_q(n)/|GL_n| minus the expansion truncated at N (N = 0 leaves the coefficient)."""
    _check_n(n)
    _check_n(N, "N")
    qq = as_prime_power(q).q
    return _remainders(qq, [n], N, digits, commuting_series_coeffs(qq, n))[0]


def _remainders(q: int, ns, N: int, digits: int, coeffs) -> list[CertifiedReal]:
    work = _remainder_digits(q, max(ns), digits)
    ctx = make_context(work + GUARD_DIGITS)
    results = []
    for n in ns:
        exact = convert(ctx, coeffs[n])
        expansion, error = _expansion(ctx, q, n, N, work) if N else (ctx.mpf(0), ctx.mpf(0))
        results.append(CertifiedReal(exact - expansion, error + abs(exact) * ctx.eps, digits))
    return results


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of log_q |remainder(n)| against n."""

    q: int
    N: int
    slope: float
    points: tuple

    @property
    def expected(self) -> float:
        return 1 / (self.N + 1)


def decay_rate(q: QLike, N: int, n_lo: int, n_hi: int, digits: int) -> DecayFit:
    """Empirical growth rate of the remainder after peeling N pole rings.

    Poles at |w| = q^{-1/m} for m > N remain, so the rate should approach 1/(N+1).
    """
    _check_n(N, "N")
    if not 0 <= n_lo < n_hi:
        raise UsageError(f"The window [{n_lo}, {n_hi}] must satisfy 0 <= n_lo < n_hi.")
    qq = as_prime_power(q).q
    ns = list(range(n_lo, n_hi + 1))
    values = _remainders(qq, ns, N, digits, commuting_series_coeffs(qq, n_hi))
    points = []
    for n, rem in zip(ns, values):
        if rem.value == 0:
            continue
        points.append((n, float(math.log(abs(float(rem.value)), qq))))
    if len(points) < 2:
        raise UsageError(f"Too few nonzero remainders in [{n_lo}, {n_hi}] to fit a rate.")
    xs, ys = np.array(points).T
    slope, _ = np.polyfit(xs, ys, 1)
    logger.debug("Remainder slope for q=%d, N=%d over [%d, %d]: %.4f", qq, N, n_lo, n_hi, slope)
    return DecayFit(qq, N, float(slope), tuple(points))


# --- Bounds ---


def c_bound(q: QLike, m: int, digits: int) -> CertifiedReal:
    """|P_{m,q}(q^{-1/m}) F_q(q^{-1/m})|, the j = 0 term, bounding every |C_{m,q}(n)|."""
    _check_m(m)
    qq = as_prime_power(q).q
    re, im, error = pole_terms(qq, m, digits)[0]
    ctx = make_context(digits + INNER_DIGITS + GUARD_DIGITS)
    return CertifiedReal(abs(ctx.mpc(re, im)), error, digits)


@dataclass(frozen=True)
class MaxTermReport:
    """Which |c_{m,j}| is largest, and whether that is the real point j = 0."""

    q: int
    m: int
    index: int
    magnitudes: tuple

    @property
    def at_zero(self) -> bool:
        return self.index == 0


def max_term_index(q: QLike, m: int, digits: int) -> MaxTermReport:
    _check_m(m)
    qq = as_prime_power(q).q
    ctx = make_context(digits + GUARD_DIGITS)
    magnitudes = tuple(abs(ctx.mpc(re, im)) for re, im, _ in pole_terms(qq, m, digits))
    index = max(range(m), key=lambda j: magnitudes[j])
    return MaxTermReport(qq, m, index, magnitudes)


def prop_bound_diag(q: QLike, m: int, epsilon, digits: int) -> CertifiedReal:
    """exp((zeta(3) + epsilon) / (1 - q^{-1/m})^2).

    The bound on |C_{m,q}(n)| holds only up to an implicit constant, so this value is
    reported next to observed coefficients and never enforced.
    """
    _check_m(m)
    qq = as_prime_power(q).q
    ctx = make_context(digits + GUARD_DIGITS)
    eps_value = convert(ctx, epsilon)
    if not eps_value > 0:
        raise UsageError(f"epsilon must be positive, got {epsilon!r}.")
    zeta3 = zeta_value(3, digits + 5)
    gap = (1 - ctx.mpf(qq) ** (-ctx.mpf(1) / m)) ** 2
    value = ctx.exp((zeta3.value + eps_value) / gap)
    error = value * (ctx.exp(zeta3.certified_abs_error / gap) - 1) + value * ctx.eps * 8
    return CertifiedReal(value, error, digits)
