"""Certified arbitrary-precision evaluation of the infinite products

    P_{m,x}(w) = prod_{l>=1, l!=m} 1 / (1 - x w^l)
    F_q(w)     = prod_{l>=1, j>=1} 1 / (1 - q^{1-j} w^l)

and of the constants prod_j (1 - q^{-j})^{-j}, prod_j (1 - q^{-j}), zeta(2), zeta(3).

Every evaluation runs in a private mpmath context, so concurrent calls never share
precision state. A result carries a bound covering both the discarded tail of the
product and the rounding of the retained factors.

Truncation: factors whose term c*w^l is discarded contribute at most 2*|c*w^l| to
|log(product)| as long as each discarded term is below 1/2. Products are multiplied
directly (no complex logarithms) with guard digits, and an evaluation is refused
when some retained factor |1 - c*w^l| is below 10^(-digits/2).
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import MPContext

from .arith import QLike, as_prime_power
from .errors import PoleProximityError, PrecisionError, UsageError

logger = logging.getLogger(__name__)

GUARD_DIGITS = 10
# Discarded tails are bounded by 10^-(digits + TAIL_DIGITS).
TAIL_DIGITS = 10
# Extra guard digits tried, in order, when the first pass cannot certify.
RETRY_GUARDS = (0, 20, 60)


def make_context(digits: int) -> MPContext:
    """A private mpmath context working at the given number of decimal digits."""
    ctx = MPContext()
    ctx.dps = digits
    return ctx


def _check_digits(digits: int) -> None:
    if not isinstance(digits, int) or digits < 1:
        raise UsageError(f"digits must be a positive integer, got {digits!r}.")


def convert(ctx: MPContext, value):
    """Bring a number (int, Fraction, float, str, mpmath value, BigComplex) into ctx."""
    if isinstance(value, BigComplex):
        return ctx.mpc(value.real, value.imag)
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    return ctx.convert(value)


def unit_root(ctx: MPContext, turns: Fraction):
    """exp(2 pi i * turns), exact for quarter turns."""
    turns = Fraction(turns) % 1
    exact = {
        Fraction(0): (1, 0),
        Fraction(1, 4): (0, 1),
        Fraction(1, 2): (-1, 0),
        Fraction(3, 4): (0, -1),
    }
    if turns in exact:
        re, im = exact[turns]
        return ctx.mpc(re, im)
    angle = 2 * ctx.mpf(turns.numerator) / turns.denominator
    return ctx.mpc(ctx.cospi(angle), ctx.sinpi(angle))


@dataclass(frozen=True)
class BigComplex:
    """A complex value held at a stated working precision (decimal digits)."""

    real: object
    imag: object
    digits: int

    @classmethod
    def from_value(cls, value, digits: int) -> "BigComplex":
        ctx = make_context(digits + GUARD_DIGITS)
        z = ctx.mpc(convert(ctx, value))
        return cls(z.real, z.imag, digits)

    @classmethod
    def from_polar(cls, radius, turns: Fraction, digits: int) -> "BigComplex":
        """radius * exp(2 pi i * turns)."""
        ctx = make_context(digits + GUARD_DIGITS)
        z = convert(ctx, radius) * unit_root(ctx, turns)
        return cls(z.real, z.imag, digits)

    def to_mpc(self, ctx: MPContext):
        return ctx.mpc(self.real, self.imag)

    def conjugate(self) -> "BigComplex":
        return BigComplex(self.real, -self.imag, self.digits)

    def __abs__(self):
        ctx = make_context(self.digits + GUARD_DIGITS)
        return ctx.hypot(self.real, self.imag)

    def __complex__(self) -> complex:
        return complex(float(self.real), float(self.imag))


def as_big_complex(value, digits: int) -> BigComplex:
    if isinstance(value, BigComplex):
        return value
    return BigComplex.from_value(value, digits)


@dataclass(frozen=True)
class EvalResult:
    """A certified complex value: the true value lies within certified_abs_error of value."""

    value: BigComplex
    certified_abs_error: object
    factors: int = 0

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def __abs__(self):
        return abs(self.value)


@dataclass(frozen=True)
class CertifiedReal:
    """A real value with a rigorous absolute error bound."""

    value: object
    certified_abs_error: object
    digits: int

    def __float__(self) -> float:
        return float(self.value)

    def interval(self) -> tuple:
        return self.value - self.certified_abs_error, self.value + self.certified_abs_error


# --- Product evaluation ---


def _first_small_index(ctx, coefficient, r, bound):
    """Smallest L >= 0 with coefficient * r^(L+1) / (1 - r) <= bound."""
    if r == 0:
        return 0
    ratio = bound * (1 - r) / coefficient
    if ratio >= 1:
        return 0
    index = int(ctx.ceil(ctx.log(ratio) / ctx.log(r))) - 1
    index = max(index, 0)
    while coefficient * r ** (index + 1) / (1 - r) > bound:
        index += 1
    return index


def _inverse_product(ctx, terms, threshold):
    """prod 1/(1 - t) over (ell, t, depth) triples.

    Returns the product, a bound on its relative rounding error and the factor
    count. depth is the number of roundings that produced t.

    Raises:
        PoleProximityError: If some |1 - t| is below threshold.
    """
    eps = ctx.eps
    denominator = ctx.mpc(1)
    rounding = ctx.mpf(0)
    count = 0
    for ell, t, depth in terms:
        factor = 1 - t
        distance = abs(factor)
        if distance < threshold:
            raise PoleProximityError(ell, distance, threshold)
        denominator *= factor
        rounding += (depth + 4) * eps * (1 + abs(t)) / distance
        count += 1
    return 1 / denominator, rounding + 4 * eps, count


def _certify(ctx, value, rounding, tail, digits: int):
    """Absolute error bound from relative rounding and log-tail bounds."""
    error = abs(value) * ((1 + rounding) * ctx.exp(tail) - 1)
    if error > abs(value) * ctx.mpf(10) ** (-digits):
        return None
    return error


def _evaluate(digits: int, label: str, compute):
    """Run compute(ctx, digits) with growing guard digits until the result certifies."""
    _check_digits(digits)
    for extra in RETRY_GUARDS:
        ctx = make_context(digits + GUARD_DIGITS + extra)
        value, rounding, tail, count = compute(ctx)
        error = _certify(ctx, value, rounding, tail, digits)
        if error is not None:
            logger.debug("%s: %d factors at %d digits", label, count, ctx.dps)
            return EvalResult(BigComplex(value.real, value.imag, digits), error, count)
    raise PrecisionError(f"{label} could not be certified to {digits} digits.")


def _check_disk(w: BigComplex) -> None:
    if abs(w) >= 1:
        raise UsageError(f"The products are only evaluated for |w| < 1; got |w| = {abs(w)}.")


def _pole_threshold(ctx, digits: int):
    return ctx.mpf(10) ** (-ctx.mpf(digits) / 2)


def _p_product(ctx, x, w, exclude: frozenset, digits: int):
    """prod_{l >= 1, l not in exclude} 1/(1 - x w^l) with its log-tail bound."""
    r = abs(w)
    tail_bound = ctx.mpf(10) ** (-(digits + TAIL_DIGITS))
    # each discarded term must stay below 1/2 as well
    last = max(
        _first_small_index(ctx, 2 * x, r, tail_bound),
        _first_small_index(ctx, 2 * x * (1 - r), r, ctx.mpf(1) / 2),
    )

    def terms():
        power = ctx.mpc(1)
        for ell in range(1, last + 1):
            power *= w
            if ell not in exclude:
                yield ell, x * power, ell + 1

    value, rounding, count = _inverse_product(ctx, terms(), _pole_threshold(ctx, digits))
    tail = 2 * x * r ** (last + 1) / (1 - r) if r else ctx.mpf(0)
    return value, rounding, tail, count


def _f_product(ctx, q: int, w, digits: int):
    """prod_{l, j >= 1} 1/(1 - q^{1-j} w^l) with its log-tail bound."""
    r = abs(w)
    qf = ctx.mpf(q)
    column = qf / (qf - 1)  # sum_{j>=1} q^{1-j}
    tail_bound = ctx.mpf(10) ** (-(digits + TAIL_DIGITS))
    last = _first_small_index(ctx, 2 * column, r, tail_bound)
    inner_bound = tail_bound / (2 * max(last, 1))

    def inner_count(r_power):
        # smallest J with r^l * q^{-J} * q/(q-1) <= inner_bound
        excess = r_power * column / inner_bound
        if excess <= 1:
            return 0
        return int(ctx.ceil(ctx.log(excess) / ctx.log(qf)))

    inner_tail = ctx.mpf(0)
    plan = []
    r_power = ctx.mpf(1)
    for ell in range(1, last + 1):
        r_power *= r
        depth = inner_count(r_power)
        plan.append(depth)
        inner_tail += r_power * column / qf**depth

    def terms():
        power = ctx.mpc(1)
        inv_q = 1 / qf
        for ell, depth in enumerate(plan, start=1):
            power *= w
            t = power
            for j in range(1, depth + 1):
                yield ell, t, ell + j
                t = t * inv_q

    value, rounding, count = _inverse_product(ctx, terms(), _pole_threshold(ctx, digits))
    outer_tail = column * r ** (last + 1) / (1 - r) if r else ctx.mpf(0)
    return value, rounding, 2 * (outer_tail + inner_tail), count


def eval_P(m: int, x, w, digits: int) -> EvalResult:
    """P_{m,x}(w) = prod_{l >= 1, l != m} (1 - x w^l)^{-1}; m = 0 keeps every factor.

    Raises:
        UsageError: If |w| >= 1, x <= 0 or m < 0.
        PoleProximityError: If a retained factor is within 10^(-digits/2) of zero.
    """
    if not isinstance(m, int) or m < 0:
        raise UsageError(f"m must be a non-negative integer, got {m!r}.")
    w = as_big_complex(w, digits)
    _check_disk(w)

    def compute(ctx):
        xv = convert(ctx, x)
        if not xv > 0:
            raise UsageError(f"x must be positive, got {x!r}.")
        return _p_product(ctx, xv, w.to_mpc(ctx), frozenset({m}), digits)

    return _evaluate(digits, f"P_{{{m},{x}}}", compute)


def eval_F(q: QLike, w, digits: int) -> EvalResult:
    """F_q(w) = prod_{l >= 1, j >= 1} (1 - q^{1-j} w^l)^{-1}.

    Raises:
        PoleProximityError: If a retained factor is within 10^(-digits/2) of zero.
    """
    qq = as_prime_power(q).q
    w = as_big_complex(w, digits)
    _check_disk(w)
    return _evaluate(digits, f"F_{qq}", lambda ctx: _f_product(ctx, qq, w.to_mpc(ctx), digits))


def peeled_product(q: QLike, m_max: int, w, digits: int) -> EvalResult:
    """P_{0,q}(w) F_q(w) prod_{m <= m_max} (1 - q w^m): the generating function with its
    first m_max pole rings removed, holomorphic for |w| < q^{-1/(m_max + 1)}."""
    qq = as_prime_power(q).q
    w = as_big_complex(w, digits)
    _check_disk(w)

    def compute(ctx):
        wv = w.to_mpc(ctx)
        exclude = frozenset(range(1, m_max + 1))
        p_value, p_round, p_tail, p_count = _p_product(ctx, ctx.mpf(qq), wv, exclude, digits)
        f_value, f_round, f_tail, f_count = _f_product(ctx, qq, wv, digits)
        return p_value * f_value, p_round + f_round, p_tail + f_tail, p_count + f_count

    return _evaluate(digits, f"peeled product q={qq}, m<={m_max}", compute)


# --- Constants ---


def _real_power_product(q: int, digits: int, exponent, label: str) -> EvalResult:
    """prod_{j >= 1} (1 - q^{-j})^{exponent(j)} for positive or negative integer exponents."""

    def compute(ctx):
        qf = ctx.mpf(q)
        tail_bound = ctx.mpf(10) ** (-(digits + TAIL_DIGITS))
        value = ctx.mpf(1)
        rounding = ctx.mpf(0)
        j = 0
        term = ctx.mpf(1)
        while True:
            j += 1
            term /= qf
            factor = 1 - term
            value *= factor ** exponent(j)
            rounding += (j + abs(exponent(j)) + 4) * ctx.eps / factor
            # sum_{i > j} 2 |e(i)| q^{-i}, bounded for |e(i)| <= i by a geometric series
            weight = max(abs(exponent(j + 1)), 1)
            tail = 2 * (weight + 1) * term / qf / (1 - 1 / qf) ** 2
            if tail <= tail_bound and term / qf < ctx.mpf(1) / 2:
                return ctx.mpc(value), rounding, tail, j

    return _evaluate(digits, label, compute)


def _real_result(result: EvalResult, digits: int) -> CertifiedReal:
    return CertifiedReal(result.real, result.certified_abs_error, digits)


def plane_constant(q: QLike, digits: int) -> CertifiedReal:
    """lim Q_q(n) / q^{n^2+n} = prod_{j >= 1} (1 - q^{-j})^{-j}."""
    qq = as_prime_power(q).q
    result = _real_power_product(qq, digits, lambda j: -j, f"plane constant q={qq}")
    return _real_result(result, digits)


def euler_f_infinity(q: QLike, digits: int) -> CertifiedReal:
    """f_q(infinity) = prod_{j >= 1} (1 - q^{-j})."""
    qq = as_prime_power(q).q
    result = _real_power_product(qq, digits, lambda j: 1, f"f_{qq}(infinity)")
    return _real_result(result, digits)


def leading_coefficient_product(q: QLike, digits: int) -> CertifiedReal:
    """prod_{j >= 1} (1 - q^{-j})^{-(j+1)}, the closed form of C_{1,q}."""
    qq = as_prime_power(q).q
    result = _real_power_product(qq, digits, lambda j: -(j + 1), f"C_1 product q={qq}")
    return _real_result(result, digits)


def zeta_value(s: int, digits: int) -> CertifiedReal:
    """zeta(2) or zeta(3) from central binomial series with certified tails.

    zeta(2) = 3 sum_{k>=1} 1 / (k^2 C(2k, k))
    zeta(3) = 5/2 sum_{k>=1} (-1)^(k+1) / (k^3 C(2k, k))
    Consecutive terms shrink by a factor below 1/4.
    """
    _check_digits(digits)
    if s not in (2, 3):
        raise UsageError(f"zeta_value supports s = 2 or 3, got {s!r}.")
    ctx = make_context(digits + GUARD_DIGITS)
    scale = ctx.mpf(3) if s == 2 else ctx.mpf(5) / 2
    bound = ctx.mpf(10) ** (-(digits + TAIL_DIGITS))
    total = ctx.mpf(0)
    k = 0
    while True:
        k += 1
        term = ctx.mpf(1) / (k**s * math.comb(2 * k, k))
        total += term if (s == 2 or k % 2) else -term
        next_term = ctx.mpf(1) / ((k + 1) ** s * math.comb(2 * k + 2, k + 1))
        # positive series: geometric tail with ratio 1/4; alternating: first omitted term
        tail = next_term * ctx.mpf(4) / 3 if s == 2 else next_term
        if scale * tail < bound:
            break
    value = scale * total
    error = scale * tail + (k + 4) * ctx.eps * abs(value)
    return CertifiedReal(value, error, digits)
