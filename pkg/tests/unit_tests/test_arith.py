from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from commat.arith import (
    Partition,
    PrimePower,
    as_prime_power,
    f_q,
    gl_order,
    is_prime,
    partition_count,
    partitions,
)
from commat.errors import UsageError


def test_is_prime_small_values():
    """is_prime agrees with a hand list below 50."""
    primes = [n for n in range(50) if is_prime(n)]
    assert primes == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


def test_is_prime_strong_pseudoprime():
    """3215031751 fools bases 2, 3, 5 and 7 but not the full witness set."""
    assert not is_prime(3215031751)
    assert is_prime(2**61 - 1)


def test_prime_power_from_q():
    """from_q splits q into p^r."""
    q = PrimePower.from_q(9)
    assert (q.p, q.r, q.q) == (3, 2, 9)
    assert PrimePower.from_pr(2, 3) == PrimePower.from_q(8)


@pytest.mark.parametrize("q", [1, 6, 12, 0, -4])
def test_prime_power_rejects_non_prime_powers(q):
    """Non prime powers raise UsageError."""
    with pytest.raises(UsageError):
        PrimePower.from_q(q)


def test_prime_power_rejects_composite_p():
    """p must itself be prime."""
    with pytest.raises(UsageError, match="not prime"):
        PrimePower(4, 2)


def test_as_prime_power_passes_through():
    """as_prime_power accepts both forms."""
    q = PrimePower(5)
    assert as_prime_power(q) is q
    assert as_prime_power(5) == q


def test_f_q_values():
    """f_2(3) = (1/2)(3/4)(7/8)."""
    assert f_q(2, 0) == 1
    assert f_q(2, 3) == Fraction(21, 64)
    assert f_q(3, 1) == Fraction(2, 3)


def test_gl_order_values():
    """|GL_2(F_2)| = 6 and |GL_2(F_3)| = 48."""
    assert gl_order(2, 0) == 1
    assert gl_order(2, 2) == 6
    assert gl_order(3, 2) == 48
    assert gl_order(4, 1) == 3


@given(st.sampled_from([2, 3, 4, 5]), st.integers(min_value=0, max_value=30))
def test_f_q_clears_denominators(q, n):
    """f_q(n) times q^1 q^2 ... q^n is an integer."""
    cleared = f_q(q, n) * q ** (n * (n + 1) // 2)
    assert cleared.denominator == 1


@given(st.sampled_from([2, 3, 4, 5]), st.integers(min_value=0, max_value=10))
def test_gl_order_divisible_by_unipotent_order(q, n):
    """|GL_n(F_q)| is divisible by q^(n(n-1)/2)."""
    assert gl_order(q, n) % q ** (n * (n - 1) // 2) == 0


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_f_q_strictly_decreasing_in_unit_interval(q):
    """0 < f_q(n) < 1 for n >= 1, and each factor lowers it."""
    values = [f_q(q, n) for n in range(31)]
    assert all(0 < value < 1 for value in values[1:])
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


def test_negative_n_is_rejected():
    """n < 0 raises UsageError."""
    with pytest.raises(UsageError):
        f_q(2, -1)


def test_partitions_order():
    """Partitions of 4 come in decreasing lexicographic order."""
    assert [p.parts for p in partitions(4)] == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_partitions_of_zero():
    """n = 0 has exactly the empty partition."""
    assert [p.freq for p in partitions(0)] == [()]


def test_partition_frequency_form():
    """freq[k-1] counts the parts equal to k."""
    partition = Partition.from_parts([3, 1, 1])
    assert partition.freq == (2, 0, 1, 0, 0)
    assert partition.num_parts == 3
    assert list(partition.nonzero()) == [(1, 2), (3, 1)]


def test_partition_validation():
    """Frequencies must sum to n."""
    with pytest.raises(UsageError):
        Partition(3, (1, 0, 1))


@given(st.integers(min_value=0, max_value=18))
def test_partitions_are_distinct(n):
    """No partition is listed twice."""
    listed = list(partitions(n))
    assert len({p.freq for p in listed}) == len(listed)


def test_partition_count_matches_enumeration():
    """The pentagonal recurrence counts the enumerated partitions for every n up to 50."""
    for n in range(51):
        assert sum(1 for _ in partitions(n)) == partition_count(n), n


def test_partition_count_known_values():
    """p(35) = 14883 and p(100) = 190569292."""
    assert partition_count(35) == 14883
    assert partition_count(100) == 190569292
