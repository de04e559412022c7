from fractions import Fraction

import mpmath
import pytest

from commat.analytic import leading_coefficient_product
from commat.arith import gl_order
from commat.asymptotics import (
    c_bound,
    coeff_C,
    coefficient_table,
    display_residue,
    expansion_eval,
    leading_term,
    max_term_index,
    pole_terms,
    prop_bound_diag,
    remainder,
)
from commat.errors import InconsistencyError, UsageError
from commat.exact_counts import commuting_pairs, commuting_series_coeff


def test_display_residue():
    """Residue 0 is shown as m."""
    assert [display_residue(n, 3) for n in range(6)] == [3, 1, 2, 3, 1, 2]


def test_coeff_C_m1_closed_form():
    """C_{1,q} = prod_j (1 - q^-j)^-(j+1)."""
    for q in (2, 3):
        value = coeff_C(q, 1, 0, 20)
        closed = leading_coefficient_product(q, 20)
        tolerance = value.certified_abs_error + closed.certified_abs_error
        assert abs(value.value - closed.value) <= tolerance


def test_coeff_C_m1_value(close):
    """C_{1,2} = 34.738723465485..."""
    assert close(coeff_C(2, 1, 5, 20).value, "34.738723465485159584", "1e-15")


@pytest.mark.parametrize("m", [2, 3])
def test_coeff_C_periodic(m):
    """C_{m,q}(n) = C_{m,q}(n + m)."""
    for n in range(m):
        a = coeff_C(2, m, n, 20)
        b = coeff_C(2, m, n + m, 20)
        assert abs(a.value - b.value) <= a.certified_abs_error + b.certified_abs_error


def test_coeff_C_rejects_m0():
    """m must be at least 1."""
    with pytest.raises(UsageError):
        coeff_C(2, 0, 1, 20)


def test_coeff_C_realness_violation(mocker):
    """An imaginary part above the error bound is an internal inconsistency."""
    mocker.patch(
        "commat.asymptotics.pole_terms",
        return_value=((mpmath.mpf(1), mpmath.mpf(1), mpmath.mpf(0)),),
    )
    with pytest.raises(InconsistencyError, match="imaginary part"):
        coeff_C(2, 1, 0, 20)


def test_pole_terms_are_cached():
    """The (m, j) grid is evaluated once per precision."""
    pole_terms.cache_clear()
    pole_terms(2, 2, 15)
    pole_terms(2, 2, 15)
    assert pole_terms.cache_info().hits == 1


def test_coefficient_table_rows():
    """The table stores m entries for each m."""
    table = coefficient_table(2, 3, 15)
    rows = list(table.rows())
    assert [(m, r) for m, r, _ in rows] == [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)]
    assert table.get(2, 4) is table.get(2, 2)
    with pytest.raises(UsageError):
        table.get(4, 1)


def test_expansion_eval_n0():
    """At n = 0 the N = 1 expansion is C_{1,q} itself."""
    expansion = expansion_eval(2, 0, 1, 20)
    coefficient = coefficient_table(2, 1, 20).get(1, 0)
    assert abs(expansion.value - coefficient.value) <= expansion.certified_abs_error


def test_remainder_without_peeling(close):
    """N = 0 leaves the exact coefficient 88/6."""
    assert close(remainder(2, 2, 0, 20).value, "14.666666666666666666666667", "1e-20")


def test_remainder_is_normalized_coefficient_minus_expansion(ctx):
    """remainder = Q_2(n)/|GL_n(F_2)| minus the N-term expansion, within the certified errors."""
    coefficient = commuting_series_coeff(2, 20)
    assert coefficient == Fraction(commuting_pairs(2, 20).value, gl_order(2, 20))
    expansion = expansion_eval(2, 20, 1, 20)
    rest = remainder(2, 20, 1, 20)
    exact = ctx.mpf(coefficient.numerator) / coefficient.denominator
    tolerance = expansion.certified_abs_error + rest.certified_abs_error
    tolerance += exact * ctx.mpf(10) ** -30
    assert abs(rest.value - (exact - expansion.value)) <= tolerance


def test_leading_term_scales_plane_constant():
    """leading_term(q, 0) is the plane constant; Q_2(1) = 4 is of the same order."""
    base = leading_term(2, 0, 20).value
    assert 10 < base < 11
    assert 1 < leading_term(2, 1, 20).value / 4 < 11


def test_c_bound_m1_equals_coefficient():
    """For m = 1 the bound is attained."""
    bound = c_bound(2, 1, 20)
    value = coeff_C(2, 1, 1, 20)
    tolerance = bound.certified_abs_error + value.certified_abs_error
    assert abs(bound.value - abs(value.value)) <= tolerance


def test_max_term_at_real_point():
    """For q = 2, m = 2 the largest |c_{m,j}| sits at j = 0."""
    report = max_term_index(2, 2, 15)
    assert report.at_zero
    assert len(report.magnitudes) == 2


def test_prop_bound_diag_value(close):
    """exp((zeta(3) + 0.01) / (1/2)^2) for q = 2, m = 1."""
    value = prop_bound_diag(2, 1, "0.01", 20)
    with mpmath.workdps(40):
        expected = mpmath.exp((mpmath.zeta(3) + mpmath.mpf("0.01")) * 4)
        assert abs(value.value - expected) < mpmath.mpf(10) ** -15 * expected


def test_prop_bound_diag_monotone():
    """Increasing in m and in epsilon."""
    by_m = [prop_bound_diag(2, m, "0.01", 15).value for m in (1, 2, 3)]
    assert by_m[0] < by_m[1] < by_m[2]
    assert prop_bound_diag(2, 1, "0.1", 15).value > prop_bound_diag(2, 1, "0.01", 15).value


def test_prop_bound_diag_rejects_nonpositive_epsilon():
    """epsilon must be positive."""
    with pytest.raises(UsageError):
        prop_bound_diag(2, 1, 0, 15)
