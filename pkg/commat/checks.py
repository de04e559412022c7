"""Built-in verification checks: oracle agreement, golden values and numeric laws."""

from fractions import Fraction

from . import brute_oracle, exact_counts
from .analytic import make_context, plane_constant
from .arith import gl_order
from .asymptotics import coeff_C, decay_rate
from .cohen_lenstra import CLSeriesParams, nilp_ratio_series
from .hookspecs import Check, hookimpl

# Printed values and the tolerance each one is reproduced to, then full-precision pins.
GOLDEN_C = (
    (1, 1, "34.738723457", "1e-8"),
    (2, 1, "-11716.7651425569", "5e-11"),
    (2, 2, "-11716.3960075313", "5e-11"),
    (3, 1, "7970793.64416118", "5e-8"),
    (3, 2, "7970793.59033743", "5e-8"),
    (3, 3, "7970793.67801128", "5e-8"),
    (1, 1, "34.738723465485159584", "1e-15"),
    (3, 1, "7970793.644161221341", "2e-12"),
    (3, 2, "7970793.590337468308", "2e-12"),
    (3, 3, "7970793.678011316468", "2e-12"),
)
GOLDEN_CL = (
    (0, "0.999999999999999667"),
    (1, "0.9999999999999999998"),
    (2, "0.6666666666666666666"),
    (3, "0.3809523809523809523"),
    (4, "0.2031746031746031746"),
)
ORACLE_QUICK = ((2, 1), (2, 2), (3, 1))
ORACLE_FULL = ((2, 3), (3, 2))


def _oracle_check(p: int, n: int) -> tuple[bool, str]:
    formula = (
        exact_counts.commuting_pairs(p, n).value,
        exact_counts.nilpotent_count(p, n).value,
        exact_counts.nilpotent_commuting_pairs(p, n).value,
    )
    budget = max(brute_oracle.estimate_cost("pairs", p, n), 1)
    brute = (
        brute_oracle.count_commuting_pairs(p, n, budget=budget),
        brute_oracle.count_nilpotent(p, n, budget=budget),
        brute_oracle.count_commuting_nilpotent_pairs(p, n, budget=budget),
    )
    return formula == brute, f"formulas {formula}, enumeration {brute}"


def _golden_c_check() -> tuple[bool, str]:
    ctx = make_context(30)
    misses = []
    for m, n, printed, tolerance in GOLDEN_C:
        value = coeff_C(2, m, n, 20).value
        if abs(value - ctx.mpf(printed)) > ctx.mpf(tolerance):
            misses.append(f"C_{{{m},2}}({n}) = {ctx.nstr(value, 18)}, expected {printed}")
    return not misses, "; ".join(misses) or f"{len(GOLDEN_C)} coefficients reproduced"


def _cl_table_check() -> tuple[bool, str]:
    ctx = make_context(40)
    misses = []
    for n, printed in GOLDEN_CL:
        digits = len(printed) - 2
        value = nilp_ratio_series(CLSeriesParams.from_settings(2, n, 10, 100, 25)).value
        if abs(value - ctx.mpf(printed)) >= ctx.mpf(10) ** (-digits):
            misses.append(f"n={n}: {ctx.nstr(value, 22)}, expected {printed}")
    return not misses, "; ".join(misses) or f"{len(GOLDEN_CL)} table rows reproduced"


def _dual_path_check(n_max: int) -> tuple[bool, str]:
    for q in (2, 3):
        series = exact_counts.commuting_series_coeffs(q, n_max)
        for n in range(n_max + 1):
            pairs = exact_counts.commuting_pairs(q, n)
            if series[n] != Fraction(pairs.value, gl_order(q, n)):
                return False, f"series and partition sum differ at q={q}, n={n}"
    return True, f"q in (2, 3), n <= {n_max}"


def _integrality_check(n_max: int) -> tuple[bool, str]:
    # Each count raises InconsistencyError when |GL_n| times its series coefficient
    # is not an integer; reaching the end means every count was integral.
    for q in (2, 3, 4, 5, 8, 9):
        for n in range(n_max + 1):
            exact_counts.commuting_pairs(q, n)
            exact_counts.nilpotent_count(q, n)
            exact_counts.nilpotent_commuting_pairs(q, n)
    return True, f"q in (2, 3, 4, 5, 8, 9), n <= {n_max}"


def _discrepancy_check() -> tuple[bool, str]:
    coefficient = exact_counts.nilpotent_series_coeff(2, 3)
    passed = coefficient == Fraction(8, 21) and coefficient != Fraction(4, 11)
    return passed, f"w^3 coefficient of Z_(F_2[[u]]) is {coefficient}; the printed 4/11 is a typo"


def _decay_check() -> tuple[bool, str]:
    fits = [decay_rate(2, N, 60, 80, 20) for N in (1, 2, 3)]
    passed = all(abs(fit.slope - fit.expected) <= 0.10 for fit in fits)
    return passed, ", ".join(f"N={fit.N}: {fit.slope:.3f} vs {fit.expected:.3f}" for fit in fits)


def _plane_limit_check() -> tuple[bool, str]:
    ctx = make_context(40)
    constant = plane_constant(2, 30).value
    previous = None
    for n in range(10, 26):
        ratio = exact_counts.q_plane_ratio(2, n)
        diff = abs(ctx.mpf(ratio.numerator) / ratio.denominator - constant)
        if diff >= ctx.mpf(2) ** (-ctx.mpf(n) / 2 + 12):
            return False, f"n={n}: difference {ctx.nstr(diff, 5)} above 2^(-n/2+12)"
        if previous is not None and diff >= previous:
            return False, f"n={n}: difference did not decrease"
        previous = diff
    return True, "Q_2(n)/2^(n^2+n) approaches the plane constant over n in [10, 25]"


@hookimpl
def commat_register_checks(level: str) -> list[Check]:
    checks = [
        Check(f"oracle q={p} n={n}", lambda p=p, n=n: _oracle_check(p, n))
        for p, n in ORACLE_QUICK
    ]
    checks += [
        Check("golden C coefficients", _golden_c_check),
        Check("Cohen-Lenstra table", _cl_table_check),
        Check("dual path n<=12", lambda: _dual_path_check(12)),
        Check("integrality n<=8", lambda: _integrality_check(8)),
        Check("w^3 coefficient 8/21", _discrepancy_check),
    ]
    if level == "full":
        checks += [
            Check(f"oracle q={p} n={n}", lambda p=p, n=n: _oracle_check(p, n), "full")
            for p, n in ORACLE_FULL
        ]
        checks += [
            Check("dual path n<=20", lambda: _dual_path_check(20), "full"),
            Check("integrality n<=20", lambda: _integrality_check(20), "full"),
            Check("remainder decay", _decay_check, "full"),
            Check("plane constant limit", _plane_limit_check, "full"),
        ]
    return checks
