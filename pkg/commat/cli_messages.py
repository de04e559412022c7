"""Messages shown on standard error by the commat command line."""

from textwrap import dedent

description = """
Exact counts of commuting matrix pairs over finite fields, the coefficients of their
asymptotic expansion, and the Cohen-Lenstra series for nilpotent matrices.
"""

epilog = dedent(
    """
    Data records go to standard output; diagnostics go to standard error.
    Exit codes: 0 success, 1 usage error, 2 budget or precision refusal,
    3 internal inconsistency.

    Settings are read from commat.toml or [tool.commat] in pyproject.toml, then from
    COMMAT_BUDGET, COMMAT_DIGITS, COMMAT_FORMAT and COMMAT_WORKERS; flags win.
    """
)

field_required = """
Give the field size with --q, or with --p (and optionally --r).
"""


# --- Dynamic strings ---


def error_msg(error) -> str:
    return f"commat: error: {error}"


def refusal_msg(error) -> str:
    """Refusals are not bugs; say how to get a result."""
    return dedent(
        f"""
        commat: refused: {error}
        No partial result was written.
        """
    ).strip()


def inconsistency_msg(error) -> str:
    return dedent(
        f"""
        commat: internal inconsistency: {error}
        This indicates a bug in commat; please report it with the command you ran.
        """
    ).strip()


def verify_summary(results) -> str:
    passed = sum(result.passed for result in results)
    msg = f"--- {passed} of {len(results)} checks passed ---"
    for result in results:
        if not result.passed:
            msg += f"\n  FAILED {result.name}: {result.detail}"
    return msg
