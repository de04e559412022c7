"""tests/conftest.py for commat."""

import pytest

from commat.analytic import make_context
from commat.run_config import ENV_VARS, run_config


@pytest.fixture(autouse=True)
def clean_run_config(monkeypatch, tmp_path):
    """Every test starts from built-in defaults, with no COMMAT_* variables or config files."""
    for var in list(ENV_VARS.values()) + ["COMMAT_CONFIG"]:
        monkeypatch.delenv(var, raising=False)
    monkeypatch.chdir(tmp_path)
    run_config.reset()
    run_config.stderr = None
    yield
    run_config.reset()
    run_config.stderr = None


@pytest.fixture
def ctx():
    """A 50-digit mpmath context for reference values."""
    return make_context(50)


@pytest.fixture
def close(ctx):
    """close(value, expected, tol) compares an mpmath value with a decimal string."""

    def _close(value, expected, tol):
        return abs(value - ctx.mpf(expected)) <= ctx.mpf(tol)

    return _close
