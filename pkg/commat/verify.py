"""Collect verification checks through pluggy and run them in order."""

import logging
import time

import pluggy

from . import checks, hookspecs
from .errors import CommatError, UsageError
from .hookspecs import LEVELS, CheckResult
from .run_config import log_message

logger = logging.getLogger(__name__)


def get_plugin_manager(load_entrypoints: bool = True) -> pluggy.PluginManager:
    """Plugin manager with the built-in checks and any installed plugins registered."""
    pm = pluggy.PluginManager("commat")
    pm.add_hookspecs(hookspecs)
    pm.register(checks)
    if load_entrypoints:
        pm.load_setuptools_entrypoints("commat")
    return pm


def collect_checks(level: str, pm: pluggy.PluginManager | None = None):
    if level not in LEVELS:
        raise UsageError(f"Verification level must be one of {', '.join(LEVELS)}, got {level!r}.")
    pm = pm or get_plugin_manager()
    # pluggy calls the most recently registered plugin first; keep built-ins first.
    contributed = reversed(pm.hook.commat_register_checks(level=level))
    return [check for group in contributed for check in group]


def run_checks(level: str, pm: pluggy.PluginManager | None = None) -> list[CheckResult]:
    """Run every check for the level; errors inside a check count as failures."""
    results = []
    for check in collect_checks(level, pm):
        log_message(f"Running check: {check.name}")
        start = time.perf_counter()
        try:
            passed, detail = check.run()
        except CommatError as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        elapsed_ms = int((time.perf_counter() - start) * 1000)
        if not passed:
            log_message(f"Check failed: {check.name}: {detail}", level=logging.WARNING)
        results.append(CheckResult(check.name, passed, detail, elapsed_ms))
    return results
