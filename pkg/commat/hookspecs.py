"""Hook specifications for verification checks.

Packages can contribute checks to ``commat verify`` by exposing a module with
``@hookimpl`` functions under the ``commat`` setuptools entry-point group.
"""

from dataclasses import dataclass
from typing import Callable

import pluggy

hookspec = pluggy.HookspecMarker("commat")
hookimpl = pluggy.HookimplMarker("commat")

LEVELS = ("quick", "full")


@dataclass(frozen=True)
class Check:
    """A named verification step.

    run() returns (passed, detail). Checks with level "full" are skipped by
    ``verify --level quick``.
    """

    name: str
    run: Callable[[], tuple[bool, str]]
    level: str = "quick"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed_ms: int = 0


@hookspec
def commat_register_checks(level: str) -> list[Check]:
    """Return the checks this plugin contributes at the given level."""
