"""Output records and their JSON-lines / CSV serialization.

Exact values never pass through floating point: integers are written as decimal
strings and rationals as "numerator/denominator".
"""

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .analytic import CertifiedReal, make_context
from .errors import UsageError

FIELDS = ("command", "params", "value", "exact", "certified_error", "elapsed_ms", "note")


@dataclass
class OutputRecord:
    """One value produced by a subcommand.

    exact holds the literal integer or fraction for exact results; approximate
    results always carry a certified_error instead of "exact".
    """

    command: str
    params: dict
    value: str
    exact: str | None = None
    certified_error: str = "exact"
    elapsed_ms: int = 0
    note: str | None = field(default=None)

    def __post_init__(self):
        if self.exact is None and self.certified_error == "exact":
            raise UsageError(f"Record for {self.command} has neither an exact value nor an error.")

    @classmethod
    def from_exact(cls, command: str, params: dict, value, digits: int, **kwargs):
        value = Fraction(value)
        exact = str(value.numerator) if value.denominator == 1 else f"{value}"
        return cls(command, params, decimal_string(value, digits), exact, "exact", **kwargs)

    @classmethod
    def from_certified(cls, command: str, params: dict, result: CertifiedReal, **kwargs):
        ctx = make_context(result.digits + 5)
        return cls(
            command,
            params,
            ctx.nstr(result.value, result.digits),
            None,
            ctx.nstr(result.certified_abs_error, 3),
            **kwargs,
        )

    def to_dict(self) -> dict:
        return asdict(self)


def decimal_string(value: Fraction, digits: int) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    ctx = make_context(digits + 5)
    return ctx.nstr(ctx.mpf(value.numerator) / value.denominator, digits)


def to_json_lines(records) -> str:
    return "".join(json.dumps(record.to_dict()) + "\n" for record in records)


def to_csv(records) -> str:
    """CSV with a header row; params are flattened to "key=value;key=value"."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=FIELDS, lineterminator="\n")
    writer.writeheader()
    for record in records:
        row = record.to_dict()
        row["params"] = ";".join(f"{key}={value}" for key, value in record.params.items())
        writer.writerow(row)
    return buffer.getvalue()


def serialize(records, fmt: str) -> str:
    if fmt == "json":
        return to_json_lines(records)
    if fmt == "csv":
        return to_csv(records)
    raise UsageError(f"Unknown output format {fmt!r}.")
