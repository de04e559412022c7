"""The commat command line.

Each subcommand turns its arguments into a list of OutputRecord objects, which are
serialized to standard output in request order. Errors map to exit codes through
the exit_code attribute of the exception classes.
"""

import argparse
import logging
import sys
import time

from . import brute_oracle, cli_messages
from .analytic import euler_f_infinity, plane_constant, zeta_value
from .arith import PrimePower
from .asymptotics import (
    c_bound,
    coeff_C,
    display_residue,
    expansion_eval,
    max_term_index,
    prop_bound_diag,
    remainder,
)
from .cohen_lenstra import CLSeriesParams, nilp_ratio_series
from .errors import CommatError, InconsistencyError, RefusalError, UsageError
from .exact_counts import (
    commuting_pairs,
    nilpotent_commuting_pairs,
    nilpotent_count,
    nilpotent_series_coeff,
)
from .hookspecs import LEVELS
from .records import OutputRecord, serialize
from .run_config import FORMATS, log_message, run_config
from .verify import run_checks

logger = logging.getLogger(__name__)

BRUTE_KINDS = {
    "pairs": brute_oracle.count_commuting_pairs,
    "nilpotent": brute_oracle.count_nilpotent,
    "nilpotent-pairs": brute_oracle.count_commuting_nilpotent_pairs,
    "centralizers": lambda p, n, budget, workers: (
        brute_oracle.count_commuting_pairs_by_centralizers(p, n, budget=budget)
    ),
}


class ArgumentParser(argparse.ArgumentParser):
    """Raise UsageError instead of exiting, so bad flags map to exit code 1."""

    def error(self, message):
        raise UsageError(message)


# --- Parser ---


def _common_options() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, help="decimal digits for approximate values")
    common.add_argument("--format", choices=FORMATS, help="output record format")
    common.add_argument("--workers", type=int, help="parallel workers")
    common.add_argument("--config", help="TOML file with [commat] settings")
    common.add_argument("--timings", action="store_true", help="record elapsed_ms per value")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    return common


def _add_field(parser, p_only: bool = False) -> None:
    if not p_only:
        parser.add_argument("--q", type=int, help="field size, a prime power")
        parser.add_argument("--r", type=int, help="exponent with --p, q = p^r")
    parser.add_argument("--p", type=int, help="field characteristic")


def build_parser() -> ArgumentParser:
    common = _common_options()
    parser = ArgumentParser(
        prog="commat",
        description=cli_messages.description,
        epilog=cli_messages.epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")

    count = subparsers.add_parser("count", parents=[common], help="commuting pairs Q_q(n)")
    _add_field(count)
    count.add_argument("--n", type=int, nargs="+", required=True)

    nilpotent = subparsers.add_parser(
        "nilpotent", parents=[common], help="nilpotent matrices or commuting nilpotent pairs"
    )
    _add_field(nilpotent)
    nilpotent.add_argument("--n", type=int, nargs="+", required=True)
    nilpotent.add_argument("--pairs", action="store_true", help="count commuting pairs")

    coeff = subparsers.add_parser("coeff-c", parents=[common], help="coefficients C_{m,q}(n)")
    _add_field(coeff)
    coeff.add_argument("--m", type=int, required=True)
    coeff.add_argument("--n", type=int, nargs="+", help="default: every residue 1..m")
    coeff.add_argument("--bound", action="store_true", help="also report the bounds")
    coeff.add_argument("--epsilon", default="0.01", help="epsilon for the diagnostic bound")

    expand = subparsers.add_parser("expand", parents=[common], help="truncated expansion")
    _add_field(expand)
    expand.add_argument("--n", type=int, nargs="+", required=True)
    expand.add_argument("--N", type=int, default=1)

    rem = subparsers.add_parser("remainder", parents=[common], help="coefficient minus expansion")
    _add_field(rem)
    rem.add_argument("--n", type=int, nargs="+", required=True)
    rem.add_argument("--N", type=int, default=1)

    series = subparsers.add_parser("cl-series", parents=[common], help="Cohen-Lenstra series")
    _add_field(series)
    series.add_argument("--n", type=int, nargs="+", required=True)
    series.add_argument("--M", type=int)
    series.add_argument("--N", type=int)

    brute = subparsers.add_parser("brute", parents=[common], help="enumerate over F_p")
    _add_field(brute, p_only=True)
    brute.add_argument("--n", type=int, nargs="+", required=True)
    brute.add_argument("--kind", choices=list(BRUTE_KINDS), default="pairs")
    brute.add_argument("--budget", type=int, help="maximum field multiplications")

    constants = subparsers.add_parser("constants", parents=[common], help="limit constants")
    _add_field(constants)

    verify = subparsers.add_parser("verify", parents=[common], help="run the self-checks")
    verify.add_argument("--level", choices=LEVELS, default="quick")

    return parser


# --- Helpers ---


def _field(args) -> PrimePower:
    q, p, r = getattr(args, "q", None), getattr(args, "p", None), getattr(args, "r", None)
    if q is not None and p is not None:
        raise UsageError("Give either --q or --p/--r, not both.")
    if q is not None:
        return PrimePower.from_q(q)
    if p is not None:
        return PrimePower(p, r or 1)
    raise UsageError(cli_messages.field_required.strip())


def _timed(args, compute):
    """Run compute() -> OutputRecord, filling elapsed_ms when --timings is set."""
    start = time.perf_counter()
    record = compute()
    if args.timings:
        record.elapsed_ms = int((time.perf_counter() - start) * 1000)
    return record


# --- Subcommands ---


def _count(args):
    q = _field(args)
    return [
        _timed(
            args,
            lambda n=n: OutputRecord.from_exact(
                "count",
                {"q": q.q, "n": n},
                commuting_pairs(q, n, workers=run_config.workers).value,
                run_config.digits,
            ),
        )
        for n in args.n
    ]


def _nilpotent(args):
    q = _field(args)
    if args.pairs:
        command = "nilpotent-pairs"

        def count(n):
            return nilpotent_commuting_pairs(q, n, workers=run_config.workers)

    else:
        command = "nilpotent"

        def count(n):
            return nilpotent_count(q, n)

    return [
        _timed(
            args,
            lambda n=n: OutputRecord.from_exact(
                command, {"q": q.q, "n": n}, count(n).value, run_config.digits
            ),
        )
        for n in args.n
    ]


def _coeff_c(args):
    q = _field(args)
    digits = run_config.digits
    residues = args.n or list(range(1, args.m + 1))
    records = [
        _timed(
            args,
            lambda n=n: OutputRecord.from_certified(
                "coeff-c",
                {"q": q.q, "m": args.m, "n": display_residue(n, args.m)},
                coeff_C(q, args.m, n, digits),
            ),
        )
        for n in residues
    ]
    if args.bound:
        report = max_term_index(q, args.m, digits)
        records.append(
            OutputRecord.from_certified(
                "c-bound",
                {"q": q.q, "m": args.m},
                c_bound(q, args.m, digits),
                note=f"largest |c_(m,j)| at j={report.index}",
            )
        )
        records.append(
            OutputRecord.from_certified(
                "prop-bound",
                {"q": q.q, "m": args.m, "epsilon": args.epsilon},
                prop_bound_diag(q, args.m, args.epsilon, digits),
                note="diagnostic only; the bound carries an implicit constant",
            )
        )
    return records


def _expand(args):
    q = _field(args)
    return [
        _timed(
            args,
            lambda n=n: OutputRecord.from_certified(
                "expand",
                {"q": q.q, "n": n, "N": args.N},
                expansion_eval(q, n, args.N, run_config.digits),
            ),
        )
        for n in args.n
    ]


def _remainder(args):
    q = _field(args)
    return [
        _timed(
            args,
            lambda n=n: OutputRecord.from_certified(
                "remainder",
                {"q": q.q, "n": n, "N": args.N},
                remainder(q, n, args.N, run_config.digits),
            ),
        )
        for n in args.n
    ]


def _cl_series(args):
    q = _field(args)
    records = []
    for n in args.n:
        params = CLSeriesParams.from_settings(q, n, args.M, args.N, run_config.digits)
        records.append(
            _timed(
                args,
                lambda params=params, n=n: OutputRecord.from_certified(
                    "cl-series",
                    {"q": q.q, "n": n, "M": params.M, "N": params.N},
                    nilp_ratio_series(params),
                    note=f"limit {nilpotent_series_coeff(q, n)}",
                ),
            )
        )
    return records


def _brute(args):
    if args.p is None:
        raise UsageError("brute needs a prime field: give --p.")
    count = BRUTE_KINDS[args.kind]
    return [
        _timed(
            args,
            lambda n=n: OutputRecord.from_exact(
                "brute",
                {"p": args.p, "n": n, "kind": args.kind},
                count(args.p, n, budget=args.budget, workers=run_config.workers),
                run_config.digits,
            ),
        )
        for n in args.n
    ]


def _constants(args):
    q = _field(args)
    digits = run_config.digits
    values = [
        ("plane_constant", lambda: plane_constant(q, digits)),
        ("euler_f_infinity", lambda: euler_f_infinity(q, digits)),
        ("zeta(2)", lambda: zeta_value(2, digits)),
        ("zeta(3)", lambda: zeta_value(3, digits)),
    ]
    return [
        _timed(
            args,
            lambda name=name, compute=compute: OutputRecord.from_certified(
                "constants", {"q": q.q, "name": name}, compute()
            ),
        )
        for name, compute in values
    ]


def _verify(args):
    results = run_checks(args.level)
    log_message(cli_messages.verify_summary(results))
    records = [
        OutputRecord(
            "verify",
            {"level": args.level, "check": result.name},
            "pass" if result.passed else "fail",
            None,
            "n/a",
            result.elapsed_ms if args.timings else 0,
            result.detail,
        )
        for result in results
    ]
    if not all(result.passed for result in results):
        failed = [result.name for result in results if not result.passed]
        return records, InconsistencyError(f"Verification failed: {', '.join(failed)}.")
    return records, None


COMMANDS = {
    "count": _count,
    "nilpotent": _nilpotent,
    "coeff-c": _coeff_c,
    "expand": _expand,
    "remainder": _remainder,
    "cl-series": _cl_series,
    "brute": _brute,
    "constants": _constants,
    "verify": _verify,
}


# --- Entry points ---


def _configure(args, stderr) -> logging.Handler:
    handler = logging.StreamHandler(stderr)
    handler.setFormatter(logging.Formatter("%(name)s %(levelname)s: %(message)s"))
    package_logger = logging.getLogger("commat")
    package_logger.addHandler(handler)
    package_logger.setLevel(logging.DEBUG if args.verbose else logging.WARNING)

    run_config.load(config_path=args.config)
    run_config.update(
        {
            "digits": args.digits,
            "format": args.format,
            "workers": args.workers,
            "budget": getattr(args, "budget", None),
        }
    )
    run_config.stderr = stderr
    return handler


def run(argv=None, stdout=None, stderr=None) -> int:
    """Parse argv, emit records on stdout and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    handler = None
    try:
        args = parser.parse_args(argv)
        handler = _configure(args, stderr)
        outcome = COMMANDS[args.command](args)
        records, failure = outcome if isinstance(outcome, tuple) else (outcome, None)
        stdout.write(serialize(records, run_config.format))
        if failure is not None:
            raise failure
        return 0
    except SystemExit as e:
        # --help
        return e.code or 0
    except UsageError as e:
        stderr.write(parser.format_usage())
        stderr.write(cli_messages.error_msg(e) + "\n")
        return e.exit_code
    except RefusalError as e:
        stderr.write(cli_messages.refusal_msg(e) + "\n")
        return e.exit_code
    except InconsistencyError as e:
        stderr.write(cli_messages.inconsistency_msg(e) + "\n")
        return e.exit_code
    except CommatError as e:
        stderr.write(cli_messages.error_msg(e) + "\n")
        return e.exit_code
    finally:
        run_config.stderr = None
        if handler is not None:
            logging.getLogger("commat").removeHandler(handler)


def main() -> None:
    sys.exit(run())
