import io
import json

import pytest

from commat import cli
from commat.errors import InconsistencyError
from commat.hookspecs import CheckResult


@pytest.fixture
def run_cli():
    """run_cli(*argv) -> (exit code, stdout, stderr)."""

    def _run(*argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        code = cli.run(list(argv), stdout=stdout, stderr=stderr)
        return code, stdout.getvalue(), stderr.getvalue()

    return _run


def test_count(run_cli):
    """count --q 2 --n 2 prints one exact record."""
    code, out, err = run_cli("count", "--q", "2", "--n", "2")
    assert code == 0
    record = json.loads(out)
    assert record["value"] == "88"
    assert record["exact"] == "88"
    assert record["certified_error"] == "exact"
    assert err == ""


def test_count_several_n_in_order(run_cli):
    """Records follow the requested order."""
    _, out, _ = run_cli("count", "--p", "2", "--n", "3", "1", "2")
    assert [json.loads(line)["value"] for line in out.splitlines()] == ["7456", "4", "88"]


def test_prime_power_via_p_and_r(run_cli):
    """--p 2 --r 2 is the same field as --q 4."""
    _, by_q, _ = run_cli("nilpotent", "--q", "4", "--n", "2")
    _, by_pr, _ = run_cli("nilpotent", "--p", "2", "--r", "2", "--n", "2")
    assert by_q == by_pr
    assert json.loads(by_q)["value"] == "16"


def test_nilpotent_pairs(run_cli):
    """--pairs counts commuting nilpotent pairs."""
    _, out, _ = run_cli("nilpotent", "--q", "2", "--n", "2", "--pairs")
    record = json.loads(out)
    assert (record["command"], record["value"]) == ("nilpotent-pairs", "10")


def test_unknown_flag_is_usage_error(run_cli):
    """Unknown flags exit 1 with usage text on stderr and nothing on stdout."""
    code, out, err = run_cli("count", "--q", "2", "--n", "2", "--bogus")
    assert code == 1
    assert out == ""
    assert "usage: commat" in err


def test_missing_field_is_usage_error(run_cli):
    """A field size is required."""
    code, _, err = run_cli("count", "--n", "2")
    assert code == 1
    assert "--q" in err


def test_non_prime_power_is_usage_error(run_cli):
    """q = 6 is rejected."""
    code, _, err = run_cli("count", "--q", "6", "--n", "2")
    assert code == 1
    assert "not a prime power" in err


def test_budget_refusal_exit_code(run_cli):
    """Over-budget enumerations exit 2 without output."""
    code, out, err = run_cli("brute", "--p", "3", "--n", "3", "--budget", "1000")
    assert code == 2
    assert out == ""
    assert "refused" in err


def test_budget_from_environment(run_cli, monkeypatch):
    """COMMAT_BUDGET applies, and --budget beats it."""
    monkeypatch.setenv("COMMAT_BUDGET", "10")
    code, _, _ = run_cli("brute", "--p", "2", "--n", "2")
    assert code == 2
    code, out, _ = run_cli("brute", "--p", "2", "--n", "2", "--budget", "100000")
    assert code == 0
    assert json.loads(out)["value"] == "88"


def test_inconsistency_exit_code(run_cli, mocker):
    """Internal inconsistencies exit 3."""
    mocker.patch("commat.cli.commuting_pairs", side_effect=InconsistencyError("not integral"))
    code, out, err = run_cli("count", "--q", "2", "--n", "2")
    assert code == 3
    assert out == ""
    assert "internal inconsistency" in err


def test_csv_format(run_cli):
    """--format csv writes a header and one row per value."""
    _, out, _ = run_cli("count", "--q", "2", "--n", "1", "2", "--format", "csv")
    lines = out.splitlines()
    assert lines[0].startswith("command,params,value")
    assert len(lines) == 3


def test_format_from_config_file(run_cli, tmp_path):
    """commat.toml sets the default output format."""
    (tmp_path / "commat.toml").write_text('[commat]\nformat = "csv"\n')
    _, out, _ = run_cli("count", "--q", "2", "--n", "1")
    assert out.startswith("command,")


def test_output_is_deterministic(run_cli):
    """Identical invocations give identical bytes."""
    argv = ("cl-series", "--q", "2", "--n", "3", "--M", "4", "--N", "20")
    assert run_cli(*argv)[1] == run_cli(*argv)[1]


def test_timings_flag(run_cli):
    """elapsed_ms stays 0 unless --timings is given."""
    _, out, _ = run_cli("count", "--q", "2", "--n", "8")
    assert json.loads(out)["elapsed_ms"] == 0


def test_verbose_logs_to_stderr(run_cli):
    """--verbose turns on debug logging on stderr only."""
    code, out, err = run_cli("brute", "--p", "2", "--n", "1", "--verbose")
    assert code == 0
    assert "commat.brute_oracle DEBUG" in err
    assert "DEBUG" not in out


def test_verify_failure_exit_code(run_cli, mocker):
    """A failing check still prints all records, then exits 3."""
    mocker.patch(
        "commat.cli.run_checks",
        return_value=[CheckResult("a", True, "ok"), CheckResult("b", False, "bad")],
    )
    code, out, err = run_cli("verify")
    assert code == 3
    assert [json.loads(line)["value"] for line in out.splitlines()] == ["pass", "fail"]
    assert "1 of 2 checks passed" in err
