import io
import logging

import pytest

from commat.errors import UsageError
from commat.run_config import DEFAULTS, RunConfig, log_message, run_config


def test_defaults():
    """A fresh RunConfig holds the built-in defaults."""
    config = RunConfig()
    assert {key: getattr(config, key) for key in DEFAULTS} == DEFAULTS


def test_environment_layer():
    """COMMAT_* variables override defaults."""
    config = RunConfig().load(environ={"COMMAT_BUDGET": "500", "COMMAT_FORMAT": "CSV"})
    assert config.budget == 500
    assert config.format == "csv"


def test_commat_toml_layer(tmp_path):
    """commat.toml in the working directory is read."""
    (tmp_path / "commat.toml").write_text("[commat]\ndigits = 30\nworkers = 4\n")
    config = RunConfig().load(environ={})
    assert (config.digits, config.workers) == (30, 4)


def test_pyproject_layer(tmp_path):
    """[tool.commat] in pyproject.toml is read when there is no commat.toml."""
    (tmp_path / "pyproject.toml").write_text('[tool.commat]\nformat = "csv"\n')
    assert RunConfig().load(environ={}).format == "csv"


def test_environment_beats_file(tmp_path):
    """Environment variables take precedence over the config file."""
    (tmp_path / "commat.toml").write_text("[commat]\nbudget = 10\n")
    config = RunConfig().load(environ={"COMMAT_BUDGET": "20"})
    assert config.budget == 20


def test_flags_beat_environment():
    """update() applies the flag layer last, skipping unset flags."""
    config = RunConfig().load(environ={"COMMAT_BUDGET": "20", "COMMAT_DIGITS": "30"})
    config.update({"budget": 40, "digits": None})
    assert (config.budget, config.digits) == (40, 30)


def test_explicit_config_path(tmp_path):
    """COMMAT_CONFIG points at another file; a missing one is an error."""
    path = tmp_path / "elsewhere.toml"
    path.write_text("digits = 12\n")
    assert RunConfig().load(environ={"COMMAT_CONFIG": str(path)}).digits == 12
    with pytest.raises(UsageError, match="does not exist"):
        RunConfig().load(config_path=tmp_path / "missing.toml", environ={})


@pytest.mark.parametrize(
    "values",
    [{"budget": "lots"}, {"digits": 0}, {"format": "xml"}, {"colour": "blue"}],
)
def test_invalid_settings(values):
    """Bad values name the layer they came from."""
    with pytest.raises(UsageError, match="flags"):
        RunConfig().update(values)


def test_invalid_toml(tmp_path):
    """Unparseable config files are usage errors."""
    (tmp_path / "commat.toml").write_text("digits = = 3\n")
    with pytest.raises(UsageError, match="not valid TOML"):
        RunConfig().load(environ={})


def test_unreadable_pyproject_is_skipped(tmp_path, caplog):
    """A discovered pyproject.toml the reader rejects leaves the defaults in place."""
    (tmp_path / "pyproject.toml").write_text('[project]\nkeywords = [1, "a"]\n')
    with caplog.at_level(logging.DEBUG, logger="commat.run_config"):
        config = RunConfig().load(environ={})
    assert config.digits == DEFAULTS["digits"]
    assert "Skipping pyproject.toml" in caplog.text


def test_unreadable_explicit_pyproject(tmp_path):
    """Naming a pyproject.toml explicitly still reports it as invalid."""
    path = tmp_path / "pyproject.toml"
    path.write_text('[project]\nkeywords = [1, "a"]\n')
    with pytest.raises(UsageError, match="not valid TOML"):
        RunConfig().load(config_path=path, environ={})


def test_logs_to_logger(mocker):
    """log_message calls the logger with correct arguments."""
    mock_logger = mocker.patch("commat.run_config.logger")
    log_message("Test message", level=logging.INFO)
    mock_logger.log.assert_called_once_with(logging.INFO, "Test message")


def test_writes_to_stderr_when_configured(monkeypatch):
    """log_message echoes to the diagnostics stream when one is set."""
    stream = io.StringIO()
    monkeypatch.setattr(run_config, "stderr", stream)
    log_message("Test output")
    log_message("Hidden detail", level=logging.DEBUG)
    assert stream.getvalue() == "  Test output\n"
