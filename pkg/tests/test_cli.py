"""Tests for theta-attest CLI"""

import json

import pytest

from theta_attest.cli import agreement_digits, main
from theta_attest.config import DEFAULTS
from theta_attest.mparith import Precision, make


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    path = tmp_path / "cfg" / ".env"
    monkeypatch.setenv("THETA_ATTEST_ENV_PATH", str(path))
    for key in DEFAULTS:
        monkeypatch.delenv(key, raising=False)
    return path


def test_cli_help(capsys):
    """Test --help flag"""
    try:
        main(["--help"])
    except SystemExit as e:
        assert e.code == 0

    captured = capsys.readouterr()
    assert "theta-attest" in captured.out
    assert "verify" in captured.out
    assert "table" in captured.out


def test_cli_version(capsys):
    """Test --version flag"""
    try:
        main(["--version"])
    except SystemExit as e:
        assert e.code == 0

    captured = capsys.readouterr()
    from theta_attest import __version__
    assert __version__ in captured.out


def test_verify_rejects_low_precision(capsys):
    assert main(["verify", "--digits", "15"]) == 2
    assert ">= 20" in capsys.readouterr().err


def test_verify_filtered(capsys):
    result = main(["verify", "--filter", "D*", "--digits", "30", "--samples", "3"])
    assert result == 0
    out = capsys.readouterr().out
    assert "VERIFICATION RESULTS: 2/2 passed (30 digits)" in out
    assert "lemmas/D3" in out


def test_verify_json(capsys):
    result = main(["verify", "--filter", "ee11", "--digits", "30", "--json"])
    assert result == 0
    data = json.loads(capsys.readouterr().out)
    assert data["schema"] == 1
    assert [c["name"] for c in data["checks"]] == ["ee11"]


def test_eval_theta(capsys):
    assert main(["eval", "theta", "phi", "--q", "0.1", "--digits", "15"]) == 0
    assert capsys.readouterr().out.strip() == "phi(q=1/10) = 1.20020000200000  [series]"


def test_eval_theta_needs_a_nome(capsys):
    assert main(["eval", "theta", "psi"]) == 2
    assert "--q" in capsys.readouterr().err


def test_eval_param_with_closed_form(capsys):
    assert main(["eval", "param", "h", "3", "15", "--digits", "30"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("h_{3,15} = 0.76")
    assert "[theta quotient]" in lines[0]
    assert "[closed form" in lines[1]


def test_eval_param_domain_error(capsys):
    assert main(["eval", "param", "h", "0", "5"]) == 3
    assert "k > 0" in capsys.readouterr().err


def test_eval_cf_routes(capsys):
    assert main(["eval", "cf", "--n", "5/9", "--digits", "30"]) == 0
    out = capsys.readouterr().out
    assert "[theta quotient]" in out
    assert "[product;" in out
    assert "[three-quotient prefix;" in out
    assert "[closed form" in out


def test_eval_expr(capsys):
    assert main(["eval", "expr", "sqrt(3 + 2*sqrt(2))", "--digits", "20"]) == 0
    assert capsys.readouterr().out.strip() == "sqrt(3 + 2*sqrt(2)) = 2.4142135623730950488"


def test_eval_expr_parse_error(capsys):
    assert main(["eval", "expr", "2 + "]) == 2
    assert "offset 4" in capsys.readouterr().err


def test_table_json(capsys):
    assert main(["table", "--json", "--digits", "30"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["schema"] == 1
    assert len(data["rows"]) == 5
    assert sum(row["corrected"] for row in data["rows"]) == 3


def test_table_text(capsys):
    assert main(["table", "--digits", "30"]) == 0
    out = capsys.readouterr().out
    assert "closed form" in out
    assert "* closed form read with a catalog fix" in out


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "identity (17):" in out
    assert "suites:" in out


def test_missing_catalog_directory(tmp_path, capsys):
    assert main(["list", "--catalog", str(tmp_path)]) == 2
    assert "not found" in capsys.readouterr().err


def test_config_init_and_set(isolated_config, capsys):
    assert main(["config", "--init"]) == 0
    assert "Created config file" in capsys.readouterr().out
    assert isolated_config.exists()

    assert main(["config", "--set", "THETA_ATTEST_DIGITS=60"]) == 0
    assert 'THETA_ATTEST_DIGITS="60"' in isolated_config.read_text()

    assert main(["config", "--set", "NOPE=1"]) == 2
    assert main(["config"]) == 0
    assert "THETA_ATTEST_DIGITS=60" in capsys.readouterr().out


def test_agreement_digits():
    prec = Precision(30)
    a = make(1, prec)
    assert agreement_digits(a, a) == "all"
    assert agreement_digits(a + make("1e-12", prec), a) in ("11", "12")
