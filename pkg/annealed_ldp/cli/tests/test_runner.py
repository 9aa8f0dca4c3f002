import pytest

from annealed_ldp.cli.management.commands import validate
from annealed_ldp.cli.runner import run
from annealed_ldp.cli.validation import Check

PHASE = ["phase", "--atoms", "1,3", "--probs", "0.5,0.5", "--beta", "0.5", "--B", "0", "--deterministic"]


def test_success_writes_table(capsys):
    assert run(PHASE) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("# tool=annealed-ldp\n")
    assert "beta,B,z_star,psi_an,magnetization,susceptibility,beta_c" in captured.out
    assert captured.err == ""


def test_hyphenated_command_names(capsys):
    argv = ["rate-spin", "--atoms", "1,3", "--probs", "0.5,0.5", "--beta", "0.2", "--B", "0", "--m", "0"]
    assert run(argv) == 0
    assert "# command=rate_spin" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["plot"],
        [*PHASE, "--bogus"],
        [*PHASE, "--format", "xml"],
        ["phase", "--atoms", "1,3", "--probs", "0.5,0.5", "--beta", "0:1", "--B", "0"],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    assert run(argv) == 2
    err = capsys.readouterr().err.strip()
    assert len(err.splitlines()) == 1


def test_unwritable_output_exits_two(capsys, tmp_path):
    assert run([*PHASE, "--output", str(tmp_path / "missing" / "out.csv")]) == 2
    assert "Cannot write" in capsys.readouterr().err


def test_output_file_is_written(capsys, tmp_path):
    path = tmp_path / "phase.csv"
    assert run([*PHASE, "--output", str(path)]) == 0
    assert path.read_text().startswith("# tool=annealed-ldp\n")


def test_validation_failure_exits_one(capsys, monkeypatch):
    checks = [Check(1, "pressure consistency", True, "", 0.0), Check(9, "Monte Carlo concordance", False, "", 0.0)]
    monkeypatch.setattr(validate, "run_suite", lambda suite, seed: checks)
    assert run(["validate"]) == 1
    captured = capsys.readouterr()
    assert "FAIL" in captured.out
    assert "9 (Monte Carlo concordance)" in captured.err


def test_help_exits_zero(capsys):
    assert run(["--help"]) == 0
    assert "rate-spin" in capsys.readouterr().err
