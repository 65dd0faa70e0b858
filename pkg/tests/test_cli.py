"""
Tests for the primespline command line: output formats and exit codes.
"""

import json

import pytest

from src.cli import dispatch
from src.ingestion.prime_source import load, sieve, write
from src.utils.metrics import get_metrics_collector


@pytest.fixture(autouse=True)
def default_source(monkeypatch, reset_state):
    """Every command runs on the default sieve unless a test says otherwise."""
    monkeypatch.delenv("PRIMESPLINE_PRIMES", raising=False)


def run(capsys, *argv):
    code = dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ==================== EVAL ====================

@pytest.mark.parametrize(
    "fn,x,expected",
    [("p", "25", "97"), ("pinv", "97", "25"), ("dp", "25", "1"), ("pinv", "1.5", "0.5")],
)
def test_eval_scalar(capsys, fn, x, expected):
    code, out, _ = run(capsys, "eval", "--fn", fn, "--x", x)
    assert code == 0
    assert out == expected + "\n"


def test_eval_grid_csv(capsys):
    code, out, _ = run(capsys, "eval", "--fn", "p", "--grid", "1:2:0.5", "--csv")
    assert code == 0
    assert out == "x,p\n1.0,2.0\n1.5,2.5\n2.0,3.0\n"


def test_eval_newton_with_riemann_start(capsys):
    code, out, _ = run(capsys, "eval", "--fn", "pinv", "--backend", "newton", "--y0", "R", "--x", "97")
    assert code == 0
    assert float(out) == pytest.approx(25.0, abs=1e-6)


def test_eval_trace(capsys):
    code, out, _ = run(capsys, "eval", "--fn", "pinv", "--x", "1000", "--trace")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,y,residual,dp,eps"
    assert len(lines) > 1


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--fn", "p", "--x", "5", "--trace"],
        ["eval", "--fn", "p", "--x", "-1"],
        ["eval", "--fn", "pinv", "--x", "0.5"],
        ["eval", "--spline", "cubic", "--fn", "pinv", "--backend", "closed", "--x", "97"],
    ],
)
def test_eval_errors_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert out == ""
    assert err.startswith("primespline eval: ")


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--fn", "p", "--x", "1", "--bogus"],
        ["eval", "--fn", "p"],
        ["eval", "--fn", "p", "--grid", "5:1:0.5"],
        ["eval", "--primes", "primes.txt", "--sieve-limit", "100", "--x", "1"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_commands_are_timed(capsys):
    run(capsys, "eval", "--fn", "p", "--x", "25")
    run(capsys, "eval", "--fn", "p", "--x", "-1")
    summary = get_metrics_collector().get_summary()
    assert summary["runs_by_surface"] == {"cli": 2}
    assert summary["errors_by_type"] == {"DOMAIN_ERROR": 1}


def test_help_exits_0(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    assert "primespline" in out


# ==================== TABLES ====================

def test_table1_csv(capsys):
    code, out, _ = run(capsys, "table1", "--from", "2", "--to", "4", "--csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("i,p,alpha_l,beta_l,gamma_l,d_l,alpha_r")
    assert len(lines) == 4
    assert lines[1].startswith("2,3,0,1,1,1,2")


def test_triplets_csv(capsys):
    code, out, _ = run(capsys, "triplets", "--count", "1000", "--csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "i,p_im1,p_i,p_ip1,d_i,violates"
    assert len(lines) == 6
    assert all(line.endswith(",True") for line in lines[1:])


def test_compare_csv(capsys):
    code, out, _ = run(capsys, "compare", "--from", "2", "--to", "10", "--csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,pi,pinv,li,R"
    assert len(lines) == 10


def test_variance_csv(capsys):
    code, out, _ = run(capsys, "variance", "--kind", "A", "--x0", "154.78", "--eps", "1", "--step", "0.1", "--csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,A"
    assert len(lines) == 11


def test_figures_written(capsys, tmp_path):
    code, out, _ = run(capsys, "figures", "--which", "1", "6", "--out", str(tmp_path), "--step", "0.5")
    assert code == 0
    assert out.splitlines()[0] == f"figure 1: {tmp_path / 'figure_1.csv'}"
    assert (tmp_path / "figure_6.csv").exists()


# ==================== PRIME SOURCE ====================

def test_sieve_stdout(capsys):
    code, out, _ = run(capsys, "sieve", "--limit", "30")
    assert code == 0
    assert "2 3 5 7 11 13 17 19 23 29" in out


def test_sieve_out_roundtrip(capsys, tmp_path):
    path = tmp_path / "primes.txt"
    code, out, _ = run(capsys, "sieve", "--limit", "1000", "--out", str(path))
    assert code == 0
    assert out == ""
    assert list(load(path)) == list(sieve(1000))


def test_primes_env_is_honoured(capsys, monkeypatch, tmp_path):
    path = tmp_path / "small.txt"
    write(sieve(199), path)
    monkeypatch.setenv("PRIMESPLINE_PRIMES", str(path))
    code, _, err = run(capsys, "compare", "--from", "2", "--to", "300")
    assert code == 1
    assert "199" in err

    code, out, _ = run(capsys, "eval", "--fn", "p", "--x", "25")
    assert code == 0
    assert out == "97\n"


@pytest.mark.parametrize(
    "argv",
    [["sieve", "--limit", "30", "--out"], ["figures", "--which", "1", "--step", "0.5", "--out"]],
)
def test_unwritable_output_exits_1(capsys, tmp_path, argv):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    code, _, err = run(capsys, *argv, str(blocker / "out"))
    assert code == 1
    assert err.startswith(f"primespline {argv[0]}: ")
    assert get_metrics_collector().get_summary()["errors_by_type"] == {"IO_ERROR": 1}


def test_missing_primes_file(capsys, tmp_path):
    code, _, err = run(capsys, "eval", "--primes", str(tmp_path / "nope.txt"), "--x", "5")
    assert code == 1
    assert err.startswith("primespline eval: ")


# ==================== SOLVE ====================

def _config(tmp_path, body) -> str:
    path = tmp_path / "solve.json"
    path.write_text(body if isinstance(body, str) else json.dumps(body), encoding="utf-8")
    return str(path)


TWIN_FROM_SOLUTION = {"preset": "quasi_pythagorean_twin", "x0": [5, 5, 7], "restarts": 1, "max_extractions": 1}


def test_solve_prints_found_solutions(capsys, tmp_path):
    code, out, _ = run(capsys, "solve", "--config", _config(tmp_path, TWIN_FROM_SOLUTION))
    assert code == 0
    lines = out.splitlines()
    assert "FOUND SOLUTIONS" in lines
    assert "  1  (5, 5, 7)" in lines


def test_solve_json_and_out(capsys, tmp_path):
    target = tmp_path / "run.json"
    code, out, _ = run(
        capsys, "solve", "--config", _config(tmp_path, TWIN_FROM_SOLUTION), "--seed", "7", "--json", "--out", str(target)
    )
    assert code == 0
    printed = json.loads(out)
    assert printed["rounded"] == [[5, 5, 7]]
    assert printed["seed"] == 7
    assert json.loads(target.read_text(encoding="utf-8"))["rounded"] == [[5, 5, 7]]


@pytest.mark.parametrize(
    "body",
    ["{not json", json.dumps({"penalty": "primes"}), json.dumps({"preset": "quasi_pythagorean", "restarts": 0})],
)
def test_malformed_config_exits_2(capsys, tmp_path, body):
    code, out, err = run(capsys, "solve", "--config", _config(tmp_path, body))
    assert code == 2
    assert out == ""
    assert err.startswith("primespline solve: ")


def test_config_semantic_errors_exit_1(capsys, tmp_path):
    body = {"preset": "quasi_pythagorean", "x0": [1.0, 2.0]}
    code, _, err = run(capsys, "solve", "--config", _config(tmp_path, body))
    assert code == 1
    assert "x0" in err

    code, _, _ = run(capsys, "solve", "--config", str(tmp_path / "missing.json"))
    assert code == 1


if __name__ == "__main__":
    pytest.main([__file__, "-v", "--tb=short"])
