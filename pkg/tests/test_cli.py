import json

import pytest

from sweepsim.cli import EXIT_CAP, EXIT_CONFIG, EXIT_OK, EXIT_REGIME, main
from sweepsim.config import ConfigError, parse_config

BASE = """\
f_A = 2
f_a = 3
D_A = 0.5
D_a = 0.5
C_AA = 1
C_Aa = 1
C_aA = 1
C_aa = 1
K = 150
r1_logK = 0.2
r2_logK = 0.3
n_fixed = 5
master_seed = 2
"""


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_parse_defaults():
    cfg = parse_config(BASE)
    assert cfg.d == 1 and cfg.mode == "compare" and cfg.params.K == 150
    assert cfg.params.geometry.value == "adjacent"


@pytest.mark.parametrize("extra,msg", [
    ("r1 = 0.01\n", "conflicting keys"),
    ("bogus = 1\n", "unknown key"),
    ("K = 10\n", "duplicate key"),
    ("d = two\n", "expected integer"),
    ("geometry = diagonal\n", "geometry"),
    ("d = 0\n", "d must be >= 1"),
])
def test_parse_errors(extra, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config(BASE + extra)


def test_missing_key():
    with pytest.raises(ConfigError, match="missing required key 'K'"):
        parse_config(BASE.replace("K = 150\n", ""))


def test_cli_config_error(tmp_path, capsys):
    assert main(["analytic", "--config", write(tmp_path, BASE + "r2 = 0.1\n")]) == EXIT_CONFIG
    assert "conflicting keys" in capsys.readouterr().err
    assert main(["analytic", "--config", str(tmp_path / "nope.cfg")]) == EXIT_CONFIG


def test_cli_regime_error(tmp_path, capsys):
    path = write(tmp_path, BASE.replace("f_a = 3", "f_a = 2"))
    assert main(["compare", "--config", path]) == EXIT_REGIME
    assert "S_aA must be positive" in capsys.readouterr().err


def test_cli_analytic(tmp_path, capsys):
    out = tmp_path / "a.json"
    path = write(tmp_path, BASE + f"out_json = {out}\n")
    assert main(["analytic", "--config", path]) == EXIT_OK
    got = json.loads(capsys.readouterr().out)
    for key in ("q1", "q2", "qbar2", "q3", "p1", "p5", "s"):
        assert key in got
    assert json.loads(out.read_text()) == got


def test_cli_compare_outputs(tmp_path, capsys):
    csv, js = tmp_path / "r.csv", tmp_path / "r.json"
    path = write(tmp_path, BASE + f"out_csv = {csv}\nout_json = {js}\n")
    assert main(["compare", "--config", path]) == EXIT_OK
    summary = json.loads(js.read_text())
    assert summary["empirical"]["n_replicates"] == 5
    assert set(summary) >= {"config_echo", "analytic", "empirical", "comparison", "runtime"}
    lines = csv.read_text().splitlines()
    assert lines[0] == "replicate,seed,fixed,t_ext,event_count,m1,m2,m3,m4,m5,in_delta"
    assert len(lines) == 6


def test_cli_csv_identical_across_threads(tmp_path, capsys):
    outs = []
    for threads in ("1", "3"):
        csv = tmp_path / f"r{threads}.csv"
        path = write(tmp_path, BASE + f"out_csv = {csv}\nd = 3\n", f"c{threads}.cfg")
        assert main(["simulate", "--config", path, "--threads", threads]) == EXIT_OK
        outs.append(csv.read_bytes())
    assert outs[0] == outs[1]


def test_cli_cap_exceeded(tmp_path, capsys):
    csv = tmp_path / "r.csv"
    text = BASE.replace("n_fixed = 5", "n_fixed = 50")
    path = write(tmp_path, text + f"out_csv = {csv}\nmax_attempts = 3\n")
    assert main(["simulate", "--config", path]) == EXIT_CAP
    assert csv.exists()
    assert json.loads(capsys.readouterr().out)["truncated"] is True


def test_cli_diagnostics(tmp_path, capsys):
    path = write(tmp_path, BASE.replace("K = 150", "K = 1000") + "upcross_levels = 5, 10\n")
    assert main(["diagnostics", "--config", path]) == EXIT_OK
    got = json.loads(capsys.readouterr().out)
    assert got["eps_level"] == 100
    assert set(got["upcrossings"]) == {"5", "10"}
    assert got["geometric_compound_max_deviation"] <= 1e-10
