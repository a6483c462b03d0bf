import json

import numpy as np
import pytest

from gcq import cli, statefile, states
from gcq.states import PureBipartite, PureTripartite


@pytest.fixture
def bell_file(tmp_path):
    path = tmp_path / "bell.json"
    statefile.save(PureBipartite(np.eye(2, dtype=complex) / np.sqrt(2)), path)
    return str(path)


@pytest.fixture
def ghz4_file(tmp_path):
    amp = np.zeros((4, 4, 4), dtype=complex)
    for k in range(4):
        amp[k, k, k] = 0.5
    path = tmp_path / "ghz4.json"
    statefile.save(PureTripartite(amp), path)
    return str(path)


@pytest.fixture
def mixed_file(tmp_path):
    path = tmp_path / "mixed.json"
    statefile.save(states.random_density_matrix(2, 2, 3, seed=5), path)
    return str(path)


def run_cli(capsys, argv):
    code = cli.run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_g_command_bell(capsys, bell_file):
    code, out, err = run_cli(capsys, ["g", bell_file])
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "g"
    assert report["results"]["g"] == pytest.approx(1.0, abs=1e-10)
    assert "sha256" in report["inputs"][0]
    assert "g" in report["tolerances"]


def test_unknown_subcommand_exits_2(capsys):
    code, out, err = run_cli(capsys, ["nosuchcmd"])
    assert code == 2


def test_missing_file_exits_2(capsys):
    code, out, err = run_cli(capsys, ["g", "/nonexistent/state.json"])
    assert code == 2
    assert "error" in err


def test_malformed_file_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"kind\": \"pure-bipartite\", \"dims\": [2, 2], \"data\": []}")
    code, out, err = run_cli(capsys, ["g", str(bad)])
    assert code == 2


def test_reports_are_byte_identical_for_same_argv(capsys, mixed_file):
    argv = ["roof", mixed_file, "--seed", "7", "--restarts", "3", "--format", "json"]
    code1, out1, _ = run_cli(capsys, argv)
    code2, out2, _ = run_cli(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_roof_report_contents(capsys, mixed_file):
    code, out, _ = run_cli(capsys, ["roof", mixed_file, "--restarts", "3"])
    assert code == 0
    report = json.loads(out)
    res = report["results"]
    assert res["member"] is True
    assert res["lower"] == pytest.approx(res["upper"], abs=1e-8)
    assert res["optimizer_min"] <= res["optimizer_max"] + 1e-9
    assert res["optimizer_min"] == pytest.approx(res["lower"], abs=1e-6)


def test_gcoa_command_ghz4(capsys, ghz4_file):
    code, out, _ = run_cli(capsys, ["gcoa", ghz4_file, "--seed", "7", "--restarts", "6", "--max-m", "4"])
    assert code == 0
    report = json.loads(out)
    res = report["results"]
    # uniform weights: assisted maximum is 1; this family is not certified
    assert res["member"] is False
    assert res["diag_value"] == pytest.approx(1.0, abs=1e-6)
    assert res["optimizer_max"] == pytest.approx(1.0, abs=1e-3)
    assert res["optimizer_max"] <= res["diag_value"] + 1e-9
    assert report["seed"] == 7


def test_tau_command_dumps_entries(capsys, bell_file):
    code, out, _ = run_cli(capsys, ["tau", bell_file])
    assert code == 0
    report = json.loads(out)
    entries = report["results"]["entries"]
    assert len(entries) == 1
    assert entries[0][0] == [0, 0]
    assert entries[0][1] == pytest.approx(1.0, abs=1e-12)
    assert entries[0][2] == pytest.approx(0.0, abs=1e-12)


def test_diag_command(capsys, mixed_file):
    code, out, _ = run_cli(capsys, ["diag", mixed_file])
    assert code == 0
    report = json.loads(out)
    res = report["results"]
    assert res["member"] is True
    assert res["unitary_deviation"] <= 1e-10
    assert len(res["lam"]) == 3


def test_swap_command(capsys, tmp_path):
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    statefile.save(states.random_density_matrix(2, 2, 2, seed=1), p1)
    statefile.save(states.random_density_matrix(2, 2, 2, seed=2), p2)
    code, out, _ = run_cli(capsys, ["swap", str(p1), str(p2), "--restarts", "3"])
    assert code == 0
    report = json.loads(out)
    assert report["results"]["achieved_max"] <= report["results"]["bound"] + 1e-9
    assert len(report["inputs"]) == 2


def test_monogamy_command(capsys):
    code, out, _ = run_cli(capsys, ["monogamy", "--d", "2", "--samples", "5", "--seed", "3"])
    assert code == 0
    report = json.loads(out)
    counts = report["results"]["counts"]
    assert counts["g"]["violated"] == 0
    assert sum(counts["g"].values()) == 5


def test_assist_command(capsys, tmp_path):
    path = tmp_path / "tri.json"
    statefile.save(states.random_pure_tripartite((2, 2, 2), seed=9), path)
    code, out, _ = run_cli(capsys, ["assist", str(path), "--restarts", "3", "--filters", "2"])
    assert code == 0
    report = json.loads(out)
    res = report["results"]
    assert res["achieved_max"] <= res["ceiling"] + 1e-9
    assert len(res["filter_margins"]) == 2


def test_text_format(capsys, bell_file):
    code, out, _ = run_cli(capsys, ["g", bell_file, "--format", "text"])
    assert code == 0
    assert "g report" in out
    assert "g = " in out


def test_wrong_kind_for_command_exits_2(capsys, mixed_file):
    code, out, err = run_cli(capsys, ["g", mixed_file])
    assert code == 2
