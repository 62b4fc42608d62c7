import io
import json
import shutil
import subprocess

import pytest

from graphcheck.cli import EXIT_FALSE, EXIT_INPUT, EXIT_OK, EXIT_USAGE, run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


def parse_kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line and not line.startswith("#"))


@pytest.fixture
def k16(tmp_path):
    path = tmp_path / "k16.edges"
    assert call("gen", "--complete", "16", "--output", str(path))[0] == EXIT_OK
    return path


@pytest.fixture
def k16_minus(tmp_path):
    path = tmp_path / "k16-minus.edges"
    assert call("gen", "--complete", "16", "--remove", "1-2", "--output", str(path))[0] == EXIT_OK
    return path


def test_test_complete(k16, tmp_path):
    report = tmp_path / "r.json"
    code, out = call("test", "--input", str(k16), "--mode", "deterministic", "--report", str(report))
    assert code == EXIT_OK
    kv = parse_kv(out)
    assert kv["verdict"] == "true" and kv["seed"] == "0"
    data = json.loads(report.read_text())
    assert data["verdict"] is True and data["stage_reached"] == "qpe-completed"


def test_test_incomplete(k16_minus):
    code, out = call("test", "--input", str(k16_minus), "--mode", "deterministic")
    assert code == EXIT_FALSE
    assert parse_kv(out)["verdict"] == "false"


def test_sampled_mode_and_precision(k16):
    code, out = call("test", "--input", str(k16), "--mode", "sampled", "--seed", "3", "--precision-bits", "14")
    kv = parse_kv(out)
    assert kv["mode"] == "sampled" and kv["seed"] == "3"
    assert code == (EXIT_OK if kv["verdict"] == "true" else EXIT_FALSE)


def test_constants():
    code, out = call("constants")
    kv = parse_kv(out)
    assert code == EXIT_OK
    assert kv["a"].startswith("1.44511938")
    assert kv["t_star"] == "3"


@pytest.mark.parametrize("argv", [["bogus"], ["test"], ["test", "--input", "x", "--frobnicate"],
                                  ["test", "--input", "x", "--seed", "-4"],
                                  ["test", "--input", "x", "--precision-bits", "many"]])
def test_usage_errors(argv):
    assert call(*argv)[0] == EXIT_USAGE


def test_input_errors(tmp_path):
    assert call("test", "--input", str(tmp_path / "missing.edges"))[0] == EXIT_INPUT
    bad = tmp_path / "bad.edges"
    bad.write_text("1 2\n3 3\n")
    assert call("test", "--input", str(bad))[0] == EXIT_INPUT
    small = tmp_path / "small.edges"
    small.write_text("1 2\n2 3\n1 3\n")
    assert call("test", "--input", str(small))[0] == EXIT_INPUT


def test_seed_env_fallback(k16, monkeypatch):
    monkeypatch.setenv("GRAPHCHECK_SEED", "5")
    assert parse_kv(call("test", "--input", str(k16))[1])["seed"] == "5"
    assert parse_kv(call("test", "--input", str(k16), "--seed", "6")[1])["seed"] == "6"
    monkeypatch.setenv("GRAPHCHECK_SEED", "nope")
    assert call("test", "--input", str(k16))[0] == EXIT_USAGE


def test_walk_output(k16):
    code, out = call("walk", "--input", str(k16), "--shots", "500", "--seed", "1")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[2] == "node,marked,probability,count"
    assert sum(int(l.split(",")[3]) for l in lines[3:]) == 500
    pm = float(lines[1].split("=")[1])
    assert pm >= 0.85
    assert call("walk", "--input", str(k16), "--shots", "500", "--seed", "1")[1] == out


def test_walk_explicit_marks(k16):
    code, out = call("walk", "--input", str(k16), "--mark", "1,2", "--steps", "0", "--shots", "5")
    assert code == EXIT_OK
    assert float(out.splitlines()[1].split("=")[1]) == pytest.approx(2 / 16)


def test_spectrum_output(k16):
    code, out = call("spectrum", "--input", str(k16), "--mark", "16")
    lines = out.splitlines()
    assert code == EXIT_OK and lines[0] == "phase,weight"
    phases = [float(l.split(",")[0]) for l in lines[1:]]
    assert phases == sorted(phases)
    assert sum(float(l.split(",")[1]) for l in lines[1:]) == pytest.approx(256)


def test_spectrum_dense_matches(tmp_path):
    path = tmp_path / "g.edges"
    call("gen", "--complete", "6", "--remove", "2-3", "--output", str(path))
    _, a = call("spectrum", "--input", str(path), "--mark", "1")
    _, b = call("spectrum", "--input", str(path), "--mark", "1", "--dense")
    pa = [float(l.split(",")[0]) for l in a.splitlines()[1:]]
    pb = [float(l.split(",")[0]) for l in b.splitlines()[1:]]
    assert len(pa) == len(pb)
    assert max(abs(x - y) for x, y in zip(pa, pb)) < 1e-8


def test_qpe_output(k16):
    code, out = call("qpe", "--input", str(k16), "--shots", "200", "--seed", "2")
    assert code == EXIT_OK
    assert "# matched=true" in out
    counts = [int(l.split(",")[2]) for l in out.splitlines()[3:]]
    assert sum(counts) == 200


def test_calibrate(tmp_path):
    code, out = call("calibrate", "--n-min", "4", "--n-max", "40", "--out-dir", str(tmp_path / "c"))
    assert code == EXIT_OK
    assert (tmp_path / "c" / "sweep.csv").read_text().startswith("n,removed_edge_kind,theta_j")
    first = (tmp_path / "c" / "fig7_gap_fit.csv").read_bytes()
    call("calibrate", "--n-min", "4", "--n-max", "40", "--out-dir", str(tmp_path / "c"))
    assert (tmp_path / "c" / "fig7_gap_fit.csv").read_bytes() == first


def test_calibrate_marked_policy_without_fit(tmp_path, capsys):
    code, out = call("calibrate", "--n-max", "12", "--edge-policy", "marked", "--out-dir", str(tmp_path))
    assert code == EXIT_OK
    assert "no power-law fit" in capsys.readouterr().err
    assert "k=" not in out


def test_analyze(tmp_path):
    path = tmp_path / "g.edges"
    call("gen", "--complete", "8", "--remove", "2-3", "--output", str(path))
    code, out = call("analyze", "--input", str(path))
    kv = parse_kv(out)
    assert code == EXIT_OK
    assert kv["classical_complete"] == "false" and kv["verdict"] == "false"
    assert float(kv["gap"]) > 0


def test_gen_stdout_and_shapes():
    code, out = call("gen", "--star", "5")
    assert code == EXIT_OK and out.splitlines()[0] == "n 5"
    assert len(out.splitlines()) == 5
    assert call("gen", "--path", "4", "--remove", "1-3")[0] == EXIT_INPUT


@pytest.mark.parametrize("n", [6, 13, 24, 32])
def test_gen_then_test_complete(tmp_path, n):
    path = tmp_path / f"k{n}.edges"
    call("gen", "--complete", str(n), "--output", str(path))
    assert call("test", "--input", str(path), "--mode", "deterministic")[0] == EXIT_OK


def test_outputs_byte_stable(k16):
    for argv in (["test", "--input", str(k16), "--mode", "sampled", "--seed", "11"],
                 ["qpe", "--input", str(k16), "--seed", "4"]):
        assert call(*argv) == call(*argv)


@pytest.mark.skipif(shutil.which("graphcheck") is None, reason="console script not installed")
def test_console_script(k16):
    res = subprocess.run(["graphcheck", "test", "--input", str(k16)], capture_output=True, text=True)
    assert res.returncode == 0 and "verdict=true" in res.stdout
    res = subprocess.run(["graphcheck", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "seeding" in res.stdout
