"""Command-line interface tests: golden outputs, exit codes, determinism."""

import json
import os
import subprocess
import sys

import pytest

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


def _run(args, **kw):
    return subprocess.run(
        [sys.executable, "-m", "qgc.cli", *args],
        capture_output=True,
        text=True,
        **kw,
    )


def test_rates_dist_src_golden():
    res = _run(["rates", "dist-src", "-c", f"{CONFIG_DIR}/dist_src_example.toml"])
    assert res.returncode == 0
    lines = res.stdout.splitlines()
    assert lines[0] == "scheme,quantity,value"
    table = {tuple(l.split(",")[:2]): l.split(",")[2] for l in lines[1:]}
    assert table[("qgc", "sum_rate")] == "3.3304"
    assert table[("unstructured", "sum_rate")] == "3.4399"
    assert table[("linear_embed", "sum_rate")] == "4.1221"
    assert table[("group", "sum_rate")] == "3.8838"


def test_rates_mac_states_golden():
    res = _run(["rates", "mac-states", "-c", f"{CONFIG_DIR}/mac_states_example.toml"])
    assert res.returncode == 0
    rows = dict(l.split(",") for l in res.stdout.splitlines()[1:])
    assert rows["sum_rate"] == "0.5000"
    assert rows["h_vsum_given_q"] == "1.5000"
    assert rows["h_zsum_given_yq"] == "0.0000"


def test_reproduce_table2_values():
    res = _run(["reproduce", "table2", "--format", "json"])
    assert res.returncode == 0
    rows = {r["scheme"]: float(r["value"]) for r in json.loads(res.stdout)}
    assert rows["unstructured"] == pytest.approx(3.44, abs=0.02)
    assert rows["linear_embed"] == pytest.approx(4.12, abs=0.02)
    assert rows["group"] == pytest.approx(3.88, abs=0.02)
    assert rows["qgc"] == pytest.approx(3.33, abs=0.02)


def test_precision_flag():
    res = _run(["reproduce", "table1", "--precision", "2"])
    assert res.returncode == 0
    assert "0.54" in res.stdout and "0.5400" not in res.stdout


def test_verify_single_suite():
    res = _run(["verify", "pphi"])
    assert res.returncode == 0
    assert res.stdout.count("true") == 4


def test_exit_code_usage():
    assert _run(["verify", "not-a-check"]).returncode == 1
    assert _run(["no-such-command"]).returncode == 1
    assert _run(["rates", "dist-src", "-c", "/does/not/exist.toml"]).returncode == 1


def test_exit_code_validation_names_key(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[modulus]\np = 2\nr = 2\n")
    res = _run(["rates", "dist-src", "-c", str(cfg)])
    assert res.returncode == 2
    assert "source.joint" in res.stderr


def test_exit_code_guard(tmp_path):
    cfg = tmp_path / "big.toml"
    cfg.write_text(
        "[modulus]\np = 2\nr = 2\n"
        "[channel]\nrows = [\n"
        + ",\n".join("  [0.25, 0.25, 0.25, 0.25]" for _ in range(16))
        + "\n]\n[sim]\nn = 24\nk = 12\nl = 1\n"
        "u = [0.25, 0.25, 0.25, 0.25]\nv = [0.25, 0.25, 0.25, 0.25]\n"
        "eps_u = 4.0\neps_v = 4.0\neps_x = 4.0\neps_y = 4.0\ntrials = 1\n"
    )
    res = _run(["simulate", "comp-mac", "-c", str(cfg)])
    assert res.returncode == 3


def test_simulate_km_emits_row_per_n(tmp_path):
    cfg = tmp_path / "km.toml"
    src = open(f"{CONFIG_DIR}/sim_km_trend.toml").read()
    cfg.write_text(src)
    res = _run(["simulate", "km", "-c", str(cfg), "--trials", "5"])
    assert res.returncode == 0
    lines = res.stdout.splitlines()
    assert len(lines) == 4  # header + one row per n
    assert lines[0].startswith("n,")


def test_byte_identical_reruns(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        res = _run(
            ["simulate", "covering", "-c", f"{CONFIG_DIR}/sim_covering.toml",
             "--trials", "50", "--out", str(out)]
        )
        assert res.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_json_output_is_valid(tmp_path):
    out = tmp_path / "o.json"
    res = _run(
        ["simulate", "packing", "-c", f"{CONFIG_DIR}/sim_packing.toml",
         "--trials", "20", "--format", "json", "--out", str(out)]
    )
    assert res.returncode == 0
    rows = json.loads(out.read_text())
    assert rows and "false_candidate" in rows[0]
