import json

import numpy as np
import pytest

from artifact.cli import main, read_snapshot, snapshot_json
from artifact.config import ConfigError, make_ic, parse_config
from artifact.diagnostics import CSV_HEADER
from artifact.model import Grid

SCHEMA_EXAMPLE = (
    "case = monostable\ndelta = 0.1\nepsilon = 0.01\nr = 0\nn = 401\ndt = 1e-4\n"
    "t_final = 50\nic = cosine:1.0,0.3,1"
)

QUICK = """\
# quick monostable run
case = monostable
delta = 0.1
epsilon = 0.01
r = 0
n = 101
dt = 1e-3
t_final = 0.5
sample_every = 50
snapshot_times = 0.25
ic = cosine:1.0,0.3,1
"""


def test_parse_schema_example():
    cfg = parse_config(SCHEMA_EXAMPLE)
    assert cfg.case == "monostable" and cfg.n == 401 and cfg.dt == 1e-4
    assert cfg.params.delta == 0.1
    np.testing.assert_allclose(cfg.initial_condition(), 1 + 0.3 * np.cos(np.pi * cfg.grid.x))


def test_negative_delta_named():
    with pytest.raises(ConfigError, match="delta"):
        parse_config(SCHEMA_EXAMPLE.replace("delta = 0.1", "delta = -1"))


def test_bistable_needs_a():
    with pytest.raises(ConfigError, match="a required for bistable"):
        parse_config(SCHEMA_EXAMPLE.replace("monostable", "bistable"))


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config(SCHEMA_EXAMPLE + "\ndleta = 3")
    assert info.value.line == 9 and "dleta" in str(info.value)


def test_missing_key_named():
    with pytest.raises(ConfigError, match="'dt'"):
        parse_config(SCHEMA_EXAMPLE.replace("dt = 1e-4\n", ""))


def test_bad_line_and_bad_value():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("just words\n" + SCHEMA_EXAMPLE)
    with pytest.raises(ConfigError, match="line 5"):
        parse_config(SCHEMA_EXAMPLE.replace("n = 401", "n = many"))


def test_overrides_apply_after_file():
    cfg = parse_config(SCHEMA_EXAMPLE, ["r=1", "n=201"])
    assert cfg.r == 1.0 and cfg.n == 201
    with pytest.raises(ConfigError):
        parse_config(SCHEMA_EXAMPLE, ["bogus=1"])


@pytest.mark.parametrize("spec", ["cosine:1,2", "wave:1", "constant:x", "random:1"])
def test_bad_ic(spec):
    with pytest.raises(ConfigError, match="ic"):
        parse_config(SCHEMA_EXAMPLE.replace("cosine:1.0,0.3,1", spec))


def test_random_ic_seeded_and_smooth():
    g = Grid(201)
    a = make_ic("random:1.0,0.5", g, seed=4)
    assert np.array_equal(a, make_ic("random:1.0,0.5", g, seed=4))
    assert not np.array_equal(a, make_ic("random:1.0,0.5", g, seed=5))
    assert a.min() >= 0
    assert np.abs(np.diff(a)).max() < 0.2


def test_snapshot_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    x, u, phi = rng.normal(size=(3, 17))
    path = tmp_path / "s.json"
    path.write_text(snapshot_json(0.1, x, u, phi))
    doc = read_snapshot(path)
    assert doc["t"] == 0.1
    for key, arr in (("x", x), ("u", u), ("phi", phi)):
        assert np.array_equal(doc[key], arr)


@pytest.fixture
def quick_cfg(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(QUICK)
    return path


def test_main_monostable(quick_cfg, tmp_path):
    out = tmp_path / "out"
    assert main(["--config", str(quick_cfg), "--output-dir", str(out), "--check", "--quiet"]) == 0
    lines = (out / "diag.csv").read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    snap = read_snapshot(out / "snapshot_t0.25.json")
    assert snap["t"] == pytest.approx(0.25)
    assert set(snap) == {"t", "x", "u", "phi"}
    assert json.loads((out / "summary.json").read_text())["checks"]["liapunov_monotone"]


def test_main_json_format(quick_cfg, tmp_path):
    out = tmp_path / "out"
    assert main(["--config", str(quick_cfg), "--output-dir", str(out), "--format", "json", "--quiet"]) == 0
    rows = json.loads((out / "diag.json").read_text())
    assert list(rows[0]) == list(CSV_HEADER)


def test_main_cfl_abort(quick_cfg, tmp_path, capsys):
    code = main(["--config", str(quick_cfg), "--output-dir", str(tmp_path / "o"), "--set", "dt=0.1"])
    assert code == 3
    assert "CFL" in capsys.readouterr().err


def test_main_config_errors(quick_cfg, tmp_path):
    assert main(["--config", str(quick_cfg), "--set", "delta=-1"]) == 2
    assert main(["--config", str(tmp_path / "missing.cfg")]) == 2
    assert main([]) == 2


def test_main_check_failure(quick_cfg, tmp_path):
    # t_final=0.5 is far too short for the r=0 steady state: the science check fails.
    args = ["--config", str(quick_cfg), "--output-dir", str(tmp_path / "o"), "--quiet",
            "--set", "case=steady-state", "--set", "t_final=0.05", "--check"]
    assert main(args) == 4
    assert main(args[:-1]) == 0


def test_main_steady_state_check(quick_cfg, tmp_path):
    out = tmp_path / "o"
    args = ["--config", str(quick_cfg), "--output-dir", str(out), "--quiet",
            "--set", "case=steady-state", "--set", "t_final=50", "--check"]
    assert main(args) == 0
    assert json.loads((out / "summary.json").read_text())["label"] == "mean"


def test_main_sweep_outputs(quick_cfg, tmp_path):
    out = tmp_path / "o"
    args = ["--config", str(quick_cfg), "--output-dir", str(out), "--quiet", "--workers", "2",
            "--set", "case=epsilon-sweep", "--set", "epsilon=0.1", "--set", "epsilon_list=0.1,0.05"]
    assert main(args) == 0
    assert (out / "sweep.csv").read_text().startswith("epsilon,error,runtime_seconds\n")
    summary = json.loads((out / "summary.json").read_text())
    assert summary["threshold_err0"] > 0 and "below_threshold" in summary


def test_main_other_cases(quick_cfg, tmp_path):
    base = ["--config", str(quick_cfg), "--quiet"]
    assert main(base + ["--output-dir", str(tmp_path / "l"), "--set", "case=limit"]) == 0
    assert (tmp_path / "l" / "diag.csv").exists()
    assert main(base + ["--output-dir", str(tmp_path / "c"), "--set", "case=chemorepulsion-check"]) == 0
    assert "deviation" in json.loads((tmp_path / "c" / "summary.json").read_text())
    assert main(base + ["--output-dir", str(tmp_path / "p"), "--set", "case=picard-check",
                        "--set", "epsilon=0.1", "--set", "dt=1e-4", "--set", "n=201"]) == 0
    assert main(base + ["--output-dir", str(tmp_path / "b"), "--set", "case=bistable",
                        "--set", "a=0.3", "--set", "r=1", "--check"]) == 0


def test_deterministic_output(quick_cfg, tmp_path):
    for name in ("a", "b"):
        assert main(["--config", str(quick_cfg), "--output-dir", str(tmp_path / name), "--quiet",
                     "--set", "ic=random:1.0,0.4", "--set", "seed=3"]) == 0
    assert (tmp_path / "a" / "diag.csv").read_bytes() == (tmp_path / "b" / "diag.csv").read_bytes()
