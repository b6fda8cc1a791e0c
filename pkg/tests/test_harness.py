import math
from pathlib import Path

import numpy as np
import pytest

from edgebits import choi
from edgebits.harness import (
    ConfigError,
    compute_sweep,
    load_config,
    parse_config,
    read_csv,
    run_crosscheck,
    run_profile,
    run_sweep,
)
from edgebits.harness.cli import main
from edgebits.harness.sweep import body_of

CONFIGS = Path(__file__).parent.parent / "configs"

SMALL = """
L = 7
J_xx = 0, 1.0, 1.5
p_z = 0, 0.25, 0.5
pinning = polarized_z
output = small.csv
"""


def test_parse_defaults_and_lists():
    cfg = parse_config(SMALL + "max_bond = 32  # inline comment\n")
    assert cfg.L == (7,) and cfg.J_xx == (0.0, 1.0, 1.5)
    assert cfg.dmrg.max_bond == 32
    assert cfg.in_critical_window(1.0) and not cfg.in_critical_window(1.5)


@pytest.mark.parametrize(
    "extra,msg",
    [("colour = red\n", "unknown"), ("p_z = 0.7\n", "p_z"), ("observables = spin\n", "observable"),
     ("pinning = sideways\n", "pinning"), ("workers = 0\n", "workers")],
)
def test_config_errors(extra, msg):
    text = SMALL.replace("p_z = 0, 0.25, 0.5\n", "") if extra.startswith("p_z") else SMALL
    with pytest.raises(ConfigError, match=msg):
        parse_config(text + extra)


def test_missing_key():
    with pytest.raises(ConfigError, match="J_xx"):
        parse_config("L = 5\np_z = 0\n")


def test_shipped_configs_parse():
    paths = sorted(CONFIGS.glob("*.ini"))
    assert len(paths) >= 6
    for p in paths:
        load_config(p)


def test_sweep_rows_and_flags():
    recs = compute_sweep(parse_config(SMALL))
    assert [r.key for r in recs] == sorted(r.key for r in recs)
    assert len(recs) == 9
    crit = [r for r in recs if r.J_xx == 1.0]
    assert all("critical-window" in r.flag_set() for r in crit)
    clean = next(r for r in recs if r.J_xx == 0 and r.p_z == 0)
    assert (clean.alpha, clean.beta) == (0, 0)
    assert clean.m_sfo == pytest.approx(1.0)
    assert clean.purity == pytest.approx(1.0)
    assert not any(f.startswith("error") for r in recs for f in r.flag_set())


def test_csv_is_reproducible_and_worker_independent(tmp_path):
    cfg = parse_config(SMALL)
    a = run_sweep(cfg, tmp_path / "a")
    b = run_sweep(cfg.with_workers(2), tmp_path / "b")
    assert body_of(a) == body_of(b)
    assert a.read_text().startswith("# schema_version=")
    assert a.with_suffix(".timing.csv").exists()
    back = read_csv(a)
    assert len(back) == 9 and back[0].L == 7
    line = body_of(a).splitlines()[1]
    assert len(line.split(",")[8]) <= 20  # 12 significant digits, not repr


def test_observable_selection_leaves_blank_columns():
    recs = compute_sweep(parse_config(SMALL + "observables = order\n"))
    assert all(math.isnan(r.osmi) and math.isnan(r.purity) for r in recs)
    assert all(not math.isnan(r.m_wfo) for r in recs)


def test_point_failures_are_flagged(monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("injected")

    monkeypatch.setattr("edgebits.harness.sweep.ground_state", boom)
    recs = compute_sweep(parse_config(SMALL))
    assert len(recs) == 9
    assert all("error-RuntimeError" in r.flag_set() for r in recs)


def test_plots_are_svg(tmp_path):
    path = run_sweep(parse_config(SMALL), tmp_path, plot=True)
    svg = path.with_suffix(".svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg


def test_profile(tmp_path):
    cfg = parse_config("L = 9\nJ_xx = 0\np_z = 0.5\noutput = prof.csv\n")
    path = run_profile(cfg, tmp_path, plot=True)
    rows = [ln.split(",") for ln in path.read_text().splitlines()[2:]]
    z = np.array([float(r[1]) for r in rows])
    zf = np.array([float(r[2]) for r in rows])
    assert z[0] == pytest.approx(1) and zf[0] == pytest.approx(-1)
    assert path.with_suffix(".svg").exists()
    with pytest.raises(ValueError):
        run_profile(parse_config(SMALL), tmp_path)


CROSS = "L = 5\nJ_xx = 0, 0.8\np_z = 0, 0.25, 0.5\n"


def test_crosscheck_passes():
    rep = run_crosscheck(parse_config(CROSS))
    assert rep.passed, rep.table()
    assert "PASS" in rep.table()


def test_crosscheck_detects_corrupted_gate(monkeypatch):
    good = choi.dephasing_gate
    monkeypatch.setattr(choi, "dephasing_gate", lambda p: good(p) @ np.diag([1, 1, 1, 1 - 1e-3]))
    rep = run_crosscheck(parse_config(CROSS))
    assert not rep.passed
    assert "FAIL" in rep.table()


def test_crosscheck_size_guard():
    with pytest.raises(ValueError):
        run_crosscheck(parse_config("L = 11\nJ_xx = 0\np_z = 0\n"))


def test_cli(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text(CROSS)
    assert main(["crosscheck", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "crosscheck.txt").exists()
    assert main(["fixed-point", "--L", "7", "--sector", "1,0"]) == 0
    out = capsys.readouterr().out
    assert "z_left=-1" in out and "weak_fidelity=1" in out
    assert main(["sweep"]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("L = 5\nJ_xx = 0\np_z = 0\nnope = 1\n")
    assert main(["sweep", "--config", str(bad)]) == 2
    cfg.write_text(SMALL)
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path), "--workers", "1"]) == 0
    assert (tmp_path / "small.csv").exists()
