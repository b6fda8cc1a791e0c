"""Acceptance criteria, one test each, with a pass/fail line per criterion.

The lines are printed as the tests run (visible with ``-s``) and repeated
in the terminal summary.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from edgebits import mps as M
from edgebits import observables as ob
from edgebits import oracle
from edgebits.choi import (
    TRACE_RUNG,
    ChannelSpec,
    FixedPointLabels,
    apply_channel,
    choi_double,
    dephasing_gate,
    dephasing_gate_exponential,
    fixed_point_state,
    trace_expectation,
)
from edgebits.harness import compute_profile, load_config, read_csv, run_crosscheck, run_sweep
from edgebits.model import symmetry_generators
from edgebits.spinops import LadderOperator, string, to_dense

CONFIGS = Path(__file__).parent.parent / "configs"
LN2 = np.log(2)
P_GRID = np.round(np.linspace(0, 0.5, 11), 10)


def record(n: int, title: str, failures: list[str], elapsed: float) -> None:
    status = "PASS" if not failures else "FAIL"
    line = f"criterion {n} [{status}] {title} ({elapsed:.1f} s)"
    if failures:
        line += ": " + "; ".join(failures[:5])
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert not failures, line


def check(failures: list[str], ok: bool, what: str) -> None:
    if not ok:
        failures.append(what)


def test_1_fixed_point_identities():
    t0 = time.perf_counter()
    bad: list[str] = []
    for L in (5, 9, 23):
        flip = LadderOperator.conjugate_pair(string(L, "X0 Z1"))
        states = {(a, b): fixed_point_state(L, FixedPointLabels(a, b)) for a in (0, 1) for b in (0, 1)}
        for (a, b), rho in states.items():
            z0 = trace_expectation(rho, string(L, "Z0"))
            zl = trace_expectation(rho, string(L, f"Z{L - 1}"))
            check(bad, abs(z0 - (-1) ** a) <= 1e-12, f"L={L} ({a},{b}) Z0={z0}")
            check(bad, abs(zl - (-1) ** b) <= 1e-12, f"L={L} ({a},{b}) ZL={zl}")
            fr = ob.fractionalization_check(rho)
            check(bad, abs(fr.weak_fidelity - 1) <= 1e-12, f"L={L} weak={fr.weak_fidelity}")
            check(bad, abs(fr.strong_fidelity - 1) <= 1e-12, f"L={L} strong={fr.strong_fidelity}")
        for b in (0, 1):
            moved = M.apply_ladder_operator(states[0, b].state, flip)
            ov = abs(M.normalized_overlap(moved, states[1, b].state))
            check(bad, abs(ov - 1) <= 1e-12, f"L={L} flip overlap {ov}")
    elapsed = time.perf_counter() - t0
    check(bad, elapsed < 1.0, f"runtime {elapsed:.2f} s")
    record(1, "fixed-point identities", bad, elapsed)


def test_2_pipeline_reaches_fixed_point(ground):
    t0 = time.perf_counter()
    bad: list[str] = []
    psi = ground(11, 0.0, "polarized_z").state
    rho = apply_channel(choi_double(psi), ChannelSpec(0.5))
    ov = abs(M.normalized_overlap(rho.state, fixed_point_state(11).state))
    check(bad, abs(ov - 1) <= 1e-6, f"overlap {ov}")
    elapsed = time.perf_counter() - t0
    check(bad, elapsed < 10, f"runtime {elapsed:.1f} s")
    record(2, "pipeline reaches the fixed point", bad, elapsed)


def test_3_osmi_endpoints(ground):
    t0 = time.perf_counter()
    bad: list[str] = []
    doubled = choi_double(ground(11, 0.0, "bell_pair").state)
    curve = [ob.edge_correlations(apply_channel(doubled, ChannelSpec(p))) for p in P_GRID]
    osmi = np.array([c.osmi for c in curve])
    neg = np.array([c.mutual_negativity for c in curve])
    check(bad, abs(osmi[0] - 2 * LN2) <= 1e-6, f"OSMI(0)={osmi[0]}")
    check(bad, abs(osmi[-1] - LN2) <= 1e-6, f"OSMI(1/2)={osmi[-1]}")
    check(bad, abs(neg[0] - 2 * LN2) <= 1e-6, f"N(0)={neg[0]}")
    check(bad, abs(neg[-1] - LN2) <= 1e-6, f"N(1/2)={neg[-1]}")
    check(bad, bool(np.all(np.diff(osmi) <= 1e-12)), f"OSMI not monotone: {osmi}")
    elapsed = time.perf_counter() - t0
    check(bad, elapsed < 60, f"runtime {elapsed:.1f} s")
    record(3, "OSMI and mutual negativity endpoints", bad, elapsed)


def test_4_order_parameter_table(tmp_path):
    t0 = time.perf_counter()
    bad: list[str] = []
    cfg = load_config(CONFIGS / "order_parameters.ini")
    check(bad, cfg.L == (23,) and len(cfg.p_z) == 11, "shipped config is not the L=23 grid")
    recs = [r for r in read_csv(run_sweep(cfg, tmp_path, plot=True)) if not cfg.in_critical_window(r.J_xx)]
    for r in recs:
        check(bad, "error" not in r.flags, f"J={r.J_xx} p={r.p_z} flags {r.flags}")
        lim = 1e-6 if r.J_xx < 1 else 1e-3
        check(bad, abs(r.m_feo) < lim, f"m_feo={r.m_feo:.2e} at J={r.J_xx} p={r.p_z}")
        if r.J_xx in (0.0, 0.4, 0.8):
            check(bad, r.m_wfo < 1e-3, f"m_wfo={r.m_wfo:.2e} at J={r.J_xx} p={r.p_z}")
        if r.J_xx in (1.5, 2.0):
            check(bad, r.m_wfo > 0.99, f"m_wfo={r.m_wfo:.4f} at J={r.J_xx} p={r.p_z}")
    sfo = [r.m_sfo for r in sorted((r for r in recs if r.J_xx == 0), key=lambda r: r.p_z)]
    check(bad, len(sfo) == 11, "J=0 column missing")
    check(bad, sfo[0] >= 0.999, f"m_sfo(p=0)={sfo[0]}")
    check(bad, sfo[-1] <= 0.05, f"m_sfo(p=1/2)={sfo[-1]}")
    check(bad, bool(np.all(np.diff(sfo) <= 1e-12)), f"m_sfo not monotone: {sfo}")
    elapsed = time.perf_counter() - t0
    check(bad, elapsed < 15 * 60, f"runtime {elapsed:.0f} s")
    record(4, "order-parameter phase table at L=23", bad, elapsed)


def test_5_oracle_equivalence():
    t0 = time.perf_counter()
    cfg = load_config(CONFIGS / "crosscheck.ini")
    bad: list[str] = []
    check(bad, set(cfg.L) == {5, 7, 9} and set(cfg.J_xx) == {0, 0.4, 0.8, 1.5}
          and set(cfg.p_z) == {0, 0.1, 0.25, 0.5}, "crosscheck config grid changed")
    rep = run_crosscheck(cfg)
    for k, v in rep.max_deviation.items():
        check(bad, v <= 1e-8, f"{k} deviates by {v:.2e}")
    check(bad, len(rep.rows) == 48, f"{len(rep.rows)} points")
    elapsed = time.perf_counter() - t0
    check(bad, elapsed < 300, f"runtime {elapsed:.0f} s")
    record(5, "MPS pipeline matches the dense oracle", bad, elapsed)


def test_6_channel_identities():
    t0 = time.perf_counter()
    bad: list[str] = []
    for p in (0.1, 0.2, 0.3, 0.4):
        err = np.max(np.abs(dephasing_gate_exponential(p) - dephasing_gate(p)))
        check(bad, err < 1e-14, f"exp form off by {err:.1e} at p={p}")
    for p in np.linspace(0, 0.5, 11):
        check(bad, np.array_equal(TRACE_RUNG @ dephasing_gate(p), TRACE_RUNG), f"rung gate not trace preserving at p={p}")
    L = 5
    rng = np.random.default_rng(11)
    a = rng.normal(size=(2**L, 2**L)) + 1j * rng.normal(size=(2**L, 2**L))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    W, S = (to_dense(g) for g in symmetry_generators(L))
    for p in (0.1, 0.25, 0.5):
        out = oracle.dense_apply_channel(rho, p)
        check(bad, abs(np.trace(out) - np.trace(rho)) < 1e-14, f"trace changed at p={p}")
        for name, g in (("W", W), ("S", S)):
            err = np.max(np.abs(oracle.dense_apply_channel(g @ rho @ g, p) - g @ out @ g))
            check(bad, err < 1e-12, f"{name} conjugation off by {err:.1e}")
    elapsed = time.perf_counter() - t0
    record(6, "dephasing channel identities", bad, elapsed)


def test_7_z_profile_flip():
    t0 = time.perf_counter()
    bad: list[str] = []
    res = {J: compute_profile(load_config(CONFIGS / f"profile_J{J}.ini")) for J in ("0", "0.4", "0.8")}
    for J, r in res.items():
        check(bad, r.L == 23 and r.p_z == 0.5, f"profile_J{J} is not at L=23, p=1/2")
    z, zf = res["0"].z, res["0"].z_flipped
    for site in (0, -1):
        check(bad, abs(z[site] - 1) <= 1e-6, f"J=0 Z[{site}]={z[site]}")
        check(bad, abs(zf[site] + 1) <= 1e-6, f"J=0 flipped Z[{site}]={zf[site]}")
    z, zf = res["0.8"].z, res["0.8"].z_flipped
    bulk = np.abs(z[1:-1])
    check(bad, abs(z[0]) > bulk.max(), f"J=0.8 |Z0|={abs(z[0]):.4f} vs bulk max {bulk.max():.4f}")
    check(bad, np.max(np.abs(zf + z)) < 1e-3, f"J=0.8 flip mismatch {np.max(np.abs(zf + z)):.1e}")
    z, zf = res["0.4"].z, res["0.4"].z_flipped
    check(bad, np.max(np.abs(zf + z)) < 1e-3, f"J=0.4 flip mismatch {np.max(np.abs(zf + z)):.1e}")
    elapsed = time.perf_counter() - t0
    record(7, "Z profile flips under W at L=23", bad, elapsed)


def test_8_size_independence(tmp_path):
    t0 = time.perf_counter()
    bad: list[str] = []
    cfg = load_config(CONFIGS / "osmi_sizes.ini")
    check(bad, set(cfg.L) == {11, 15, 19, 23} and cfg.J_xx == (0.0,), "size config changed")
    recs = read_csv(run_sweep(cfg, tmp_path))
    for p in cfg.p_z:
        vals = [r.osmi for r in recs if r.p_z == p]
        check(bad, len(vals) == 4, f"missing sizes at p={p}")
        spread = max(vals) - min(vals)
        check(bad, spread < 1e-3, f"OSMI spread {spread:.1e} at p={p}")
    elapsed = time.perf_counter() - t0
    record(8, "OSMI independent of L", bad, elapsed)


@pytest.mark.slow
def test_bell_osmi_config_runs(tmp_path):
    """The shipped Bell-pair OSMI sweep runs and hits the J=0 endpoints."""
    cfg = load_config(CONFIGS / "osmi_bell.ini")
    recs = read_csv(run_sweep(cfg, tmp_path, plot=True))
    j0 = sorted((r for r in recs if r.J_xx == 0), key=lambda r: r.p_z)
    assert j0[0].osmi == pytest.approx(2 * LN2, abs=1e-6)
    assert j0[-1].osmi == pytest.approx(LN2, abs=1e-6)
    assert np.all(np.diff([r.osmi for r in j0]) <= 1e-12)
    for J in cfg.J_xx:
        if J == 0:
            continue
        col = [r.osmi for r in sorted((r for r in recs if r.J_xx == J), key=lambda r: r.p_z)]
        # dressed edges start below 2 ln 2; the p_z dependence at J_xx > 0 depends on the
        # pinning strength, so only the bounds are checked
        assert col[0] < 2 * LN2 - 1e-3, (J, col)
        assert all(0 < v < 2 * LN2 for v in col), (J, col)
