"""Single-point profile, dense cross-check and fixed-point diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import choi
from .. import observables as ob
from .. import oracle
from ..model import ChainConfig
from ..spinops import string
from .config import SweepConfig
from .sweep import _cell, ground_state

CROSSCHECK_TOL = 1e-8


# ---------------------------------------------------------------- profile


@dataclass(frozen=True)
class ProfileResult:
    L: int
    J_xx: float
    p_z: float
    z: np.ndarray
    z_flipped: np.ndarray


def compute_profile(config: SweepConfig) -> ProfileResult:
    if len(config.L) != 1 or len(config.J_xx) != 1 or len(config.p_z) != 1:
        raise ValueError("a profile run needs exactly one L, J_xx and p_z")
    if config.pinning != "polarized_z":
        raise ValueError("profiles are defined for polarized_z pinning")
    L, J, p = config.L[0], config.J_xx[0], config.p_z[0]
    gs = ground_state(L, J, config)
    rho = choi.apply_channel(
        choi.choi_double(gs.state, cutoff=config.double_cutoff, max_bond=config.double_max_bond),
        choi.ChannelSpec(p),
        cutoff=config.channel_cutoff,
    )
    return ProfileResult(L, J, p, ob.z_profile(rho).values, ob.z_profile(rho, flip=True).values)


def run_profile(config: SweepConfig, out_dir: str | Path = ".", plot: bool = False) -> Path:
    res = compute_profile(config)
    path = Path(out_dir) / config.output
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# L={res.L} J_xx={res.J_xx:g} p_z={res.p_z:g}", "site,z,z_flipped"]
    lines += [f"{j},{_cell(a)},{_cell(b)}" for j, (a, b) in enumerate(zip(res.z, res.z_flipped))]
    path.write_text("\n".join(lines) + "\n")
    if plot:
        from .plots import plot_profile

        plot_profile(res.z, res.z_flipped, path.with_suffix(".svg"),
                     title=f"L={res.L}, J_xx={res.J_xx:g}, p_z={res.p_z:g}")
    return path


# ---------------------------------------------------------------- crosscheck

COMPARED = (
    "m_feo", "m_wfo", "m_sfo", "weak_fidelity", "strong_fidelity",
    "s_A", "s_B", "s_AB", "osmi", "n_A", "n_B", "n_AB", "mutual_negativity",
    "purity", "z_profile", "z_profile_flipped",
)


@dataclass
class CrosscheckReport:
    tolerance: float
    rows: list[tuple[int, float, float, dict[str, float]]] = field(default_factory=list)

    @property
    def max_deviation(self) -> dict[str, float]:
        return {k: max((r[3][k] for r in self.rows), default=0.0) for k in COMPARED}

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(
            math.isfinite(v) and v <= self.tolerance for v in self.max_deviation.values()
        )

    def table(self) -> str:
        lines = [f"{'observable':<20} {'max deviation':>14}  status"]
        for k, v in self.max_deviation.items():
            ok = math.isfinite(v) and v <= self.tolerance
            lines.append(f"{k:<20} {v:>14.3e}  {'ok' if ok else 'FAIL'}")
        lines.append(f"points: {len(self.rows)}  tolerance: {self.tolerance:g}  "
                     f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def pipeline_values(rho: choi.ChoiState) -> dict[str, object]:
    op = ob.order_parameters(rho)
    fr = ob.fractionalization_check(rho)
    ec = ob.edge_correlations(rho)
    return {
        "m_feo": op.m_feo, "m_wfo": op.m_wfo, "m_sfo": op.m_sfo,
        "weak_fidelity": fr.weak_fidelity, "strong_fidelity": fr.strong_fidelity,
        "s_A": ec.s_A, "s_B": ec.s_B, "s_AB": ec.s_AB, "osmi": ec.osmi,
        "n_A": ec.n_A, "n_B": ec.n_B, "n_AB": ec.n_AB, "mutual_negativity": ec.mutual_negativity,
        "purity": choi.purity(rho),
        "z_profile": ob.z_profile(rho).values,
        "z_profile_flipped": ob.z_profile(rho, flip=True).values,
    }


def dense_values(chain: ChainConfig, p: float, allow_large: bool) -> dict[str, object]:
    psi, _ = oracle.dense_ground_state(chain)
    rho = oracle.dense_apply_channel(oracle.pure_density(psi), p, allow_large)
    vals: dict[str, object] = oracle.dense_observables(rho, allow_large).as_dict()
    vals["z_profile"] = oracle.dense_z_profile(rho)
    vals["z_profile_flipped"] = oracle.dense_z_profile(rho, flip=True)
    return vals


def run_crosscheck(config: SweepConfig, allow_large: bool = False, tol: float = CROSSCHECK_TOL) -> CrosscheckReport:
    """MPS pipeline against the dense oracle on every grid point.

    The doubled state is formed without truncation here so the comparison
    measures the pipeline itself, not a cutoff choice.
    """
    limit = oracle.MAX_DENSE_OVERRIDE if allow_large else oracle.MAX_DENSE_OBSERVABLES
    too_big = [L for L in config.L if L > limit]
    if too_big:
        raise oracle.OracleSizeError(f"crosscheck sizes {too_big} exceed L <= {limit}")
    report = CrosscheckReport(tol)
    for L in sorted(set(config.L)):
        for J in sorted(set(config.J_xx)):
            chain = ChainConfig(L, J, config.pinning_spec())
            doubled = choi.choi_double(ground_state(L, J, config).state)
            for p in sorted(set(config.p_z)):
                mine = pipeline_values(choi.apply_channel(doubled, choi.ChannelSpec(p)))
                ref = dense_values(chain, p, allow_large)
                dev = {k: float(np.max(np.abs(np.asarray(mine[k]) - np.asarray(ref[k])))) for k in COMPARED}
                report.rows.append((L, J, p, dev))
    return report


# ---------------------------------------------------------------- fixed point


def fixed_point_report(L: int, labels: choi.FixedPointLabels) -> dict[str, float]:
    rho = choi.fixed_point_state(L, labels)
    op = ob.order_parameters(rho)
    fr = ob.fractionalization_check(rho)
    ec = ob.edge_correlations(rho)
    sym = choi.symmetry_predicates(rho)
    return {
        "L": L,
        "z_left": choi.trace_expectation(rho, string(L, "Z0")),
        "z_right": choi.trace_expectation(rho, string(L, f"Z{L - 1}")),
        "purity": choi.purity(rho),
        "hermiticity_residual": choi.hermiticity_residual(rho),
        "strong_S": sym.strong_S,
        "weak_W": sym.weak_W,
        "weak_fidelity": fr.weak_fidelity,
        "strong_fidelity": fr.strong_fidelity,
        "m_feo": op.m_feo,
        "m_wfo": op.m_wfo,
        "m_sfo": op.m_sfo,
        "osmi": ec.osmi,
        "mutual_negativity": ec.mutual_negativity,
        "max_bond": rho.state.max_bond,
    }
