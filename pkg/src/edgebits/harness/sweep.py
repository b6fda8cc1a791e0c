"""Prepare, decohere and measure over a parameter grid.

Work is split into one task per ``(L, J_xx)``: the ground state is found
once and reused for every ``p_z``.  Tasks are independent and seeded, so
the output does not depend on how they are scheduled.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .. import choi
from .. import observables as ob
from ..dmrg import DmrgResult, NonConvergenceWarning, dmrg_ground_state
from ..model import ChainConfig, build_hamiltonian
from .config import SweepConfig

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass
class SweepRecord:
    L: int
    J_xx: float
    p_z: float
    pinning: str
    alpha: int | None = None
    beta: int | None = None
    m_feo: float = math.nan
    m_wfo: float = math.nan
    m_sfo: float = math.nan
    osmi: float = math.nan
    s_A: float = math.nan
    s_B: float = math.nan
    s_AB: float = math.nan
    mutual_negativity: float = math.nan
    purity: float = math.nan
    weak_fidelity: float = math.nan
    strong_fidelity: float = math.nan
    max_bond: int = 0
    truncation: float = 0.0
    flags: str = ""
    wall_time: float = 0.0  # kept out of the CSV body, see write_csv

    @property
    def key(self) -> tuple[int, float, float]:
        return (self.L, self.J_xx, self.p_z)

    def flag_set(self) -> set[str]:
        return set(filter(None, self.flags.split(";")))


CSV_COLUMNS = [f.name for f in fields(SweepRecord) if f.name != "wall_time"]


def ground_state(L: int, J: float, config: SweepConfig) -> DmrgResult:
    chain = ChainConfig(L, J, config.pinning_spec())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonConvergenceWarning)
        return dmrg_ground_state(build_hamiltonian(chain), config.dmrg)


def measure(rho: choi.ChoiState, record: SweepRecord, groups: tuple[str, ...]) -> None:
    """Fill the selected observable columns of ``record`` in place."""
    labels = ob.sector_labels(rho)
    if labels is None:
        record.alpha = record.beta = None
    else:
        record.alpha, record.beta = labels
    if "order" in groups:
        op = ob.order_parameters(rho)
        record.m_feo, record.m_wfo, record.m_sfo = op.m_feo, op.m_wfo, op.m_sfo
    if "edge" in groups:
        ec = ob.edge_correlations(rho)
        record.s_A, record.s_B, record.s_AB = ec.s_A, ec.s_B, ec.s_AB
        record.osmi, record.mutual_negativity = ec.osmi, ec.mutual_negativity
    if "fractionalization" in groups:
        fr = ob.fractionalization_check(rho)
        record.weak_fidelity, record.strong_fidelity = fr.weak_fidelity, fr.strong_fidelity
    if "purity" in groups:
        record.purity = choi.purity(rho)


def _flags(*tags: str) -> str:
    return ";".join(sorted(t for t in tags if t))


def run_column(config: SweepConfig, L: int, J: float) -> list[SweepRecord]:
    """Every ``p_z`` of one ``(L, J_xx)`` column; failures are recorded, not raised."""
    records = []
    critical = "critical-window" if config.in_critical_window(J) else ""
    t0 = time.perf_counter()
    try:
        gs = ground_state(L, J, config)
        doubled = choi.choi_double(gs.state, cutoff=config.double_cutoff, max_bond=config.double_max_bond)
        setup_error = ""
    except Exception as exc:  # noqa: BLE001 - reported in the flags column
        log.exception("ground state failed at L=%d J=%g", L, J)
        gs, doubled, setup_error = None, None, f"error-{type(exc).__name__}"
    setup_time = time.perf_counter() - t0

    for p in config.p_z:
        t1 = time.perf_counter()
        rec = SweepRecord(L, J, p, config.pinning_spec().label)
        if doubled is None:
            rec.flags = _flags(critical, setup_error)
            records.append(rec)
            continue
        error = ""
        try:
            rho = choi.apply_channel(doubled, choi.ChannelSpec(p), cutoff=config.channel_cutoff)
            measure(rho, rec, config.observables)
            rec.max_bond = max(gs.state.max_bond, rho.state.max_bond)
            rec.truncation = max(gs.max_discarded, rho.truncation)
        except Exception as exc:  # noqa: BLE001
            log.exception("point failed at L=%d J=%g p=%g", L, J, p)
            error = f"error-{type(exc).__name__}"
        rec.flags = _flags(
            critical,
            "unlabeled-sector" if rec.alpha is None else "",
            "" if gs.converged else "non-converged",
            error,
        )
        rec.wall_time = time.perf_counter() - t1 + setup_time / len(config.p_z)
        records.append(rec)
    return records


def _column_task(args) -> list[SweepRecord]:
    return run_column(*args)


def compute_sweep(config: SweepConfig) -> list[SweepRecord]:
    tasks = [(config, L, J) for L in sorted(set(config.L)) for J in sorted(set(config.J_xx))]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            columns = list(pool.map(_column_task, tasks))
    else:
        columns = [_column_task(t) for t in tasks]
    records = [r for col in columns for r in col]
    return sorted(records, key=lambda r: r.key)


# ---------------------------------------------------------------- output


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def csv_body(records: list[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        row = asdict(rec)
        writer.writerow([_cell(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(records: list[SweepRecord], path: Path, comment: str = "") -> Path:
    """CSV with a comment header; wall times go to a ``.timing.csv`` sidecar.

    Only the ``#`` lines carry run-dependent content, so two runs of one
    config give byte-identical bodies.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    header = [f"# schema_version={SCHEMA_VERSION}", f"# created={stamp}"]
    if comment:
        header.append(f"# {comment}")
    path.write_text("\n".join(header) + "\n" + csv_body(records))
    timing = path.with_suffix(".timing.csv")
    timing.write_text("L,J_xx,p_z,wall_time\n" + "".join(
        f"{r.L},{_cell(r.J_xx)},{_cell(r.p_z)},{r.wall_time:.3f}\n" for r in records
    ))
    return path


def read_csv(path: Path) -> list[SweepRecord]:
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    out = []
    types = {f.name: f.type for f in fields(SweepRecord)}
    for row in csv.DictReader(lines):
        kw = {}
        for name, text in row.items():
            t = types[name]
            if "str" in str(t):
                kw[name] = text
            elif text == "":
                kw[name] = None
            elif "int" in str(t) and "float" not in str(t):
                kw[name] = int(text)
            else:
                kw[name] = float(text)
        out.append(SweepRecord(**kw))
    return out


def body_of(path: Path) -> str:
    return "".join(ln for ln in Path(path).read_text().splitlines(keepends=True) if not ln.startswith("#"))


def run_sweep(config: SweepConfig, out_dir: str | Path = ".", plot: bool = False) -> Path:
    records = compute_sweep(config)
    path = write_csv(records, Path(out_dir) / config.output,
                     comment=f"pinning={config.pinning_spec().label} workers={config.workers}")
    if plot:
        from .plots import plot_sweep

        plot_sweep(records, path.with_suffix(".svg"))
    bad = [r for r in records if any(f.startswith("error") for f in r.flag_set())]
    if bad:
        log.warning("%d grid points failed; see the flags column", len(bad))
    return path
