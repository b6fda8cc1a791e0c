"""Self-contained SVG figures (matplotlib, Agg backend)."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed ids and no date keep the SVG text stable between runs
plt.rcParams["svg.hashsalt"] = "edgebits"
plt.rcParams["svg.fonttype"] = "path"

_META = {"Date": None, "Creator": "edgebits"}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)
    return path


def plot_sweep(records, path: Path) -> Path:
    """m_feo/m_wfo against J_xx, m_sfo and OSMI against p_z."""
    fig, axes = plt.subplots(2, 2, figsize=(10, 8))
    by_p = defaultdict(list)
    by_j = defaultdict(list)
    for r in records:
        by_p[(r.L, r.p_z)].append(r)
        by_j[(r.L, r.J_xx)].append(r)

    cmap = plt.get_cmap("viridis")
    for i, ((L, p), rows) in enumerate(sorted(by_p.items())):
        rows.sort(key=lambda r: r.J_xx)
        J = [r.J_xx for r in rows]
        c = cmap(i / max(1, len(by_p) - 1))
        axes[0, 0].plot(J, [r.m_feo for r in rows], "o-", color=c, ms=3, label=f"L={L}, p={p:g}")
        axes[0, 1].plot(J, [r.m_wfo for r in rows], "o-", color=c, ms=3)
    axes[0, 0].set(xlabel="J_xx", ylabel="m_feo", ylim=(-0.05, 1.05))
    axes[0, 1].set(xlabel="J_xx", ylabel="m_wfo", ylim=(-0.05, 1.05))
    if len(by_p) <= 12:
        axes[0, 0].legend(fontsize=6)

    for i, ((L, J), rows) in enumerate(sorted(by_j.items())):
        rows.sort(key=lambda r: r.p_z)
        p = [r.p_z for r in rows]
        c = plt.get_cmap("plasma")(i / max(1, len(by_j) - 1))
        axes[1, 0].plot(p, [r.m_sfo for r in rows], "o-", color=c, ms=3, label=f"L={L}, J={J:g}")
        axes[1, 1].plot(p, [r.osmi for r in rows], "o-", color=c, ms=3, label=f"L={L}, J={J:g}")
    for ref, name in ((2 * np.log(2), "2 ln 2"), (np.log(2), "ln 2")):
        axes[1, 1].axhline(ref, color="gray", ls="--", lw=0.8)
        axes[1, 1].text(0.0, ref, name, fontsize=7, va="bottom")
    axes[1, 0].set(xlabel="p_z", ylabel="m_sfo", ylim=(-0.05, 1.05))
    axes[1, 1].set(xlabel="p_z", ylabel="OSMI")
    if len(by_j) <= 12:
        axes[1, 0].legend(fontsize=6)
        axes[1, 1].legend(fontsize=6)
    return _save(fig, path)


def plot_profile(z: np.ndarray, z_flipped: np.ndarray, path: Path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(7, 3.5))
    sites = np.arange(len(z))
    ax.plot(sites, z, "o-", label="rho")
    ax.plot(sites, z_flipped, "s--", label="W rho W")
    ax.axhline(0, color="gray", lw=0.5)
    ax.set(xlabel="site j", ylabel="<Z_j>", ylim=(-1.1, 1.1), title=title)
    ax.legend()
    return _save(fig, path)
