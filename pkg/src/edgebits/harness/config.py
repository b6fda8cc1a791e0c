"""Flat ``key = value`` run configuration.

Lists are comma separated.  ``#`` starts a comment.  Unknown keys are an
error so that a typo never silently falls back to a default.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..dmrg import DmrgParams
from ..model import DEFAULT_EPSILON, Pinning

OBSERVABLE_GROUPS = ("order", "edge", "fractionalization", "purity")


class ConfigError(ValueError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _optional_int(text: str) -> int | None:
    return None if text.strip().lower() in ("", "none") else int(text)


_PARSERS = {
    "L": _ints,
    "J_xx": _floats,
    "p_z": _floats,
    "pinning": str.strip,
    "epsilon": float,
    "max_bond": int,
    "dmrg_cutoff": float,
    "max_sweeps": int,
    "energy_tol": float,
    "seed": int,
    "double_cutoff": float,
    "double_max_bond": _optional_int,
    "channel_cutoff": float,
    "observables": _names,
    "output": str.strip,
    "workers": int,
    "critical_low": float,
    "critical_high": float,
}


@dataclass(frozen=True)
class SweepConfig:
    L: tuple[int, ...]
    J_xx: tuple[float, ...]
    p_z: tuple[float, ...]
    pinning: str = "polarized_z"
    epsilon: float = DEFAULT_EPSILON
    dmrg: DmrgParams = field(default_factory=DmrgParams)
    double_cutoff: float = 1e-5
    double_max_bond: int | None = None
    channel_cutoff: float = 0.0
    observables: tuple[str, ...] = OBSERVABLE_GROUPS
    output: str = "sweep.csv"
    workers: int = 1
    critical_window: tuple[float, float] = (0.95, 1.05)

    def __post_init__(self):
        for name in ("L", "J_xx", "p_z"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be a nonempty list")
        if any(not 0.0 <= p <= 0.5 for p in self.p_z):
            raise ConfigError("p_z values must lie in [0, 1/2]")
        if any(L < 5 or L % 2 == 0 for L in self.L):
            raise ConfigError("chain lengths must be odd and at least 5")
        if any(J < 0 for J in self.J_xx):
            raise ConfigError("J_xx must be non-negative")
        bad = set(self.observables) - set(OBSERVABLE_GROUPS)
        if bad:
            raise ConfigError(f"unknown observable groups {sorted(bad)}; choose from {OBSERVABLE_GROUPS}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.double_cutoff < 0 or self.channel_cutoff < 0:
            raise ConfigError("cutoffs must be non-negative")
        lo, hi = self.critical_window
        if lo > hi:
            raise ConfigError("critical_low must not exceed critical_high")
        self.pinning_spec()  # validates kind and epsilon

    def pinning_spec(self) -> Pinning:
        if self.pinning == "none":
            return Pinning("none")
        try:
            return Pinning(self.pinning, self.epsilon)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def in_critical_window(self, J: float) -> bool:
        lo, hi = self.critical_window
        return lo <= J <= hi

    def with_workers(self, workers: int | None) -> "SweepConfig":
        return self if workers is None else replace(self, workers=workers)


def parse_config(text: str) -> SweepConfig:
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",), delimiters=("=",)
    )
    parser.optionxform = str  # keep J_xx and L as written
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    raw = dict(parser["run"])
    unknown = sorted(set(raw) - set(_PARSERS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        vals = {k: _PARSERS[k](v) for k, v in raw.items()}
    except ValueError as exc:
        raise ConfigError(f"bad value: {exc}") from exc
    for k in ("L", "J_xx", "p_z"):
        if k not in vals:
            raise ConfigError(f"missing required key {k}")

    dmrg_keys = {"max_bond": "max_bond", "dmrg_cutoff": "cutoff", "max_sweeps": "max_sweeps",
                 "energy_tol": "energy_tol", "seed": "seed"}
    dmrg = DmrgParams(**{dmrg_keys[k]: vals.pop(k) for k in list(vals) if k in dmrg_keys})
    window = (vals.pop("critical_low", 0.95), vals.pop("critical_high", 1.05))
    return SweepConfig(dmrg=dmrg, critical_window=window, **vals)


def load_config(path: str | Path) -> SweepConfig:
    return parse_config(Path(path).read_text())
