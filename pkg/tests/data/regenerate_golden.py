"""Rewrite the golden oracle records.  Run from anywhere: python3 tests/data/regenerate_golden.py"""

from pathlib import Path

from edgebits.model import ChainConfig, Pinning
from edgebits.oracle import dense_record, write_golden

HERE = Path(__file__).parent

POINTS = [
    (5, 0.0, 0.25, "polarized_z"),
    (7, 0.8, 0.1, "polarized_z"),
    (7, 0.0, 0.0, "bell_pair"),
    (7, 0.4, 0.5, "bell_pair"),
    (9, 1.5, 0.5, "polarized_z"),
]


def golden_name(L, J, p, kind):
    return f"golden_L{L}_J{J:g}_p{p:g}_{kind}.txt"


def main():
    for L, J, p, kind in POINTS:
        rec = dense_record(ChainConfig(L, J, Pinning(kind, 0.05)), p)
        header = {"L": L, "J_xx": J, "p_z": p, "pinning": kind, "epsilon": 0.05}
        write_golden(HERE / golden_name(L, J, p, kind), rec, {k: str(v) for k, v in header.items()})


if __name__ == "__main__":
    main()
