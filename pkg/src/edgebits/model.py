"""Extended cluster chain: configuration, term manifest and MPO.

    H = -sum_j Z_j X_{j+1} Z_{j+2} + J_xx sum_j X_j X_{j+1} + pinning

on an open chain of odd length L.  The MPO is produced by a small bond
automaton: every term shape gets its own chain of intermediate states, and
terms of equal shape share them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .spinops import PAULI_MATRICES, PauliString, string

PinningKind = Literal["none", "polarized_z", "bell_pair"]

DEFAULT_EPSILON = 0.05


@dataclass(frozen=True)
class Pinning:
    """Boundary field selecting an edge sector.

    ``polarized_z`` adds ``-eps (Z_0 + Z_{L-1})``; ``bell_pair`` adds
    ``-eps (Z_0 Z_{L-1} + X_0 Z_1 Z_{L-2} X_{L-1})``.
    """

    kind: PinningKind = "none"
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.kind not in ("none", "polarized_z", "bell_pair"):
            raise ValueError(f"unknown pinning kind {self.kind!r}")
        if self.kind != "none" and not self.epsilon > 0:
            raise ValueError("pinning field must be positive")

    @property
    def label(self) -> str:
        return "none" if self.kind == "none" else f"{self.kind}:{self.epsilon:g}"


NO_PINNING = Pinning("none")


@dataclass(frozen=True)
class ChainConfig:
    L: int
    J_xx: float = 0.0
    pinning: Pinning = field(default=NO_PINNING)

    def __post_init__(self):
        if self.L % 2 == 0:
            raise ValueError(f"L must be odd, got {self.L}")
        if self.L < 5:
            raise ValueError(f"L must be at least 5, got {self.L}")
        if self.J_xx < 0:
            raise ValueError("J_xx must be non-negative")


@dataclass(frozen=True)
class Term:
    coefficient: float
    op: PauliString

    def to_line(self) -> str:
        sites = " ".join(f"{j}:{self.op.factors[j]}" for j in self.op.support)
        return f"{self.coefficient:.17g} {sites}"


@dataclass
class HamiltonianMPO:
    """Per-site tensors ``W[a, b, s_out, s_in]`` plus the terms they encode."""

    tensors: list[np.ndarray]
    terms: list[Term]

    @property
    def L(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> list[int]:
        return [w.shape[1] for w in self.tensors[:-1]]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims, default=1)

    def manifest(self) -> str:
        """Plain-text audit listing: ``coefficient site:axis ...`` per line."""
        return "\n".join(t.to_line() for t in self.terms) + "\n"

    def to_dense(self) -> np.ndarray:
        from .spinops import DENSE_LIMIT

        if self.L > DENSE_LIMIT:
            raise ValueError(f"L={self.L} exceeds the dense limit")
        acc = self.tensors[0][0]  # (b, s, s')
        for w in self.tensors[1:]:
            acc = np.einsum("aij,abkl->bikjl", acc, w)
            b, i, k, j, l = acc.shape
            acc = acc.reshape(b, i * k, j * l)
        return acc[0]


def parse_manifest(text: str, L: int) -> list[Term]:
    terms = []
    for line in text.strip().splitlines():
        coef, *pairs = line.split()
        sites = {int(p.split(":")[0]): p.split(":")[1] for p in pairs}
        terms.append(Term(float(coef), PauliString.from_sites(L, sites)))
    return terms


def hamiltonian_terms(config: ChainConfig) -> list[Term]:
    L, J = config.L, config.J_xx
    terms = [Term(-1.0, string(L, f"Z{j} X{j + 1} Z{j + 2}")) for j in range(L - 2)]
    if J != 0:
        terms += [Term(J, string(L, f"X{j} X{j + 1}")) for j in range(L - 1)]
    eps = config.pinning.epsilon
    if config.pinning.kind == "polarized_z":
        terms += [Term(-eps, string(L, "Z0")), Term(-eps, string(L, f"Z{L - 1}"))]
    elif config.pinning.kind == "bell_pair":
        terms += [
            Term(-eps, string(L, f"Z0 Z{L - 1}")),
            Term(-eps, string(L, f"X0 Z1 Z{L - 2} X{L - 1}")),
        ]
    return terms


def mpo_from_terms(L: int, terms: list[Term]) -> HamiltonianMPO:
    """Finite-state-automaton MPO for a sum of real Pauli-string terms."""
    READY, DONE = "ready", "done"
    # shape -> relative factors from the first to the last non-identity site
    placed = []
    for t in terms:
        if t.op.phase != 0:
            raise ValueError("terms must carry their sign in the coefficient")
        sup = t.op.support
        if not sup:
            raise ValueError("identity terms are not supported")
        first, last = sup[0], sup[-1]
        shape = tuple(t.op.factors[first : last + 1])
        placed.append((first, shape, t.coefficient))

    # states alive on bond j (between site j and j+1)
    bond_states: list[list] = [[READY, DONE] for _ in range(L - 1)]
    for first, shape, _ in placed:
        for k in range(len(shape) - 1):
            st = (shape, k)
            if st not in bond_states[first + k]:
                bond_states[first + k].append(st)
    left = [[READY]] + bond_states
    right = bond_states + [[DONE]]
    index_l = [{s: i for i, s in enumerate(states)} for states in left]
    index_r = [{s: i for i, s in enumerate(states)} for states in right]

    tensors = [np.zeros((len(left[j]), len(right[j]), 2, 2)) for j in range(L)]
    eye = PAULI_MATRICES["I"].real
    for j in range(L):
        w, il, ir = tensors[j], index_l[j], index_r[j]
        if READY in il and READY in ir:
            w[il[READY], ir[READY]] = eye
        if DONE in il and DONE in ir:
            w[il[DONE], ir[DONE]] = eye
    for first, shape, coef in placed:
        for k, axis in enumerate(shape):
            j = first + k
            src = READY if k == 0 else (shape, k - 1)
            dst = DONE if k == len(shape) - 1 else (shape, k)
            mat = PAULI_MATRICES[axis].real * (coef if k == 0 else 1.0)
            tensors[j][index_l[j][src], index_r[j][dst]] += mat
    return HamiltonianMPO(tensors, list(terms))


def build_hamiltonian(config: ChainConfig) -> HamiltonianMPO:
    return mpo_from_terms(config.L, hamiltonian_terms(config))


def symmetry_generators(L: int) -> tuple[PauliString, PauliString]:
    """``W`` (X on every even site) and ``S`` (X on every odd site)."""
    if L % 2 == 0:
        raise ValueError("L must be odd")
    W = PauliString.from_sites(L, {j: "X" for j in range(0, L, 2)})
    S = PauliString.from_sites(L, {j: "X" for j in range(1, L, 2)})
    return W, S


def edge_operators(L: int) -> dict[str, PauliString]:
    """Fixed-point logical operators on the two edges."""
    return {
        "Z_left": string(L, "Z0"),
        "Z_right": string(L, f"Z{L - 1}"),
        "XZ_left": string(L, "X0 Z1"),
        "ZX_right": string(L, f"Z{L - 2} X{L - 1}"),
    }
