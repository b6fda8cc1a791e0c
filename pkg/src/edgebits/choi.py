"""Doubled (Choi) representation of density matrices on the rung chain.

A density matrix ``rho`` is stored as the vector with rung amplitudes
``vec[(u=k, l=m)] = rho[m, k]``: the upper leg carries the column (bra)
index and the lower leg the row (ket) index.  A pure state doubles to
``|psi*>_u |psi>_l`` and a Kraus channel becomes ``sum_a K_a* (x) K_a``.
No ``1/sqrt(dim)`` prefactor is kept; every observable is a ratio.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.linalg

from . import mps as mpslib
from .model import symmetry_generators
from .mps import MPS
from .spinops import PAULI_MATRICES, LadderOperator, PauliString

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
TRACE_RUNG = np.array([1.0, 0.0, 0.0, 1.0])
SWAP_RUNG = np.eye(4)[[0, 2, 1, 3]]


class HermiticityError(RuntimeError):
    """A quantity that must be real came out complex."""


@dataclass
class ChoiState:
    state: MPS
    normalized: bool = True
    log_purity_prenorm: float = 0.0
    provenance: str = ""
    truncation: float = 0.0  # largest discarded Schmidt weight so far

    def __post_init__(self):
        if self.state.d != 4:
            raise ValueError("Choi states live on rungs of dimension 4")

    @property
    def L(self) -> int:
        return self.state.L

    def to_dense_matrix(self) -> np.ndarray:
        """Density matrix (trace one) of small states, for cross-checks."""
        vec = self.state.to_dense().reshape([2, 2] * self.L)
        L = self.L
        # axes u_0, l_0, u_1, l_1, ...; rho[m, k] with m the lower legs
        rho = vec.transpose(list(range(1, 2 * L, 2)) + list(range(0, 2 * L, 2))).reshape(2 ** L, 2 ** L)
        return rho / np.trace(rho)


@dataclass(frozen=True)
class ChannelSpec:
    p_z: float

    def __post_init__(self):
        if not 0.0 <= self.p_z <= 0.5:
            raise ValueError(f"p_z must lie in [0, 1/2], got {self.p_z}")


@dataclass(frozen=True)
class FixedPointLabels:
    alpha: int = 0
    beta: int = 0
    weights: Mapping[tuple[int, int], float] | None = field(default=None)

    def __post_init__(self):
        if self.alpha not in (0, 1) or self.beta not in (0, 1):
            raise ValueError("edge labels are 0 or 1")
        if self.weights is not None:
            w = np.array(list(self.weights.values()), dtype=float)
            if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
                raise ValueError("mixture weights must be non-negative and sum to one")
            if any(k not in [(0, 0), (0, 1), (1, 0), (1, 1)] for k in self.weights):
                raise ValueError("mixture keys are (alpha, beta) pairs")

    def components(self) -> dict[tuple[int, int], float]:
        if self.weights is None:
            return {(self.alpha, self.beta): 1.0}
        return {k: float(v) for k, v in self.weights.items() if v > 0}


# ---------------------------------------------------------------- construction


def _renormalized(state: MPS, provenance: str, prior: float = 0.0, truncation: float = 0.0) -> ChoiState:
    c = mpslib.canonicalize(state, state.center if state.center is not None else 0)
    log_prenorm = 2.0 * c.log_norm + prior
    return ChoiState(mpslib.normalize(c), True, log_prenorm, provenance, truncation)


def choi_double(psi: MPS, cutoff: float = 0.0, max_bond: int | None = None, provenance: str = "") -> ChoiState:
    """Double a pure chain state into ``|psi*>_u |psi>_l``.

    With ``cutoff=0`` the double is exact (bond ``chi**2``).  Otherwise only
    bond index pairs whose Schmidt product ``s_i s_j`` is at least
    ``cutoff`` survive (at most ``max_bond`` per bond), which is the Schmidt
    truncation of the doubled state done without ever forming it in full.
    """
    if psi.d != 2:
        raise ValueError("choi_double expects a chain state with d=2")
    tensors, spectra = mpslib.left_schmidt_form(psi)
    keep = []
    discarded = 0.0
    for s in spectra:
        prod = np.outer(s, s).ravel()
        order = np.argsort(-prod, kind="stable")
        n = int(np.sum(prod >= cutoff)) if cutoff > 0 else prod.size
        n = max(1, n if max_bond is None else min(n, max_bond))
        discarded = max(discarded, float(np.sum(prod[order[n:]] ** 2)))
        keep.append(np.sort(order[:n]))
    doubled = []
    last = len(tensors) - 1
    for j, t in enumerate(tensors):
        l, _, r = t.shape
        lk = keep[j - 1] if j > 0 else np.arange(l * l)
        rk = keep[j] if j < last else np.arange(r * r)
        upper = t.conj()[lk // l][:, :, rk // r]
        lower = t[lk % l][:, :, rk % r]
        doubled.append(np.einsum("kum,klm->kulm", upper, lower).reshape(len(lk), 4, len(rk)))
    state = mpslib.canonicalize(MPS(doubled), psi.L - 1)
    tag = provenance or "double"
    return _renormalized(state, tag, truncation=discarded)


def dephasing_gate(p_z: float) -> np.ndarray:
    """Rung form of ``rho -> (1-p) rho + p Z rho Z``: ``(1-p) I(x)I + p Z(x)Z``."""
    ChannelSpec(p_z)
    return np.diag([1.0, 1.0 - 2.0 * p_z, 1.0 - 2.0 * p_z, 1.0])


def dephasing_gate_exponential(p_z: float) -> np.ndarray:
    """Same gate written as ``c * exp(tau Z(x)Z)``; only defined for p_z < 1/2."""
    ChannelSpec(p_z)
    if p_z >= 0.5:
        raise ValueError("the exponential form diverges at p_z = 1/2")
    tau = np.arctanh(p_z / (1.0 - p_z))
    zz = np.kron(PAULI_MATRICES["Z"].real, PAULI_MATRICES["Z"].real)
    return (1.0 - p_z) / np.cosh(tau) * scipy.linalg.expm(tau * zz)


def apply_channel(
    rho: ChoiState, spec: ChannelSpec, cutoff: float = 0.0, max_bond: int | None = None
) -> ChoiState:
    """Dephase every even site, then renormalize the Choi vector.

    A positive ``cutoff`` recompresses the result (Schmidt values relative
    to the norm).
    """
    if spec.p_z == 0:
        return rho
    gate = dephasing_gate(spec.p_z)
    out = mpslib.apply_site_gates(rho.state, {j: gate for j in range(0, rho.L, 2)})
    lost = 0.0
    if cutoff > 0 or max_bond is not None:
        out, lost = mpslib.compress(out, cutoff=max(cutoff, 1e-15), max_bond=max_bond)
    tag = f"{rho.provenance}|dephase(p_z={spec.p_z:g})"
    return _renormalized(out, tag, rho.log_purity_prenorm, max(rho.truncation, lost))


def identity_boundary(L: int) -> MPS:
    """Unnormalized ``|1>> = prod_j (|00> + |11>)``; contracting it takes the trace."""
    return MPS([TRACE_RUNG.reshape(1, 4, 1).copy() for _ in range(L)], center=None)


def _trace_functional(rho: ChoiState, op: PauliString | None) -> tuple[complex, float]:
    vectors = []
    mats = op.local_matrices() if op is not None else [None] * rho.L
    for m in mats:
        if m is None:
            vectors.append(TRACE_RUNG)
        else:
            # <<1| (O^T)_u gives Tr[rho O]
            vectors.append(TRACE_RUNG @ np.kron(m.T, np.eye(2)))
    return mpslib.contract_with_product(rho.state, vectors)


def trace_expectation(rho: ChoiState, op_upper: PauliString, imag_tol: float = 1e-10) -> float:
    """``Tr[rho O] / Tr[rho]`` read off the Choi vector."""
    if op_upper.length != rho.L:
        raise ValueError("operator length does not match the state")
    num, s1 = _trace_functional(rho, op_upper)
    den, s2 = _trace_functional(rho, None)
    val = num / den * np.exp(s1 - s2)
    if abs(val.imag) > imag_tol:
        raise HermiticityError(f"Tr[rho O] has imaginary part {val.imag:.3e}")
    return float(val.real)


def trace_norm_scale(rho: ChoiState) -> tuple[complex, float]:
    """``<<1|rho>>`` as ``(value, log_scale)``."""
    return _trace_functional(rho, None)


def purity(rho: ChoiState) -> float:
    """``Tr[rho^2] / Tr[rho]^2`` of the encoded operator."""
    nv, ns = mpslib.log_overlap(rho.state, rho.state)
    tv, ts = trace_norm_scale(rho)
    return float((nv.real / abs(tv) ** 2) * np.exp(ns - 2 * ts))


def hermiticity_residual(rho: ChoiState) -> float:
    """Distance between the vector and its u<->l swapped conjugate (zero if rho is Hermitian)."""
    swapped = mpslib.apply_unitary_string(rho.state.conj(), [SWAP_RUNG] * rho.L)
    return float(abs(1.0 - mpslib.normalized_overlap(rho.state, swapped)))


# ---------------------------------------------------------------- fixed point


def _fixed_point_component(L: int, alpha: int, beta: int) -> MPS:
    """Bond-2 rung MPS of the fixed-point ASPT operator for one edge sector.

    Even sites use the z basis with virtual projectors; odd sites use the x
    basis, where the virtual spin is flipped for ``x = -1``.  Odd rungs are
    rotated to the z basis at the end.
    """
    proj = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    flip = [np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])]
    tensors = []
    for j in range(L):
        t = np.zeros((2, 4, 2))
        for k in range(2):
            # diagonal operator |k><k| in the local basis -> rung index 2k + k
            t[:, 3 * k, :] = proj[k] if j % 2 == 0 else flip[k]
        tensors.append(t)
    left = np.eye(2)[alpha]
    right = np.eye(2)[beta]
    tensors[0] = np.tensordot(left, tensors[0], axes=(0, 0))[None]
    tensors[-1] = np.tensordot(tensors[-1], right, axes=(2, 0))[:, :, None]
    rot = np.kron(HADAMARD, HADAMARD)
    tensors = [np.einsum("st,ltr->lsr", rot, t) if j % 2 else t for j, t in enumerate(tensors)]
    return MPS(tensors)


def fixed_point_state(L: int, labels: FixedPointLabels = FixedPointLabels()) -> ChoiState:
    """Choi vector of the fixed-point ASPT, or the weighted sum of sector vectors.

    All sectors have equal trace, so the weighted sum of Choi vectors is the
    Choi vector of the classical mixture.
    """
    if L % 2 == 0:
        raise ValueError("L must be odd")
    state = None
    for (a, b), w in sorted(labels.components().items()):
        part = _fixed_point_component(L, a, b)
        if state is None:
            part.log_norm += np.log(w)
            state = part
        else:
            state = mpslib.add(state, part, 1.0, w)
    state, _ = mpslib.compress(state, cutoff=1e-12)
    desc = ",".join(f"{a}{b}:{w:g}" for (a, b), w in sorted(labels.components().items()))
    return _renormalized(state, f"fixed_point(L={L};{desc})")


@dataclass(frozen=True)
class SymmetryReport:
    strong_S: bool
    weak_W: bool
    strong_overlap: complex
    weak_overlap: complex


def ladder_expectation(rho: ChoiState, op: LadderOperator) -> complex:
    """``<<rho| op |rho>> / <<rho|rho>>``."""
    moved = mpslib.apply_ladder_operator(rho.state, op)
    num, s1 = mpslib.log_overlap(rho.state, moved)
    den, s2 = mpslib.log_overlap(rho.state, rho.state)
    return num / den.real * np.exp(s1 - s2)


def symmetry_predicates(rho: ChoiState, tol: float = 1e-8) -> SymmetryReport:
    """Strong S (``S*_u (x) 1`` fixes the vector up to a phase) and weak W
    (``W*_u (x) W_l`` fixes the vector)."""
    W, S = symmetry_generators(rho.L)
    s_val = ladder_expectation(rho, LadderOperator.upper_only(S.conj()))
    w_val = ladder_expectation(rho, LadderOperator.conjugate_pair(W))
    return SymmetryReport(bool(abs(abs(s_val) - 1) < tol), bool(abs(abs(w_val) - 1) < tol), s_val, w_val)
