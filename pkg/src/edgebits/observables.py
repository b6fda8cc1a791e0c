"""Edge diagnostics of decohered Choi states.

Order parameters are normalized brackets ``<<rho| O |rho>> / <<rho|rho>>``
of real ladder operators; entanglement quantities use the reduced density
matrices of the edge rungs (rung 0 is subsystem A, rung L-1 is B).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import mps as mpslib
from .choi import ChoiState, HermiticityError, ladder_expectation, trace_expectation
from .model import symmetry_generators
from .spinops import LadderOperator, PauliString, assert_real_ladder, multiply, string

IMAG_TOL = 1e-8
EIG_FLOOR = 1e-14

Subsystem = Literal["A", "B", "AB"]


@dataclass(frozen=True)
class OrderParameterRecord:
    m_feo: float
    m_wfo: float
    m_sfo: float
    residuals: tuple[float, float, float]


@dataclass(frozen=True)
class EdgeCorrelationRecord:
    s_A: float
    s_B: float
    s_AB: float
    osmi: float
    n_A: float
    n_B: float
    n_AB: float
    mutual_negativity: float


@dataclass(frozen=True)
class FractionalizationRecord:
    weak_fidelity: float
    strong_fidelity: float


@dataclass(frozen=True)
class ZProfile:
    values: np.ndarray
    flipped: bool = False


# ---------------------------------------------------------------- operators


def feo_operator(L: int) -> LadderOperator:
    return LadderOperator.conjugate_pair(string(L, "X0 Z1"))


def wfo_operator(L: int) -> LadderOperator:
    W, _ = symmetry_generators(L)
    return LadderOperator.conjugate_pair(W)


def edge_flip_string(L: int) -> PauliString:
    """``(X_0 Z_1)(Z_{L-2} X_{L-1})``, the fixed-point image of W."""
    return string(L, f"X0 Z1 Z{L - 2} X{L - 1}")


def sfo_operator(L: int) -> LadderOperator:
    W, _ = symmetry_generators(L)
    return LadderOperator.upper_only(multiply(edge_flip_string(L), W.conj()))


def _real_bracket(rho: ChoiState, op: LadderOperator) -> tuple[float, float]:
    assert_real_ladder([op])
    val = ladder_expectation(rho, op)
    if abs(val.imag) > IMAG_TOL:
        raise HermiticityError(f"bracket has imaginary part {val.imag:.3e}")
    return float(val.real), float(abs(val.imag))


def m_feo(rho: ChoiState) -> float:
    return _real_bracket(rho, feo_operator(rho.L))[0]


def m_wfo(rho: ChoiState) -> float:
    return _real_bracket(rho, wfo_operator(rho.L))[0]


def m_sfo(rho: ChoiState) -> float:
    return _real_bracket(rho, sfo_operator(rho.L))[0]


def order_parameters(rho: ChoiState) -> OrderParameterRecord:
    L = rho.L
    vals = [_real_bracket(rho, op) for op in (feo_operator(L), wfo_operator(L), sfo_operator(L))]
    return OrderParameterRecord(vals[0][0], vals[1][0], vals[2][0], tuple(v[1] for v in vals))


def fractionalization_check(rho: ChoiState) -> FractionalizationRecord:
    """Fidelity between each symmetry action and its edge-operator image.

    Weak: ``W*_u W_l`` against ``Q*_u Q_l`` with ``Q = X_0 Z_1 Z_{L-2} X_{L-1}``.
    Strong: ``S*_u`` against ``(Z_0 Z_{L-1})_u``.
    """
    L = rho.L
    W, S = symmetry_generators(L)
    pairs = [
        (wfo_operator(L), LadderOperator.conjugate_pair(edge_flip_string(L))),
        (LadderOperator.upper_only(S.conj()), LadderOperator.upper_only(string(L, f"Z0 Z{L - 1}"))),
    ]
    fids = []
    for sym, edge in pairs:
        a = mpslib.apply_ladder_operator(rho.state, sym)
        b = mpslib.apply_ladder_operator(rho.state, edge)
        fids.append(float(abs(mpslib.normalized_overlap(a, b))))
    return FractionalizationRecord(*fids)


def z_profile(rho: ChoiState, flip: bool = False) -> ZProfile:
    """``Tr[rho Z_j]`` on every site, optionally after ``W*_u W_l``."""
    if flip:
        rho = ChoiState(mpslib.apply_ladder_operator(rho.state, wfo_operator(rho.L)), rho.normalized,
                        rho.log_purity_prenorm, rho.provenance + "|flip")
    vals = np.array([trace_expectation(rho, string(rho.L, f"Z{j}")) for j in range(rho.L)])
    return ZProfile(vals, flip)


def sector_labels(rho: ChoiState, deadband: float = 0.1) -> tuple[int, int] | None:
    """``(alpha, beta)`` from the signs of the edge magnetizations, or None inside the dead-band."""
    z0 = trace_expectation(rho, string(rho.L, "Z0"))
    zl = trace_expectation(rho, string(rho.L, f"Z{rho.L - 1}"))
    if abs(z0) < deadband or abs(zl) < deadband:
        return None
    return int(z0 < 0), int(zl < 0)


# ---------------------------------------------------------------- entanglement


def edge_rdms(rho: ChoiState) -> dict[str, np.ndarray]:
    """Reduced matrices of rung 0, rung L-1 and the pair, from one contraction."""
    rab = mpslib.rdm_sites(rho.state, 0, rho.L - 1)
    t = rab.reshape(4, 4, 4, 4)
    return {"A": np.einsum("abcb->ac", t), "B": np.einsum("abad->bd", t), "AB": rab}


def _eigs(mat: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    if lam.min() < -1e-10:
        raise ValueError(f"reduced matrix has eigenvalue {lam.min():.3e}")
    return np.clip(lam, 0.0, None)


def entropy_from_rdm(mat: np.ndarray) -> float:
    lam = _eigs(mat)
    lam = lam[lam > EIG_FLOOR]
    return float(-np.sum(lam * np.log(lam)))


def negativity_from_rdm(mat: np.ndarray) -> float:
    """``ln (sum_i sqrt(lambda_i))**2``: log-negativity of a globally pure state."""
    lam = _eigs(mat)
    if abs(lam.sum() - 1) > 1e-8:
        raise ValueError(f"reduced matrix trace {lam.sum():.12f} is not one")
    lam[lam < EIG_FLOOR] = 0.0
    return float(2 * np.log(np.sum(np.sqrt(lam))))


def osee(rho: ChoiState, subsystem: Subsystem) -> float:
    return entropy_from_rdm(edge_rdms(rho)[subsystem])


def osmi(rho: ChoiState) -> float:
    r = edge_rdms(rho)
    return entropy_from_rdm(r["A"]) + entropy_from_rdm(r["B"]) - entropy_from_rdm(r["AB"])


def negativity(rho: ChoiState, subsystem: Subsystem) -> float:
    return negativity_from_rdm(edge_rdms(rho)[subsystem])


def mutual_negativity(rho: ChoiState) -> float:
    r = edge_rdms(rho)
    return negativity_from_rdm(r["A"]) + negativity_from_rdm(r["B"]) - negativity_from_rdm(r["AB"])


def edge_correlations(rho: ChoiState) -> EdgeCorrelationRecord:
    r = edge_rdms(rho)
    s = {k: entropy_from_rdm(v) for k, v in r.items()}
    n = {k: negativity_from_rdm(v) for k, v in r.items()}
    return EdgeCorrelationRecord(
        s["A"], s["B"], s["AB"], s["A"] + s["B"] - s["AB"],
        n["A"], n["B"], n["AB"], n["A"] + n["B"] - n["AB"],
    )
