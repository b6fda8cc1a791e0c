"""Dense reference path for small chains.

Everything here works with explicit vectors and density matrices built from
Kronecker products, independent of the MPO/MPS machinery, so the two paths
can be compared number by number.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from functools import reduce
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .model import ChainConfig

MAX_DENSE_GROUND = 13
MAX_DENSE_OBSERVABLES = 9
MAX_DENSE_OVERRIDE = 11

_I = sp.identity(2, format="csr", dtype=float)
_X = sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
_Z = sp.csr_matrix(np.array([[1.0, 0.0], [0.0, -1.0]]))


class OracleSizeError(ValueError):
    pass


def site_operator(L: int, ops: dict[int, sp.spmatrix]) -> sp.csr_matrix:
    """Sparse Kronecker product with ``ops`` on the given sites, site 0 most significant."""
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), [ops.get(j, _I) for j in range(L)])


def dense_hamiltonian(config: ChainConfig) -> sp.csr_matrix:
    L, J = config.L, config.J_xx
    H = sp.csr_matrix((2**L, 2**L))
    for j in range(L - 2):
        H = H - site_operator(L, {j: _Z, j + 1: _X, j + 2: _Z})
    for j in range(L - 1):
        H = H + J * site_operator(L, {j: _X, j + 1: _X})
    pin = config.pinning
    if pin.kind == "polarized_z":
        H = H - pin.epsilon * (site_operator(L, {0: _Z}) + site_operator(L, {L - 1: _Z}))
    elif pin.kind == "bell_pair":
        H = H - pin.epsilon * (
            site_operator(L, {0: _Z, L - 1: _Z}) + site_operator(L, {0: _X, 1: _Z, L - 2: _Z, L - 1: _X})
        )
    return H


def dense_ground_state(config: ChainConfig) -> tuple[np.ndarray, float]:
    """Lowest eigenvector, phase fixed so its largest component is real positive."""
    if config.L > MAX_DENSE_GROUND:
        raise OracleSizeError(f"dense ground state limited to L <= {MAX_DENSE_GROUND}")
    H = dense_hamiltonian(config)
    if H.shape[0] <= 1024:
        vals, vecs = np.linalg.eigh(H.toarray())
    else:
        vals, vecs = spla.eigsh(H, k=1, which="SA", tol=1e-14, v0=np.ones(H.shape[0]))
    psi = vecs[:, 0]
    k = int(np.argmax(np.abs(psi)))
    psi = psi * (abs(psi[k]) / psi[k])
    return psi / np.linalg.norm(psi), float(vals[0])


def _check_size(L: int, allow_large: bool) -> None:
    limit = MAX_DENSE_OVERRIDE if allow_large else MAX_DENSE_OBSERVABLES
    if L > limit:
        hint = "" if allow_large else " (pass allow_large to go up to 11)"
        raise OracleSizeError(f"dense density matrices limited to L <= {limit}{hint}")


def pure_density(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def dense_apply_channel(rho: np.ndarray, p_z: float, allow_large: bool = False) -> np.ndarray:
    """Kraus form ``(1-p) rho + p Z rho Z`` on every even site in turn."""
    L = int(round(np.log2(rho.shape[0])))
    _check_size(L, allow_large)
    out = rho
    for j in range(0, L, 2):
        z = np.array([1 - 2 * ((np.arange(2**L) >> (L - 1 - j)) & 1)], dtype=float)
        out = (1 - p_z) * out + p_z * (z.T * out * z)
    return out


@dataclass(frozen=True)
class DenseRecord:
    m_feo: float
    m_wfo: float
    m_sfo: float
    weak_fidelity: float
    strong_fidelity: float
    s_A: float
    s_B: float
    s_AB: float
    osmi: float
    n_A: float
    n_B: float
    n_AB: float
    mutual_negativity: float
    purity: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def _dense(L: int, ops: dict[int, sp.spmatrix]) -> np.ndarray:
    return site_operator(L, ops).toarray()


def choi_vector(rho: np.ndarray) -> np.ndarray:
    """Normalized Choi vector in rung order ``(u_0, l_0, u_1, l_1, ...)``.

    ``vec[k_u, m_l] = rho[m, k]``; upper and lower site axes are interleaved.
    """
    L = int(round(np.log2(rho.shape[0])))
    v = rho.T.reshape([2] * (2 * L))
    order = [ax for j in range(L) for ax in (j, L + j)]
    v = v.transpose(order).reshape(-1)
    return v / np.linalg.norm(v)


def _rung_matrix(v: np.ndarray, L: int, rungs: list[int]) -> np.ndarray:
    t = v.reshape([4] * L)
    rest = [j for j in range(L) if j not in rungs]
    return t.transpose(rungs + rest).reshape(4 ** len(rungs), -1)


def _entropy(m: np.ndarray) -> float:
    lam = np.linalg.svd(m, compute_uv=False) ** 2
    lam = lam[lam > 1e-14]
    return float(-np.sum(lam * np.log(lam)))


def _log_negativity(m: np.ndarray) -> float:
    """Trace norm of the partially transposed projector, taken explicitly.

    The complement is compressed onto the span of the rows of ``m`` first,
    which is exact and keeps the matrix at ``(dim_X**2)**2``.
    """
    dx = m.shape[0]
    _, r = np.linalg.qr(m.T)
    red = r.T  # red[x, a]: amplitude in the orthonormal basis of the complement span
    k = red.shape[1]
    proj = np.einsum("xa,yb->xayb", red, red.conj())
    pt = proj.transpose(2, 1, 0, 3).reshape(dx * k, dx * k)
    return float(np.log(np.sum(np.linalg.svd(pt, compute_uv=False))))


def dense_observables(rho: np.ndarray, allow_large: bool = False) -> DenseRecord:
    L = int(round(np.log2(rho.shape[0])))
    _check_size(L, allow_large)
    W = _dense(L, {j: _X for j in range(0, L, 2)})
    S = _dense(L, {j: _X for j in range(1, L, 2)})
    O = _dense(L, {0: _X, 1: _Z})
    Q = _dense(L, {0: _X, 1: _Z, L - 2: _Z, L - 1: _X})
    ZZ = _dense(L, {0: _Z, L - 1: _Z})
    tr2 = float(np.real(np.trace(rho @ rho)))
    rho2 = rho @ rho

    def ratio(val: complex) -> float:
        return float(np.real(val)) / tr2

    wrw = W @ rho @ W
    m_feo = ratio(np.trace(O @ rho @ O @ rho))
    m_wfo = ratio(np.trace(wrw @ rho))
    m_sfo = ratio(np.trace(rho2 @ W @ Q))
    weak = abs(np.trace(wrw.conj().T @ (Q @ rho @ Q))) / tr2
    strong = abs(np.trace((rho @ S).conj().T @ (rho @ ZZ))) / tr2

    v = choi_vector(rho)
    a, b, ab = (_rung_matrix(v, L, r) for r in ([0], [L - 1], [0, L - 1]))
    s = [_entropy(m) for m in (a, b, ab)]
    n = [_log_negativity(m) for m in (a, b, ab)]
    return DenseRecord(
        m_feo, m_wfo, m_sfo, float(weak), float(strong),
        s[0], s[1], s[2], s[0] + s[1] - s[2],
        n[0], n[1], n[2], n[0] + n[1] - n[2],
        tr2 / float(np.real(np.trace(rho))) ** 2,
    )


def dense_z_profile(rho: np.ndarray, flip: bool = False) -> np.ndarray:
    L = int(round(np.log2(rho.shape[0])))
    if flip:
        W = _dense(L, {j: _X for j in range(0, L, 2)})
        rho = W @ rho @ W
    diag = np.real(np.diag(rho)) / np.real(np.trace(rho))
    bits = (np.arange(2**L)[:, None] >> (L - 1 - np.arange(L))[None, :]) & 1
    return (1 - 2 * bits).T @ diag


def dense_record(config: ChainConfig, p_z: float, allow_large: bool = False) -> DenseRecord:
    _check_size(config.L, allow_large)
    psi, _ = dense_ground_state(config)
    return dense_observables(dense_apply_channel(pure_density(psi), p_z, allow_large), allow_large)


# ---------------------------------------------------------------- golden files


def write_golden(path: Path, record: DenseRecord, header: dict[str, str]) -> None:
    lines = [f"# {k}={v}" for k, v in header.items()]
    lines += [f"{k}={v:.15e}" for k, v in record.as_dict().items()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_golden(path: Path) -> tuple[DenseRecord, dict[str, str]]:
    header, values = {}, {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            header[k] = v
        else:
            k, _, v = line.partition("=")
            values[k.strip()] = float(v)
    names = {f.name for f in fields(DenseRecord)}
    if set(values) != names:
        raise ValueError(f"golden file {path} has keys {sorted(values)}")
    return DenseRecord(**values), header
