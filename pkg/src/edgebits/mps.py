"""Open-boundary matrix product states.

Tensors are stored as ``A[left, phys, right]``.  The represented vector is
``exp(log_norm)`` times the plain contraction of the tensors, which keeps the
tensors O(1) while products of many non-unitary gates are applied.  When
``center`` is set, every tensor left of it is a left isometry and every
tensor right of it is a right isometry.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import BinaryIO, Sequence

import numpy as np


@dataclass
class SchmidtSpectrum:
    bond: int
    weights: np.ndarray  # descending, sums to one

    def entropy(self) -> float:
        w = self.weights[self.weights > 1e-14]
        return float(-np.sum(w * np.log(w)))


class MPS:
    def __init__(self, tensors: Sequence[np.ndarray], center: int | None = None, log_norm: float = 0.0):
        self.tensors = [np.asarray(t) for t in tensors]
        self.center = center
        self.log_norm = float(log_norm)
        self._check_shapes()

    def _check_shapes(self) -> None:
        if not self.tensors:
            raise ValueError("empty MPS")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise ValueError("open boundary bonds must have dimension 1")
        for a, b in zip(self.tensors, self.tensors[1:]):
            if a.shape[2] != b.shape[0]:
                raise ValueError(f"bond mismatch {a.shape} -> {b.shape}")

    def __len__(self) -> int:
        return len(self.tensors)

    @property
    def L(self) -> int:
        return len(self.tensors)

    @property
    def d(self) -> int:
        return self.tensors[0].shape[1]

    @property
    def dtype(self):
        return np.result_type(*self.tensors)

    @property
    def bond_dims(self) -> list[int]:
        return [t.shape[2] for t in self.tensors[:-1]]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims, default=1)

    def copy(self) -> "MPS":
        return MPS([t.copy() for t in self.tensors], self.center, self.log_norm)

    def conj(self) -> "MPS":
        return MPS([t.conj() for t in self.tensors], self.center, self.log_norm)

    def norm(self) -> float:
        if self.center is not None:
            return float(np.exp(self.log_norm) * np.linalg.norm(self.tensors[self.center]))
        return float(np.sqrt(abs(overlap(self, self))))

    def to_dense(self) -> np.ndarray:
        if self.d ** self.L > 2 ** 26:
            raise ValueError("state too large for a dense vector")
        acc = self.tensors[0].reshape(-1, self.tensors[0].shape[2])
        for t in self.tensors[1:]:
            acc = (acc @ t.reshape(t.shape[0], -1)).reshape(-1, t.shape[2])
        return np.exp(self.log_norm) * acc[:, 0]


def product_state(vectors: Sequence[np.ndarray]) -> MPS:
    tensors = [np.asarray(v).reshape(1, -1, 1) for v in vectors]
    mps = MPS(tensors)
    return canonicalize(mps, 0)


def random_mps(L: int, d: int, chi: int, rng: np.random.Generator, complex_: bool = False) -> MPS:
    """Random normalized MPS (bond dims capped by the exact Schmidt rank)."""
    tensors = []
    for j in range(L):
        cl = min(chi, d ** j, d ** (L - j))
        cr = min(chi, d ** (j + 1), d ** (L - j - 1))
        t = rng.normal(size=(cl, d, cr))
        if complex_:
            t = t + 1j * rng.normal(size=(cl, d, cr))
        tensors.append(t)
    return normalize(canonicalize(MPS(tensors), 0))


# ---------------------------------------------------------------- gauge


def _qr_left(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    l, d, r = t.shape
    q, rr = np.linalg.qr(t.reshape(l * d, r))
    return q.reshape(l, d, q.shape[1]), rr


def _qr_right(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    l, d, r = t.shape
    q, rr = np.linalg.qr(t.reshape(l, d * r).T)
    return q.T.reshape(q.shape[1], d, r), rr.T


def _absorb_scale(mps: MPS, site: int) -> None:
    n = np.linalg.norm(mps.tensors[site])
    if n == 0:
        raise ZeroDivisionError("state has zero norm")
    mps.tensors[site] = mps.tensors[site] / n
    mps.log_norm += float(np.log(n))


def _move_center(out: MPS, center: int) -> None:
    L = out.L
    if not 0 <= center < L:
        raise ValueError(f"center {center} out of range")
    if out.center is None:
        start_left, start_right = 0, L - 1
    else:
        start_left = start_right = out.center
    for j in range(start_left, center):
        q, r = _qr_left(out.tensors[j])
        out.tensors[j] = q
        out.tensors[j + 1] = np.tensordot(r, out.tensors[j + 1], axes=(1, 0))
        _absorb_scale(out, j + 1)
    for j in range(start_right, center, -1):
        q, r = _qr_right(out.tensors[j])
        out.tensors[j] = q
        out.tensors[j - 1] = np.tensordot(out.tensors[j - 1], r, axes=(2, 0))
        _absorb_scale(out, j - 1)
    _absorb_scale(out, center)
    out.center = center


def canonicalize(mps: MPS, center: int) -> MPS:
    """Return a copy in mixed-canonical form with the given center.

    The center tensor is scaled to unit norm; its norm moves into ``log_norm``.
    """
    out = mps.copy()
    _move_center(out, center)
    return out


def normalize(mps: MPS) -> MPS:
    out = mps if mps.center is not None else canonicalize(mps, 0)
    out = out.copy()
    _absorb_scale(out, out.center)
    out.log_norm = 0.0
    return out


def isometry_residual(mps: MPS) -> float:
    """Largest deviation from the isometry conditions implied by ``center``."""
    if mps.center is None:
        return float("inf")
    worst = 0.0
    for j, t in enumerate(mps.tensors):
        l, d, r = t.shape
        if j < mps.center:
            m = t.reshape(l * d, r)
            worst = max(worst, np.abs(m.conj().T @ m - np.eye(r)).max())
        elif j > mps.center:
            m = t.reshape(l, d * r)
            worst = max(worst, np.abs(m @ m.conj().T - np.eye(l)).max())
    return float(worst)


def _truncate(s: np.ndarray, cutoff: float, max_bond: int | None) -> int:
    """Number of singular values kept: ``s_i / ||s|| >= cutoff``, at most max_bond."""
    s_norm = s / np.linalg.norm(s)
    keep = max(1, int(np.sum(s_norm >= cutoff)))
    if max_bond is not None:
        keep = min(keep, max_bond)
    return keep


def svd_split(theta: np.ndarray, cutoff: float, max_bond: int | None):
    """Split a matrix with truncated SVD; returns ``(U, S, Vh, discarded_weight)``."""
    try:
        u, s, vh = np.linalg.svd(theta, full_matrices=False)
    except np.linalg.LinAlgError:
        import scipy.linalg

        u, s, vh = scipy.linalg.svd(theta, full_matrices=False, lapack_driver="gesvd")
    keep = _truncate(s, cutoff, max_bond)
    total = float(np.sum(s ** 2))
    discarded = float(np.sum(s[keep:] ** 2)) / total if total > 0 else 0.0
    return u[:, :keep], s[:keep], vh[:keep], discarded


def compress(mps: MPS, cutoff: float = 1e-12, max_bond: int | None = None) -> tuple[MPS, float]:
    """SVD truncation sweep; returns the compressed state (center at 0) and the
    largest discarded weight over all bonds.

    Truncation only removes weight, so the 2-norm never grows.
    """
    out = canonicalize(mps, mps.L - 1)
    if out.L == 1:
        return out, 0.0
    worst = 0.0
    for j in range(out.L - 1, 0, -1):
        t = out.tensors[j]
        l, d, r = t.shape
        u, s, vh, disc = svd_split(t.reshape(l, d * r), cutoff, max_bond)
        worst = max(worst, disc)
        out.tensors[j] = vh.reshape(-1, d, r)
        out.tensors[j - 1] = np.tensordot(out.tensors[j - 1], u * s, axes=(2, 0))
        _absorb_scale(out, j - 1)
    out.center = 0
    return out, worst


# ---------------------------------------------------------------- contractions


def _transfer_left(env: np.ndarray, bra: np.ndarray, ket: np.ndarray) -> np.ndarray:
    # env[bra_bond, ket_bond]
    tmp = np.tensordot(env, ket, axes=(1, 0))  # (b, d, r)
    return np.tensordot(bra.conj(), tmp, axes=([0, 1], [0, 1]))


def _transfer_right(env: np.ndarray, bra: np.ndarray, ket: np.ndarray) -> np.ndarray:
    tmp = np.tensordot(ket, env, axes=(2, 1))  # (l, d, b)
    return np.tensordot(tmp, bra.conj(), axes=([1, 2], [1, 2])).T


def log_overlap(a: MPS, b: MPS) -> tuple[complex, float]:
    """``<a|b> = value * exp(log_scale)`` with ``|value|`` of order one."""
    if a.L != b.L or a.d != b.d:
        raise ValueError("overlap needs equal lengths and physical dimensions")
    env = np.ones((1, 1))
    log_scale = a.log_norm + b.log_norm
    for ta, tb in zip(a.tensors, b.tensors):
        env = _transfer_left(env, ta, tb)
        n = np.abs(env).max()
        if n == 0:
            return 0.0, 0.0
        env = env / n
        log_scale += float(np.log(n))
    return complex(env[0, 0]), log_scale


def overlap(a: MPS, b: MPS) -> complex:
    value, log_scale = log_overlap(a, b)
    return value * np.exp(log_scale)


def normalized_overlap(a: MPS, b: MPS) -> complex:
    """``<a|b> / (|a| |b|)``, immune to the global scale of either state."""
    v, s = log_overlap(a, b)
    va, sa = log_overlap(a, a)
    vb, sb = log_overlap(b, b)
    return v / np.sqrt(abs(va) * abs(vb)) * np.exp(s - 0.5 * (sa + sb))


def add(a: MPS, b: MPS, wa: complex = 1.0, wb: complex = 1.0) -> MPS:
    """Direct-sum MPS for ``wa |a> + wb |b>`` (bond dimensions add)."""
    if a.L != b.L or a.d != b.d:
        raise ValueError("shape mismatch")
    ca = wa * np.exp(a.log_norm)
    cb = wb * np.exp(b.log_norm)
    L = a.L
    tensors = []
    for j, (ta, tb) in enumerate(zip(a.tensors, b.tensors)):
        la, d, ra = ta.shape
        lb, _, rb = tb.shape
        dtype = np.result_type(ta, tb, ca, cb)
        if L == 1:
            t = ca * ta + cb * tb
        elif j == 0:
            t = np.zeros((1, d, ra + rb), dtype=dtype)
            t[:, :, :ra] = ca * ta
            t[:, :, ra:] = cb * tb
        elif j == L - 1:
            t = np.zeros((la + lb, d, 1), dtype=dtype)
            t[:la] = ta
            t[la:] = tb
        else:
            t = np.zeros((la + lb, d, ra + rb), dtype=dtype)
            t[:la, :, :ra] = ta
            t[la:, :, ra:] = tb
        tensors.append(t)
    return canonicalize(MPS(tensors), 0)


# ---------------------------------------------------------------- gates


def apply_site_gate(mps: MPS, site: int, gate: np.ndarray) -> MPS:
    """Apply a (possibly non-unitary) one-site gate; the center moves to ``site``."""
    gate = np.asarray(gate)
    if gate.shape != (mps.d, mps.d):
        raise ValueError(f"gate shape {gate.shape} does not match d={mps.d}")
    return apply_site_gates(mps, {site: gate})


def apply_site_gates(mps: MPS, gates: dict[int, np.ndarray]) -> MPS:
    """Apply one-site gates in a single left-to-right sweep, re-gauging as it goes."""
    out = mps.copy()
    for site in sorted(gates):
        gate = np.asarray(gates[site])
        if gate.shape != (out.d, out.d):
            raise ValueError(f"gate shape {gate.shape} does not match d={out.d}")
        _move_center(out, site)
        out.tensors[site] = np.einsum("st,ltr->lsr", gate, out.tensors[site])
        _absorb_scale(out, site)
    return out


def apply_unitary_string(mps: MPS, gates: Sequence[np.ndarray]) -> MPS:
    """Apply a product of one-site unitaries (one per site); the gauge is untouched."""
    if len(gates) != mps.L:
        raise ValueError(f"expected {mps.L} gates, got {len(gates)}")
    out = mps.copy()
    for j, g in enumerate(gates):
        if not np.array_equal(g, np.eye(out.d)):
            out.tensors[j] = np.einsum("st,ltr->lsr", g, out.tensors[j])
    return out


def expectation_product(mps: MPS, ops: dict[int, np.ndarray]) -> complex:
    """``<psi| prod_j O_j |psi> / <psi|psi>`` for one-site operators."""
    gates = [ops.get(j, np.eye(mps.d)) for j in range(mps.L)]
    num, s1 = log_overlap(mps, _apply_raw(mps, gates))
    den, s2 = log_overlap(mps, mps)
    return num / den * np.exp(s1 - s2)


def _apply_raw(mps: MPS, gates: Sequence[np.ndarray]) -> MPS:
    tensors = [np.einsum("st,ltr->lsr", g, t) for g, t in zip(gates, mps.tensors)]
    return MPS(tensors, None, mps.log_norm)


# ---------------------------------------------------------------- spectra & RDMs


def schmidt_spectrum_at(mps: MPS, bond: int) -> SchmidtSpectrum:
    """Normalized squared singular values across the cut between ``bond`` and ``bond+1``."""
    if not 0 <= bond < mps.L - 1:
        raise ValueError(f"bond {bond} out of range")
    c = canonicalize(mps, bond)
    t = c.tensors[bond]
    l, d, r = t.shape
    s = np.linalg.svd(t.reshape(l * d, r), compute_uv=False)
    w = s ** 2
    w = w / w.sum()
    return SchmidtSpectrum(bond, np.sort(w)[::-1])


def rdm_sites(mps: MPS, i: int, j: int | None = None) -> np.ndarray:
    """Reduced density matrix of site ``i`` or of the pair ``(i, j)``, ``i < j``.

    Both boundary environments are contracted explicitly, and the sites
    between ``i`` and ``j`` are joined through the transfer matrix, so the
    pair need not be adjacent.  The result has unit trace; the pair index is
    ``s_i * d + s_j``.
    """
    L, d = mps.L, mps.d
    if not 0 <= i < L or (j is not None and not i < j < L):
        raise ValueError(f"sites ({i}, {j}) out of range")
    tens = mps.tensors
    left = np.ones((1, 1))
    for k in range(i):
        left = _transfer_left(left, tens[k], tens[k])
        left /= np.abs(left).max()
    last = i if j is None else j
    right = np.ones((1, 1))
    for k in range(L - 1, last, -1):
        right = _transfer_right(right, tens[k], tens[k])
        right /= np.abs(right).max()
    # open(s, s', ket_r, bra_r): density element |s><s'|
    t = tens[i]
    open_ = np.tensordot(np.tensordot(left, t, axes=(1, 0)), t.conj(), axes=(0, 0))  # (s, r, t, q)
    open_ = open_.transpose(0, 2, 1, 3)
    if j is not None:
        for k in range(i + 1, j):
            tk = tens[k]
            open_ = np.tensordot(open_, tk, axes=(2, 0))  # (s, t, q, x, y)
            open_ = np.tensordot(open_, tk.conj(), axes=([2, 3], [0, 1]))  # (s, t, y, z)
            open_ /= np.abs(open_).max()
        tj = tens[j]
        closed = np.tensordot(tj.conj(), right.T, axes=(2, 1))  # (q, z, y)
        ket = np.tensordot(open_, tj, axes=(2, 0))  # (s, t, q, x, y)
        rho = np.tensordot(ket, closed, axes=([2, 4], [0, 2]))  # (s, t, x, z)
        rho = rho.transpose(0, 2, 1, 3).reshape(d * d, d * d)
    else:
        rho = np.tensordot(open_, right.T, axes=([2, 3], [0, 1]))
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


# ---------------------------------------------------------------- snapshots

_MAGIC = b"EBMPS"
_VERSION = 1


def write_snapshot(mps: MPS, fh: BinaryIO, provenance: str = "") -> None:
    """Versioned binary dump: header, per-tensor shape + row-major values."""
    is_complex = np.iscomplexobj(np.zeros(0, dtype=mps.dtype))
    center = -1 if mps.center is None else mps.center
    text = provenance.encode("utf-8")
    fh.write(_MAGIC + struct.pack("<IIIiBdI", _VERSION, mps.L, mps.d, center, int(is_complex), mps.log_norm, len(text)))
    fh.write(text)
    dtype = np.dtype("<c16") if is_complex else np.dtype("<f8")
    for t in mps.tensors:
        fh.write(struct.pack("<QQQ", *t.shape))
        fh.write(np.ascontiguousarray(t, dtype=dtype).tobytes(order="C"))


def read_snapshot(fh: BinaryIO) -> tuple[MPS, str]:
    magic = fh.read(len(_MAGIC))
    if magic != _MAGIC:
        raise ValueError("not an MPS snapshot")
    head = struct.calcsize("<IIIiBdI")
    version, L, d, center, is_complex, log_norm, ntext = struct.unpack("<IIIiBdI", fh.read(head))
    if version != _VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    provenance = fh.read(ntext).decode("utf-8")
    dtype = np.dtype("<c16") if is_complex else np.dtype("<f8")
    tensors = []
    for _ in range(L):
        shape = struct.unpack("<QQQ", fh.read(24))
        n = int(np.prod(shape))
        tensors.append(np.frombuffer(fh.read(n * dtype.itemsize), dtype=dtype).reshape(shape).copy())
    mps = MPS(tensors, None if center < 0 else center, log_norm)
    if mps.d != d:
        raise ValueError("corrupt snapshot: physical dimension mismatch")
    return mps, provenance


def contract_with_product(mps: MPS, vectors: Sequence[np.ndarray]) -> tuple[complex, float]:
    """``sum_s prod_j v_j[s_j] psi[s]`` as ``(value, log_scale)``.

    ``vectors`` are row vectors applied to each physical leg without
    conjugation; used for trace functionals against product boundaries.
    """
    env = np.ones(1)
    log_scale = mps.log_norm
    for v, t in zip(vectors, mps.tensors):
        env = env @ np.tensordot(np.asarray(v), t, axes=(0, 1))
        n = np.abs(env).max()
        if n == 0:
            return 0.0, 0.0
        env = env / n
        log_scale += float(np.log(n))
    return complex(env[0]), log_scale


def left_schmidt_form(mps: MPS) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Left-isometric tensors plus the normalized Schmidt values on every bond.

    The last tensor carries the (unit) norm.  With this gauge the columns of
    each left tensor are the left Schmidt vectors of the corresponding cut.
    """
    c = normalize(canonicalize(mps, 0))
    tensors = [t.copy() for t in c.tensors]
    spectra = []
    for j in range(len(tensors) - 1):
        t = tensors[j]
        l, d, r = t.shape
        u, s, vh = np.linalg.svd(t.reshape(l * d, r), full_matrices=False)
        keep = max(1, int(np.sum(s > 1e-15 * s[0])))
        u, s, vh = u[:, :keep], s[:keep], vh[:keep]
        tensors[j] = u.reshape(l, d, keep)
        tensors[j + 1] = np.tensordot(s[:, None] * vh, tensors[j + 1], axes=(1, 0))
        spectra.append(s / np.linalg.norm(s))
    return tensors, spectra


def apply_ladder_operator(mps: MPS, op) -> MPS:
    """Apply a :class:`~edgebits.spinops.LadderOperator` rung by rung (d=4)."""
    if mps.d != 4:
        raise ValueError("ladder operators act on rung states with d=4")
    if op.length != mps.L:
        raise ValueError(f"operator length {op.length} != {mps.L}")
    return apply_unitary_string(mps, op.rung_gates())
