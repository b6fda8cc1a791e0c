"""Two-site DMRG ground-state search."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as sla

from .model import HamiltonianMPO
from .mps import MPS, _move_center, product_state, svd_split

log = logging.getLogger(__name__)

DENSE_SOLVER_DIM = 256


@dataclass(frozen=True)
class DmrgParams:
    max_bond: int = 128
    cutoff: float = 1e-10
    max_sweeps: int = 30
    min_sweeps: int = 3
    energy_tol: float = 1e-10
    krylov_dim: int = 20
    eig_tol: float = 1e-12
    seed: int = 1234
    jitter: float = 1e-3
    noise: float = 1e-4
    noise_sweeps: int = 2
    noise_rank: int = 2

    def __post_init__(self):
        if not (self.cutoff > 0 and self.energy_tol > 0 and self.eig_tol > 0):
            raise ValueError("cutoff and tolerances must be positive")
        if self.max_bond < 1 or self.max_sweeps < 1:
            raise ValueError("max_bond and max_sweeps must be positive")


@dataclass
class DmrgResult:
    state: MPS
    energy: float
    energies: list[float] = field(default_factory=list)
    converged: bool = False
    max_discarded: float = 0.0

    def __iter__(self):
        # allows ``state, energy = dmrg_ground_state(...)``
        return iter((self.state, self.energy))


class NonConvergenceWarning(RuntimeWarning):
    pass


def initial_state(L: int, params: DmrgParams) -> MPS:
    """|0> on even sites, |+> on odd sites, plus a seeded jitter."""
    rng = np.random.default_rng(params.seed)
    vecs = []
    for j in range(L):
        v = np.array([1.0, 0.0]) if j % 2 == 0 else np.array([1.0, 1.0]) / np.sqrt(2)
        v = v + params.jitter * rng.normal(size=2)
        vecs.append(v / np.linalg.norm(v))
    return product_state(vecs)


def _grow_left(env, a, w):
    # env[w, bra, ket] -> next env across site tensor a
    x = np.tensordot(env, a, axes=(2, 0))  # (w, bra, t, r)
    x = np.tensordot(x, w, axes=([0, 2], [0, 3]))  # (bra, r, b, s)
    x = np.tensordot(x, a.conj(), axes=([0, 3], [0, 1]))  # (r, b, r')
    return x.transpose(1, 2, 0)


def _grow_right(env, b, w):
    x = np.tensordot(b, env, axes=(2, 2))  # (l, t, w, bra)
    x = np.tensordot(x, w, axes=([1, 2], [3, 1]))  # (l, bra, a, s)
    x = np.tensordot(x, b.conj(), axes=([3, 1], [1, 2]))  # (l, a, l')
    return x.transpose(1, 2, 0)


def _apply_two_site(theta, lenv, w1, w2, renv):
    # theta (l, s1, s2, r) -> H_eff theta, same shape
    x = np.tensordot(lenv, theta, axes=(2, 0))  # (w, l', s1, s2, r)
    x = np.tensordot(x, w1, axes=([0, 2], [0, 3]))  # (l', s2, r, b, t1)
    x = np.tensordot(x, w2, axes=([3, 1], [0, 3]))  # (l', r, t1, c, t2)
    x = np.tensordot(x, renv, axes=([3, 1], [0, 2]))  # (l', t1, t2, r')
    return x


def _lowest_eigenpair(matvec, v0: np.ndarray, params: DmrgParams):
    n = v0.size
    if n <= DENSE_SOLVER_DIM:
        mat = np.column_stack([matvec(e) for e in np.eye(n)])
        mat = 0.5 * (mat + mat.T)
        vals, vecs = np.linalg.eigh(mat)
        return vals[0], vecs[:, 0]
    op = sla.LinearOperator((n, n), matvec=matvec, dtype=np.float64)
    vals, vecs = sla.eigsh(
        op, k=1, which="SA", v0=v0, ncv=min(params.krylov_dim, n - 1), tol=params.eig_tol, maxiter=10 * n
    )
    return vals[0], vecs[:, 0]


def dmrg_ground_state(
    H: HamiltonianMPO, params: DmrgParams = DmrgParams(), initial: MPS | None = None
) -> DmrgResult:
    """Variational ground state of a real MPO Hamiltonian.

    Sweeps left-right-left until the energy changes by less than
    ``params.energy_tol`` (after at least ``min_sweeps`` sweeps).  On
    hitting ``max_sweeps`` the best state is returned with
    ``converged=False`` and a :class:`NonConvergenceWarning`.
    """
    L = H.L
    psi = initial_state(L, params) if initial is None else initial.copy()
    psi.tensors = [np.real_if_close(t).astype(np.float64) for t in psi.tensors]
    _move_center(psi, 0)
    W = H.tensors

    renvs: list[np.ndarray | None] = [None] * (L + 1)
    lenvs: list[np.ndarray | None] = [None] * (L + 1)
    lenvs[0] = np.ones((1, 1, 1))
    renvs[L] = np.ones((1, 1, 1))
    for j in range(L - 1, 0, -1):
        renvs[j] = _grow_right(renvs[j + 1], psi.tensors[j], W[j])

    energies: list[float] = []
    worst_disc = 0.0
    converged = False
    energy = np.inf

    rng = np.random.default_rng(params.seed + 1)

    def solve(i: int, noisy: bool):
        theta = np.tensordot(psi.tensors[i], psi.tensors[i + 1], axes=(2, 0))
        shape = theta.shape
        lenv, renv = lenvs[i], renvs[i + 2]

        def matvec(v):
            return _apply_two_site(v.reshape(shape), lenv, W[i], W[i + 1], renv).ravel()

        e, v = _lowest_eigenpair(matvec, theta.ravel(), params)
        l, d1, d2, r = shape
        mat = v.reshape(l * d1, d2 * r)
        if noisy:
            # low-rank kick so that block bases pick up sectors the current state lacks
            k = params.noise_rank
            kick = rng.normal(size=(l * d1, k)) @ rng.normal(size=(k, d2 * r))
            mat = mat + params.noise * kick / np.linalg.norm(kick)
        u, s, vh, disc = svd_split(mat, params.cutoff, params.max_bond)
        s = s / np.linalg.norm(s)
        return e, u.reshape(l, d1, -1), s, vh.reshape(-1, d2, r), disc

    for sweep in range(params.max_sweeps):
        noisy = sweep < params.noise_sweeps
        sweep_disc = 0.0
        for i in range(L - 1):
            e, u, s, vh, disc = solve(i, noisy)
            sweep_disc = max(sweep_disc, disc)
            psi.tensors[i] = u
            psi.tensors[i + 1] = np.tensordot(np.diag(s), vh, axes=(1, 0))
            lenvs[i + 1] = _grow_left(lenvs[i], u, W[i])
        for i in range(L - 2, -1, -1):
            e, u, s, vh, disc = solve(i, noisy)
            sweep_disc = max(sweep_disc, disc)
            psi.tensors[i + 1] = vh
            psi.tensors[i] = np.tensordot(u, np.diag(s), axes=(2, 0))
            renvs[i + 1] = _grow_right(renvs[i + 2], vh, W[i + 1])
        worst_disc = sweep_disc
        energies.append(float(e))
        log.debug("sweep %d: E=%.15f chi=%d disc=%.2e", sweep, e, max(t.shape[2] for t in psi.tensors), sweep_disc)
        if noisy:
            energy = energies[-1]
            continue
        if sweep + 1 >= params.min_sweeps + params.noise_sweeps and abs(energies[-1] - energy) < params.energy_tol:
            converged = True
            energy = energies[-1]
            break
        energy = energies[-1]

    psi.center = 0
    psi.log_norm = 0.0
    if not converged:
        warnings.warn(f"DMRG did not converge in {params.max_sweeps} sweeps", NonConvergenceWarning)
    return DmrgResult(psi, float(energy), energies, converged, worst_disc)
