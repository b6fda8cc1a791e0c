import numpy as np
import pytest

from edgebits.model import (
    ChainConfig,
    Pinning,
    build_hamiltonian,
    edge_operators,
    hamiltonian_terms,
    parse_manifest,
    symmetry_generators,
)
from edgebits.oracle import dense_hamiltonian
from edgebits.spinops import to_dense


@pytest.mark.parametrize("kind", ["none", "polarized_z", "bell_pair"])
@pytest.mark.parametrize("J", [0.0, 0.7])
def test_mpo_matches_dense(kind, J):
    cfg = ChainConfig(7, J, Pinning(kind, 0.3) if kind != "none" else Pinning())
    mpo = build_hamiltonian(cfg)
    assert np.allclose(mpo.to_dense(), dense_hamiltonian(cfg).toarray(), atol=1e-13)


def test_mpo_bond_dimension_is_small():
    mpo = build_hamiltonian(ChainConfig(15, 1.0, Pinning("polarized_z")))
    assert mpo.max_bond <= 5


def test_manifest_round_trip():
    cfg = ChainConfig(9, 0.4, Pinning("bell_pair", 0.1))
    mpo = build_hamiltonian(cfg)
    assert parse_manifest(mpo.manifest(), 9) == hamiltonian_terms(cfg)
    assert len(mpo.terms) == 7 + 8 + 2


@pytest.mark.parametrize("kind", ["none", "polarized_z", "bell_pair"])
def test_symmetries(kind):
    L = 7
    H = build_hamiltonian(ChainConfig(L, 0.9, Pinning(kind) if kind != "none" else Pinning())).to_dense()
    W, S = (to_dense(g) for g in symmetry_generators(L))
    assert np.allclose(H @ S, S @ H)
    assert np.allclose(H @ W, W @ H) == (kind != "polarized_z")


def test_edge_operators_anticommute_pairwise():
    ops = edge_operators(9)
    assert ops["Z_left"].anticommutes_with(ops["XZ_left"])
    assert ops["Z_right"].anticommutes_with(ops["ZX_right"])
    assert ops["Z_left"].commutes_with(ops["ZX_right"])


@pytest.mark.parametrize("bad", [dict(L=6), dict(L=3), dict(L=7, J_xx=-1.0)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        ChainConfig(**bad)
    with pytest.raises(ValueError):
        Pinning("sideways")
    with pytest.raises(ValueError):
        Pinning("polarized_z", 0.0)
