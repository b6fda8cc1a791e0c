import numpy as np
import pytest

from edgebits import observables as ob
from edgebits.choi import ChannelSpec, FixedPointLabels, apply_channel, choi_double, fixed_point_state

LN2 = np.log(2)


def _rho(ground, L, J, p, kind="polarized_z"):
    return apply_channel(choi_double(ground(L, J, kind).state), ChannelSpec(p))


def test_order_parameter_endpoints(ground):
    clean = ob.order_parameters(_rho(ground, 9, 0.0, 0.0))
    assert clean.m_feo == pytest.approx(0, abs=1e-12)
    assert clean.m_wfo == pytest.approx(0, abs=1e-12)
    assert clean.m_sfo == pytest.approx(1, abs=1e-12)
    full = ob.order_parameters(_rho(ground, 9, 0.0, 0.5))
    assert full.m_sfo == pytest.approx(0, abs=1e-12)
    assert max(full.residuals) < 1e-10


def test_sfo_decreases_with_dephasing(ground):
    vals = [ob.m_sfo(_rho(ground, 7, 0.4, p)) for p in np.linspace(0, 0.5, 6)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_wfo_large_in_symmetry_broken_phase(ground):
    # polarized edges select a W eigenstate only for L = 3 mod 4
    assert ob.m_wfo(_rho(ground, 7, 2.0, 0.3)) > 0.9
    assert ob.m_wfo(_rho(ground, 9, 2.0, 0.3)) < 0.1


def test_fractionalization_at_fixed_point():
    for labels in (FixedPointLabels(), FixedPointLabels(1, 0), FixedPointLabels(weights={(0, 0): 0.5, (1, 1): 0.5})):
        fr = ob.fractionalization_check(fixed_point_state(9, labels))
        assert fr.weak_fidelity == pytest.approx(1, abs=1e-12)
        assert fr.strong_fidelity == pytest.approx(1, abs=1e-12)


def test_z_profile_flip_negates_edges():
    rho = fixed_point_state(9, FixedPointLabels(0, 1))
    z, zf = ob.z_profile(rho).values, ob.z_profile(rho, flip=True).values
    assert z[0] == pytest.approx(1) and z[-1] == pytest.approx(-1)
    assert np.allclose(zf, -z, atol=1e-12)
    assert ob.sector_labels(rho) == (0, 1)


def test_sector_labels_dead_band():
    mix = fixed_point_state(7, FixedPointLabels(weights={(0, 0): 0.5, (1, 1): 0.5}))
    assert ob.sector_labels(mix) is None


def test_edge_correlations_of_bell_edges(ground):
    pure = ob.edge_correlations(_rho(ground, 9, 0.0, 0.0, "bell_pair"))
    assert pure.osmi == pytest.approx(2 * LN2, abs=1e-10)
    assert pure.mutual_negativity == pytest.approx(2 * LN2, abs=1e-10)
    mixed = ob.edge_correlations(fixed_point_state(9, FixedPointLabels(weights={(0, 0): 0.5, (1, 1): 0.5})))
    assert mixed.osmi == pytest.approx(LN2, abs=1e-10)
    assert mixed.mutual_negativity == pytest.approx(LN2, abs=1e-10)


def test_rdm_helpers():
    lam = np.diag([0.5, 0.5, 0, 0])
    assert ob.entropy_from_rdm(lam) == pytest.approx(LN2)
    assert ob.negativity_from_rdm(lam) == pytest.approx(LN2)
    with pytest.raises(ValueError):
        ob.negativity_from_rdm(np.diag([0.5, 0.2]))
    with pytest.raises(ValueError):
        ob.entropy_from_rdm(np.diag([1.2, -0.2]))
