import numpy as np
import pytest

import _ncar


def test_classify():
    rep = _ncar.classify(np.array([0.0, 4.0]))
    assert rep["region"] == "PurelyExplosive"
    assert rep["rho_lower"] > 1.0


def test_companion_inverse():
    b, b_inv = _ncar.companion(np.array([0.0, 4.0]))
    assert np.allclose(b @ b_inv, np.eye(2))


def test_phi_involution():
    theta = np.array([0.0, 4.0])
    img, extended = _ncar.phi(theta)
    assert not extended
    back, _ = _ncar.phi(img)
    assert np.allclose(back, theta)


def test_moments_hand_value():
    m = _ncar.moments(np.array([2.0]))
    assert m["gamma"][0] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert m["theta_star"][0] == pytest.approx(0.5, abs=1e-12)


def test_simulate_deterministic():
    a = _ncar.simulate(np.array([2.0]), n=100, seed=7)
    b = _ncar.simulate(np.array([2.0]), n=100, seed=7)
    assert np.array_equal(a["y"], b["y"])
    assert a["truncation_bound"] <= 1e-12


def test_estimate_converges_to_theta_star():
    r = _ncar.estimate(np.array([2.0]), n=20000, seed=11)
    assert r["theta_hat"][0] == pytest.approx(0.5, abs=0.05)
    assert r["theta_corrected"][0] == pytest.approx(2.0, abs=0.5)


def test_forward_equiv():
    disc, bound = _ncar.forward_equiv(np.array([0.25]), n=50, seed=3)
    assert disc <= bound


def test_mc_small():
    rep = _ncar.mc(np.array([2.0]), "lse_clt", n=200, replications=128, seed=5)
    assert rep["failed_replications"] == 0
    assert rep["target_cov"][0][0] == pytest.approx(0.75, abs=1e-9)


def test_region_error():
    with pytest.raises(_ncar.NcarError):
        _ncar.simulate(np.array([0.5]), n=10, seed=1)
