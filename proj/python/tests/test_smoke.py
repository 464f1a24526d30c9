import json
import math

import numpy as np
import pytest

import pcs


def test_flux_matches_oracle():
    p = pcs.JcParams(eps_delta=0.1, omega1=1.0, omega2=1.3, phi2=math.pi / 4, gamma=0.05)
    m1, _ = pcs.jc_cumulants(p, pcs.Method.SpectralFD)
    assert m1["flux"] == pytest.approx(pcs.jc_flux_oracle(p), rel=1e-6)
    cp, _ = pcs.jc_cumulants(p, pcs.Method.CharPoly)
    assert cp["noise"] == pytest.approx(m1["noise"], rel=1e-5)


def test_invalid_parameters_raise():
    with pytest.raises(pcs.PcsError):
        pcs.JcParams(gamma=-1.0)


def test_weak_gamma_noise():
    p = pcs.JcParams(omega1=1.0, omega2=1.0, phi2=math.pi / 2, gamma=1e-4)
    assert pcs.jc_noise_oracle(p, pcs.JcNoiseMode.WeakGamma) == pytest.approx(1 / (2 * p.gamma))


def test_closed_balanced_variance():
    p = pcs.JcParams(omega1=1.0, omega2=1.0, phi2=math.pi / 2)
    mean, var = pcs.jc_closed_statistics(p, [0.5, 0.5], 0, 20.0)
    assert mean == pytest.approx(0.0, abs=1e-12)
    assert var == pytest.approx(200.0, rel=1e-12)


def test_distribution_normalized():
    p = pcs.JcParams(eps_delta=0.1, gamma=0.1)
    d = pcs.jc_distribution(p, 10.0, modes=[0, 1], grid=128)
    assert d["p"].shape == (128, 128)
    assert d["p"].sum() == pytest.approx(1.0, abs=1e-6)
    assert np.all(d["p"] >= 0)
    assert d["mean"][0] < 500.0


def test_lambda_cdt():
    lp = pcs.LambdaParams()
    lp.r = 1
    lp.omega_p1 = 2 * lp.omega_d * pcs.bessel_j_zero(1, 1)
    assert abs(pcs.lambda_cumulants(lp, 1)["flux"]) <= 1e-10


def test_run_config(tmp_path):
    cfg = {
        "model": "jc",
        "task": "scan",
        "params": {"omega1": 1.0, "omega2": 1.0, "gamma": 0.1},
        "sweeps": [{"name": "eps", "variable": "eps_delta", "start": -1, "stop": 1, "points": 5}],
        "output": "smoke",
    }
    code, files = pcs.run_config(json.dumps(cfg), str(tmp_path))
    assert code == 0
    assert len(files) == 1
    lines = open(files[0]).read().splitlines()
    assert len(lines) == 6
