import math

import numpy as np
import pytest

from dampwave import scattering
from dampwave.multiplier import Mat2, ModelParams, angle, bracket
from dampwave.scattering import (
    convergence_profile,
    free_evolution,
    high_frequency_constant,
    limit_deviation,
    wave_operator_approx,
    z_plus,
    z_plus_det_target,
)

MUS = [2.0, 2.5, 3.0, 4.0, 5.0, 7.0]


def test_free_evolution_group():
    r = np.geomspace(0.01, 100, 50)
    assert np.allclose(free_evolution(0.0, r).as_array(), Mat2.identity(r.shape).as_array())
    back = free_evolution(3.7, r) @ free_evolution(-3.7, r)
    assert np.max(np.abs((back - Mat2.identity(r.shape)).as_array())) < 1e-14
    e = free_evolution(2.2, r)
    assert np.allclose(e.det, 1.0, atol=1e-15)
    assert np.allclose(free_evolution(-2.2, r).as_array(), e.T.as_array())
    q = free_evolution(math.pi / 4, 2.0)
    assert np.allclose(q.as_array(), [[0, 1], [-1, 0]], atol=1e-15)


def test_wave_operator_at_time_zero():
    p = ModelParams.limit(3.0)
    w = wave_operator_approx(p, 0.0, 1.0)
    b = bracket(1.0)
    assert np.allclose(w.as_array(), [[b ** 1.5, 0], [0, b ** 0.5]], atol=1e-15)


def test_requires_limit_kappa():
    with pytest.raises(ValueError):
        wave_operator_approx(ModelParams(3.0, 0.2), 1.0, 1.0)
    with pytest.raises(ValueError):
        z_plus(ModelParams(3.0), 1.0)


def test_mu2_limit_in_closed_form():
    # W(t) -> [[r/<r>, 0], [1/<r>, 1]] when mu = 2
    p = ModelParams.limit(2.0)
    r = np.geomspace(1e-3, 1e3, 200)
    z = z_plus(p, r)
    ref = Mat2(bracket(r), np.zeros_like(r), 1 / angle(r), np.ones_like(r))
    assert np.max(np.abs((z - ref).as_array())) < 1e-13
    dist = (z - Mat2.identity(r.shape)).norm
    assert np.all(np.diff(dist) < 0)
    assert dist[-1] < 2e-3


def test_limit_reached_at_large_time():
    p = ModelParams.limit(3.0)
    assert limit_deviation(p, 1e4, 5.0) < 1e-3
    q = ModelParams.limit(3.7)
    w, z = wave_operator_approx(q, 1e5, 0.9), z_plus(q, 0.9)
    assert np.max(np.abs((w - z).as_array())) < 2e-4


@pytest.mark.parametrize("mu", [2.5, 3.0, 5.0])
def test_each_entry_against_limit(mu):
    p = ModelParams.limit(mu)
    r = np.array([0.9, 1.0, 2.0, 5.0, 10.0])
    w, z = wave_operator_approx(p, 1e5, r), z_plus(p, r)
    for name in ("e11", "e12", "e21", "e22"):
        assert np.max(np.abs(getattr(w, name) - getattr(z, name))) < 2e-4, name


def test_tampered_m11_sign_is_caught(monkeypatch):
    monkeypatch.setattr(scattering, "_M11_SIGN", -scattering._M11_SIGN)
    p = ModelParams.limit(3.0)
    w, z = wave_operator_approx(p, 1e5, 2.0), z_plus(p, 2.0)
    assert abs(w.e11 - z.e11) > 0.1


def test_determinant_example():
    p = ModelParams.limit(3.0)
    assert z_plus(p, 7.0).det == pytest.approx(bracket(7.0) ** 2, rel=1e-9)


@pytest.mark.parametrize("mu", MUS)
def test_determinant_law(mu):
    p = ModelParams.limit(mu)
    r = np.geomspace(1e-4, 1e3, 2000)
    z = z_plus(p, r)
    target = z_plus_det_target(p, r)
    # entries carry ~eps relative error; the determinant of a nearly singular
    # matrix inherits it through |m11 m22| + |m12 m21|
    cancel = np.abs(z.e11 * z.e22) + np.abs(z.e12 * z.e21)
    assert np.all(np.abs(z.det - target) <= 1e-9 * target + 64 * np.finfo(float).eps * cancel)
    well = r >= 0.1
    assert np.max(np.abs(z.det[well] - target[well]) / target[well]) < (1e-9 if mu <= 5 else 1e-7)


@pytest.mark.parametrize("mu", MUS)
def test_injectivity_proxy(mu):
    p = ModelParams.limit(mu)
    r = np.geomspace(1e-4, 1e3, 500)
    # below eps * smax^2 the determinant is not resolved by float entries
    r = r[bracket(r) ** (mu - 1) > 1e-10]
    smax, smin = z_plus(p, r).singular_values()
    assert np.all(smin > 0)
    # smin >= det / smax and det = [r]^(mu-1)
    assert np.all(smin >= 0.5 * bracket(r) ** (mu - 1) / smax)


def test_high_frequency_identity():
    p = ModelParams.limit(3.0)
    r = np.array([50.0, 100.0, 200.0, 400.0])
    dist = (z_plus(p, r) - Mat2.identity(r.shape)).norm
    assert dist[2] <= 0.02
    assert np.all(np.diff(dist) < 0)
    for mu in MUS[1:]:
        c = high_frequency_constant(ModelParams.limit(mu), np.geomspace(10, 1e3, 60))
        assert c.max() / c.min() < 1.2


@pytest.mark.parametrize("mu", MUS)
def test_continuity_at_origin(mu):
    p = ModelParams.limit(mu)
    vals = z_plus(p, np.array([0.0, 1e-5, 1e-4, 1e-3])).as_array()
    scale = np.max(np.abs(vals[0]))
    assert np.max(np.abs(np.diff(vals, axis=0))) <= 1e-3 * scale
    if mu > 2:
        assert np.all(vals[0] != 0.0)


@pytest.mark.parametrize("mu,window", [(3.0, (1, 50)), (2.0, (0.5, 50)), (5.0, (2, 20)), (2.5, (1, 50))])
def test_convergence_rate(mu, window):
    fit = convergence_profile(ModelParams.limit(mu), window, np.geomspace(10, 1e4, 10))
    assert fit.exponent == pytest.approx(-1.0, abs=0.1)


def test_convergence_profile_validates_window():
    with pytest.raises(ValueError):
        convergence_profile(ModelParams.limit(3.0), (0.0, 5.0), np.geomspace(10, 1e4, 10))


def test_wave_operator_bounded():
    p = ModelParams.limit(4.0)
    r = np.geomspace(1e-3, 100, 300)
    for t in (0.0, 1.0, 10.0, 1e3, 1e5):
        assert np.max(wave_operator_approx(p, t, r).norm) < 10
