import math

import numpy as np
import pytest

from dampwave.energy_lab import (
    EnergySample,
    QuadratureError,
    RadialData,
    RadialProfile,
    energy,
    energy_decay_experiment,
    energy_oracle,
    initial_energy,
    predicted_exponent,
    sphere_area,
)
from dampwave.multiplier import ModelParams, bracket, mu2_closed_form


def _norm2(profile, a, b):
    x, w = np.polynomial.legendre.leggauss(400)
    r = 0.5 * (b - a) * x + 0.5 * (b + a)
    return sphere_area(profile.n) * 0.5 * (b - a) * np.sum(w * profile.eval(r) ** 2 * r ** (profile.n - 1))


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2.0)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


@pytest.mark.parametrize("profile,a,b", [
    (RadialProfile.gaussian(3), 0.0, 9.0),
    (RadialProfile.gaussian(1, width=0.5), 0.0, 4.5),
    (RadialProfile.annulus(1.0, 2.0, 3), 1.0, 2.0),
    (RadialProfile.weighted(0.5, 2), 0.0, 9.0),
])
def test_profiles_are_normalized(profile, a, b):
    assert _norm2(profile, a, b) == pytest.approx(1.0, rel=1e-8)


def test_profile_shapes():
    ann = RadialProfile.annulus(1.0, 2.0)
    assert np.all(ann.eval(np.array([0.5, 1.0, 2.0, 3.0])) == 0.0)
    assert ann.eval(np.array([1.5]))[0] > 0
    assert ann.vanishing_order == math.inf
    w = RadialProfile.weighted(0.75)
    r = np.array([1e-8, 1e-6])
    assert w.eval(r)[1] / w.eval(r)[0] == pytest.approx(100 ** 0.75, rel=1e-6)
    assert np.all(np.isfinite(RadialProfile.gaussian().eval(np.geomspace(1e-9, 50, 20))))
    with pytest.raises(ValueError):
        RadialProfile.annulus(0.0, 1.0)
    with pytest.raises(ValueError):
        RadialProfile(3, "box")
    with pytest.raises(ValueError):
        RadialData(None, None)
    with pytest.raises(ValueError):
        RadialData(RadialProfile.gaussian(1), RadialProfile.gaussian(3))


def test_initial_energy_identity():
    for data in (RadialData(RadialProfile.gaussian(3), RadialProfile.gaussian(3)),
                 RadialData(RadialProfile.weighted(0.5, 1), None),
                 RadialData(None, RadialProfile.annulus(1, 2, 2))):
        e0 = energy(ModelParams(3.0), data, 0.0)
        assert e0.energy == pytest.approx(initial_energy(data), rel=1e-8)
    # u2 alone: E(0) = ||u2||^2 / 2
    d = RadialData(None, RadialProfile.gaussian(3))
    assert initial_energy(d) == pytest.approx(0.5, rel=1e-10)


def test_mu2_annulus_against_closed_form():
    prof = RadialProfile.annulus(1.0, 2.0, 3)
    data = RadialData(prof, prof)
    t = 10.0
    x, w = np.polynomial.legendre.leggauss(2000)
    r = 1.5 + 0.5 * x
    f = prof.eval(r)
    p1, p2, dp1, dp2 = mu2_closed_form(t, r)
    g1 = bracket(r) * f
    y1 = p1 * g1 + r * p2 * f
    y2 = dp1 / r * g1 + dp2 * f
    ref = 0.5 * sphere_area(3) * 0.5 * np.sum(w * (y1 ** 2 + y2 ** 2) * r ** 2)
    assert energy(ModelParams(2.0), data, t).energy == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("t", [1.0, 10.0, 100.0])
def test_against_oracle_quadrature(t):
    g = RadialProfile.gaussian(1)
    data = RadialData(g, g)
    p = ModelParams(3.0)
    assert energy(p, data, t).energy == pytest.approx(energy_oracle(p, data, t), rel=1e-5)


def test_energy_positive_and_decreasing():
    g = RadialProfile.gaussian(3)
    data = RadialData(g, g)
    values = [energy(ModelParams(2.5), data, t).energy for t in (0, 1, 3, 10, 30, 100)]
    assert all(v > 0 for v in values)
    assert np.all(np.diff(values) < 0)


def test_refinement_estimate_is_reported():
    g = RadialProfile.gaussian(3)
    s = energy(ModelParams(3.0), RadialData(g, g), 50.0)
    assert isinstance(s, EnergySample)
    assert 0 <= s.rel_error <= 1e-6
    err = QuadratureError("stuck", 1e-3)
    assert err.rel_error == 1e-3


def test_predicted_exponent():
    g1, g3 = RadialProfile.gaussian(1), RadialProfile.gaussian(3)
    assert predicted_exponent(4.0, RadialData(g1, g1)) == (-3.0, False)
    assert predicted_exponent(3.0, RadialData(g1, g1)) == (-3.0, True)
    assert predicted_exponent(3.0, RadialData(g3, g3)) == (-3.0, False)
    w = RadialProfile.weighted(0.5, 1)
    assert predicted_exponent(5.0, RadialData(w, w)) == (-4.0, False)
    a = RadialProfile.annulus(1, 2, 1)
    assert predicted_exponent(7.0, RadialData(a, a)) == (-7.0, False)


T_GRID = np.geomspace(10, 1e4, 10)


@pytest.mark.parametrize("mu,data", [
    (3.0, RadialData(RadialProfile.weighted(0.5), RadialProfile.weighted(0.5))),
    (4.0, RadialData(RadialProfile.gaussian(1), RadialProfile.gaussian(1))),
    (3.0, RadialData(RadialProfile.gaussian(3), RadialProfile.gaussian(3))),
    (5.0, RadialData(RadialProfile.weighted(0.5, 1), RadialProfile.weighted(0.5, 1))),
])
def test_decay_laws(mu, data):
    rep = energy_decay_experiment(ModelParams(mu), data, T_GRID)
    assert rep.fit.exponent == pytest.approx(rep.expected_exponent, abs=0.05)
    assert rep.ratio <= 10


def test_exponent_non_increasing_in_kappa():
    exps = []
    for kappa in (0.0, 0.25, 0.5, 1.0, 1.5):
        prof = RadialProfile.weighted(kappa, 1)
        exps.append(energy_decay_experiment(ModelParams(4.0), RadialData(prof, prof), T_GRID).fit.exponent)
    assert all(b <= a + 0.02 for a, b in zip(exps, exps[1:]))
    assert exps[-1] == pytest.approx(-4.0, abs=0.05)


def test_upper_bound_constant_stable():
    prof = RadialProfile.weighted(0.5)
    data = RadialData(prof, prof)
    p = ModelParams(3.0, 0.5)
    ratios = [energy(p, data, t).energy * (1 + t) ** 3 for t in np.geomspace(1, 1e4, 9)]
    assert max(ratios[:5]) == pytest.approx(max(ratios), rel=0.5)
