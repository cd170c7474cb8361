import math

import numpy as np
import pytest

from dampwave.multiplier import ModelParams, MultiplierIndex, psi
from dampwave.supnorm_lab import (
    DecayFit,
    band_ratio,
    decay_series,
    default_r_grid,
    fit_decay,
    index_exponent,
    operator_exponent,
    operator_norm,
    sup_norm,
)

T_FIT = np.geomspace(1e2, 1e5, 10)


def _fit(idx, model="power", grid=None):
    samples = [sup_norm(idx, t, grid) for t in T_FIT]
    return fit_decay([(s.t, s.sup_value) for s in samples], model), samples


def test_fit_exact_power_law():
    t = np.geomspace(1, 1e4, 12)
    fit = fit_decay(list(zip(t, 7 * (1 + t) ** -2.0)))
    assert fit.exponent == pytest.approx(-2.0, abs=1e-12)
    assert fit.residual < 1e-12
    assert fit.prefactor == pytest.approx(7.0)
    assert np.allclose(fit.model(t), 7 * (1 + t) ** -2.0)


def test_fit_power_log_model():
    t = np.geomspace(1, 1e4, 12)
    v = (1 + t) ** -1.0 * np.log(math.e + t)
    fit = fit_decay(list(zip(t, v)), "power_log")
    assert fit.exponent == pytest.approx(-1.0, abs=1e-3)
    assert fit.log_factor


def test_fit_rejects_bad_input():
    t = np.geomspace(1, 1e4, 12)
    with pytest.raises(ValueError):
        fit_decay(list(zip(t[:5], t[:5])))
    with pytest.raises(ValueError):
        fit_decay([(5.0, 1.0)] * 10)
    with pytest.raises(ValueError):
        fit_decay(list(zip(np.geomspace(1, 10, 10), np.ones(10))))
    with pytest.raises(ValueError):
        fit_decay(list(zip(t, -np.ones(12))))
    with pytest.raises(ValueError):
        fit_decay(list(zip(t, np.ones(12))), "exp")


@pytest.mark.parametrize("idx,expected", [
    ((1, 0, -1.5, 0), 0.5),
    ((2, 0, -1.5, 1), -0.5),
    ((3, 0, -1.5, 0), -0.5),
    ((1, 0, -0.75, 0), -0.25),
    ((1, 0, -1.2, 1), 0.2),
    ((2, 0, -2, 1), 0.0),
])
def test_index_regimes(idx, expected):
    idx = MultiplierIndex(*idx)
    assert index_exponent(idx) == (pytest.approx(expected), False)
    fit, samples = _fit(idx)
    assert fit.exponent == pytest.approx(expected, abs=0.05)
    assert band_ratio(T_FIT, [s.sup_value for s in samples], expected) <= 10


def test_log_case_prefers_log_model():
    idx = MultiplierIndex(0, 0, 0, 0)
    assert index_exponent(idx) == (0.0, True)
    with_log, _ = _fit(idx, "power_log")
    without, _ = _fit(idx, "power")
    assert with_log.exponent == pytest.approx(0.0, abs=0.05)
    assert with_log.residual < without.residual


def test_pipeline_example():
    fit, _ = _fit(MultiplierIndex(1, 0, -1.5, 0))
    assert isinstance(fit, DecayFit)
    assert fit.exponent == pytest.approx(0.5, abs=0.05)


def test_index_exponent_rejects_out_of_scope():
    with pytest.raises(ValueError):
        index_exponent(MultiplierIndex(0, 0, -1.5, 1))
    with pytest.raises(ValueError):
        index_exponent(MultiplierIndex(1, 0, 0, 0))


def test_exceptional_frequency():
    middle = [sup_norm(MultiplierIndex(1, 0, -1.5, 0), t) for t in (1e2, 1e4)]
    assert middle[1].argmax_r < 0.05 * middle[0].argmax_r
    lower = [sup_norm(MultiplierIndex(3, 0, -1.5, 0), t) for t in (1e2, 1e4, 1e5)]
    assert min(s.argmax_r for s in lower) > 1.0


def test_grid_stability():
    idx = MultiplierIndex(1, 0, -0.75, 0)
    coarse = default_r_grid()
    fine = default_r_grid(points=2 * coarse.size)
    for t in (1e2, 1e3, 1e4, 1e5):
        a, b = sup_norm(idx, t, coarse).sup_value, sup_norm(idx, t, fine).sup_value
        assert abs(a - b) <= 0.01 * b


def test_cutoff_spot_check():
    idx = MultiplierIndex(1, 0, -1.5, 0)
    for t in (1e2, 1e4):
        tail = np.max(np.abs(psi(idx, t, np.geomspace(1e3, 1e4, 200))))
        assert tail < sup_norm(idx, t).sup_value


def test_unbounded_index_is_flagged_and_grows():
    idx = MultiplierIndex(0, 0, -1.5, 1)
    s1 = sup_norm(idx, 10.0)
    s2 = sup_norm(idx, 10.0, np.geomspace(1e-8, 1e3, 3000))
    assert s1.unbounded and s2.unbounded
    assert s2.sup_value > 10 * s1.sup_value
    grow = MultiplierIndex(1, 0.5, -1.5, 0)
    s3 = sup_norm(grow, 10.0, np.geomspace(1e-6, 1e5, 3000))
    # grows like r^(1/2): two more decades give about a factor 10
    assert s3.sup_value > 5 * sup_norm(grow, 10.0).sup_value


@pytest.mark.parametrize("mu,kappa", [(3, 0), (3, 0.25), (3, 0.5), (3, 1.0), (4, 0.5), (4, 1.5)])
def test_operator_norm_law(mu, kappa):
    p = ModelParams(mu, kappa)
    samples = decay_series(lambda t: operator_norm(p, t), T_FIT)
    fit = fit_decay([(s.t, s.sup_value) for s in samples])
    assert fit.exponent == pytest.approx(operator_exponent(p), abs=0.05)
    assert band_ratio(T_FIT, [s.sup_value for s in samples], operator_exponent(p)) <= 10
