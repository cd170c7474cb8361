"""Reduced-size invariant suite behind ``dampwave selftest``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import scattering, specfun
from .energy_lab import RadialData, RadialProfile, energy, energy_decay_experiment, initial_energy
from .mode_oracle import fundamental_matrix
from .multiplier import ModelParams, MultiplierIndex, bracket, energy_symbol, fundamental_symbol
from .supnorm_lab import fit_decay, index_exponent, operator_exponent, operator_norm, sup_norm


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    limit: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.limit)


def _specfun_wronskian(rng):
    nu = rng.uniform(0, 12, 200)
    z = 10 ** rng.uniform(-2, 3, 200)
    return max(abs(specfun.cross_product(n, x) * math.pi * x / 2 - 1) for n, x in zip(nu, z))


def _specfun_half_integer(rng):
    z = 10 ** rng.uniform(-2, 3, 200)
    j, y = specfun.jy(0.5, z)
    s, c = np.sqrt(2 / (np.pi * z)) * np.sin(z), np.sqrt(2 / (np.pi * z)) * np.cos(z)
    scale = np.sqrt(2 / (np.pi * z))
    return float(max(np.max(np.abs(j - s) / scale), np.max(np.abs(y + c) / scale)))


def _initial_conditions(rng):
    worst = 0.0
    for mu in (2.0, 2.5, 3.0, 5.0):
        m = fundamental_symbol(ModelParams(mu), 0.0, np.geomspace(0.01, 20, 50))
        worst = max(worst, float(np.max((m - m.identity(m.e11.shape)).norm)))
    return worst


def _oracle_match(rng):
    worst = 0.0
    for _ in range(20):
        p = ModelParams(float(rng.choice([2.0, 3.0, 4.5])))
        r, t = float(rng.uniform(0.05, 10)), float(rng.uniform(0, 50))
        a = fundamental_symbol(p, t, r)
        b = fundamental_matrix(p, r, t, 1e-10)
        worst = max(worst, float((a - b).norm / b.norm))
    return worst


def _det_identities(rng):
    p = ModelParams(3.0, 0.5)
    r = np.geomspace(0.01, 20, 200)
    worst = 0.0
    for t in (0.0, 1.0, 10.0, 100.0):
        f = np.abs(fundamental_symbol(p, t, r).det * (1 + t) ** p.mu - 1)
        e = np.abs(energy_symbol(p, t, r).det * (1 + t) ** p.mu / bracket(r) ** 2 - 1)
        worst = max(worst, float(f.max()), float(e.max()))
    return worst


_T_FIT = np.geomspace(1e2, 1e5, 8)


def _index_law(rng):
    idx = MultiplierIndex(1, 0, -1.5, 0)
    fit = fit_decay([(t, sup_norm(idx, t).sup_value) for t in _T_FIT])
    return abs(fit.exponent - index_exponent(idx)[0])


def _operator(rng):
    p = ModelParams(3.0, 0.25)
    fit = fit_decay([(t, operator_norm(p, t).sup_value) for t in _T_FIT])
    return abs(fit.exponent - operator_exponent(p))


def _energy_initial(rng):
    g = RadialProfile.gaussian(3)
    d = RadialData(g, g)
    return abs(energy(ModelParams(3.0), d, 0.0).energy / initial_energy(d) - 1)


def _energy_limit(rng):
    w = RadialProfile.weighted(0.5, 3)
    rep = energy_decay_experiment(ModelParams(3.0, 0.5), RadialData(w, w), np.geomspace(10, 1e4, 8))
    return abs(rep.fit.exponent - rep.expected_exponent)


def _sign_audit(entry):
    def check(rng):
        p = ModelParams.limit(3.0)
        r = np.array([1.0, 2.0, 5.0])
        w = scattering.wave_operator_approx(p, 1e5, r)
        z = scattering.z_plus(p, r)
        return float(np.max(np.abs(getattr(w, entry) - getattr(z, entry))))
    return check


def _z_det(rng):
    p = ModelParams.limit(3.0)
    r = np.geomspace(0.1, 1e3, 400)
    target = scattering.z_plus_det_target(p, r)
    return float(np.max(np.abs(scattering.z_plus(p, r).det - target) / target))


def _convergence(rng):
    fit = scattering.convergence_profile(ModelParams.limit(3.0), (1.0, 50.0), np.geomspace(10, 1e4, 8))
    return abs(fit.exponent + 1.0)


def _high_frequency(rng):
    c = scattering.high_frequency_constant(ModelParams.limit(3.0), np.geomspace(10, 1e3, 30))
    return float(c.max() / c.min())


SUITE = [
    ("specfun.cross_product_wronskian", _specfun_wronskian, 1e-10),
    ("specfun.half_integer_closed_form", _specfun_half_integer, 1e-10),
    ("multiplier.initial_conditions", _initial_conditions, 1e-10),
    ("multiplier.oracle_agreement", _oracle_match, 1e-6),
    ("multiplier.determinant_identities", _det_identities, 1e-9),
    ("supnorm.index_exponent", _index_law, 0.05),
    ("supnorm.operator_exponent", _operator, 0.05),
    ("energy.initial_identity", _energy_initial, 1e-8),
    ("energy.limit_case_exponent", _energy_limit, 0.05),
    ("scatter.sign_audit_m11", _sign_audit("e11"), 2e-4),
    ("scatter.sign_audit_m12", _sign_audit("e12"), 2e-4),
    ("scatter.sign_audit_m21", _sign_audit("e21"), 2e-4),
    ("scatter.sign_audit_m22", _sign_audit("e22"), 2e-4),
    ("scatter.det_identity", _z_det, 1e-9),
    ("scatter.convergence_exponent", _convergence, 0.1),
    ("scatter.high_frequency_constant_spread", _high_frequency, 2.0),
]


def run_suite(tol_override: float | None = None, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    for name, fn, limit in SUITE:
        value = float(fn(rng))
        out.append(CheckResult(name, value, limit if tol_override is None else tol_override))
    return out
