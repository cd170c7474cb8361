"""Modified scattering: free evolution, the finite-time wave-operator
approximant and its limit Z+.

For kappa = (mu-2)/2 the energy symbol, rescaled by (1+t)^(mu/2) and pulled
back by the free evolution,

    W(t, r) = (1+t)^(mu/2) E0(-t) E(t, r),

converges as t -> oo to a real matrix Z+(r) with det Z+ = [r]^(1+2 kappa)
and Z+(r) -> I as r -> oo. With theta = r - rho pi/2 - pi/4 its entries are

    m11 =  c1 (Y_{rho-1} cos theta - J_{rho-1} sin theta)
    m21 = -c1 (J_{rho-1} cos theta + Y_{rho-1} sin theta)
    m12 =  c0 (J_rho sin theta - Y_rho cos theta)
    m22 =  c0 (J_rho cos theta + Y_rho sin theta)

where c1 = sqrt(pi/2) [r]^(1+kappa) r^(1/2), c0 = sqrt(pi/2) [r]^kappa r^(1/2)
and all Bessel functions are taken at r.
"""

from __future__ import annotations

import math

import numpy as np

from . import specfun
from .multiplier import Mat2, ModelParams, _check_r, _check_t, _radial, bracket, energy_symbol
from .supnorm_lab import DecayFit, fit_decay

SQRT_HALF_PI = math.sqrt(0.5 * math.pi)

# sign of the J_{rho-1} sin(theta) term in m11
_M11_SIGN = -1.0

# below this frequency the leading-order small-r forms are used
_R_SMALL = 1e-8


def free_evolution(t: float, f) -> Mat2:
    """Free-wave propagator [[cos tr, sin tr], [-sin tr, cos tr]] in energy variables."""
    t = float(t)
    r = np.asarray(_radial(f), dtype=float)
    c = np.cos(t * r)
    s = np.sin(t * r)
    return Mat2(c, s, -s, c)


def _require_limit(p: ModelParams) -> None:
    if not p.is_limit:
        raise ValueError(f"modified scattering needs kappa = (mu-2)/2 = {p.limit_kappa:g}, got {p.kappa:g}")


def wave_operator_approx(p: ModelParams, t: float, f) -> Mat2:
    """W(t, r) = (1+t)^(mu/2) E0(-t) E(t, r)."""
    _require_limit(p)
    t = _check_t(t)
    e = energy_symbol(p, t, f)
    return free_evolution(-t, f) @ e * (1.0 + t) ** (0.5 * p.mu)


def z_plus(p: ModelParams, f) -> Mat2:
    """Limit symbol Z+(r), continuous down to r = 0."""
    _require_limit(p)
    r = _check_r(f, allow_zero=True)
    shape = r.shape
    r = np.atleast_1d(r)
    rho = p.rho
    theta = r - 0.5 * math.pi * rho - 0.25 * math.pi
    ct, st = np.cos(theta), np.sin(theta)
    a = np.empty_like(r)
    b = np.empty_like(r)
    c = np.empty_like(r)
    d = np.empty_like(r)
    # c1 J_{rho-1}, c1 Y_{rho-1}, c0 J_rho, c0 Y_rho
    big = r >= _R_SMALL
    if big.any():
        rb = r[big]
        w = SQRT_HALF_PI * bracket(rb) ** p.kappa * np.sqrt(rb)
        w1 = w * bracket(rb)
        j1, y1 = specfun.jy(rho - 1.0, rb)
        j0, y0 = specfun.jy(rho, rb)
        a[big], b[big] = w1 * j1, w1 * y1
        c[big], d[big] = w * j0, w * y0
    small = ~big
    if small.any():
        # [r]^(1+kappa) r^(1/2) = r^(1-rho) <r>^(-1-kappa); Bessel terms at leading order
        rs = r[small]
        w = SQRT_HALF_PI * (1.0 + rs * rs) ** (-0.5 * p.kappa)
        w1 = w / np.sqrt(1.0 + rs * rs)
        a[small] = w1 * specfun.scaled_j_at_zero(rho - 1.0)
        b[small] = w1 * specfun.scaled_y_at_zero(rho - 1.0)
        c[small] = w * specfun.scaled_j_at_zero(rho)
        d[small] = w * specfun.scaled_y_at_zero(rho)
    m11 = b * ct + _M11_SIGN * a * st
    m21 = -(a * ct + b * st)
    m12 = c * st - d * ct
    m22 = c * ct + d * st
    return Mat2(*(m.reshape(shape) for m in (m11, m12, m21, m22)))


def z_plus_det_target(p: ModelParams, f):
    """[r]^(1+2 kappa), the determinant Z+ must have."""
    r = np.asarray(_radial(f), dtype=float)
    return bracket(r) ** (1.0 + 2.0 * p.kappa)


def limit_deviation(p: ModelParams, t: float, f):
    """||W(t, r) - Z+(r)|| (largest singular value) per frequency."""
    return (wave_operator_approx(p, t, f) - z_plus(p, f)).norm


def convergence_profile(p: ModelParams, r_window, t_grid, r_points: int = 400) -> DecayFit:
    """Power-law fit of sup over r in [c, R] of ||W(t) - Z+|| against t."""
    c, big_r = (float(x) for x in r_window)
    if not (0.0 < c < big_r):
        raise ValueError(f"need 0 < c < R, got window [{c}, {big_r}]")
    r = np.geomspace(c, big_r, r_points)
    samples = [(float(t), float(np.max(limit_deviation(p, t, r)))) for t in t_grid]
    return fit_decay(samples)


def high_frequency_constant(p: ModelParams, f):
    """r ||Z+(r) - I|| per frequency; bounded if Z+ -> I like 1/r."""
    r = np.asarray(_radial(f), dtype=float)
    return r * (z_plus(p, r) - Mat2.identity(r.shape)).norm
