"""Sup-norm decay of the Psi symbols and of the energy operator.

For a bounded index, ``sup_r |Psi_{k,s,rho,delta}(t, r)|`` behaves like

    (1+t)^(-1/2)          rho != 0, |rho| - k <= -1/2
    (1+t)^(|rho| - k)     rho != 0, |rho| - k >= -1/2
    (1+t)^(-k) log(e+t)   rho == 0, k <= 1/2

and the operator norm of the energy symbol decays like (1+t)^-1 for
kappa = 0, (1+t)^(-1-kappa) up to kappa = (mu-2)/2 and (1+t)^(-mu/2) beyond.
Sups are taken over an explicit log-spaced frequency grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .multiplier import ModelParams, MultiplierIndex, energy_symbol, psi

R_MIN = 1e-6
R_MAX = 1e3
R_POINTS = 2000


@dataclass(frozen=True)
class SupNormSample:
    t: float
    sup_value: float
    argmax_r: float
    unbounded: bool = False


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    log_factor: bool
    residual: float
    prefactor: float = 1.0

    def model(self, t):
        t = np.asarray(t, dtype=float)
        val = self.prefactor * (1.0 + t) ** self.exponent
        if self.log_factor:
            val = val * np.log(math.e + t)
        return val


def default_r_grid(r_min: float = R_MIN, r_max: float = R_MAX, points: int = R_POINTS) -> np.ndarray:
    return np.geomspace(r_min, r_max, points)


def _sample(t: float, values: np.ndarray, r_grid: np.ndarray, unbounded=False) -> SupNormSample:
    i = int(np.argmax(values))
    return SupNormSample(float(t), float(values[i]), float(r_grid[i]), unbounded)


def sup_norm(idx: MultiplierIndex, t: float, r_grid=None) -> SupNormSample:
    """Grid sup of |Psi_idx(t, .)|.

    Indices with s > 0 or k < |delta| give symbols that are unbounded in r;
    the sample is then flagged and its value only reflects the grid ends.
    """
    r_grid = default_r_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    values = np.abs(psi(idx, t, r_grid))
    return _sample(t, values, r_grid, unbounded=not idx.bounded)


def operator_norm(p: ModelParams, t: float, r_grid=None) -> SupNormSample:
    """Grid sup over r of the largest singular value of the energy symbol."""
    r_grid = default_r_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    values = energy_symbol(p, t, r_grid).norm
    return _sample(t, values, r_grid)


def index_exponent(idx: MultiplierIndex) -> tuple[float, bool]:
    """Predicted (exponent, log_factor) of the sup-norm law."""
    if not idx.bounded:
        raise ValueError(f"{idx} is not a bounded index")
    if idx.rho == 0.0:
        if idx.k > 0.5:
            raise ValueError("the rho = 0 law is stated for k <= 1/2 only")
        return -idx.k, True
    return max(-0.5, abs(idx.rho) - idx.k), False


def operator_exponent(p: ModelParams) -> float:
    """Predicted decay exponent of the energy operator norm."""
    if p.kappa >= p.limit_kappa:
        return -p.mu / 2.0
    return -1.0 - p.kappa


def fit_decay(samples, model: str = "power", min_decades: float = 3.0) -> DecayFit:
    """Least-squares power law through (t, value) samples on log-log axes.

    ``model="power"`` fits value ~ C (1+t)^p; ``model="power_log"`` fits
    value ~ C (1+t)^p log(e+t). ``residual`` is the largest absolute
    deviation in log(value).
    """
    if model not in ("power", "power_log"):
        raise ValueError(f"unknown model {model!r}")
    arr = np.asarray([(float(t), float(v)) for t, v in samples])
    if arr.ndim != 2 or arr.shape[0] < 8:
        raise ValueError("need at least 8 samples")
    t, v = arr[:, 0], arr[:, 1]
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise ValueError("all values must be finite and > 0")
    x = np.log1p(t)
    if np.ptp(x) == 0.0:
        raise ValueError("degenerate fit: no spread in log(1+t)")
    span = np.log10(t.max() / t.min()) if t.min() > 0 else np.ptp(x) / math.log(10)
    if span < min_decades - 1e-9:
        raise ValueError(f"t spans {span:.2f} decades, need {min_decades}")
    y = np.log(v)
    log_factor = model == "power_log"
    if log_factor:
        y = y - np.log(np.log(math.e + t))
    design = np.column_stack([x, np.ones_like(x)])
    (slope, icept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.max(np.abs(y - design @ np.array([slope, icept]))))
    return DecayFit(float(slope), log_factor, resid, float(math.exp(icept)))


def band_ratio(t, values, exponent: float, log_factor: bool = False) -> float:
    """max/min of value / rate over the samples; finite and small means 'comparable'."""
    t = np.asarray(t, dtype=float)
    rate = (1.0 + t) ** exponent
    if log_factor:
        rate = rate * np.log(math.e + t)
    q = np.asarray(values, dtype=float) / rate
    return float(q.max() / q.min())


def decay_series(fn, t_grid) -> list[SupNormSample]:
    return [fn(float(t)) for t in t_grid]
