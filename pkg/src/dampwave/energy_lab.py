"""Energy of radial solutions computed on the frequency side.

By Plancherel, with data psi = (<D>u1, u2)^ and the energy symbol E(t, r),

    E(u; t) = 1/2 omega_n int_0^oo |E(t, r) psi(r)|^2 r^(n-1) dr,

omega_n being the area of the unit sphere in R^n. The integrand is smooth in
r but carries oscillations of frequency 2(1+t) at relative size 1/((1+t) r),
so the outer panels are kept a couple of periods wide; an inner geometric
cluster resolves the algebraic behaviour at r = 0.

A profile's energy rate is (1+t)^-min(mu, n+2+2 kappa_0), kappa_0 being the
order of vanishing of the data at r = 0; equality of the two carries an
extra log(e+t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mode_oracle import fundamental_matrix
from .multiplier import ModelParams, bracket, energy_symbol
from .supnorm_lab import DecayFit, band_ratio, fit_decay

GL_NODES = 16
REL_TOL = 1e-6
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_NODES)
_INNER_LEVELS = 40


class QuadratureError(RuntimeError):
    def __init__(self, message: str, rel_error: float):
        super().__init__(f"{message} (achieved relative error {rel_error:.3g})")
        self.rel_error = rel_error


def sphere_area(n: int) -> float:
    """omega_n = 2 pi^(n/2) / Gamma(n/2); omega_1 = 2 counts the two half-lines."""
    return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)


def _bump(r, r1, r2):
    out = np.zeros_like(r)
    inside = (r > r1) & (r < r2)
    x = r[inside]
    out[inside] = np.exp(-(r2 - r1) ** 2 / (4.0 * (x - r1) * (r2 - x)) + 1.0)
    return out


@dataclass(frozen=True)
class RadialProfile:
    """Radial frequency-side profile, normalized to unit L^2(R^n) norm.

    ``gaussian``: exp(-r^2 / (2 width^2)); ``annulus``: a smooth bump
    supported in [r1, r2] with r1 > 0; ``kappa_weighted``: [r]^kappa times a
    gaussian of the given width.
    """

    n: int
    kind: str
    params: dict = field(default_factory=dict)
    scale: float = field(default=1.0, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if self.kind == "gaussian":
            if self.params.get("width", 1.0) <= 0:
                raise ValueError("width must be > 0")
        elif self.kind == "annulus":
            r1, r2 = self.params["r1"], self.params["r2"]
            if not 0.0 < r1 < r2:
                raise ValueError(f"annulus needs 0 < r1 < r2, got [{r1}, {r2}]")
        elif self.kind == "kappa_weighted":
            if self.params["kappa"] < 0:
                raise ValueError("kappa must be >= 0")
        else:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        object.__setattr__(self, "scale", 1.0 / math.sqrt(self._raw_norm2()))

    @classmethod
    def gaussian(cls, n: int = 3, width: float = 1.0) -> "RadialProfile":
        return cls(n, "gaussian", {"width": float(width)})

    @classmethod
    def annulus(cls, r1: float, r2: float, n: int = 3) -> "RadialProfile":
        return cls(n, "annulus", {"r1": float(r1), "r2": float(r2)})

    @classmethod
    def weighted(cls, kappa: float, n: int = 3, width: float = 1.0) -> "RadialProfile":
        return cls(n, "kappa_weighted", {"kappa": float(kappa), "width": float(width)})

    @property
    def r_max(self) -> float:
        if self.kind == "annulus":
            return self.params["r2"]
        # gaussian tail below 1e-17 of the peak
        return 9.0 * self.params.get("width", 1.0)

    @property
    def r_min(self) -> float:
        return self.params["r1"] if self.kind == "annulus" else 0.0

    @property
    def vanishing_order(self) -> float:
        """Order kappa_0 of vanishing at r = 0 (inf for annuli)."""
        if self.kind == "annulus":
            return math.inf
        return self.params.get("kappa", 0.0)

    def _raw(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "annulus":
            return _bump(r, self.params["r1"], self.params["r2"])
        g = np.exp(-0.5 * (r / self.params["width"]) ** 2)
        if self.kind == "kappa_weighted":
            g = bracket(r) ** self.params["kappa"] * g
        return g

    def _raw_norm2(self) -> float:
        rule = _panels(self.r_min, self.r_max, 0.05, singular_origin=self.r_min == 0.0)
        x, w = rule
        return sphere_area(self.n) * float(np.sum(w * self._raw(x) ** 2 * x ** (self.n - 1)))

    def eval(self, r):
        return self.scale * self._raw(r)


@dataclass(frozen=True)
class RadialData:
    """Frequency-side data (<D>u1, u2)^ as a pair of radial profiles."""

    first: RadialProfile | None
    second: RadialProfile | None

    def __post_init__(self):
        if self.first is None and self.second is None:
            raise ValueError("at least one data component is required")
        ns = {p.n for p in (self.first, self.second) if p is not None}
        if len(ns) != 1:
            raise ValueError("both components must live in the same dimension")

    @property
    def n(self) -> int:
        return (self.first or self.second).n

    @property
    def profiles(self):
        return [p for p in (self.first, self.second) if p is not None]

    @property
    def r_min(self) -> float:
        return min(p.r_min for p in self.profiles)

    @property
    def r_max(self) -> float:
        return max(p.r_max for p in self.profiles)

    @property
    def vanishing_order(self) -> float:
        return min(p.vanishing_order for p in self.profiles)

    def values(self, r):
        zero = np.zeros_like(np.asarray(r, dtype=float))
        f1 = self.first.eval(r) if self.first is not None else zero
        f2 = self.second.eval(r) if self.second is not None else zero
        return f1, f2


@dataclass(frozen=True)
class EnergySample:
    t: float
    energy: float
    rel_error: float = 0.0


def _panels(a: float, b: float, h: float, singular_origin: bool):
    """Composite Gauss-Legendre nodes and weights on [a, b], panel width <= h."""
    edges = []
    if singular_origin:
        # geometric cluster at the origin
        h0 = min(h, b)
        edges = list(h0 * 2.0 ** -np.arange(_INNER_LEVELS, 0, -1))
        edges = [0.0] + edges
        a = h0
    m = max(1, int(math.ceil((b - a) / h)))
    edges = np.concatenate([edges, np.linspace(a, b, m + 1)])
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_X[None, :]
    w = half[:, None] * _GL_W[None, :]
    return x.ravel(), w.ravel()


def _base_width(t: float, r_max: float) -> float:
    # two periods of the 2(1+t) r oscillation, at most 0.5
    return min(0.5, 2.0 * math.pi / (1.0 + t), r_max)


def _quadrature(integrand, data: RadialData, t: float, max_levels: int = 4) -> tuple[float, float]:
    """Halve the panel width until two successive values agree to REL_TOL."""
    a, b = data.r_min, data.r_max
    h = _base_width(t, b - a)
    prev = None
    rel = math.inf
    for _ in range(max_levels):
        x, w = _panels(a, b, h, singular_origin=a == 0.0)
        val = float(np.sum(w * integrand(x)))
        if prev is not None:
            rel = abs(val - prev) / max(abs(val), 1e-300)
            if rel <= REL_TOL:
                return val, rel
        prev = val
        h *= 0.5
    raise QuadratureError("panel refinement did not converge", rel)


def initial_energy(data: RadialData) -> float:
    """1/2 (||u2||^2 + || |D| u1 ||^2), straight from the profiles."""
    def integrand(r):
        f1, f2 = data.values(r)
        return (bracket(r) ** 2 * f1 * f1 + f2 * f2) * r ** (data.n - 1)

    val, _ = _quadrature(integrand, data, 0.0)
    return 0.5 * sphere_area(data.n) * val


def _density(p: ModelParams, data: RadialData, t: float):
    p0 = ModelParams(p.mu)

    def integrand(r):
        m = energy_symbol(p0, t, r)
        f1, f2 = data.values(r)
        y1 = m.e11 * f1 + m.e12 * f2
        y2 = m.e21 * f1 + m.e22 * f2
        return (y1 * y1 + y2 * y2) * r ** (data.n - 1)

    return integrand


def energy(p: ModelParams, data: RadialData, t: float) -> EnergySample:
    """E(u; t) with a panel-refinement error estimate.

    Only mu enters; the data already carry their weight at r = 0.
    """
    t = float(t)
    if not (t >= 0.0 and math.isfinite(t)):
        raise ValueError(f"time must be finite and >= 0, got {t!r}")
    val, rel = _quadrature(_density(p, data, t), data, t)
    return EnergySample(t, 0.5 * sphere_area(data.n) * val, rel)


def energy_oracle(p: ModelParams, data: RadialData, t: float, tol: float = 1e-8) -> float:
    """E(u; t) with the symbol replaced by the ODE propagator, on a single panel rule."""
    a, b = data.r_min, data.r_max
    x, w = _panels(a, b, _base_width(t, b - a), singular_origin=False)
    x, w = x[x > 0], w[x > 0]
    f1, f2 = data.values(x)
    # energy variables at t = 0 are (r u1, u2) = ([r] f1, f2)
    g1 = bracket(x) * f1
    dens = np.empty_like(x)
    for i, r in enumerate(x):
        m = fundamental_matrix(p, float(r), t, tol)
        y1 = m.e11 * g1[i] + m.e12 * f2[i]
        y2 = m.e21 * g1[i] + m.e22 * f2[i]
        dens[i] = (y1 * y1 + y2 * y2) * r ** (data.n - 1)
    return 0.5 * sphere_area(data.n) * float(np.sum(w * dens))


def predicted_exponent(mu: float, data: RadialData) -> tuple[float, bool]:
    """(exponent, log_factor) of E(u; t) for these data."""
    low = data.n + 2.0 + 2.0 * data.vanishing_order
    if low < mu:
        return -low, False
    return -mu, low == mu


@dataclass(frozen=True)
class EnergyDecayReport:
    fit: DecayFit
    expected_exponent: float
    log_factor: bool
    ratio: float
    samples: tuple


def energy_decay_experiment(p: ModelParams, data: RadialData, t_grid) -> EnergyDecayReport:
    """Fitted exponent of E(u; t) and the band ratio max/min of E / rate."""
    samples = tuple(energy(p, data, t) for t in t_grid)
    expected, log_factor = predicted_exponent(p.mu, data)
    model = "power_log" if log_factor else "power"
    fit = fit_decay([(s.t, s.energy) for s in samples], model=model)
    ratio = band_ratio([s.t for s in samples], [s.energy for s in samples], expected, log_factor)
    return EnergyDecayReport(fit, expected, log_factor, ratio, samples)
