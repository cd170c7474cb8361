"""Solution multipliers of the mode equation v'' + mu/(1+t) v' + r^2 v = 0.

Everything is built from the two-point Bessel cross product

    X_{rho,delta}(a, b) = J_rho(a) Y_{rho+delta}(b) - Y_rho(a) J_{rho+delta}(b),

which is analytic in rho, including integer rho. Psi_{k,s,rho,delta} is
``2i r^k <r>^(s+1-k) X(r, (1+t) r)``; Phi_1, Phi_2, their time derivatives
and the energy symbol are fixed multiples of Psi.

Radial frequencies may be scalars or numpy arrays; ``t`` is a scalar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .specfun import DomainError

@dataclass(frozen=True)
class ModelParams:
    """Dissipation strength ``mu >= 2`` and data weight exponent ``kappa >= 0``."""

    mu: float
    kappa: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.mu) or self.mu < 2.0:
            raise DomainError(f"mu must be finite and >= 2, got {self.mu!r}")
        if not math.isfinite(self.kappa) or self.kappa < 0.0:
            raise DomainError(f"kappa must be finite and >= 0, got {self.kappa!r}")

    @classmethod
    def limit(cls, mu: float) -> "ModelParams":
        """Parameters at the critical weight kappa = (mu - 2)/2."""
        return cls(mu, (mu - 2.0) / 2.0)

    @property
    def rho(self) -> float:
        return (1.0 - self.mu) / 2.0

    @property
    def limit_kappa(self) -> float:
        return (self.mu - 2.0) / 2.0

    @property
    def is_limit(self) -> bool:
        return self.kappa == self.limit_kappa


@dataclass(frozen=True)
class MultiplierIndex:
    k: float
    s: float
    rho: float
    delta: int

    def __post_init__(self):
        if self.delta not in (-1, 0, 1):
            raise DomainError(f"delta must be -1, 0 or 1, got {self.delta!r}")

    @property
    def bounded(self) -> bool:
        """Whether Psi(t, .) is bounded in frequency."""
        return self.s <= 0 and self.k >= abs(self.delta)


def bracket(r):
    """[r] = r / <r>, the symbol that controls vanishing at r = 0."""
    r = np.asarray(r, dtype=float)
    return r / np.sqrt(1.0 + r * r)


def angle(r):
    """<r> = sqrt(1 + r^2)."""
    r = np.asarray(r, dtype=float)
    return np.sqrt(1.0 + r * r)


@dataclass(frozen=True)
class Freq:
    r: float

    def __post_init__(self):
        if not self.r >= 0.0:
            raise DomainError(f"radial frequency must be >= 0, got {self.r!r}")

    @property
    def bracket(self) -> float:
        return float(bracket(self.r))

    @property
    def angle(self) -> float:
        return float(angle(self.r))


def _radial(f):
    if isinstance(f, Freq):
        return f.r
    return f


@dataclass(frozen=True)
class Mat2:
    """2x2 real matrix; entries may be equal-shape arrays (a grid of matrices)."""

    e11: np.ndarray | float
    e12: np.ndarray | float
    e21: np.ndarray | float
    e22: np.ndarray | float

    @classmethod
    def identity(cls, shape=()) -> "Mat2":
        one = np.ones(shape)
        zero = np.zeros(shape)
        return cls(one, zero, zero.copy(), one.copy())

    @classmethod
    def from_array(cls, a) -> "Mat2":
        a = np.asarray(a, dtype=float)
        return cls(a[..., 0, 0], a[..., 0, 1], a[..., 1, 0], a[..., 1, 1])

    def as_array(self) -> np.ndarray:
        e = np.broadcast_arrays(self.e11, self.e12, self.e21, self.e22)
        return np.stack([np.stack(e[:2], -1), np.stack(e[2:], -1)], -2)

    @property
    def det(self):
        return self.e11 * self.e22 - self.e12 * self.e21

    @property
    def T(self) -> "Mat2":
        return Mat2(self.e11, self.e21, self.e12, self.e22)

    def singular_values(self):
        """(largest, smallest) singular values from the closed-form 2x2 SVD."""
        a, b, c, d = self.e11, self.e12, self.e21, self.e22
        p = np.hypot(a + d, b - c)
        q = np.hypot(a - d, b + c)
        smax = 0.5 * (p + q)
        # |det| / smax avoids the cancellation in (p - q) / 2
        with np.errstate(invalid="ignore", divide="ignore"):
            smin = np.where(smax > 0, np.abs(a * d - b * c) / np.where(smax > 0, smax, 1.0), 0.0)
        return smax, smin[()] if np.ndim(smin) == 0 else smin

    @property
    def norm(self):
        return self.singular_values()[0]

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.e11 * other.e11 + self.e12 * other.e21,
            self.e11 * other.e12 + self.e12 * other.e22,
            self.e21 * other.e11 + self.e22 * other.e21,
            self.e21 * other.e12 + self.e22 * other.e22,
        )

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.e11 - other.e11, self.e12 - other.e12,
                    self.e21 - other.e21, self.e22 - other.e22)

    def __mul__(self, c) -> "Mat2":
        return Mat2(c * self.e11, c * self.e12, c * self.e21, c * self.e22)

    __rmul__ = __mul__

    def all_finite(self) -> bool:
        return bool(all(np.all(np.isfinite(e)) for e in (self.e11, self.e12, self.e21, self.e22)))


def _dist_to_int(x: float) -> float:
    return abs(x - round(x))


def cross(rho: float, delta: int, a, b, form: str = "auto") -> np.ndarray:
    """J_rho(a) Y_{rho+delta}(b) - Y_rho(a) J_{rho+delta}(b).

    ``form="weber"`` evaluates the expression as written. ``form="csc"``
    uses the equivalent J-only combination

        csc(rho pi) (J_{-rho}(a) J_{rho+delta}(b) - (-1)^delta J_rho(a) J_{-rho-delta}(b)),

    undefined at integer rho. ``form="auto"`` picks, per point, the form
    with the smaller cancellation: the Weber form loses about
    dist(rho, Z) (ab)^(-|rho|) when both arguments are small, the csc form
    about 1/dist(rho, Z).
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    out = np.empty(a.shape)
    d = _dist_to_int(rho)
    if form == "weber" or (form == "auto" and d == 0.0):
        use_csc = np.zeros(a.shape, dtype=bool)
    elif form == "csc":
        if d == 0.0:
            raise DomainError("csc form is undefined at integer order")
        use_csc = np.ones(a.shape, dtype=bool)
    elif form == "auto":
        with np.errstate(divide="ignore", over="ignore"):
            loss_weber = d * (np.minimum(a, 1.0) * np.minimum(b, 1.0)) ** (-abs(rho))
        use_csc = loss_weber > 1.0 / d
    else:
        raise ValueError(f"unknown form {form!r}")

    w = ~use_csc
    if w.any():
        ja, ya = specfun.jy(rho, a[w])
        jb, yb = specfun.jy(rho + delta, b[w])
        out[w] = ja * yb - ya * jb
    if use_csc.any():
        aa, bb = a[use_csc], b[use_csc]
        jm_a = specfun.jv(-rho, aa)
        jp_a = specfun.jv(rho, aa)
        jp_b = specfun.jv(rho + delta, bb)
        jm_b = specfun.jv(-rho - delta, bb)
        sign = -1.0 if delta % 2 else 1.0
        out[use_csc] = (jm_a * jp_b - sign * jp_a * jm_b) / float(specfun._sinpi(rho))
    return out


def _check_t(t: float) -> float:
    t = float(t)
    if not (t >= 0.0 and math.isfinite(t)):
        raise DomainError(f"time must be finite and >= 0, got {t!r}")
    return t


def _check_r(r, allow_zero=False) -> np.ndarray:
    r = np.asarray(_radial(r), dtype=float)
    ok = (r >= 0.0) if allow_zero else (r > 0.0)
    if not np.all(ok & np.isfinite(r)):
        raise DomainError("radial frequency must be finite and > 0" if not allow_zero
                          else "radial frequency must be finite and >= 0")
    return r


def psi(idx: MultiplierIndex, t: float, f, form: str = "auto"):
    """Psi_{k,s,rho,delta}(t, r); purely imaginary (2i times a real number)."""
    t = _check_t(t)
    r = _check_r(f)
    x = cross(idx.rho, idx.delta, r, (1.0 + t) * r, form=form)
    with np.errstate(over="raise"):
        try:
            val = 2j * r ** idx.k * angle(r) ** (idx.s + 1.0 - idx.k) * x
        except FloatingPointError as exc:
            raise OverflowError("Psi not representable at this frequency; use a larger r") from exc
    return val[()] if np.ndim(val) == 0 else val


def _real(z):
    z = np.real(z)
    return float(z) if np.ndim(z) == 0 else z


def _pref(p: ModelParams, t: float) -> complex:
    return 0.25j * math.pi * (1.0 + t) ** p.rho


def phi1(p: ModelParams, t: float, f):
    """Multiplier of the initial displacement."""
    return _real(_pref(p, t) * psi(MultiplierIndex(1, 0, p.rho - 1, 1), t, f))


def phi2(p: ModelParams, t: float, f):
    """Multiplier of the initial velocity."""
    return _real(-_pref(p, t) * psi(MultiplierIndex(0, -1, p.rho, 0), t, f))


def dphi1(p: ModelParams, t: float, f):
    """Time derivative of phi1."""
    return _real(_pref(p, t) * psi(MultiplierIndex(2, 1, p.rho - 1, 0), t, f))


def dphi2(p: ModelParams, t: float, f):
    """Time derivative of phi2."""
    return _real(-_pref(p, t) * psi(MultiplierIndex(1, 0, p.rho, -1), t, f))


def _symbol(p: ModelParams, t: float, r, kx: float, s: float) -> Mat2:
    t = _check_t(t)
    r = _check_r(r, allow_zero=True)
    shape = r.shape
    r1 = np.atleast_1d(r)
    pos = r1 > 0.0
    out = [np.zeros(r1.shape) for _ in range(4)]
    if pos.any():
        rp = r1[pos]
        c = _pref(p, t)
        idxs = [
            (MultiplierIndex(2 + kx, s, p.rho - 1, 1), 1.0),
            (MultiplierIndex(1 + kx, s, p.rho, 0), -1.0),
            (MultiplierIndex(2 + kx, s, p.rho - 1, 0), 1.0),
            (MultiplierIndex(1 + kx, s, p.rho, -1), -1.0),
        ]
        for o, (idx, sign) in zip(out, idxs):
            o[pos] = (sign * c * psi(idx, t, rp)).real
    return Mat2(*(o.reshape(shape) for o in out))


def energy_symbol(p: ModelParams, t: float, f) -> Mat2:
    """Matrix symbol of (<D>u1, u2) in [D]^kappa L^2  ->  (|D|u, u_t)(t).

    At r = 0 the continuous limit is used: the zero matrix for kappa > 0 and
    diag(0, (1+t)^-mu) for kappa = 0.
    """
    m = _symbol(p, t, f, p.kappa, 0.0)
    if p.kappa == 0.0:
        r = np.asarray(_radial(f), dtype=float)
        m22 = np.where(r == 0.0, (1.0 + float(t)) ** (-p.mu), m.e22)
        m = Mat2(m.e11, m.e12, m.e21, m22 if np.ndim(m22) else float(m22))
    return m


def fundamental_symbol(p: ModelParams, t: float, f) -> Mat2:
    """Propagator of the energy variables (r v, v') from time 0 to t.

    Equals [[phi1, r phi2], [phi1'/r, phi2']]; its determinant is (1+t)^-mu.
    """
    return _fundamental(p, _check_t(t), _check_r(f))


def _fundamental(p: ModelParams, t: float, r) -> Mat2:
    # k-indices at kappa = 0 with the <r> factors removed (s + 1 - k = 0)
    c = _pref(p, t)
    e11 = (c * psi(MultiplierIndex(1, 0, p.rho - 1, 1), t, r)).real
    e12 = (-c * psi(MultiplierIndex(1, 0, p.rho, 0), t, r)).real
    e21 = (c * psi(MultiplierIndex(1, 0, p.rho - 1, 0), t, r)).real
    e22 = (-c * psi(MultiplierIndex(1, 0, p.rho, -1), t, r)).real
    return Mat2(e11, e12, e21, e22)


def wronskian_defect(p: ModelParams, t: float, f):
    """|(1+t)^mu det(fundamental_symbol) - 1|."""
    m = fundamental_symbol(p, t, f)
    return np.abs(m.det * (1.0 + float(t)) ** p.mu - 1.0)


def mu2_closed_form(t: float, f):
    """(phi1, phi2, phi1', phi2') for mu = 2, where (1+t) v solves the free wave equation."""
    t = _check_t(t)
    r = _check_r(f)
    tau = 1.0 + t
    c, s = np.cos(t * r), np.sin(t * r)
    p1 = (c + s / r) / tau
    p2 = s / (r * tau)
    dp1 = (c - r * s) / tau - p1 / tau
    dp2 = c / tau - p2 / tau
    return p1, p2, dp1, dp2
