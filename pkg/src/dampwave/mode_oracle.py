"""Direct numerical integration of the single-mode equation

    v'' + mu/(1+t) v' + r^2 v = 0,

independent of any Bessel-function machinery. Used as ground truth for the
multiplier formulas.

The integrator is the Dormand-Prince 5(4) pair with a PI step-size
controller. It works on the rescaled state x = (1+t)^(mu/2) (v, v'), which
stays of order one for oscillating modes:

    x1' =  (mu/2) x1/(1+t) + x2
    x2' = -(mu/2) x2/(1+t) - r^2 x1
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .multiplier import Mat2, ModelParams
from .specfun import DomainError

TOL_MIN = 1e-12
TOL_MAX = 1e-4
MAX_PHASE = 1e7

# local tolerance relative to the requested global one
_LOCAL_FACTOR = 0.05


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t_reached: float):
        super().__init__(f"{message} (reached t={t_reached:.17g})")
        self.t_reached = t_reached


@dataclass(frozen=True)
class ModeState:
    t: float
    v: float
    vdot: float

    def energy(self, r: float) -> float:
        return 0.5 * (r * r * self.v * self.v + self.vdot * self.vdot)


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.zeros((7, 6))
_A[1, :1] = [1 / 5]
_A[2, :2] = [3 / 40, 9 / 40]
_A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
_A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
_A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
_A[6, :6] = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                    -92097 / 339200, 187 / 2100, 1 / 40])


@numba.njit(cache=True)
def _rhs(t, x, half_mu, r2, out):
    tau = 1.0 + t
    for c in range(x.shape[1]):
        x1 = x[0, c]
        x2 = x[1, c]
        out[0, c] = half_mu * x1 / tau + x2
        out[1, c] = -half_mu * x2 / tau - r2 * x1


@numba.njit(cache=True)
def _dopri(x, t0, t1, h, half_mu, r2, tol, A, B, C, E):
    """Advance x from t0 to t1 in place; returns (status, t_reached, h_next, nsteps)."""
    ncol = x.shape[1]
    k = np.zeros((7, 2, ncol))
    xs = np.empty((2, ncol))
    comp = np.zeros((2, ncol))
    scale = np.empty(ncol)
    for c in range(ncol):
        scale[c] = max(abs(x[0, c]), abs(x[1, c]), 1e-300)
    t = t0
    if t1 <= t0:
        return 0, t, h, 0
    alpha = 0.7 / 5.0
    beta = 0.4 / 5.0
    err_prev = 1e-4
    nsteps = 0
    _rhs(t, x, half_mu, r2, k[0])
    while t < t1:
        if h > t1 - t:
            h = t1 - t
        if h < 1e-14 * max(1.0, abs(t)):
            return 1, t, h, nsteps
        for s in range(1, 7):
            for i in range(2):
                for c in range(ncol):
                    acc = x[i, c]
                    for j in range(s):
                        acc += h * A[s, j] * k[j, i, c]
                    xs[i, c] = acc
            _rhs(t + C[s] * h, xs, half_mu, r2, k[s])
        err = 0.0
        for i in range(2):
            for c in range(ncol):
                e = 0.0
                for j in range(7):
                    e += E[j] * k[j, i, c]
                e *= h
                sc = tol * scale[c]
                err = max(err, abs(e) / sc)
        if err <= 1.0:
            t += h
            nsteps += 1
            # compensated update; roundoff otherwise dominates at tight tol
            for i in range(2):
                for c in range(ncol):
                    inc = 0.0
                    for j in range(6):
                        inc += B[j] * k[j, i, c]
                    yk = h * inc - comp[i, c]
                    tk = x[i, c] + yk
                    comp[i, c] = (tk - x[i, c]) - yk
                    x[i, c] = tk
            for c in range(ncol):
                scale[c] = max(scale[c], abs(x[0, c]), abs(x[1, c]))
            for i in range(2):
                for c in range(ncol):
                    k[0, i, c] = k[6, i, c]
            fac = 0.9 * max(err, 1e-10) ** (-alpha) * err_prev ** beta
            fac = min(5.0, max(0.2, fac))
            err_prev = max(err, 1e-4)
            h *= fac
        else:
            h *= max(0.2, 0.9 * err ** (-alpha))
    return 0, t, h, nsteps


def _validate(p: ModelParams, r: float, t_end: float, tol: float) -> None:
    if not (math.isfinite(r) and r >= 0.0):
        raise DomainError(f"frequency must be finite and >= 0, got {r!r}")
    if not (math.isfinite(t_end) and t_end >= 0.0):
        raise DomainError(f"t_end must be finite and >= 0, got {t_end!r}")
    if not TOL_MIN <= tol <= TOL_MAX:
        raise DomainError(f"tol must lie in [{TOL_MIN:g}, {TOL_MAX:g}], got {tol!r}")
    if r * t_end > MAX_PHASE:
        raise DomainError(f"r*t_end = {r * t_end:g} exceeds the resolution budget {MAX_PHASE:g}")


def _propagate(p: ModelParams, r: float, x: np.ndarray, times, tol: float) -> list[np.ndarray]:
    half_mu = 0.5 * p.mu
    h = min(0.1, 0.1 / max(r, 1e-300))
    t = 0.0
    out = []
    local = tol * _LOCAL_FACTOR
    for t1 in times:
        status, t_reached, h, _ = _dopri(x, t, float(t1), h, half_mu, r * r, local, _A, _B, _C, _E)
        if status != 0:
            raise IntegrationError("step size underflow", t_reached)
        t = float(t1)
        out.append(x * (1.0 + t) ** (-half_mu))
    return out


def integrate_mode(p: ModelParams, r: float, v0: float, vdot0: float,
                   t_end: float, tol: float = 1e-10) -> ModeState:
    """State (v, v') at ``t_end`` of the mode started from (v0, vdot0) at t=0."""
    r, t_end = float(r), float(t_end)
    _validate(p, r, t_end, tol)
    x = np.array([[float(v0)], [float(vdot0)]])
    (y,) = _propagate(p, r, x, [t_end], tol)
    return ModeState(t_end, float(y[0, 0]), float(y[1, 0]))


def mode_trajectory(p: ModelParams, r: float, v0: float, vdot0: float,
                    t_eval, tol: float = 1e-10) -> list[ModeState]:
    """States at each of the increasing times ``t_eval``."""
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval.size == 0:
        return []
    if np.any(np.diff(t_eval) < 0):
        raise DomainError("t_eval must be non-decreasing")
    _validate(p, float(r), float(t_eval[-1]), tol)
    x = np.array([[float(v0)], [float(vdot0)]])
    ys = _propagate(p, float(r), x, t_eval, tol)
    return [ModeState(float(t), float(y[0, 0]), float(y[1, 0])) for t, y in zip(t_eval, ys)]


def fundamental_matrix(p: ModelParams, r: float, t_end: float, tol: float = 1e-10) -> Mat2:
    """Propagator of the energy variables (r v, v') over [0, t_end].

    Column j is the state reached from the j-th unit vector in energy
    variables; requires r > 0. Its determinant is (1+t_end)^-mu.
    """
    r, t_end = float(r), float(t_end)
    _validate(p, r, t_end, tol)
    if r == 0.0:
        raise DomainError("the energy-variable propagator needs r > 0")
    # columns: (v, v') started from (1, 0) and (0, 1)
    x = np.array([[1.0, 0.0], [0.0, 1.0]])
    (y,) = _propagate(p, r, x, [t_end], tol)
    # first column started from v0 = 1; rescale to r v0 = 1
    return Mat2(y[0, 0], r * y[0, 1], y[1, 0] / r, y[1, 1])
