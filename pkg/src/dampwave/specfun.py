"""Bessel functions J_nu and Y_nu of real order and positive argument.

Three evaluation routes, selected per point:

* ``x < 2``: Temme's series for Y at the reduced order |mu| <= 1/2, forward
  recurrence up to the requested order; J from its ascending series.
* ``2 <= x < hankel_radius(nu)``: Steed's complex continued fraction for
  (J' + iY')/(J + iY) at the reduced order, same recurrences.
* ``x >= hankel_radius(nu)``: Hankel's large-argument expansion, summed to
  the smallest term.

Negative orders go through the reflection formulas, which are exact at
integer orders, so Y needs no special handling near integer order.
All kernels are compiled with numba; the public scalar functions return an
:class:`EvalResult` carrying a truncation-error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numba
import numpy as np

MAX_ORDER = 50.0
HANKEL_MIN_RADIUS = 20.0

_EPS = 1e-16
_FPMIN = 1e-300
_MAXIT = 1_000_000


class DomainError(ValueError):
    """Raised for arguments outside the supported domain."""


@dataclass(frozen=True)
class EvalResult:
    value: float
    est_abs_error: float

    def __float__(self) -> float:
        return self.value


def _rgamma_series(nterms: int = 28) -> np.ndarray:
    # Taylor coefficients of 1/Gamma(1+x) about x=0.
    with mpmath.workdps(40):
        coeffs = mpmath.taylor(lambda z: mpmath.rgamma(1 + z), 0, nterms - 1)
    return np.array([float(c) for c in coeffs])


_RGAMMA_C = _rgamma_series()


@numba.njit(cache=True)
def _sinpi(x):
    # sin(pi x), exact zeros at integers.
    n = math.floor(x + 0.5)
    f = x - n
    s = math.sin(math.pi * f)
    if n % 2 != 0:
        s = -s
    return s


@numba.njit(cache=True)
def _cospi(x):
    n = math.floor(x + 0.5)
    f = x - n
    if abs(f) == 0.5:
        return 0.0
    c = math.cos(math.pi * f)
    if n % 2 != 0:
        c = -c
    return c


@numba.njit(cache=True)
def hankel_radius(nu):
    """Argument above which the large-argument expansion is used."""
    return max(HANKEL_MIN_RADIUS, nu * nu)


@numba.njit(cache=True)
def _temme_gammas(xmu, coeffs):
    gampl = 0.0
    gammi = 0.0
    gam1 = 0.0
    gam2 = 0.0
    p = 1.0
    for k in range(coeffs.shape[0]):
        c = coeffs[k]
        gampl += c * p
        if k % 2 == 0:
            gammi += c * p
            gam2 += c * p
        else:
            gammi -= c * p
        p *= xmu
    # gam1 = -(sum over odd k of c_k xmu^(k-1))
    p = 1.0
    for k in range(1, coeffs.shape[0], 2):
        gam1 -= coeffs[k] * p
        p *= xmu * xmu
    return gam1, gam2, gampl, gammi


@numba.njit(cache=True)
def _jy_steed(xnu, x, coeffs):
    """J_nu(x), Y_nu(x) for nu >= 0, 0 < x (continued fractions + Temme)."""
    xmin = 2.0
    if x < xmin:
        nl = int(xnu + 0.5)
    else:
        nl = max(0, int(xnu - x + 1.5))
    xmu = xnu - nl
    xmu2 = xmu * xmu
    xi = 1.0 / x
    xi2 = 2.0 * xi
    w = xi2 / math.pi

    # CF1: J'_nu / J_nu
    isign = 1
    h = xnu * xi
    if h < _FPMIN:
        h = _FPMIN
    b = xi2 * xnu
    d = 0.0
    c = h
    converged = False
    for _ in range(_MAXIT):
        b += xi2
        d = b - d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b - 1.0 / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        dl = c * d
        h = dl * h
        if d < 0.0:
            isign = -isign
        if abs(dl - 1.0) < _EPS:
            converged = True
            break
    if not converged:
        return math.nan, math.nan

    rjl = isign * _FPMIN
    rjpl = h * rjl
    rjl1 = rjl
    fact = xnu * xi
    for _ in range(nl):
        rjtemp = fact * rjl + rjpl
        fact -= xi
        rjpl = fact * rjtemp - rjl
        rjl = rjtemp
    if rjl == 0.0:
        rjl = _EPS
    f = rjpl / rjl

    if x < xmin:
        x2 = 0.5 * x
        pimu = math.pi * xmu
        fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = xmu * d
        fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
        gam1, gam2, gampl, gammi = _temme_gammas(xmu, coeffs)
        ff = 2.0 / math.pi * fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        e = math.exp(e)
        p = e / (gampl * math.pi)
        q = 1.0 / (e * math.pi * gammi)
        pimu2 = 0.5 * pimu
        fact3 = 1.0 if abs(pimu2) < _EPS else math.sin(pimu2) / pimu2
        r = math.pi * pimu2 * fact3 * fact3
        c = 1.0
        d = -x2 * x2
        ssum = ff + r * q
        sum1 = p
        converged = False
        for i in range(1, _MAXIT):
            ff = (i * ff + p + q) / (i * i - xmu2)
            c *= d / i
            p /= i - xmu
            q /= i + xmu
            dl = c * (ff + r * q)
            ssum += dl
            del1 = c * p - i * dl
            sum1 += del1
            if abs(dl) < (1.0 + abs(ssum)) * _EPS:
                converged = True
                break
        if not converged:
            return math.nan, math.nan
        rymu = -ssum
        ry1 = -sum1 * xi2
        rymup = xmu * xi * rymu - ry1
        rjmu = w / (rymup - f * rymu)
    else:
        a = 0.25 - xmu2
        p = -0.5 * xi
        q = 1.0
        br = 2.0 * x
        bi = 2.0
        fact = a * xi / (p * p + q * q)
        cr = br + q * fact
        ci = bi + p * fact
        den = br * br + bi * bi
        dr = br / den
        di = -bi / den
        dlr = cr * dr - ci * di
        dli = cr * di + ci * dr
        temp = p * dlr - q * dli
        q = p * dli + q * dlr
        p = temp
        converged = False
        for i in range(1, _MAXIT):
            a += 2 * i
            bi += 2.0
            dr = a * dr + br
            di = a * di + bi
            if abs(dr) + abs(di) < _FPMIN:
                dr = _FPMIN
            fact = a / (cr * cr + ci * ci)
            cr = br + cr * fact
            ci = bi - ci * fact
            if abs(cr) + abs(ci) < _FPMIN:
                cr = _FPMIN
            den = dr * dr + di * di
            dr /= den
            di /= -den
            dlr = cr * dr - ci * di
            dli = cr * di + ci * dr
            temp = p * dlr - q * dli
            q = p * dli + q * dlr
            p = temp
            if abs(dlr - 1.0) + abs(dli) < _EPS:
                converged = True
                break
        if not converged:
            return math.nan, math.nan
        gam = (p - f) / q
        rjmu = math.sqrt(w / ((p - f) * gam + q))
        if rjl < 0.0:
            rjmu = -rjmu
        rymu = rjmu * gam
        rymup = rymu * (p + q / gam)
        ry1 = xmu * xi * rymu - rymup

    fact = rjmu / rjl
    rj = rjl1 * fact
    for i in range(1, nl + 1):
        if math.isinf(ry1):
            # overflow; Y keeps its sign from here on
            return rj, ry1
        rytemp = (xmu + i) * xi2 * ry1 - rymu
        rymu = ry1
        ry1 = rytemp
    return rj, rymu


@numba.njit(cache=True)
def _hankel_pq(nu, x):
    """Sums P, Q of the large-argument expansion and the first omitted term."""
    m = 4.0 * nu * nu
    p = 1.0
    q = 0.0
    term = 1.0
    last = 1.0
    k = 1
    err = 0.0
    while True:
        term *= (m - (2 * k - 1) ** 2) / (k * 8.0 * x)
        a = abs(term)
        if a > last and k > 2:
            err = last
            break
        if k % 2 == 1:
            # odd k feeds Q with sign (-1)^((k-1)/2)
            if (k // 2) % 2 == 0:
                q += term
            else:
                q -= term
        else:
            if (k // 2) % 2 == 1:
                p -= term
            else:
                p += term
        last = a
        if a < _EPS * 1e-2 * (abs(p) + abs(q)) or term == 0.0:
            err = a
            break
        k += 1
        if k > 400:
            err = a
            break
    return p, q, err


@numba.njit(cache=True)
def _jy_hankel(nu, x):
    p, q, err = _hankel_pq(nu, x)
    # phase x - (nu/2 + 1/4) pi, expanded so the large x is reduced by libm
    phase = 0.5 * nu + 0.25
    cp = _cospi(phase)
    sp = _sinpi(phase)
    cx = math.cos(x)
    sx = math.sin(x)
    c = cx * cp + sx * sp
    s = sx * cp - cx * sp
    amp = math.sqrt(2.0 / (math.pi * x))
    j = amp * (p * c - q * s)
    y = amp * (p * s + q * c)
    return j, y, amp * (err + 4.0 * _EPS * (abs(p) + abs(q)))


@numba.njit(cache=True)
def _j_series(nu, x):
    """Ascending series for J_nu(x), nu >= 0, x < 2; all terms well scaled."""
    h = 0.5 * x
    lead = h ** nu
    if lead > 1e-280:
        lead = lead / math.gamma(nu + 1.0)
    else:
        lead = math.exp(nu * math.log(h) - math.lgamma(nu + 1.0))
    u = -h * h
    term = 1.0
    total = 1.0
    k = 0
    while abs(term) > _EPS * abs(total) * 0.01:
        k += 1
        term *= u / (k * (nu + k))
        total += term
    return lead * total


@numba.njit(cache=True)
def jy_kernel(nu, x, coeffs):
    """(J_nu(x), Y_nu(x), est_abs_error) for real nu, x > 0."""
    anu = abs(nu)
    if x >= hankel_radius(anu):
        return _jy_hankel(nu, x)
    j, y = _jy_steed(anu, x, coeffs)
    if x < 2.0:
        # the Wronskian route loses accuracy when the reduced order is negative
        j = _j_series(anu, x)
    if nu < 0.0:
        c = _cospi(anu)
        s = _sinpi(anu)
        # skip exact zero coefficients so an overflowed Y cannot produce 0 * inf
        jn = (c * j if c != 0.0 else 0.0) - (s * y if s != 0.0 else 0.0)
        yn = (s * j if s != 0.0 else 0.0) + (c * y if c != 0.0 else 0.0)
        j, y = jn, yn
    err = 8.0 * _EPS * (abs(j) + abs(y))
    return j, y, err


@numba.njit(cache=True)
def _jy_arrays(nu, x, coeffs):
    n = x.shape[0]
    j = np.empty(n)
    y = np.empty(n)
    e = np.empty(n)
    for i in range(n):
        j[i], y[i], e[i] = jy_kernel(nu, x[i], coeffs)
    return j, y, e


def _check_order(nu: float) -> None:
    if not math.isfinite(nu) or abs(nu) > MAX_ORDER:
        raise DomainError(f"order {nu!r} outside supported range |nu| <= {MAX_ORDER:g}")


def jy(nu: float, z) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised J_nu(z), Y_nu(z) for an array of positive arguments."""
    _check_order(nu)
    x = np.asarray(z, dtype=float)
    flat = np.ascontiguousarray(x.ravel())
    if flat.size and not (flat.min() > 0.0 and np.isfinite(flat).all()):
        raise DomainError("Bessel argument must be finite and > 0")
    j, y, _ = _jy_arrays(float(nu), flat, _RGAMMA_C)
    if np.isnan(j).any() or np.isnan(y).any():
        raise ArithmeticError(f"Bessel evaluation did not converge for order {nu}")
    return j.reshape(x.shape), y.reshape(x.shape)


def jv(nu: float, z) -> np.ndarray:
    return jy(nu, z)[0]


def yv(nu: float, z) -> np.ndarray:
    return jy(nu, z)[1]


def _scalar(nu: float, z: float) -> tuple[float, float, float]:
    _check_order(nu)
    z = float(z)
    if not (z > 0.0 and math.isfinite(z)):
        raise DomainError(f"argument {z!r} must be finite and > 0")
    j, y, err = jy_kernel(float(nu), z, _RGAMMA_C)
    if math.isnan(j) or math.isnan(y):
        raise ArithmeticError(f"Bessel evaluation did not converge at nu={nu}, z={z}")
    return j, y, err


def bessel_j(order: float, z: float) -> EvalResult:
    """J_order(z) for real order and z > 0."""
    j, _, err = _scalar(order, z)
    if not math.isfinite(j):
        raise OverflowError(f"J_{order}({z}) is not representable")
    return EvalResult(j, err)


def bessel_y(order: float, z: float) -> EvalResult:
    """Weber function Y_order(z) for real order and z > 0."""
    _, y, err = _scalar(order, z)
    if not math.isfinite(y):
        raise OverflowError(f"Y_{order}({z}) is not representable")
    return EvalResult(y, err)


def rgamma(x: float) -> float:
    """1/Gamma(x), zero at the poles."""
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def scaled_j_at_zero(order: float) -> float:
    """lim_{z->0} z^(-order) J_order(z) = 2^(-order) / Gamma(order+1)."""
    return 2.0 ** (-order) * rgamma(order + 1.0)


def scaled_y_at_zero(order: float) -> float:
    """lim_{z->0} z^(-order) Y_order(z) for order < 0.

    For order >= 0, Y_order is singular at the origin and z^(-order) only
    makes it worse, so the limit does not exist.
    """
    if order >= 0:
        raise DomainError("scaled Weber limit exists only for negative order")
    return -(2.0 ** (-order)) * float(_cospi(order)) * math.gamma(-order) / math.pi


def bessel_j_scaled(order: float, z: float) -> EvalResult:
    """Lambda_order(z) = z^(-order) J_order(z), finite as z -> 0.

    At negative integer order the series starts at a Gamma pole and the
    continued value 0 is returned at z = 0.
    """
    _check_order(order)
    z = float(z)
    if not (z >= 0.0 and math.isfinite(z)):
        raise DomainError(f"argument {z!r} must be finite and >= 0")
    if z == 0.0:
        return EvalResult(scaled_j_at_zero(order), 0.0)
    if z > 2.0:
        j, _, err = _scalar(order, z)
        scale = z ** (-order)
        return EvalResult(j * scale, err * scale)
    # ascending series, 2^-nu sum_k (-z^2/4)^k / (k! Gamma(nu+k+1))
    u = -0.25 * z * z
    total = 0.0
    comp = 0.0
    fact = 1.0
    powu = 1.0
    k = 0
    last = 0.0
    while True:
        term = powu / fact * rgamma(order + k + 1.0)
        # Kahan summation; the series alternates
        yk = term - comp
        tk = total + yk
        comp = (tk - total) - yk
        total = tk
        if k > 2 and abs(term) <= 1e-18 * abs(total) and abs(last) <= 1e-18 * max(abs(total), 1e-300):
            break
        if k > 200:
            break
        last = term
        k += 1
        powu *= u
        fact *= k
    value = 2.0 ** (-order) * total
    return EvalResult(value, 4 * _EPS * abs(value) + 1e-300)


def cross_product(orderlow: float, z: float) -> float:
    """J_{nu+1}(z) Y_nu(z) - J_nu(z) Y_{nu+1}(z), which equals 2/(pi z)."""
    j0, y0, _ = _scalar(orderlow, z)
    j1, y1, _ = _scalar(orderlow + 1.0, z)
    if not all(math.isfinite(v) for v in (j0, y0, j1, y1)):
        raise OverflowError(f"Bessel values at order {orderlow}, z={z} are not representable")
    return j1 * y0 - j0 * y1
