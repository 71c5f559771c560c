"""Scalar kernels for the impedance integrand and its fixed-rule quadrature.

These mirror the vectorized numpy code in :mod:`impgreen.specfun` and
:mod:`impgreen.transform` but are written point-by-point so numba can
compile them. With numba disabled the same functions run as plain Python,
which is slow; the numpy batch path in :mod:`impgreen.kernel` is used
instead in that case.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ._accel import njit, prange
from .specfun import (
    ASYMPTOTIC_RADIUS,
    EULER_GAMMA,
    LAGUERRE_MAX_ARG,
    SERIES_RADIUS,
    _LAG_W,
    _LAG_X,
    reverse_bessel_coeffs,
    reverse_bessel_diff_coeffs,
)

MAX_POLY = 24


def _coeff_table(fn):
    table = np.zeros((MAX_POLY, MAX_POLY + 2))
    for n in range(MAX_POLY):
        c = fn(n)
        table[n, : len(c)] = c
    return table


THETA = _coeff_table(reverse_bessel_coeffs)
THETA_DIFF = _coeff_table(reverse_bessel_diff_coeffs)
LAG_X = np.ascontiguousarray(_LAG_X)
LAG_W = np.ascontiguousarray(_LAG_W)
GAMMA_HALF = np.array([math.gamma(n + 0.5) for n in range(MAX_POLY + 2)])
FACTORIAL = np.array([float(math.factorial(n)) for n in range(MAX_POLY + 2)])

#: Default Gauss-Legendre order per panel for the fixed rule.
GL_ORDER = 20
#: Panel length cap, in units of 1/|s|.
PANEL_CAP = 10.0
#: Integration stops where the damping exp(-|s| u) drops below exp(-DECAY_CUT).
DECAY_CUT = 45.0

GL_X, GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


@njit
def _poly(table, n, z):
    k = n + 1
    while k > 0 and table[n, k] == 0.0:
        k -= 1
    acc = complex(table[n, k])
    for i in range(k - 1, -1, -1):
        acc = acc * z + table[n, i]
    return acc


@njit
def _ipow(w, n):
    acc = 1.0 + 0j
    for _ in range(n):
        acc *= w
    return acc


@njit
def _kve_series(n, z):
    hz = 0.5 * z
    q = hz * hz
    finite = 0j
    for k in range(n):
        finite += FACTORIAL[n - k - 1] / FACTORIAL[k] * _ipow(-q, k)
    term = 1.0 / FACTORIAL[n] + 0j
    s_i = 0j
    s_psi = 0j
    hk = 0.0
    hnk = 0.0
    for j in range(1, n + 1):
        hnk += 1.0 / j
    for k in range(400):
        psi_sum = hk + hnk - 2.0 * EULER_GAMMA
        s_i += term
        s_psi += psi_sum * term
        if abs(term) * (1.0 + abs(psi_sum)) <= 1e-18 * max(abs(s_i), abs(s_psi)):
            break
        term = term * q / ((k + 1) * (n + k + 1))
        hk += 1.0 / (k + 1)
        hnk += 1.0 / (n + k + 1)
    hzn = _ipow(hz, n)
    sign = 1.0 if n % 2 == 0 else -1.0
    val = -sign * cmath.log(hz) * hzn * s_i + sign * 0.5 * hzn * s_psi
    if n > 0:
        val += 0.5 * finite / hzn
    return cmath.exp(z) * val


@njit
def _kve_laguerre(n, z):
    acc = 0j
    for i in range(LAG_X.shape[0]):
        x = LAG_X[i]
        acc += LAG_W[i] * x ** n * _ipow(1.0 + x / (2.0 * z), n) / cmath.sqrt(1.0 + x / (2.0 * z))
    return cmath.sqrt(math.pi / (2.0 * z)) / GAMMA_HALF[n] * acc


@njit
def _kve_laguerre_pair(n, z):
    """Orders n and n+1 from one pass over the nodes."""
    acc0 = 0j
    acc1 = 0j
    for i in range(LAG_X.shape[0]):
        x = LAG_X[i]
        g = 1.0 + x / (2.0 * z)
        term = LAG_W[i] * _ipow(x * g, n) / cmath.sqrt(g)
        acc0 += term
        acc1 += term * x * g
    pref = cmath.sqrt(math.pi / (2.0 * z))
    return pref * acc0 / GAMMA_HALF[n], pref * acc1 / GAMMA_HALF[n + 1]


@njit
def _kve_asym(n, m, z):
    """Asymptotic sum for order n, minus the one for order m when m >= 0."""
    a = 1.0 + 0j
    b = 1.0 + 0j
    acc = 0j if m >= 0 else 1.0 + 0j
    for k in range(1, 60):
        na = a * (4.0 * n * n - (2 * k - 1) ** 2) / (8.0 * k * z)
        nb = b * (4.0 * m * m - (2 * k - 1) ** 2) / (8.0 * k * z)
        if k > 1 and abs(na) >= abs(a):
            break
        if m >= 0 and k > 1 and abs(nb) >= abs(b):
            break
        acc += na - nb if m >= 0 else na
        a = na
        b = nb
        if abs(na) < 1e-17 and (m < 0 or abs(nb) < 1e-17):
            break
    return cmath.sqrt(math.pi / (2.0 * z)) * acc


@njit
def kve_int(n, z):
    """exp(z) K_n(z) for integer n, same branch layout as the numpy version."""
    r = abs(z)
    if r >= ASYMPTOTIC_RADIUS:
        return _kve_asym(n, -1, z)
    if r > SERIES_RADIUS and abs(cmath.phase(z)) <= LAGUERRE_MAX_ARG:
        return _kve_laguerre(n, z)
    return _kve_series(n, z)


@njit
def kve_int_diff(n, z):
    r = abs(z)
    if r >= ASYMPTOTIC_RADIUS:
        return _kve_asym(n, n + 1, z)
    if r > SERIES_RADIUS and abs(cmath.phase(z)) <= LAGUERRE_MAX_ARG:
        k0, k1 = _kve_laguerre_pair(n, z)
        return k0 - k1
    return _kve_series(n, z) - _kve_series(n + 1, z)


@njit
def _kve_int_both(n, z):
    """exp(z)K_n(z) and exp(z)(K_n(z) - K_{n+1}(z)) sharing the order-n work."""
    r = abs(z)
    if r >= ASYMPTOTIC_RADIUS:
        return _kve_asym(n, -1, z), _kve_asym(n, n + 1, z)
    if r > SERIES_RADIUS and abs(cmath.phase(z)) <= LAGUERRE_MAX_ARG:
        k0, k1 = _kve_laguerre_pair(n, z)
        return k0, k0 - k1
    k0 = _kve_series(n, z)
    return k0, k0 - _kve_series(n + 1, z)


@njit
def scaled_pair(two_mu, w):
    """Return exp(w)K_mu(w)/w^mu and exp(w)(K_mu(w)-K_{mu+1}(w))/w^mu, mu = two_mu/2."""
    c = math.sqrt(0.5 * math.pi)
    if two_mu % 2 == 1:
        n = (two_mu - 1) // 2
        p = _ipow(w, 2 * n + 1)
        return c * _poly(THETA, n, w) / p, c * _poly(THETA_DIFF, n, w) / (p * w)
    n = two_mu // 2
    p = _ipow(w, n)
    k, dk = _kve_int_both(n, w)
    return k / p, dk / p


@njit
def q_point(omega2, zd, r, y, s, beta, two_mu):
    """Impedance integrand q at complex abscissa y (scalar)."""
    rp = r + beta * zd
    a = y + rp
    chi = y * y + zd * zd + beta * beta * r * r + 2.0 * y * r + 2.0 * beta * y * zd + 2.0 * beta * r * zd
    sq = cmath.sqrt(chi)
    den = beta * a + sq
    mu = (a * sq + beta * omega2) / den
    t = (a * a - omega2) / den
    dmu = t / sq
    w = s * mu
    A, B = scaled_pair(two_mu, w)
    q1 = s * (dmu - mu * a / (sq * sq)) * A / sq
    q2 = s * s * dmu * (mu / sq) * B
    return q1 + q2


@njit
def psi_point(omega2, zd, r, s, beta, two_mu, glx, glw):
    """Fixed-rule psi on the contour rotated by -arg(s)."""
    sabs = abs(s)
    rot = s.conjugate() / sabs
    ell = abs(r)
    cap = PANEL_CAP / sabs
    u_end = DECAY_CUT / sabs
    u = 0.0
    acc = 0j
    while u < u_end:
        length = min(u + ell, cap)
        hi = min(u + length, u_end)
        half = 0.5 * (hi - u)
        mid = 0.5 * (hi + u)
        for i in range(glx.shape[0]):
            uu = mid + half * glx[i]
            acc += glw[i] * half * math.exp(-sabs * uu) * q_point(omega2, zd, r, uu * rot, s, beta, two_mu)
        u = hi
    return acc * rot / s


@njit(parallel=True)
def psi_batch(omega2, zd, r, s, beta, two_mu, glx, glw):
    out = np.empty(omega2.shape[0], dtype=np.complex128)
    for i in prange(omega2.shape[0]):
        out[i] = psi_point(omega2[i], zd[i], r[i], s, beta, two_mu, glx, glw)
    return out
