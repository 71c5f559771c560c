"""Scaled Macdonald functions of integer and half-integer order.

Everything is returned in exponentially scaled form ``exp(z) * K_mu(z)`` so
large ``Re z`` never overflows. Half-integer orders are evaluated exactly
through the reverse Bessel polynomials; integer orders switch between the
ascending series, a generalized Gauss-Laguerre rule for the integral
representation and the large-argument expansion.
"""

from __future__ import annotations

import enum
import math
from functools import lru_cache

import numpy as np
from scipy.special import roots_genlaguerre

from .errors import ConvergenceError, DomainError

EULER_GAMMA = 0.57721566490153286061
SQRT_HALF_PI = math.sqrt(math.pi / 2)

#: Below this modulus the ascending series is used for integer orders.
SERIES_RADIUS = 3.0
#: At and above this modulus the asymptotic expansion is used.
ASYMPTOTIC_RADIUS = 20.0
#: Gauss-Laguerre rule only for ``|arg z|`` up to this angle; series beyond.
LAGUERRE_MAX_ARG = 0.75 * math.pi
LAGUERRE_NODES = 64

_LAG_X, _LAG_W = roots_genlaguerre(LAGUERRE_NODES, -0.5)


class MajorantKind(enum.Enum):
    """Selector for the three piecewise majorant families."""

    M = "M"
    N = "N"
    W = "W"


def check_order(mu) -> float:
    """Validate a Bessel order and return it as float.

    Orders must be non-negative half-integers, i.e. ``2*mu`` is a
    non-negative integer.
    """
    two_mu = 2.0 * float(mu)
    if two_mu < 0 or two_mu != round(two_mu):
        raise DomainError(f"order must be a non-negative half-integer, got {mu!r}")
    return float(mu)


@lru_cache(maxsize=None)
def reverse_bessel_coeffs(n: int) -> tuple[int, ...]:
    """Integer coefficients of the reverse Bessel polynomial ``theta_n``.

    Coefficients are in ascending powers of ``z``. Generated by
    ``theta_{n+1} = (2n+1) theta_n + z^2 theta_{n-1}``.
    """
    if n < 0:
        raise DomainError("polynomial index must be non-negative")
    prev, cur = (1,), (1, 1)
    if n == 0:
        return prev
    for k in range(1, n):
        nxt = [0] * (len(cur) + 1)
        for i, c in enumerate(cur):
            nxt[i] += (2 * k + 1) * c
        for i, c in enumerate(prev):
            nxt[i + 2] += c
        prev, cur = cur, tuple(nxt)
    return cur


@lru_cache(maxsize=None)
def reverse_bessel_diff_coeffs(n: int) -> tuple[int, ...]:
    """Coefficients of ``z*theta_n(z) - theta_{n+1}(z)``; the leading terms cancel."""
    lo = reverse_bessel_coeffs(n)
    hi = reverse_bessel_coeffs(n + 1)
    shifted = (0,) + lo
    diff = [a - b for a, b in zip(shifted, hi)]
    assert diff[-1] == 0
    return tuple(diff[:-1])


def _horner(coeffs, z):
    out = np.zeros_like(z) + coeffs[-1]
    for c in coeffs[-2::-1]:
        out = out * z + c
    return out


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _check_cut(z: np.ndarray) -> None:
    bad = (z.imag == 0) & (z.real <= 0)
    if np.any(bad) or not np.all(np.isfinite(z)):
        raise DomainError("argument must be finite and off the closed negative real axis")


def _half_scaled(n: int, z):
    return SQRT_HALF_PI * _horner(reverse_bessel_coeffs(n), z) / (z ** n * np.sqrt(z))


def _half_diff_scaled(n: int, z):
    return SQRT_HALF_PI * _horner(reverse_bessel_diff_coeffs(n), z) / (z ** (n + 1) * np.sqrt(z))


def _series_int(n: int, z):
    """exp(z) K_n(z) from the ascending series with harmonic numbers."""
    hz = 0.5 * z
    q = hz * hz
    finite = np.zeros_like(z)
    if n > 0:
        for k in range(n):
            finite = finite + math.factorial(n - k - 1) / math.factorial(k) * (-q) ** k
    term = np.full_like(z, 1.0 / math.factorial(n))
    s_i = np.zeros_like(z)
    s_psi = np.zeros_like(z)
    hk, hnk = 0.0, harmonic_number(n)
    for k in range(400):
        psi_sum = hk + hnk - 2.0 * EULER_GAMMA
        s_i = s_i + term
        s_psi = s_psi + psi_sum * term
        scale = np.maximum(np.abs(s_i), np.abs(s_psi))
        if np.all(np.abs(term) * (1.0 + abs(psi_sum)) <= 1e-18 * scale):
            break
        term = term * q / ((k + 1) * (n + k + 1))
        hk += 1.0 / (k + 1)
        hnk += 1.0 / (n + k + 1)
    else:  # pragma: no cover - guarded by the branch radii
        raise ConvergenceError("Bessel series did not converge")
    hzn = hz ** n
    val = (-1) ** (n + 1) * np.log(hz) * hzn * s_i + (-1) ** n * 0.5 * hzn * s_psi
    if n > 0:
        val = val + 0.5 * finite / hzn
    return np.exp(z) * val


def _laguerre_int(n: int, z):
    """exp(z) K_n(z) from Gauss-Laguerre quadrature of the integral representation."""
    zz = z[..., None]
    x = _LAG_X
    f = x ** n * (1.0 + x / (2.0 * zz)) ** (n - 0.5)
    return np.sqrt(np.pi / (2.0 * z)) / math.gamma(n + 0.5) * (f @ _LAG_W)


def _asymptotic_coeffs(n: int, z):
    """Terms a_k(n)/z^k of the large-argument expansion, truncated adaptively."""
    terms = [np.ones_like(z)]
    a = np.ones_like(z)
    for k in range(1, 60):
        nxt = a * (4.0 * n * n - (2 * k - 1) ** 2) / (8.0 * k * z)
        if np.all(np.abs(nxt) >= np.abs(a)) and k > 1:
            break
        terms.append(nxt)
        a = nxt
        if np.all(np.abs(nxt) < 1e-17):
            break
    return terms


def _asymptotic_int(n: int, z):
    return np.sqrt(np.pi / (2.0 * z)) * sum(_asymptotic_coeffs(n, z))


def _asymptotic_int_diff(n: int, z):
    lo = _asymptotic_coeffs(n, z)
    hi = _asymptotic_coeffs(n + 1, z)
    k = min(len(lo), len(hi))
    return np.sqrt(np.pi / (2.0 * z)) * sum(lo[i] - hi[i] for i in range(1, k))


def _integer_branches(z):
    absz = np.abs(z)
    argz = np.abs(np.angle(z))
    asym = absz >= ASYMPTOTIC_RADIUS
    lag = (~asym) & (absz > SERIES_RADIUS) & (argz <= LAGUERRE_MAX_ARG)
    ser = ~(asym | lag)
    return ser, lag, asym


def _int_scaled(n: int, z, diff: bool):
    out = np.empty_like(z)
    ser, lag, asym = _integer_branches(z)
    if np.any(ser):
        v = _series_int(n, z[ser])
        out[ser] = v - _series_int(n + 1, z[ser]) if diff else v
    if np.any(lag):
        v = _laguerre_int(n, z[lag])
        out[lag] = v - _laguerre_int(n + 1, z[lag]) if diff else v
    if np.any(asym):
        out[asym] = _asymptotic_int_diff(n, z[asym]) if diff else _asymptotic_int(n, z[asym])
    return out


def bessel_k_scaled(mu, z):
    """Exponentially scaled Macdonald function ``exp(z) * K_mu(z)``.

    Parameters
    ----------
    mu : float
        Non-negative integer or half-integer order.
    z : complex or array_like
        Argument off the closed negative real axis.

    Returns
    -------
    complex or ndarray
        Same shape as ``z``.
    """
    mu = check_order(mu)
    arr, scalar = _as_complex(z)
    _check_cut(arr)
    flat = arr.reshape(-1)
    if mu != int(mu):
        out = _half_scaled(int(mu - 0.5), flat)
    else:
        out = _int_scaled(int(mu), flat, diff=False)
    out = out.reshape(arr.shape)
    return complex(out) if scalar else out


def bessel_k_diff_scaled(mu, z):
    """Scaled difference ``exp(z) * (K_mu(z) - K_{mu+1}(z))``.

    For half-integer orders the leading terms of the two reverse Bessel
    polynomials cancel exactly before division; for integer orders at large
    argument the expansions are subtracted term by term.
    """
    mu = check_order(mu)
    arr, scalar = _as_complex(z)
    _check_cut(arr)
    flat = arr.reshape(-1)
    if mu != int(mu):
        out = _half_diff_scaled(int(mu - 0.5), flat)
    else:
        out = _int_scaled(int(mu), flat, diff=True)
    out = out.reshape(arr.shape)
    return complex(out) if scalar else out


def majorant(kind: MajorantKind | str, mu, r):
    """Piecewise majorants M, N and W.

    All three equal ``r**-0.5`` for ``r >= 1``. Below 1 they are ``r**-mu``,
    except that for ``mu = 0`` M is ``1 + |ln r|``, W is ``1 + ln(r)**2`` and
    N is constant 1.
    """
    kind = MajorantKind(kind)
    mu = check_order(mu)
    rr = np.asarray(r, dtype=float)
    if np.any(~(rr > 0)):
        raise DomainError("majorant argument must be positive")
    with np.errstate(divide="ignore"):
        small = np.abs(np.log(rr))
    if mu == 0 and kind is MajorantKind.M:
        low = 1.0 + small
    elif mu == 0 and kind is MajorantKind.W:
        low = 1.0 + small ** 2
    else:
        low = rr ** -mu
    out = np.where(rr >= 1.0, rr ** -0.5, low)
    return float(out) if out.ndim == 0 else out


def _e1_series_scaled(z):
    total = np.zeros_like(z)
    term = np.ones_like(z)
    for k in range(1, 200):
        term = term * (-z) / k
        inc = term / k
        total = total + inc
        if np.all(np.abs(inc) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return np.exp(z) * (-EULER_GAMMA - np.log(z) - total)


def _e1_fraction_scaled(z):
    """Modified Lentz evaluation of 1/(z+1- 1/(z+3- 4/(z+5- ...)))."""
    tiny = 1e-300
    f = z + 1.0
    c = f.copy()
    d = np.zeros_like(z)
    for i in range(1, 500):
        a = -float(i * i)
        b = z + 2.0 * i + 1.0
        d = b + a * d
        d = np.where(d == 0, tiny, d)
        c = b + a / c
        c = np.where(c == 0, tiny, c)
        d = 1.0 / d
        delta = c * d
        f = f * delta
        if np.all(np.abs(delta - 1.0) < 1e-15):
            break
    else:  # pragma: no cover
        raise ConvergenceError("continued fraction for E1 did not converge")
    return 1.0 / f


def tricomi_u11(z):
    """Tricomi function ``U(1, 1, z) = exp(z) * E_1(z)`` for ``Re z > 0``."""
    arr, scalar = _as_complex(z)
    if np.any(~(arr.real > 0)):
        raise DomainError("tricomi_u11 requires Re z > 0")
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    small = np.abs(flat) <= 2.0
    if np.any(small):
        out[small] = _e1_series_scaled(flat[small])
    if np.any(~small):
        out[~small] = _e1_fraction_scaled(flat[~small])
    out = out.reshape(arr.shape)
    return complex(out) if scalar else out


def harmonic_number(n: int) -> float:
    """Harmonic number ``H_n``, with ``H_0 = 0``."""
    if n < 0:
        raise DomainError("harmonic number index must be non-negative")
    return math.fsum(1.0 / m for m in range(1, n + 1))
