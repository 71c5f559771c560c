"""Change of variables behind the impedance integral and its integrand ``q``.

For a difference vector ``z = (z', z_d)`` and abscissa ``y`` set
``a = y + r + beta z_d``, ``omega^2 = <z', z'>`` and
``chi = a^2 - (1 - beta^2) omega^2``. The transformed radius ``mu`` and
height ``t`` satisfy ``t + beta mu = sqrt(chi)`` and ``mu + beta t = a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeError
from .geometry import _as_coords, bilinear_sq, distance_sqrt
from .specfun import SQRT_HALF_PI, bessel_k_diff_scaled, bessel_k_scaled, reverse_bessel_coeffs, \
    reverse_bessel_diff_coeffs, _horner


@dataclass(frozen=True)
class KernelParams:
    """Frequency ``s`` (``Re s >= 0``, ``s != 0``), impedance ``beta > 0`` and dimension ``d >= 2``."""

    s: complex
    beta: float
    d: int

    def __post_init__(self):
        s = complex(self.s)
        if s == 0:
            raise DomainError("frequency must be nonzero")
        if s.real < 0:
            raise DomainError("frequency must satisfy Re s >= 0")
        if not (isinstance(self.d, (int, np.integer)) and self.d >= 2):
            raise DomainError("dimension must be >= 2")
        if not self.beta > 0:
            raise DomainError("impedance beta must be positive")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "d", int(self.d))

    @property
    def nu(self) -> float:
        return (self.d - 3) / 2

    @property
    def two_mu(self) -> int:
        """Twice the Bessel order ``nu + 1/2``."""
        return self.d - 2

    def with_s(self, s: complex) -> "KernelParams":
        return KernelParams(s, self.beta, self.d)


@dataclass(frozen=True)
class TransformState:
    a: complex
    omega_sq: complex
    chi: complex
    sqrt_chi: complex
    mu_tilde: complex
    t: complex
    dmu_dy: complex
    dt_dy: complex


def split_difference(z):
    """Return ``omega^2``, ``z_d`` and ``r`` for a difference vector or a stack of them."""
    z = _as_coords(z)
    omega2 = bilinear_sq(z[..., :-1])
    zd = z[..., -1]
    r = distance_sqrt(omega2 + zd * zd)
    return omega2, zd, r


def chi_from_parts(zd, r, y, beta):
    return y * y + zd * zd + beta * beta * r * r + 2 * y * r + 2 * beta * y * zd + 2 * beta * r * zd


def chi_eval(z, y, beta: float) -> complex:
    """Expanded form of ``chi`` at abscissa ``y``."""
    if np.isrealobj(y) and np.any(np.asarray(y) < 0):
        raise DomainError("abscissa y must be non-negative")
    _, zd, r = split_difference(z)
    out = chi_from_parts(zd, r, y, beta)
    return complex(out) if np.ndim(out) == 0 else out


def transform_parts(omega2, zd, r, y, beta):
    """Array version of the transform: ``(a, chi, sqrt_chi, mu, t, dmu)``."""
    a = y + r + beta * zd
    chi = chi_from_parts(zd, r, y, beta)
    if np.any((chi.imag == 0) & (chi.real <= 0)):
        raise RegimeError("chi on the closed negative real axis")
    sq = np.sqrt(chi)
    den = beta * a + sq
    if np.any(den == 0):
        raise RegimeError("beta*a + sqrt(chi) vanishes")
    mu = (a * sq + beta * omega2) / den
    t = (a * a - omega2) / den
    return a, chi, sq, mu, t, t / sq


def mu_t_eval(z, y: float, params: KernelParams) -> TransformState:
    """Transformed radius and height with their ``y``-derivatives."""
    if y < 0:
        raise DomainError("abscissa y must be non-negative")
    omega2, zd, r = split_difference(z)
    chi = chi_from_parts(zd, r, y, params.beta)
    if not chi.real > 0:
        raise RegimeError("Re chi <= 0: outside the certified regime")
    a, chi, sq, mu, t, dmu = transform_parts(omega2, zd, r, np.complex128(y), params.beta)
    return TransformState(
        a=complex(a), omega_sq=complex(omega2), chi=complex(chi), sqrt_chi=complex(sq),
        mu_tilde=complex(mu), t=complex(t), dmu_dy=complex(dmu), dt_dy=complex(mu / sq),
    )


def y_of_t(z, t: float, beta: float) -> float:
    """Inverse map ``t -> y`` for real difference vectors."""
    z = np.asarray(z, dtype=float)
    zd = z[-1]
    if t < zd:
        raise DomainError("t must be at least z_d")
    omega = np.linalg.norm(z[:-1])
    r = np.linalg.norm(z)
    return float(-(r + beta * zd) + beta * t + np.hypot(omega, t))


def scaled_bessel_ratio(two_mu: int, w):
    """``exp(w) K_mu(w) / w^mu`` and ``exp(w)(K_mu - K_{mu+1})(w) / w^mu`` with ``mu = two_mu/2``.

    For half-integer ``mu`` both are rational functions of ``w``, so no
    fractional power is formed.
    """
    w = np.asarray(w, dtype=complex)
    if two_mu % 2:
        n = (two_mu - 1) // 2
        p = w ** (2 * n + 1)
        a = SQRT_HALF_PI * _horner(reverse_bessel_coeffs(n), w) / p
        b = SQRT_HALF_PI * _horner(reverse_bessel_diff_coeffs(n), w) / (p * w)
        return a, b
    n = two_mu // 2
    p = w ** n
    return bessel_k_scaled(n, w) / p, bessel_k_diff_scaled(n, w) / p


def q_parts(omega2, zd, r, y, s, beta, two_mu):
    """Integrand ``q`` on arrays of (possibly complex) abscissae ``y``; broadcasts."""
    a, chi, sq, mu, t, dmu = transform_parts(omega2, zd, r, y, beta)
    w = s * mu
    A, B = scaled_bessel_ratio(two_mu, w)
    q1 = s * (dmu - mu * a / chi) * A / sq
    q2 = s * s * dmu * (mu / sq) * B
    return q1 + q2


def q_eval(z, y: float, params: KernelParams) -> complex:
    """Impedance integrand ``q = q^I + q^II`` at a real abscissa ``y >= 0``."""
    mu_t_eval(z, y, params)  # validates the regime
    omega2, zd, r = split_difference(z)
    return complex(q_parts(omega2, zd, r, np.complex128(y), params.s, params.beta, params.two_mu))
