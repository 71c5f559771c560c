"""Half-space impedance Green's function and its eikonal factorization.

``G_half(x, y) = G_illu(x - y) + G_refl(x - Ry) + G_imp(x - Ry)`` and
equivalently ``exp(-s tau_illu) theta_illu + exp(-s tau_refl)(theta_refl + theta_imp)``
with ``tau_illu = |x - y|`` and ``tau_refl = |x - Ry|``.

The impedance part needs ``psi(z) = (1/s) int_0^inf exp(-s y) q(z, y) dy``.
By default the integral is taken along the ray ``y = u exp(-i arg s)``, on
which ``exp(-s y) = exp(-|s| u)`` decays without oscillation. The integrand
is analytic in the sector swept by the rotation, so the value is unchanged;
this also covers purely imaginary ``s`` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import _kernels
from ._accel import NUMBA_ENABLED
from .errors import ConvergenceError, DomainError
from .geometry import bilinear_sq, distance_sqrt, reflect
from .specfun import tricomi_u11
from .transform import KernelParams, q_parts, scaled_bessel_ratio, split_difference

PANEL_CAP = _kernels.PANEL_CAP
DECAY_CUT = _kernels.DECAY_CUT


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for the adaptive ``psi`` quadrature.

    Attributes
    ----------
    rel_tol, abs_tol : float
        Target ``|error| <= rel_tol*|psi| + abs_tol``.
    max_panels : int
        Hard cap on the number of panels, including bisections.
    panel_growth : float
        Ratio of consecutive ``u + |r|`` in the graded region.
    order : int
        Gauss-Legendre order of the low rule; the check rule uses ``order + 10``.
    contour : {"rotated", "real"}
        Integrate along ``exp(-i arg s) R_+`` or along the real axis.
    theta_min : float
        The real contour is refused when ``|arg s| > pi/2 - theta_min``.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_panels: int = 64
    panel_growth: float = 2.0
    order: int = 20
    contour: str = "rotated"
    theta_min: float = 0.05

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.panel_growth <= 1:
            raise DomainError("panel_growth must exceed 1")
        if self.contour not in ("rotated", "real"):
            raise DomainError("contour must be 'rotated' or 'real'")

    @staticmethod
    def split_b(s: complex, r: float) -> float:
        """End of the graded near-field region, ``max(0, 1/|s| - r)``."""
        return max(0.0, 1.0 / abs(s) - abs(r))


class PsiResult(NamedTuple):
    value: complex
    error: float
    panels: int


@dataclass(frozen=True)
class GreenComponents:
    g_illu: complex
    g_refl: complex
    g_imp: complex
    g_half: complex
    theta_illu: complex
    theta_refl: complex
    theta_imp: complex
    tau_illu: complex
    tau_refl: complex


def theta_illu(r, params: KernelParams):
    """``exp(s r) g_nu(r)``, the full-space kernel without its phase."""
    mu2 = params.two_mu
    s = params.s
    A, _ = scaled_bessel_ratio(mu2, s * np.asarray(r, dtype=complex))
    out = (2 * np.pi) ** (-params.nu - 1.5) * s ** mu2 * A
    return complex(out) if np.ndim(out) == 0 else out


def g_nu(r, params: KernelParams):
    """Full-space Helmholtz kernel ``(2 pi)^(-nu-3/2) (s/r)^(nu+1/2) K_(nu+1/2)(s r)``."""
    r = np.asarray(r, dtype=complex)
    out = np.exp(-params.s * r) * theta_illu(r, params)
    return complex(out) if np.ndim(out) == 0 else out


def _reflection_factor(r, z_coord, beta):
    den = z_coord + beta * r
    if np.any(den == 0):
        raise DomainError("z + beta r vanishes")
    return (z_coord - beta * r) / den


def sigma_nu(r, z_coord, params: KernelParams):
    """Reflected kernel ``(z - beta r)/(z + beta r) g_nu(r)``."""
    out = _reflection_factor(np.asarray(r, complex), np.asarray(z_coord, complex), params.beta) * g_nu(r, params)
    return complex(out) if np.ndim(out) == 0 else out


def imp_prefactor(params: KernelParams) -> complex:
    """``-(beta/pi)(s^2/2pi)^(nu+1/2)``, with the power taken as ``s^(2nu+1)``."""
    mu2 = params.two_mu
    return -(params.beta / np.pi) * params.s ** mu2 / (2 * np.pi) ** (mu2 / 2)


# -- psi quadrature -----------------------------------------------------------

def _contour(params: KernelParams, quad: QuadratureSpec):
    s = params.s
    if quad.contour == "rotated":
        return np.conj(s) / abs(s), abs(s)
    if abs(np.angle(s)) > np.pi / 2 - quad.theta_min:
        raise DomainError("frequency too close to the imaginary axis for the real contour; "
                          "use the rotated contour or limiting_absorption")
    return 1.0 + 0j, s.real


def _graded_breaks(ell: float, sabs: float, growth: float, u_end: float) -> list[float]:
    cap = PANEL_CAP / sabs
    pts = [0.0]
    while pts[-1] < u_end:
        u = pts[-1]
        pts.append(min(u + min((growth - 1) * (u + ell), cap), u_end))
    return pts


def psi_eval(z, params: KernelParams, quad: QuadratureSpec = QuadratureSpec()) -> PsiResult:
    """Adaptive panel quadrature for ``psi``.

    Parameters
    ----------
    z : array_like
        Difference vector ``x - Ry``; complex entries are allowed.
    params : KernelParams
    quad : QuadratureSpec

    Returns
    -------
    PsiResult
        Value, error estimate and number of panels used.
    """
    omega2, zd, r = split_difference(z)
    omega2, zd, r = complex(omega2), complex(zd), complex(r)
    s, beta, mu2 = params.s, params.beta, params.two_mu
    rot, decay = _contour(params, quad)
    ell = abs(r)
    x_lo, w_lo = np.polynomial.legendre.leggauss(quad.order)
    x_hi, w_hi = np.polynomial.legendre.leggauss(quad.order + 10)

    def f(u):
        return np.exp(-s * u * rot) * q_parts(omega2, zd, r, u * rot, s, beta, mu2) * rot

    def panel(lo, hi):
        half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
        a = half * np.dot(w_lo, f(mid + half * x_lo))
        b = half * np.dot(w_hi, f(mid + half * x_hi))
        return b, abs(b - a)

    def tail_bound(u):
        return abs(q_parts(omega2, zd, r, u * rot, s, beta, mu2)) * math.exp(-decay * u) / decay

    u_end = DECAY_CUT / decay
    breaks = _graded_breaks(ell, abs(s), quad.panel_growth, u_end)
    panels = {(lo, hi): panel(lo, hi) for lo, hi in zip(breaks[:-1], breaks[1:])}
    cap = PANEL_CAP / abs(s)
    while True:
        total = sum(v for v, _ in panels.values())
        tol = quad.rel_tol * abs(total) + quad.abs_tol * abs(s)
        tail = tail_bound(u_end)
        if tail > 0.1 * tol:
            lo = u_end
            u_end = lo + cap
            panels[(lo, u_end)] = panel(lo, u_end)
        else:
            err = sum(e for _, e in panels.values())
            if err + tail <= tol:
                break
            lo, hi = max(panels, key=lambda k: panels[k][1])
            del panels[(lo, hi)]
            mid = 0.5 * (lo + hi)
            panels[(lo, mid)] = panel(lo, mid)
            panels[(mid, hi)] = panel(mid, hi)
        if len(panels) > quad.max_panels:
            raise ConvergenceError(f"psi quadrature exhausted {quad.max_panels} panels")
    err = sum(e for _, e in panels.values()) + tail
    return PsiResult(complex(total / s), float(err / abs(s)), len(panels))


def _psi_fixed_numpy(omega2, zd, r, s, beta, mu2, glx, glw):
    sabs = abs(s)
    rot = np.conj(s) / sabs
    ell = np.abs(r)
    cap = PANEL_CAP / sabs
    u_end = DECAY_CUT / sabs
    u = np.zeros(omega2.shape)
    acc = np.zeros(omega2.shape, dtype=complex)
    while True:
        idx = np.nonzero(u < u_end)[0]
        if idx.size == 0:
            break
        lo = u[idx]
        hi = np.minimum(lo + np.minimum(lo + ell[idx], cap), u_end)
        half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
        nodes = mid[:, None] + half[:, None] * glx
        vals = q_parts(omega2[idx, None], zd[idx, None], r[idx, None], nodes * rot, s, beta, mu2)
        acc[idx] += half * ((np.exp(-sabs * nodes) * vals) @ glw)
        u[idx] = hi
    return acc * rot / s


def psi_fixed(omega2, zd, r, params: KernelParams, backend: str | None = None) -> np.ndarray:
    """Fixed-rule ``psi`` on the rotated contour for batches of difference vectors.

    Parameters
    ----------
    omega2, zd, r : ndarray
        ``<z', z'>``, ``z_d`` and the complex distance for each point.
    backend : {"numba", "numpy"}, optional
        Defaults to numba when it is enabled.
    """
    omega2 = np.ascontiguousarray(omega2, dtype=complex).ravel()
    zd = np.ascontiguousarray(zd, dtype=complex).ravel()
    r = np.ascontiguousarray(r, dtype=complex).ravel()
    backend = backend or ("numba" if NUMBA_ENABLED else "numpy")
    glx, glw = _kernels.GL_X, _kernels.GL_W
    if backend == "numba":
        if not NUMBA_ENABLED:
            raise DomainError("numba backend requested but disabled")
        return _kernels.psi_batch(omega2, zd, r, params.s, params.beta, params.two_mu, glx, glw)
    out = np.empty(omega2.shape, dtype=complex)
    chunk = 4096
    for i in range(0, omega2.size, chunk):
        sl = slice(i, i + chunk)
        out[sl] = _psi_fixed_numpy(omega2[sl], zd[sl], r[sl], params.s, params.beta, params.two_mu, glx, glw)
    return out


def limiting_absorption(fn: Callable[[complex], complex], s: complex,
                        eps: Sequence[float] = (1e-2, 1e-3, 1e-4)) -> complex:
    """Richardson extrapolation of ``fn(s + eps |s|)`` to ``eps = 0``.

    Neville's scheme on the polynomial through the sampled ``eps`` values.
    """
    e = np.asarray(eps, dtype=float)
    vals = [complex(fn(s + ei * abs(s))) for ei in e]
    p = list(vals)
    n = len(p)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (e[i] * p[i + 1] - e[i + k] * p[i]) / (e[i] - e[i + k])
    return p[0]


# -- assembly -----------------------------------------------------------------

def _check_pair(x, y, params: KernelParams, allow_boundary: bool = False):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (params.d,) or y.shape != (params.d,):
        raise DomainError(f"points must have {params.d} coordinates")
    if not allow_boundary and (x[-1] <= 0 or y[-1] <= 0):
        raise DomainError("points must lie in the open upper half-space")
    if np.array_equal(x, y):
        raise DomainError("coincident points")
    return x, y


def _components(x, y, params: KernelParams, quad: QuadratureSpec) -> GreenComponents:
    z = x - y
    zr = x - reflect(y)
    r = float(np.linalg.norm(z))
    rr = float(np.linalg.norm(zr))
    s = params.s
    t_illu = theta_illu(r, params)
    t_refl = _reflection_factor(rr, zr[-1], params.beta) * theta_illu(rr, params)
    t_imp = imp_prefactor(params) * psi_eval(zr, params, quad).value
    e1, e2 = np.exp(-s * r), np.exp(-s * rr)
    g_illu, g_refl, g_imp = e1 * t_illu, e2 * t_refl, e2 * t_imp
    return GreenComponents(
        g_illu=complex(g_illu), g_refl=complex(g_refl), g_imp=complex(g_imp),
        g_half=complex(g_illu + g_refl + g_imp),
        theta_illu=complex(t_illu), theta_refl=complex(t_refl), theta_imp=complex(t_imp),
        tau_illu=r, tau_refl=rr,
    )


def green_components(x, y, params: KernelParams, quad: QuadratureSpec = QuadratureSpec()) -> GreenComponents:
    """All terms of the half-space kernel at one point pair in the upper half-space."""
    x, y = _check_pair(x, y, params)
    return _components(x, y, params, quad)


class ThetaBatch(NamedTuple):
    illu: np.ndarray
    refl: np.ndarray
    imp: np.ndarray
    tau_illu: np.ndarray
    tau_refl: np.ndarray

    def g_half(self, s: complex) -> np.ndarray:
        return np.exp(-s * self.tau_illu) * self.illu + np.exp(-s * self.tau_refl) * (self.refl + self.imp)


def theta_from_differences(z_direct, z_reflected, params: KernelParams,
                           components: Sequence[str] = ("illu", "refl", "imp"),
                           backend: str | None = None) -> ThetaBatch:
    """Phase-free factors as functions of ``x - y`` and ``x - Ry``.

    Either difference stack may be ``None`` when no component needs it.
    Entries for components not requested are zero.
    """
    n = len(z_direct) if z_direct is not None else len(z_reflected)
    zeros = np.zeros(n, dtype=complex)
    ill = refl = imp = zeros
    tau_i = tau_r = zeros
    if "illu" in components:
        tau_i = distance_sqrt(bilinear_sq(np.asarray(z_direct, dtype=complex)))
        ill = np.asarray(theta_illu(tau_i, params))
    if "refl" in components or "imp" in components:
        zr = np.asarray(z_reflected, dtype=complex)
        omega2 = bilinear_sq(zr[:, :-1])
        zd = zr[:, -1]
        tau_r = distance_sqrt(omega2 + zd * zd)
        if "refl" in components:
            refl = _reflection_factor(tau_r, zd, params.beta) * theta_illu(tau_r, params)
        if "imp" in components:
            imp = imp_prefactor(params) * psi_fixed(omega2, zd, tau_r, params, backend)
    return ThetaBatch(ill, np.asarray(refl), np.asarray(imp), tau_i, tau_r)


def theta_batch(X, Y, params: KernelParams, components: Sequence[str] = ("illu", "refl", "imp"),
                backend: str | None = None) -> ThetaBatch:
    """Phase-free factors for stacks of (possibly complex) point pairs.

    ``psi`` uses the fixed rule of :func:`psi_fixed`.
    """
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    Y = np.atleast_2d(np.asarray(Y, dtype=complex))
    return theta_from_differences(X - Y, X - reflect(Y), params, components, backend)


def g_half_batch(X, Y, params: KernelParams, backend: str | None = None) -> np.ndarray:
    return theta_batch(X, Y, params, backend=backend).g_half(params.s)


def closed_form_d3_beta1(x, y, s: complex) -> complex:
    """Closed-form half-space kernel in three dimensions with ``beta = 1``."""
    s = complex(s)
    if not s.real > 0:
        raise DomainError("closed form requires Re s > 0")
    params = KernelParams(s, 1.0, 3)
    x, y = _check_pair(x, y, params, allow_boundary=True)
    return _closed_form(x, y, s)


def _closed_form(x, y, s):
    r = np.linalg.norm(x - y)
    zr = x - reflect(y)
    rr = np.linalg.norm(zr)
    w = s * (rr + zr[-1])
    return complex(np.exp(-s * r) / (4 * np.pi * r) + np.exp(-s * rr) / (4 * np.pi * rr)
                   - s / (2 * np.pi) * np.exp(-s * rr) * tricomi_u11(w))


def _g_half_eval(x, y, params, quad, method):
    if method == "closed_form":
        if params.d != 3 or params.beta != 1.0:
            raise DomainError("closed form exists only for d = 3 and beta = 1")
        return _closed_form(x, y, params.s)
    return _components(x, y, params, quad).g_half


def residual_boundary(x_prime, y, params: KernelParams, h: float, method: str = "quadrature",
                      quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Relative impedance-condition residual at ``x = (x', 0)``.

    The outward normal derivative ``-d/dx_d`` is replaced by the second-order
    one-sided difference from ``x_d = 0, h, 2h``.
    """
    x_prime = np.asarray(x_prime, dtype=float)
    y = np.asarray(y, dtype=float)
    if x_prime.shape != (params.d - 1,):
        raise DomainError("x_prime must have d - 1 coordinates")
    if y[-1] <= 0:
        raise DomainError("source must lie in the open upper half-space")
    vals = [_g_half_eval(np.append(x_prime, k * h), y, params, quad, method) for k in range(3)]
    d_dn = -(-3 * vals[0] + 4 * vals[1] - vals[2]) / (2 * h)
    sbg = params.s * params.beta * vals[0]
    return float(abs(d_dn + sbg) / abs(sbg))


def residual_helmholtz(x, y, params: KernelParams, h: float, method: str = "quadrature",
                       quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Relative residual ``|-Lap G + s^2 G| / |s^2 G|`` from centered second differences."""
    x, y = _check_pair(x, y, params)
    if x[-1] <= h:
        raise DomainError("stencil leaves the half-space")
    g0 = _g_half_eval(x, y, params, quad, method)
    lap = 0j
    for j in range(params.d):
        e = np.zeros(params.d)
        e[j] = h
        lap += (_g_half_eval(x + e, y, params, quad, method) - 2 * g0
                + _g_half_eval(x - e, y, params, quad, method)) / h ** 2
    s2g = params.s ** 2 * g0
    return float(abs(-lap + s2g) / abs(s2g))
