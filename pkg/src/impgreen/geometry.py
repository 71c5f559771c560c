"""Cuboids, admissibility, Bernstein-ellipse extension regions and complex distances."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RegimeError

#: Default upper bound for the admissibility parameter.
ETA0 = 2.0


@dataclass(frozen=True)
class Cuboid:
    """Axes-parallel box ``[lower, upper]`` with ``lower < upper`` on every axis."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise DomainError("cuboid bounds must be non-empty and of equal length")
        if any(not a < b for a, b in zip(lo, hi)):
            raise DomainError("cuboid requires lower < upper on every axis")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def d(self) -> int:
        return len(self.lower)

    @property
    def lo(self) -> np.ndarray:
        return np.array(self.lower)

    @property
    def hi(self) -> np.ndarray:
        return np.array(self.upper)

    @property
    def diam(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        pts = np.real(np.atleast_2d(pts))
        return np.all((pts >= self.lo - tol) & (pts <= self.hi + tol), axis=1)

    def reflected(self) -> "Cuboid":
        """Mirror image under the last-coordinate reflection."""
        lo, hi = list(self.lower), list(self.upper)
        lo[-1], hi[-1] = -self.upper[-1], -self.lower[-1]
        return Cuboid(tuple(lo), tuple(hi))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * rng.random((n, self.d))


def reflect(y):
    """Flip the sign of the last coordinate; works on single points and stacks."""
    out = np.array(y, copy=True)
    out[..., -1] = -out[..., -1]
    return out


def cuboid_metrics(B: Cuboid, C: Cuboid) -> tuple[float, float, float]:
    """Diameters of both boxes and the Euclidean distance between them."""
    if B.d != C.d:
        raise DomainError("cuboids of different dimension")
    gap = np.maximum(0.0, np.maximum(B.lo - C.hi, C.lo - B.hi))
    return B.diam, C.diam, float(np.linalg.norm(gap))


def is_admissible(B: Cuboid, C: Cuboid, eta: float) -> bool:
    if eta <= 0:
        raise DomainError("eta must be positive")
    db, dc, dist = cuboid_metrics(B, C)
    return max(db, dc) <= eta * dist


@dataclass(frozen=True)
class BlockPair:
    """Pair of boxes; ``x_block`` holds the first kernel argument, ``y_block`` the second."""

    x_block: Cuboid
    y_block: Cuboid
    eta: float

    def __post_init__(self):
        if not self.eta > 0:
            raise DomainError("eta must be positive")
        if self.x_block.d != self.y_block.d:
            raise DomainError("blocks of different dimension")

    @property
    def d(self) -> int:
        return self.x_block.d

    @property
    def delta(self) -> float:
        return cuboid_metrics(self.x_block, self.y_block)[2]

    @property
    def frak_d(self) -> float:
        return max(self.x_block.diam, self.y_block.diam)

    @property
    def admissible(self) -> bool:
        return self.frak_d <= self.eta * self.delta

    def reflected(self) -> "BlockPair":
        """Same pair with the y block mirrored into the lower half-space."""
        return BlockPair(self.x_block, self.y_block.reflected(), self.eta)


@dataclass(frozen=True)
class BernsteinEllipse:
    """Ellipse with foci ``focus_low``, ``focus_high`` and half-axes sum ``rho``."""

    focus_low: float
    focus_high: float
    rho: float

    def __post_init__(self):
        if not self.focus_low < self.focus_high:
            raise DomainError("ellipse foci must satisfy low < high")
        if self.rho < self.half_width * (1 - 1e-15):
            raise DomainError("rho must be at least the half focal distance")

    @property
    def half_width(self) -> float:
        return 0.5 * (self.focus_high - self.focus_low)

    @property
    def center(self) -> float:
        return 0.5 * (self.focus_high + self.focus_low)

    @property
    def semimajor(self) -> float:
        return (self.rho ** 2 + self.half_width ** 2) / (2 * self.rho)

    @property
    def semiminor(self) -> float:
        return max(0.0, (self.rho ** 2 - self.half_width ** 2) / (2 * self.rho))

    def point(self, theta, radius=1.0):
        """Point ``center + radius*(a cos theta + i b sin theta)``."""
        return self.center + radius * (self.semimajor * np.cos(theta) + 1j * self.semiminor * np.sin(theta))

    def contains(self, z, tol: float = 1e-12) -> np.ndarray:
        z = np.asarray(z, dtype=complex) - self.center
        if self.semiminor == 0.0:
            return (np.abs(z.imag) <= tol) & (np.abs(z.real) <= self.semimajor + tol)
        return (z.real / self.semimajor) ** 2 + (z.imag / self.semiminor) ** 2 <= 1 + tol


def ellipse_from_kappa(interval, eta: float, kappa: float) -> BernsteinEllipse:
    """Ellipse around ``interval`` whose half-axes sum grows by the factor ``1 + 2 kappa/eta``."""
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise DomainError("interval must satisfy a < b")
    if eta <= 0:
        raise DomainError("eta must be positive")
    if kappa < 0:
        raise DomainError("kappa must be non-negative")
    return BernsteinEllipse(a, b, 0.5 * (b - a) * (1 + 2 * kappa / eta))


@dataclass(frozen=True)
class ExtensionSpec:
    """Per-axis half-axes sums for the x and y boxes at a given ``kappa``."""

    kappa: float
    eta: float
    rho1: tuple[float, ...]
    rho2: tuple[float, ...]

    @classmethod
    def for_pair(cls, pair: BlockPair, kappa: float) -> "ExtensionSpec":
        if kappa < 0:
            raise DomainError("kappa must be non-negative")
        g = 1 + 2 * kappa / pair.eta
        rho1 = tuple(0.5 * (b - a) * g for a, b in zip(pair.x_block.lower, pair.x_block.upper))
        rho2 = tuple(0.5 * (b - a) * g for a, b in zip(pair.y_block.lower, pair.y_block.upper))
        return cls(float(kappa), pair.eta, rho1, rho2)

    @property
    def gamma(self) -> float:
        return 1 + 2 * self.kappa / self.eta


@dataclass(frozen=True, eq=False)
class ExtendedPoint:
    """Real point with at most one coordinate replaced by a complex value."""

    base: np.ndarray
    axis: int | None = None
    complex_coord: complex = 0j
    _coords: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        object.__setattr__(self, "base", base)
        coords = base.astype(complex)
        if self.axis is not None:
            if not 0 <= self.axis < base.size:
                raise DomainError("extension axis out of range")
            coords[self.axis] = complex(self.complex_coord)
        object.__setattr__(self, "_coords", coords)

    @property
    def coords(self) -> np.ndarray:
        return self._coords.copy()

    @property
    def n_complex(self) -> int:
        return int(np.count_nonzero(self._coords.imag))


def _as_coords(p) -> np.ndarray:
    if isinstance(p, ExtendedPoint):
        return p.coords
    return np.asarray(p, dtype=complex)


def principal_sqrt(z):
    """Principal square root on the closed right half-plane without the origin."""
    arr = np.asarray(z, dtype=complex)
    if np.any(arr == 0) or np.any(arr.real < 0):
        raise DomainError("principal_sqrt requires Re z >= 0 and z != 0")
    out = np.sqrt(arr)
    return complex(out) if out.ndim == 0 else out


def bilinear_sq(z) -> np.ndarray:
    """Unconjugated sum of squares over the last axis."""
    z = np.asarray(z, dtype=complex)
    return np.sum(z * z, axis=-1)


def distance_sqrt(z2):
    """Complex distance from a squared distance, raising outside the right half-plane."""
    z2 = np.asarray(z2, dtype=complex)
    if np.any(~(z2.real > 0)):
        raise RegimeError("Re <x-y, x-y> <= 0: extension leaves the certified regime")
    return np.sqrt(z2)


def norm_extension(x, y, beta: float):
    """Holomorphic distance ``r`` and ``r_plus = r + beta*(x-y)_d``.

    ``x`` and ``y`` may be :class:`ExtendedPoint` instances, complex vectors
    or stacks of them (last axis is the coordinate axis).
    """
    z = _as_coords(x) - _as_coords(y)
    r = distance_sqrt(bilinear_sq(z))
    rp = r + beta * z[..., -1]
    if np.ndim(r) == 0:
        return complex(r), complex(rp)
    return r, rp


def hermitian_distance(x, y):
    """Euclidean length of ``x - y`` with complex coordinates taken by modulus."""
    z = _as_coords(x) - _as_coords(y)
    return np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))


def sample_extension_arrays(pair: BlockPair, spec: ExtensionSpec, n_boundary: int,
                            n_interior: int, seed: int = 0):
    """Vectorized sampler of the one-axis-at-a-time extension region.

    Returns
    -------
    X, Y : ndarray, shape (N, d), complex
        Paired points; each row has at most one non-real coordinate, on one side only.
    side : ndarray of int
        0 when the x point carries the complex coordinate, 1 for y.
    axis : ndarray of int
        Index of the extended coordinate.
    on_boundary : ndarray of bool
    """
    if spec.kappa < 0:
        raise DomainError("kappa must be non-negative")
    rng = np.random.default_rng(seed)
    d = pair.d
    chunks = []
    n_tot = n_boundary + n_interior
    for side, (block, rhos) in enumerate(((pair.x_block, spec.rho1), (pair.y_block, spec.rho2))):
        for j in range(d):
            ell = BernsteinEllipse(block.lower[j], block.upper[j], rhos[j])
            X = pair.x_block.sample(n_tot, rng).astype(complex)
            Y = pair.y_block.sample(n_tot, rng).astype(complex)
            theta_b = 2 * np.pi * (np.arange(n_boundary) + 0.5) / max(n_boundary, 1)
            theta_i = 2 * np.pi * rng.random(n_interior)
            radius = np.concatenate([np.ones(n_boundary), np.sqrt(rng.random(n_interior))])
            vals = ell.point(np.concatenate([theta_b, theta_i]), radius)
            if side == 0:
                X[:, j] = vals
            else:
                Y[:, j] = vals
            bnd = np.concatenate([np.ones(n_boundary, bool), np.zeros(n_interior, bool)])
            chunks.append((X, Y, np.full(n_tot, side), np.full(n_tot, j), bnd))
    X, Y, side, axis, bnd = (np.concatenate(c) for c in zip(*chunks))
    return X, Y, side, axis, bnd


def sample_extension_region(pair: BlockPair, spec: ExtensionSpec, n_boundary: int,
                            n_interior: int, seed: int = 0) -> list[tuple[ExtendedPoint, ExtendedPoint]]:
    """Point pairs covering all ``2d`` constituent sets of the extension region."""
    X, Y, side, axis, _ = sample_extension_arrays(pair, spec, n_boundary, n_interior, seed)
    out = []
    for x, y, sd, j in zip(X, Y, side, axis):
        if sd == 0:
            out.append((ExtendedPoint(x.real, int(j), x[j]), ExtendedPoint(y.real)))
        else:
            out.append((ExtendedPoint(x.real), ExtendedPoint(y.real, int(j), y[j])))
    return out


__all__ = [
    "Cuboid", "BlockPair", "BernsteinEllipse", "ExtendedPoint", "ExtensionSpec",
    "reflect", "cuboid_metrics", "is_admissible", "ellipse_from_kappa",
    "sample_extension_region", "sample_extension_arrays", "principal_sqrt",
    "norm_extension", "hermitian_distance", "bilinear_sq", "distance_sqrt", "ETA0",
]
