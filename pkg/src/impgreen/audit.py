"""Sampled audit of the analytic bounds behind the slow-variation theory.

Each entry of :data:`REGISTRY` draws random admissible block pairs, samples
their one-axis complex extensions and evaluates one inequality. Bounds with an
explicit constant count a violation whenever the normalized ratio
``lhs / rhs`` exceeds one. Bounds that only assert existence of a constant
report the fitted constant and count a violation when a ratio is not finite
or, for lower bounds, not positive.

Distances of extended points are measured with the Hermitian norm
``sqrt(sum |x_j - y_j|^2)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .cheb import C_E_DEFAULT, KAPPA_MAX_ILLU_REFL
from .errors import DomainError
from .geometry import BlockPair, Cuboid, ExtensionSpec, cuboid_metrics, reflect, sample_extension_arrays
from .kernel import theta_batch
from .specfun import bessel_k_diff_scaled, bessel_k_scaled, majorant
from .transform import KernelParams, transform_parts

#: Relative slack for bounds with explicit constants.
RTOL = 1e-12
#: Allowed growth of a fitted envelope constant across length scales.
STABILITY_FACTOR = 10.0
#: Samples per bound used by the command line unless overridden.
DEFAULT_SAMPLES = 10_000


@dataclass(frozen=True)
class BoundResult:
    """Outcome of one audited inequality.

    ``fitted_constant`` is the smallest constant consistent with the samples
    (the largest ratio, or the smallest for lower bounds with an unknown
    constant). ``worst_ratio`` is the largest normalized ratio; for explicit
    bounds it must stay at or below one.
    """

    name: str
    statement: str
    samples: int
    fitted_constant: float
    worst_ratio: float
    violations: int
    passed: bool

    def as_row(self) -> dict:
        return asdict(self)


# -- sampling -------------------------------------------------------------------

def random_block_pair(rng: np.random.Generator, d: int, eta: float, scale: float = 1.0,
                      stretch: float = 3.0) -> BlockPair:
    """Random ``eta``-admissible pair of boxes in the upper half-space.

    The second box is moved away from the first along a random direction with
    non-negative last component until the gap is between one and ``stretch``
    times the admissibility threshold.
    """
    widths = rng.uniform(0.2, 1.5, size=(2, d)) * scale
    base = rng.uniform(0.0, 2.0, size=d) * scale
    base[-1] += widths.max() + 0.05 * scale
    B = Cuboid(base, base + widths[0])
    v = rng.normal(size=d)
    v[-1] = abs(v[-1])
    v /= np.linalg.norm(v)
    c0 = base + 0.5 * widths[0] - 0.5 * widths[1]
    target = max(widths[0].max(), widths[1].max()) * np.sqrt(d) / eta * rng.uniform(1.0, stretch)

    def gap(t):
        lo = c0 + t * v
        return cuboid_metrics(B, Cuboid(lo, lo + widths[1]))[2]

    lo_t, hi_t = 0.0, scale
    while gap(hi_t) < target:
        hi_t *= 2
    for _ in range(60):
        mid = 0.5 * (lo_t + hi_t)
        lo_t, hi_t = (mid, hi_t) if gap(mid) < target else (lo_t, mid)
    lo = c0 + hi_t * v
    pair = BlockPair(B, Cuboid(lo, lo + widths[1]), eta)
    if not pair.admissible:  # pragma: no cover - construction guarantees this
        raise DomainError("failed to build an admissible pair")
    return pair


def _extension_batches(rng, n_samples: int, kappa_of: Callable[[float], float], mixed: bool = False,
                       dims=(2, 3, 4), per_pair: int = 40):
    """Yield ``(pair, kappa, beta, X, Y)`` until ``n_samples`` point pairs were produced.

    With ``mixed`` the second box is mirrored into the lower half-space.
    """
    produced = 0
    while produced < n_samples:
        d = int(rng.choice(dims))
        eta = float(rng.uniform(0.25, 2.0))
        beta = float(np.exp(rng.uniform(np.log(0.05), np.log(20.0))))
        scale = float(10 ** rng.uniform(-1, 1))
        pair = random_block_pair(rng, d, eta, scale)
        if mixed:
            pair = BlockPair(pair.x_block, pair.y_block.reflected(), eta)
        kappa = float(rng.uniform(0.0, 1.0)) * kappa_of(beta)
        spec = ExtensionSpec.for_pair(pair, kappa)
        n_b = per_pair // (4 * d) + 1
        X, Y, *_ = sample_extension_arrays(pair, spec, n_b, n_b, seed=int(rng.integers(2**32)))
        produced += len(X)
        yield pair, kappa, beta, X, Y


def _hermitian(z):
    return np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))


def _sqrt_bilinear(z):
    return np.sqrt(np.sum(z * z, axis=-1))


# -- evaluation helpers ---------------------------------------------------------

def _explicit(name, statement, ratios) -> BoundResult:
    """Upper-type ratios that must not exceed one."""
    ratios = np.concatenate(ratios)
    bad = ~np.isfinite(ratios) | (ratios > 1 + RTOL)
    worst = float(np.max(ratios))
    return BoundResult(name, statement, ratios.size, worst, worst, int(bad.sum()), not bad.any())


def _existence_upper(name, statement, ratios) -> BoundResult:
    ratios = np.concatenate(ratios)
    bad = ~np.isfinite(ratios)
    c = float(np.max(ratios[~bad])) if (~bad).any() else float("inf")
    return BoundResult(name, statement, ratios.size, c, c, int(bad.sum()), not bad.any())


def _existence_lower(name, statement, ratios) -> BoundResult:
    ratios = np.concatenate(ratios)
    bad = ~np.isfinite(ratios) | (ratios <= 0)
    c = float(np.min(ratios)) if ratios.size else 0.0
    worst = 1.0 / c if c > 0 else float("inf")
    return BoundResult(name, statement, ratios.size, c, worst, int(bad.sum()), not bad.any())


# -- distance bounds ------------------------------------------------------------

def _distance_samples(rng, n, kappa_max, mixed=False):
    for pair, kappa, beta, X, Y in _extension_batches(rng, n, lambda b: kappa_max, mixed):
        z = X - Y
        yield pair, kappa, beta, z, _sqrt_bilinear(z), _hermitian(z)


def check_distance_modulus(n: int, rng) -> BoundResult:
    ratios = [np.abs(r) / nz for *_, r, nz in _distance_samples(rng, n, 0.25)]
    return _explicit("ext_distance_modulus", "|r(x,y)| <= ||x-y||, kappa < 1/4", ratios)


def check_distance_real_part(n: int, rng) -> BoundResult:
    ratios = [(1 - 12 * k**2) * nz / r.real for _, k, _, _, r, nz in _distance_samples(rng, n, 0.25)]
    return _explicit("ext_distance_real_part", "Re r(x,y) >= (1 - 12 kappa^2) ||x-y||, kappa < 1/4", ratios)


def check_distance_imag_part(n: int, rng) -> BoundResult:
    ratios = []
    for _, k, _, _, r, nz in _distance_samples(rng, n, 0.25):
        # kappa = 0 leaves every point real and the bound reads 0 <= 0
        ratios.append(np.where(r.imag == 0, 0.0, np.abs(r.imag) / np.maximum(4 * k * nz, 1e-300)))
    return _explicit("ext_distance_imag_part", "|Im r(x,y)| <= 4 kappa ||x-y||, kappa < 1/4", ratios)


def check_distance_vs_gap(n: int, rng) -> BoundResult:
    ratios = []
    for pair, k, _, _, r, _ in _distance_samples(rng, n, KAPPA_MAX_ILLU_REFL):
        delta = pair.delta
        ratios.append(np.maximum(np.abs(r) / ((1 + k + 2 * pair.eta) * delta), (1 - 4 * k) * delta / r.real))
    return _explicit("ext_distance_vs_gap",
                     "(1 - 4 kappa) delta <= Re r, |r| <= (1 + kappa + 2 eta) delta, kappa < 1/6", ratios)


def check_shifted_distance(n: int, rng) -> BoundResult:
    ratios = []
    gen = _extension_batches(rng, n, lambda b: min(KAPPA_MAX_ILLU_REFL, 1 / (3 * b)), mixed=True)
    for _, k, beta, X, Y in gen:
        z = X - Y
        r = _sqrt_bilinear(z)
        rp = r + beta * z[:, -1]
        ratios.append(np.maximum(np.abs(rp) / ((1 + 4 * beta) * np.abs(r)), (1 - 3 * beta * k) * r.real / rp.real))
    return _explicit("ext_shifted_distance",
                     "|r_+| <= (1 + 4 beta)|r|, Re r_+ >= (1 - 3 beta kappa) Re r, x above and y below the plane",
                     ratios)


# -- Bessel majorants ---------------------------------------------------------

def _bessel_samples(rng, n):
    orders = np.arange(0, 7) / 2
    per = -(-n // orders.size)
    for mu in orders:
        rad = 10 ** rng.uniform(-4, 4, per)
        ang = rng.uniform(-1, 1, per) * np.pi * (1 - 1e-9)
        yield mu, rad, rad * np.exp(1j * ang)


def check_bessel_majorant(n: int, rng) -> BoundResult:
    ratios = [np.abs(bessel_k_scaled(mu, z)) / majorant("M", mu, rad) for mu, rad, z in _bessel_samples(rng, n)]
    return _existence_upper("bessel_scaled_majorant", "|exp(z) K_mu(z)| <= C_mu M_mu(|z|)", ratios)


def check_bessel_diff_majorant(n: int, rng) -> BoundResult:
    ratios = [np.abs(bessel_k_diff_scaled(mu, z)) * rad / majorant("N", mu, rad)
              for mu, rad, z in _bessel_samples(rng, n)]
    return _existence_upper("bessel_diff_majorant", "|exp(z)(K_mu - K_mu+1)(z)| <= C_mu N_mu(|z|)/|z|", ratios)


# -- transformed radius -------------------------------------------------------

def _mu_tilde_samples(rng, n, c_e=C_E_DEFAULT):
    gen = _extension_batches(rng, n, lambda b: b**2 / (c_e * (1 + b) ** 3))
    for _, _, beta, X, Y in gen:
        z = X - reflect(Y)
        omega2 = np.sum(z[:, :-1] ** 2, axis=-1)
        zd = z[:, -1]
        r = np.sqrt(omega2 + zd * zd)
        u = np.concatenate([[0.0], 10 ** rng.uniform(-6, 5, len(z) - 1)])
        _, _, _, mu, t, dmu = transform_parts(omega2, zd, r, u, beta)
        yield beta, u, _hermitian(z), mu, t, dmu


def check_mu_tilde_modulus(n: int, rng) -> BoundResult:
    ratios = [np.abs(mu) / ((1 + b) / b * (u + (1 + b) * nz)) for b, u, nz, mu, _, _ in _mu_tilde_samples(rng, n)]
    return _existence_upper("mu_tilde_modulus", "|mu~(z,y)| <= C0 (1+beta)/beta (y + (1+beta)||z||)", ratios)


def check_mu_tilde_real_part(n: int, rng) -> BoundResult:
    # a non-positive real part cannot satisfy the bound with any constant
    ratios = [np.where(mu.real > 0, b**2 / (1 + b) ** 4 * (u + nz) / np.abs(mu.real), np.inf)
              for b, u, nz, mu, _, _ in _mu_tilde_samples(rng, n)]
    return _existence_upper("mu_tilde_real_part", "Re mu~(z,y) >= C0^-1 beta^2/(1+beta)^4 (y + ||z||)", ratios)


def check_height_sum(n: int, rng) -> BoundResult:
    ratios = [(t + b * mu).real / (u + b * nz) for b, u, nz, mu, t, _ in _mu_tilde_samples(rng, n)]
    return _existence_lower("height_sum_real_part", "Re(t + beta mu~) >= c2 (y + beta ||z||)", ratios)


def check_mu_tilde_slope(n: int, rng) -> BoundResult:
    ratios = [np.abs(dmu) / ((1 + b) / b) ** 2 for b, _, _, _, _, dmu in _mu_tilde_samples(rng, n)]
    return _existence_upper("mu_tilde_slope", "|d mu~/dy| <= C0 ((1+beta)/beta)^2", ratios)


# -- envelope bounds of the phase-free factors --------------------------------

_ENVELOPE = {"illu": "M", "refl": "M", "imp": "W"}


def _envelope_check(component: str, n: int, rng, backend=None) -> BoundResult:
    """Fitted envelope constants, per dimension and impedance, across three decades of block size.

    The constant for a group is the largest ratio over frequencies and
    block sizes; the check also fails when any group constant grows by more
    than :data:`STABILITY_FACTOR` from the smallest to a larger block scale.
    """
    kind = _ENVELOPE[component]
    scales = (0.1, 1.0, 10.0, 100.0)
    ratios, growth = [], []
    n_groups = 0
    per_scale = 32
    while sum(r.size for r in ratios) < n:
        d = int(rng.choice((2, 3, 4)))
        beta = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
        eta = float(rng.uniform(0.5, 2.0))
        s = 10 ** rng.uniform(-1, 1) * np.exp(1j * rng.uniform(-1.4, 1.4))
        params = KernelParams(s, beta, d)
        bound = KAPPA_MAX_ILLU_REFL if component != "imp" else beta**2 / (C_E_DEFAULT * (1 + beta) ** 3)
        kappa = 0.9 * bound
        unit = random_block_pair(rng, d, eta)
        per_group = []
        for sc in scales:
            pair = BlockPair(Cuboid(unit.x_block.lo * sc, unit.x_block.hi * sc),
                             Cuboid(unit.y_block.lo * sc, unit.y_block.hi * sc), eta)
            n_b = per_scale // (4 * d) + 1
            X, Y, *_ = sample_extension_arrays(pair, ExtensionSpec.for_pair(pair, kappa), n_b, n_b,
                                               seed=int(rng.integers(2**32)))
            vals = np.abs(getattr(theta_batch(X, Y, params, (component,), backend), component))
            mu = params.two_mu / 2
            env = (abs(s) / pair.delta) ** mu * majorant(kind, mu, abs(s) * pair.delta)
            rat = vals / env
            ratios.append(rat)
            per_group.append(np.max(rat))
        per_group = np.asarray(per_group)
        growth.append(np.max(per_group) / per_group[0])
        n_groups += 1
    out = _existence_upper(f"theta_{component}_envelope",
                           f"|Theta_{component}| <= C (|s|/delta)^(nu+1/2) {kind}_(nu+1/2)(|s| delta)", ratios)
    unstable = int(np.sum(~(np.asarray(growth) <= STABILITY_FACTOR)))
    if unstable:
        return BoundResult(out.name, out.statement, out.samples, out.fitted_constant, out.worst_ratio,
                           out.violations + unstable, False)
    return out


def check_theta_direct(n: int, rng) -> BoundResult:
    return _envelope_check("illu", n, rng)


def check_theta_reflected(n: int, rng) -> BoundResult:
    return _envelope_check("refl", n, rng)


def check_theta_impedance(n: int, rng) -> BoundResult:
    return _envelope_check("imp", n, rng)


#: Ordered registry of audited inequalities.
REGISTRY: dict[str, Callable[[int, np.random.Generator], BoundResult]] = {
    "ext_distance_modulus": check_distance_modulus,
    "ext_distance_real_part": check_distance_real_part,
    "ext_distance_imag_part": check_distance_imag_part,
    "ext_distance_vs_gap": check_distance_vs_gap,
    "ext_shifted_distance": check_shifted_distance,
    "bessel_scaled_majorant": check_bessel_majorant,
    "bessel_diff_majorant": check_bessel_diff_majorant,
    "mu_tilde_modulus": check_mu_tilde_modulus,
    "mu_tilde_real_part": check_mu_tilde_real_part,
    "height_sum_real_part": check_height_sum,
    "mu_tilde_slope": check_mu_tilde_slope,
    "theta_illu_envelope": check_theta_direct,
    "theta_refl_envelope": check_theta_reflected,
    "theta_imp_envelope": check_theta_impedance,
}


def run_audit(n_samples: int = DEFAULT_SAMPLES, seed: int = 0, names=None) -> list[BoundResult]:
    """Run the registry (or the named subset) with independent streams per entry.

    Streams are spawned from ``seed`` in registry order, so the result of one
    entry does not depend on which other entries run.
    """
    keys = list(REGISTRY)
    if names is not None:
        unknown = set(names) - set(keys)
        if unknown:
            raise DomainError(f"unknown bound(s): {sorted(unknown)}")
    streams = np.random.SeedSequence(seed).spawn(len(keys))
    out = []
    for key, ss in zip(keys, streams):
        if names is None or key in names:
            out.append(REGISTRY[key](n_samples, np.random.default_rng(ss)))
    return out
