"""Tensor Chebyshev interpolation on cuboid blocks, convergence studies and a blocked matvec."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetError, DomainError, RegimeError
from .geometry import BlockPair, Cuboid, cuboid_metrics, is_admissible, reflect
from .kernel import g_half_batch, theta_from_differences
from .transform import KernelParams

#: Default constant in the impedance kappa range ``beta^2 / (C_E (1+beta)^3)``.
C_E_DEFAULT = 16.0
#: Illuminating and reflected families are certified for ``kappa < 1/6``.
KAPPA_MAX_ILLU_REFL = 1.0 / 6.0


def cheb_nodes(m: int, interval=(-1.0, 1.0)) -> np.ndarray:
    """First-kind Chebyshev points ``cos((2i+1) pi / (2m+2))`` mapped to ``interval``."""
    if m < 0:
        raise DomainError("degree must be non-negative")
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise DomainError("interval must satisfy a < b")
    xi = np.cos((2 * np.arange(m + 1) + 1) * np.pi / (2 * m + 2))
    return a + 0.5 * (b - a) * (xi + 1)


def cheb_weights(m: int) -> np.ndarray:
    """Barycentric weights for first-kind points (common factors dropped)."""
    i = np.arange(m + 1)
    return (-1.0) ** i * np.sin((2 * i + 1) * np.pi / (2 * m + 2))


def lagrange_basis(nodes: np.ndarray, weights: np.ndarray, x) -> np.ndarray:
    """Values of all Lagrange basis polynomials at ``x``; shape ``(len(x), len(nodes))``."""
    x = np.asarray(x).reshape(-1)
    diff = x[:, None] - nodes[None, :]
    hit = diff == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        c = weights / diff
        out = c / c.sum(axis=1, keepdims=True)
    rows = hit.any(axis=1)
    if rows.any():
        out[rows] = hit[rows].astype(out.dtype)
    return out


def tensor_basis(axis_nodes, weights, pts) -> np.ndarray:
    """Kronecker product of per-axis bases, C-ordered like ``meshgrid(..., indexing='ij')``."""
    pts = np.atleast_2d(pts)
    B = np.ones((pts.shape[0], 1), dtype=pts.dtype if np.iscomplexobj(pts) else float)
    for j, nodes in enumerate(axis_nodes):
        Bj = lagrange_basis(nodes, weights, pts[:, j])
        B = (B[:, :, None] * Bj[:, None, :]).reshape(pts.shape[0], -1)
    return B


def tensor_contract(values: np.ndarray, axis_nodes, weights, pts) -> np.ndarray:
    """Evaluate a tensor interpolant with C-ordered node ``values`` at ``pts``.

    Contracts one axis at a time (last axis first), so memory stays at
    ``N * (m+1)^(d-1)`` instead of the full Kronecker basis.
    """
    pts = np.atleast_2d(pts)
    n = pts.shape[0]
    k = len(axis_nodes[0])
    d = len(axis_nodes)
    acc = None
    for j in range(d - 1, -1, -1):
        L = lagrange_basis(axis_nodes[j], weights, pts[:, j])
        if acc is None:
            acc = values.reshape(k ** (d - 1), k) @ L.T          # (k^(d-1), n)
            acc = acc.T.reshape(n, k ** (d - 1))
        else:
            acc = np.einsum("nik,nk->ni", acc.reshape(n, -1, k), L)
    return acc.reshape(n)


def tensor_grid(axis_nodes) -> np.ndarray:
    mesh = np.meshgrid(*axis_nodes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def _box_nodes(box: Cuboid, m: int):
    return tuple(cheb_nodes(m, (a, b)) for a, b in zip(box.lower, box.upper))


@dataclass(frozen=True, eq=False)
class ChebyshevInterpolant:
    """Tensor interpolant of a kernel on a block pair.

    ``values[i, j]`` is the target at the i-th x node and j-th y node, both
    enumerated in C order over the per-axis node lists.
    """

    pair: BlockPair
    degree: int
    nodes_x: tuple
    nodes_y: tuple
    weights: np.ndarray
    values: np.ndarray


def build_interpolant(target: Callable, pair: BlockPair, m: int, chunk: int = 1 << 18) -> ChebyshevInterpolant:
    """Sample ``target(X, Y)`` on all node pairs of the block.

    ``target`` is called with stacks of points of shape ``(N, d)`` and must
    return ``N`` values.
    """
    nx, ny = _box_nodes(pair.x_block, m), _box_nodes(pair.y_block, m)
    Gx, Gy = tensor_grid(nx), tensor_grid(ny)
    vals = np.empty((len(Gx), len(Gy)), dtype=complex)
    rows = max(1, chunk // len(Gy))
    for i in range(0, len(Gx), rows):
        X = np.repeat(Gx[i:i + rows], len(Gy), axis=0)
        Y = np.tile(Gy, (len(Gx[i:i + rows]), 1))
        vals[i:i + rows] = np.asarray(target(X, Y)).reshape(-1, len(Gy))
    return ChebyshevInterpolant(pair, m, nx, ny, cheb_weights(m), vals)


def eval_interpolant(I: ChebyshevInterpolant, x, y, return_flags: bool = False):
    """Evaluate at one point pair or stacks of pairs.

    With ``return_flags`` a boolean array marks pairs with a real part
    outside the block, i.e. extrapolated values.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    single = x.ndim == 1
    x, y = np.atleast_2d(x), np.atleast_2d(y)
    Bx = tensor_basis(I.nodes_x, I.weights, x)
    By = tensor_basis(I.nodes_y, I.weights, y)
    vals = np.einsum("ni,ni->n", Bx @ I.values, By)
    if single:
        vals = complex(vals[0])
    if not return_flags:
        return vals
    outside = ~(I.pair.x_block.contains(x, 1e-12) & I.pair.y_block.contains(y, 1e-12))
    return vals, (bool(outside[0]) if single else outside)


# -- convergence studies -----------------------------------------------------

def reference_function(nu: float, zeta: float, log_power: int = 1) -> float:
    """Reference growth ``lambda(|s| delta)``; ``log_power`` is 2 for the impedance family."""
    z = abs(zeta)
    if z >= 1:
        return z ** (-nu - 1)
    if nu >= 0:
        return z ** (-2 * nu - 1)
    return 1 + abs(math.log(z)) ** log_power


def theory_constant(d: int, gamma: float) -> float:
    """Interpolation constant ``sqrt(d) 2^(d+3/2) (1 - gamma^-2)^-d``."""
    if gamma <= 1:
        return math.inf
    return math.sqrt(d) * 2 ** (d + 1.5) * (1 - gamma ** -2) ** (-d)


def kappa_bound(component: str, beta: float, c_e: float = C_E_DEFAULT) -> float:
    """Supremum of the certified kappa range for a family."""
    if component in ("illu", "refl", "half"):
        return KAPPA_MAX_ILLU_REFL
    if component == "imp":
        return beta ** 2 / (c_e * (1 + beta) ** 3)
    raise DomainError(f"unknown component {component!r}")


def default_kappa(component: str, beta: float, c_e: float = C_E_DEFAULT) -> float:
    return 0.5 * kappa_bound(component, beta, c_e)


@dataclass
class RateReport:
    component: str
    degrees: list
    errors: list
    fitted_rate: float
    predicted_gamma: float
    envelope_constant: float
    reference_value: float
    theory_constant: float
    kappa: float
    margin: float
    fit_degrees: list = field(default_factory=list)
    scale: float = 1.0

    @property
    def passed(self) -> bool:
        return bool(self.fitted_rate >= self.predicted_gamma ** (1 - self.margin))

    def tail_non_increasing(self, slack: float = 2.0) -> bool:
        """Errors on the tail half never grow by more than ``slack`` or above the noise floor."""
        errs = self.errors[len(self.errors) // 2:]
        floor = NOISE_FLOOR * self.scale
        return all(b <= max(slack * a, floor) for a, b in zip(errs, errs[1:]))


#: Errors below this fraction of the sampled sup norm count as round-off and are left out of rate fits.
NOISE_FLOOR = 1e-11

_FAMILIES = ("illu", "refl", "imp", "half")


def _family_values(tb, component: str, s: complex):
    if component == "illu":
        return tb.illu
    if component == "refl":
        return tb.refl
    if component == "imp":
        return tb.imp
    return tb.g_half(s)


def _fit_rate(degrees, errors, scale):
    degrees = np.asarray(degrees, dtype=float)
    errors = np.asarray(errors, dtype=float)
    start = len(degrees) // 3
    keep = np.arange(len(degrees)) >= start
    keep &= errors > NOISE_FLOOR * scale
    if keep.sum() < 3:
        keep = errors > NOISE_FLOOR * scale
    if keep.sum() < 2:
        return math.inf, degrees[errors > 0].tolist()
    slope = np.polyfit(degrees[keep], np.log(errors[keep]), 1)[0]
    return float(math.exp(-slope)), degrees[keep].astype(int).tolist()


def convergence_studies(components: Sequence[str], pair: BlockPair, params: KernelParams,
                        kappa: float | dict, degrees: Sequence[int], n_samples: int = 2000,
                        seed: int = 0, c_e: float = C_E_DEFAULT, margin: float = 0.1,
                        backend: str | None = None) -> dict:
    """Run :func:`convergence_study` for several families sharing kernel evaluations.

    ``kappa`` may be one value or a mapping from family name to value.
    """
    for c in components:
        if c not in _FAMILIES:
            raise DomainError(f"unknown component {c!r}")
    kap = {c: (kappa[c] if isinstance(kappa, dict) else float(kappa)) for c in components}
    for c, k in kap.items():
        lim = kappa_bound(c, params.beta, c_e)
        lo_ok = k > 0 if c != "imp" else k >= 0
        if not (lo_ok and k < lim):
            raise RegimeError(f"kappa={k} outside the certified range for {c} (< {lim:.6g})")
    if not pair.admissible:
        raise DomainError("block pair is not admissible")
    if pair.x_block.lower[-1] <= 0 or pair.y_block.lower[-1] <= 0:
        raise DomainError("blocks must lie in the open upper half-space")
    needed = set(components)
    if "half" in needed:
        needed |= {"illu", "refl", "imp"}
    rng = np.random.default_rng(seed)
    Xs = pair.x_block.sample(n_samples, rng)
    Ys = pair.y_block.sample(n_samples, rng)

    def evaluate(X, Y):
        return theta_from_differences(X - Y, X - reflect(Y), params, tuple(needed), backend)

    exact_tb = evaluate(Xs, Ys)
    exact = {c: _family_values(exact_tb, c, params.s) for c in components}
    errs = {c: [] for c in components}
    for m in degrees:
        nx, ny = _box_nodes(pair.x_block, m), _box_nodes(pair.y_block, m)
        Gx, Gy = tensor_grid(nx), tensor_grid(ny)
        node_vals = {c: np.empty((len(Gx), len(Gy)), dtype=complex) for c in components}
        rows = max(1, (1 << 18) // len(Gy))
        for i in range(0, len(Gx), rows):
            X = np.repeat(Gx[i:i + rows], len(Gy), axis=0)
            Y = np.tile(Gy, (len(Gx[i:i + rows]), 1))
            tb = evaluate(X, Y)
            for c in components:
                node_vals[c][i:i + rows] = _family_values(tb, c, params.s).reshape(-1, len(Gy))
        w = cheb_weights(m)
        Bx = tensor_basis(nx, w, Xs)
        By = tensor_basis(ny, w, Ys)
        for c in components:
            approx = np.einsum("ni,ni->n", Bx @ node_vals[c], By)
            errs[c].append(float(np.max(np.abs(approx - exact[c]))))
    reports = {}
    d = params.d
    sd = abs(params.s) * pair.delta
    for c in components:
        gamma = 1 + 2 * kap[c] / pair.eta
        lam = reference_function(params.nu, sd, 2 if c == "imp" else 1)
        c_gamma = theory_constant(d, gamma)
        scale = float(np.max(np.abs(exact[c])))
        rate, fit_deg = _fit_rate(degrees, errs[c], scale)
        base = abs(params.s) ** (2 * params.nu + 1) * lam * c_gamma
        env = max(e * gamma ** m / base for e, m in zip(errs[c], degrees)) if math.isfinite(c_gamma) else math.nan
        reports[c] = RateReport(
            component=c, degrees=list(degrees), errors=errs[c], fitted_rate=rate,
            predicted_gamma=gamma, envelope_constant=env, reference_value=lam,
            theory_constant=c_gamma, kappa=kap[c], margin=margin, fit_degrees=fit_deg, scale=scale,
        )
    return reports


def convergence_study(component: str, pair: BlockPair, params: KernelParams, kappa: float,
                      degrees: Sequence[int], **kwargs) -> RateReport:
    """Chebyshev convergence rate of one phase-free family on an admissible block.

    Parameters
    ----------
    component : {"illu", "refl", "imp", "half"}
        ``"half"`` interpolates the full kernel including its oscillation.
    kappa : float
        Extension parameter; sets the predicted rate ``1 + 2 kappa / eta``.
    degrees : sequence of int

    Returns
    -------
    RateReport
    """
    return convergence_studies((component,), pair, params, kappa, degrees, **kwargs)[component]


# -- blocked matvec ----------------------------------------------------------

@dataclass
class BlockRecord:
    target_cell: tuple
    source_cell: tuple
    path: str
    n_entries: int
    max_rel_error: float


@dataclass
class MatvecReport:
    blocks: list
    time_factor: float
    time_direct: float
    direct_entries_timed: int
    factor_entries: int

    @property
    def speedup(self) -> float:
        return self.time_direct / self.time_factor if self.time_factor > 0 else math.inf

    @property
    def max_block_error(self) -> float:
        errs = [b.max_rel_error for b in self.blocks if b.path != "exact"]
        return max(errs, default=0.0)


def _partition(points: np.ndarray, cells: int):
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    pad = 1e-9 * max(1.0, float(np.max(hi - lo)))
    lo, hi = lo - pad, hi + pad
    width = (hi - lo) / cells
    idx = np.minimum(((points - lo) / width).astype(int), cells - 1)
    groups = {}
    for k, key in enumerate(map(tuple, idx)):
        groups.setdefault(key, []).append(k)
    boxes = {key: Cuboid(tuple(lo + width * np.array(key)), tuple(lo + width * (np.array(key) + 1)))
             for key in groups}
    return {key: np.array(v) for key, v in groups.items()}, boxes


def _difference_box(T: Cuboid, S: Cuboid, reflected: bool) -> Cuboid:
    lo = T.lo - S.hi
    hi = T.hi - S.lo
    if reflected:
        lo[-1] = T.lower[-1] + S.lower[-1]
        hi[-1] = T.upper[-1] + S.upper[-1]
    return Cuboid(tuple(lo), tuple(hi))


def _interp_difference(box: Cuboid, m: int, fn: Callable, Z: np.ndarray) -> np.ndarray:
    nodes = _box_nodes(box, m)
    vals = fn(tensor_grid(nodes))
    return tensor_contract(vals, nodes, cheb_weights(m), Z)


def default_cells(n_points: int, m: int, d: int) -> int:
    """Cells per axis so that a cell holds about ``4 (m+1)^d`` points."""
    return max(1, int((n_points / (4 * (m + 1) ** d)) ** (1 / d)))


def assemble_matvec(sources, targets, params: KernelParams, eta: float, m: int, vec,
                    cells_per_axis: int | None = None, tol: float = 1e-6, n_check: int = 16,
                    seed: int = 0, backend: str | None = None):
    """Matrix-vector product with the half-space kernel using one level of blocks.

    Admissible cell pairs use tensor Chebyshev interpolation in the difference
    variables ``x - y`` and ``x - Ry`` on the Minkowski-difference boxes. When
    ``|s| delta <= 1`` the kernel parts are interpolated directly; otherwise
    the phase-free factors are interpolated and multiplied by
    ``exp(-s tau)``. Inadmissible pairs are evaluated exactly.

    Returns
    -------
    result : ndarray
        ``sum_j G(targets[i], sources[j]) vec[j]``.
    report : MatvecReport
    """
    sources = np.asarray(sources, dtype=float)
    targets = np.asarray(targets, dtype=float)
    vec = np.asarray(vec, dtype=complex)
    if sources.ndim != 2 or targets.ndim != 2 or sources.shape[1] != params.d or targets.shape[1] != params.d:
        raise DomainError(f"points must be stacks of {params.d}-vectors")
    if vec.shape != (len(sources),):
        raise DomainError("vector length must equal the number of sources")
    if np.any(sources[:, -1] <= 0) or np.any(targets[:, -1] <= 0):
        raise DomainError("points must lie in the open upper half-space")
    if eta < 0:
        raise DomainError("eta must be non-negative")
    d = params.d
    s = params.s
    cells = cells_per_axis or default_cells(max(len(sources), len(targets)), m, d)
    tgroups, tboxes = _partition(targets, cells)
    sgroups, sboxes = _partition(sources, cells)
    rng = np.random.default_rng(seed)
    # load compiled kernels before anything is timed
    theta_from_differences(None, targets[:1] - reflect(sources[:1]), params, ("refl", "imp"), backend)
    result = np.zeros(len(targets), dtype=complex)
    blocks = []
    t_factor = t_direct = 0.0
    n_direct = n_factor = 0
    for tk in sorted(tgroups):
        ti = tgroups[tk]
        for sk in sorted(sgroups):
            sj = sgroups[sk]
            T, S = tboxes[tk], sboxes[sk]
            X = np.repeat(targets[ti], len(sj), axis=0)
            Y = np.tile(sources[sj], (len(ti), 1))
            if eta == 0 or not is_admissible(T, S, eta):
                K = g_half_batch(X, Y, params, backend).reshape(len(ti), len(sj))
                result[ti] += K @ vec[sj]
                blocks.append(BlockRecord(tk, sk, "exact", K.size, 0.0))
                continue
            z1 = X - Y
            z2 = X - reflect(Y)
            tau1 = np.linalg.norm(z1, axis=1)
            tau2 = np.linalg.norm(z2, axis=1)
            delta = cuboid_metrics(T, S)[2]
            slow = abs(s) * delta <= 1
            D1 = _difference_box(T, S, False)
            D2 = _difference_box(T, S, True)

            def f_illu(Z):
                th = theta_from_differences(Z, None, params, ("illu",), backend)
                return th.illu * np.exp(-s * th.tau_illu) if slow else th.illu

            def f_refl(Z):
                th = theta_from_differences(None, Z, params, ("refl", "imp"), backend)
                v = th.refl + th.imp
                return v * np.exp(-s * th.tau_refl) if slow else v

            a1 = _interp_difference(D1, m, f_illu, z1)
            t0 = time.perf_counter()
            a2 = _interp_difference(D2, m, f_refl, z2)
            t_factor += time.perf_counter() - t0
            n_factor += len(z2)
            if slow:
                K = a1 + a2
            else:
                K = np.exp(-s * tau1) * a1 + np.exp(-s * tau2) * a2
            # time the per-entry impedance quadrature on a subset and scale up
            sub = rng.choice(len(z2), size=min(len(z2), 2000), replace=False)
            t0 = time.perf_counter()
            theta_from_differences(None, z2[sub], params, ("imp",), backend)
            t_direct += (time.perf_counter() - t0) * len(z2) / len(sub)
            n_direct += len(sub)
            chk = rng.choice(len(z1), size=min(len(z1), n_check), replace=False)
            exact = g_half_batch(X[chk], Y[chk], params, backend)
            err = float(np.max(np.abs(K[chk] - exact) / np.abs(exact)))
            K = K.reshape(len(ti), len(sj))
            result[ti] += K @ vec[sj]
            blocks.append(BlockRecord(tk, sk, "kernel" if slow else "factor", K.size, err))
    report = MatvecReport(blocks, t_factor, t_direct, n_direct, n_factor)
    if report.max_block_error > tol:
        raise BudgetError(f"sampled entry error {report.max_block_error:.3e} exceeds {tol:.1e}", report)
    return result, report
