import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from impgreen.errors import DomainError, RegimeError
from impgreen.geometry import (BernsteinEllipse, BlockPair, Cuboid, ExtendedPoint, ExtensionSpec,
                               cuboid_metrics, ellipse_from_kappa, hermitian_distance, is_admissible,
                               norm_extension, principal_sqrt, reflect, sample_extension_arrays,
                               sample_extension_region)


def cube(lo, d, w=1.0):
    lo = np.broadcast_to(np.asarray(lo, float), (d,))
    return Cuboid(tuple(lo), tuple(lo + w))


class TestReflect:
    def test_values(self):
        assert np.array_equal(reflect([1, 2, 3]), [1, 2, -3])
        assert np.array_equal(reflect(reflect([0.5, -4])), [0.5, -4])
        assert np.array_equal(reflect(np.zeros(3)), np.zeros(3))

    def test_stack(self):
        Y = np.arange(6.0).reshape(2, 3)
        assert np.array_equal(reflect(Y)[:, -1], [-2, -5])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-10, 10), min_size=4, max_size=4),
           st.lists(st.floats(0.01, 10), min_size=4, max_size=4))
    def test_isometry_and_direct_shorter(self, x, y):
        x, y = np.array(x), np.array(y)
        x[-1] = abs(x[-1]) + 0.01
        assert np.linalg.norm(reflect(x) - reflect(y)) == pytest.approx(np.linalg.norm(x - y))
        assert np.linalg.norm(x - y) <= np.linalg.norm(x - reflect(y)) + 1e-12


class TestCuboids:
    def test_metrics(self):
        assert cuboid_metrics(cube(0, 3), cube(3, 3)) == pytest.approx((math.sqrt(3),) * 2 + (2 * math.sqrt(3),))
        assert cuboid_metrics(Cuboid((0,), (1,)), Cuboid((1,), (2,))) == pytest.approx((1, 1, 0))
        assert cuboid_metrics(cube(0, 2), Cuboid((2, 0), (3, 1))) == pytest.approx((math.sqrt(2),) * 2 + (1,))

    def test_admissibility(self):
        assert is_admissible(cube(0, 3), cube(3, 3), 1.0)
        assert not is_admissible(cube(0, 3), cube(3, 3), 0.4)
        assert not is_admissible(Cuboid((0,), (1,)), Cuboid((1,), (2,)), 100.0)
        with pytest.raises(DomainError):
            is_admissible(cube(0, 3), cube(3, 3), 0.0)

    def test_invalid(self):
        with pytest.raises(DomainError):
            Cuboid((0, 1), (1, 1))

    def test_block_pair(self):
        p = BlockPair(cube(0, 3), cube(3, 3), 1.0)
        assert p.delta == pytest.approx(2 * math.sqrt(3))
        assert p.frak_d == pytest.approx(math.sqrt(3))
        assert p.admissible

    def test_admissibility_kept_under_reflection(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            lo1, lo2 = rng.uniform(0.1, 4, (2, 3))
            B, C = Cuboid(tuple(lo1), tuple(lo1 + 1)), Cuboid(tuple(lo2), tuple(lo2 + 1))
            if is_admissible(B, C, 1.0):
                assert is_admissible(B, C.reflected(), 1.0)


class TestEllipse:
    def test_collapsed(self):
        e = ellipse_from_kappa((-1, 1), 1.0, 0.0)
        assert (e.rho, e.semimajor, e.semiminor) == pytest.approx((1, 1, 0))

    def test_semi_axes(self):
        e = BernsteinEllipse(-1, 1, 2.0)
        assert (e.semimajor, e.semiminor) == pytest.approx((1.25, 0.75))
        assert e.semimajor + e.semiminor == pytest.approx(e.rho)
        assert ellipse_from_kappa((0, 2), 1.0, 0.1).rho == pytest.approx(1.2)

    def test_kappa_half_eta(self):
        assert ellipse_from_kappa((-1, 1), 2.0, 1.0).rho == pytest.approx(2.0)

    def test_boundary_points_contained(self):
        e = BernsteinEllipse(0.0, 3.0, 2.5)
        theta = np.linspace(0, 2 * np.pi, 50)
        assert np.all(e.contains(e.point(theta)))
        assert not np.any(e.contains(e.point(theta, 1.01)))


class TestSqrtAndDistance:
    def test_principal_sqrt(self):
        assert principal_sqrt(4) == 2
        assert principal_sqrt(1j) == pytest.approx((1 + 1j) / math.sqrt(2))
        assert principal_sqrt(3 + 4j) ** 2 == pytest.approx(3 + 4j)
        for bad in (0, -1, -1 + 1j):
            with pytest.raises(DomainError):
                principal_sqrt(bad)

    def test_norm_extension_real(self):
        r, rp = norm_extension([0, 0, 2], [0, 0, 1], 2.0)
        assert (r, rp) == pytest.approx((1, 3))

    def test_norm_extension_complex(self):
        x = ExtendedPoint(np.array([0.0, 0.0, 1.0]), 2, 1 + 0.1j)
        r, _ = norm_extension(x, np.zeros(3), 1.0)
        assert r == pytest.approx(1 + 0.1j)

    def test_outside_regime(self):
        x = ExtendedPoint(np.array([0.0, 1.0]), 1, 1j)
        with pytest.raises(RegimeError):
            norm_extension(x, np.zeros(2), 1.0)

    def test_at_most_one_complex(self):
        p = ExtendedPoint(np.array([1.0, 2.0, 3.0]), 0, 1 + 2j)
        assert p.n_complex == 1
        assert ExtendedPoint(np.array([1.0, 2.0])).n_complex == 0


class TestExtensionSampling:
    pair = BlockPair(Cuboid((0, 1), (1, 2)), Cuboid((3, 1), (4, 2)), 1.0)

    def test_kappa_zero_is_real(self):
        X, Y, *_ = sample_extension_arrays(self.pair, ExtensionSpec.for_pair(self.pair, 0.0), 5, 5)
        assert np.all(X.imag == 0) and np.all(Y.imag == 0)
        assert np.all(self.pair.x_block.contains(X.real, 1e-12))
        assert np.all(self.pair.y_block.contains(Y.real, 1e-12))

    def test_counts(self):
        X, Y, side, axis, bnd = sample_extension_arrays(self.pair, ExtensionSpec.for_pair(self.pair, 0.1), 8, 3)
        assert bnd.sum() == 32
        assert len(X) == 4 * 11
        assert set(zip(side.tolist(), axis.tolist())) == {(0, 0), (0, 1), (1, 0), (1, 1)}

    def test_structure(self):
        pairs = sample_extension_region(self.pair, ExtensionSpec.for_pair(self.pair, 0.15), 6, 6, seed=2)
        for x, y in pairs:
            assert x.n_complex + y.n_complex <= 1
            if x.axis is not None:
                e = ellipse_from_kappa((self.pair.x_block.lower[x.axis], self.pair.x_block.upper[x.axis]), 1.0, 0.15)
                assert e.contains(x.complex_coord, 1e-9)

    def test_deterministic(self):
        spec = ExtensionSpec.for_pair(self.pair, 0.1)
        a = sample_extension_arrays(self.pair, spec, 4, 4, seed=5)
        b = sample_extension_arrays(self.pair, spec, 4, 4, seed=5)
        assert all(np.array_equal(u, v) for u, v in zip(a, b))

    def test_negative_kappa(self):
        with pytest.raises(DomainError):
            ExtensionSpec.for_pair(self.pair, -0.1)

    def test_distance_bounds_on_samples(self):
        spec = ExtensionSpec.for_pair(self.pair, 0.2)
        X, Y, *_ = sample_extension_arrays(self.pair, spec, 40, 40, seed=1)
        r, _ = norm_extension(X, Y, 1.0)
        h = hermitian_distance(X, Y)
        assert np.all(np.abs(r) <= h * (1 + 1e-14))
        assert np.all(r.real >= (1 - 12 * 0.2 ** 2) * h * (1 - 1e-14))
        assert np.all(np.abs(r.imag) <= 4 * 0.2 * h)
