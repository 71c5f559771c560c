import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from impgreen.errors import DomainError
from impgreen.specfun import (ASYMPTOTIC_RADIUS, EULER_GAMMA, SERIES_RADIUS, _asymptotic_int,
                              _laguerre_int, _series_int, bessel_k_diff_scaled, bessel_k_scaled,
                              harmonic_number, majorant, reverse_bessel_coeffs, tricomi_u11)

SQ = math.sqrt(math.pi / 2)

# exp(z) K_mu(z) and exp(z)(K_mu - K_mu+1)(z) at 30 digits, frozen
BESSEL_TABLE = [
    (0, 25 + 3j, 0.24812867365204225 - 0.014692701614296307j, -0.004812200615242989 + 0.0008630815593217552j),
    (1, -5 + 0.1j, 0.004127993489831443 - 0.5150948357533963j, 0.003727499829601693 - 0.1445116767502726j),
    (2, 4j, 0.21119212423847145 - 0.6305277282894368j, 0.43648209235881325 + 0.06774219527143734j),
    (3, 0.01 + 0.02j, -713539.6670900196 + 115079.99917656985j, 57294380.08307786 - 184940760.00049174j),
    (0, 7 - 6j, 0.38436354826532976 + 0.13862926080262203j, -0.01100721395876871 - 0.018723983085950757j),
    (1, 2.5 + 0j, 0.900174423907878, -0.579513805546524),
    (2, -15 - 1j, 0.006939775312003555 + 0.2841390195976323j, 0.0038883863849993004 + 0.04458348266650147j),
    (0, 100 + 50j, 0.1152588285037802 - 0.027148565830532902j, -0.00040626334367234674 + 0.0003380374081800644j),
]

# e K_0(1) and e K_1(1) from the integral K_n(z) = int_0^inf exp(-z cosh t) cosh(n t) dt
E_K0_1 = 1.1444630798068950147
E_K1_1 = 1.6361534862632582465


def rel(a, b):
    return abs(a - b) / abs(b)


class TestHalfInteger:
    def test_order_half_at_one(self):
        assert bessel_k_scaled(0.5, 1.0) == pytest.approx(1.2533141373, rel=1e-10)

    def test_order_three_halves(self):
        assert bessel_k_scaled(1.5, 2.0) == pytest.approx(SQ * 3 / 2 ** 1.5, rel=1e-14)
        assert bessel_k_scaled(1.5, 2.0) == pytest.approx(1.3293403882, rel=1e-10)

    def test_reverse_bessel_polynomials(self):
        assert reverse_bessel_coeffs(0) == (1,)
        assert reverse_bessel_coeffs(1) == (1, 1)
        assert reverse_bessel_coeffs(2) == (3, 3, 1)
        assert reverse_bessel_coeffs(3) == (15, 15, 6, 1)

    def test_reverse_bessel_recurrence(self):
        # theta_{n+1} = (2n+1) theta_n + z^2 theta_{n-1}
        for n in range(1, 12):
            a = np.polynomial.Polynomial(reverse_bessel_coeffs(n + 1))
            b = (2 * n + 1) * np.polynomial.Polynomial(reverse_bessel_coeffs(n)) \
                + np.polynomial.Polynomial([0, 0, 1]) * np.polynomial.Polynomial(reverse_bessel_coeffs(n - 1))
            assert np.array_equal(a.coef, b.coef)

    def test_diff_half(self):
        assert bessel_k_diff_scaled(0.5, 4.0) == pytest.approx(-SQ * 4 ** -1.5, rel=1e-14)
        assert bessel_k_diff_scaled(0.5, 4.0) == pytest.approx(-0.1566642672, rel=1e-9)

    def test_diff_half_decay(self):
        r = np.array([10.0, 100.0, 1000.0])
        v = np.abs(bessel_k_diff_scaled(0.5, r)) * r ** 1.5
        assert np.allclose(v, SQ, rtol=1e-13)

    def test_diff_no_cancellation_at_large_argument(self):
        z = 1e6 + 2e5j
        exact = bessel_k_scaled(2.5, z) - bessel_k_scaled(3.5, z)
        assert rel(bessel_k_diff_scaled(2.5, z), exact) < 1e-6
        # leading term of exp(z)(K_{n+1/2} - K_{n+3/2})(z) is -(n+1) sqrt(pi/2) z^(-3/2)
        n = 2
        lead = -SQ * (n + 1) * z ** -1.5
        assert rel(bessel_k_diff_scaled(2.5, z), lead) < 1e-5


class TestIntegerOrder:
    def test_k0_at_one_integral_oracle(self):
        assert bessel_k_scaled(0, 1.0) == pytest.approx(E_K0_1, rel=1e-14)

    def test_k1_at_one_integral_oracle(self):
        assert bessel_k_scaled(1, 1.0) == pytest.approx(E_K1_1, rel=1e-14)

    def test_diff_at_one(self):
        assert bessel_k_diff_scaled(0, 1.0) == pytest.approx(E_K0_1 - E_K1_1, rel=1e-13)

    @pytest.mark.parametrize("mu,z,val,diff", BESSEL_TABLE)
    def test_table(self, mu, z, val, diff):
        assert rel(bessel_k_scaled(mu, z), val) < 1e-12
        assert rel(bessel_k_diff_scaled(mu, z), diff) < 1e-11

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_branch_agreement_at_crossovers(self, n):
        ang = np.linspace(-0.7, 0.7, 9) * np.pi
        for radius, (f, g) in ((SERIES_RADIUS, (_series_int, _laguerre_int)),
                               (ASYMPTOTIC_RADIUS, (_laguerre_int, _asymptotic_int))):
            z = radius * np.exp(1j * ang)
            a, b = f(n, z), g(n, z)
            assert np.max(np.abs(a - b) / np.abs(b)) < 1e-10

    def test_vectorized_matches_scalar(self):
        z = np.array([0.5 + 0.1j, 5 - 2j, 30 + 1j, -3 + 0.5j])
        v = bessel_k_scaled(1, z)
        assert v.shape == z.shape
        for zi, vi in zip(z, v):
            assert bessel_k_scaled(1, zi) == vi


class TestErrors:
    @pytest.mark.parametrize("z", [0.0, -1.0, -2 + 0j])
    def test_cut(self, z):
        with pytest.raises(DomainError):
            bessel_k_scaled(1, z)

    @pytest.mark.parametrize("mu", [-0.5, 0.25, 1.3])
    def test_order(self, mu):
        with pytest.raises(DomainError):
            bessel_k_scaled(mu, 1.0)

    def test_tricomi_domain(self):
        with pytest.raises(DomainError):
            tricomi_u11(-1 + 1j)
        with pytest.raises(DomainError):
            tricomi_u11(2j)

    def test_majorant_domain(self):
        with pytest.raises(DomainError):
            majorant("M", 0.5, 0.0)


finite_z = st.builds(
    lambda r, a: r * cmath.exp(1j * a),
    st.floats(1e-3, 1e3), st.floats(-0.99 * math.pi, 0.99 * math.pi),
)
orders = st.sampled_from([0, 0.5, 1, 1.5, 2, 2.5, 3])


@settings(max_examples=200, deadline=None)
@given(mu=orders, z=finite_z)
def test_conjugate_symmetry(mu, z):
    a = bessel_k_scaled(mu, z.conjugate())
    b = bessel_k_scaled(mu, z).conjugate()
    assert abs(a - b) <= 1e-14 * abs(b)


@settings(max_examples=200, deadline=None)
@given(mu=st.sampled_from([1, 1.5, 2, 2.5, 3]), z=finite_z)
def test_recurrence(mu, z):
    # K_{mu+1} = K_{mu-1} + (2 mu / z) K_mu, scaled by exp(z)
    lhs = bessel_k_scaled(mu + 1, z)
    rhs = bessel_k_scaled(mu - 1, z) + 2 * mu / z * bessel_k_scaled(mu, z)
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs))


@settings(max_examples=100, deadline=None)
@given(mu=orders, z=finite_z)
def test_diff_is_difference(mu, z):
    d = bessel_k_diff_scaled(mu, z)
    ref = bessel_k_scaled(mu, z) - bessel_k_scaled(mu + 1, z)
    scale = abs(bessel_k_scaled(mu + 1, z))
    assert abs(d - ref) <= 1e-11 * scale


class TestMajorants:
    def test_values(self):
        for mu in (0, 0.5, 1, 2.5):
            for kind in "MNW":
                assert majorant(kind, mu, 1.0) == 1.0
        assert majorant("M", 0, math.exp(-1)) == pytest.approx(2.0)
        assert majorant("W", 0, math.exp(-1)) == pytest.approx(2.0)
        assert majorant("N", 1.5, 0.25) == pytest.approx(8.0)
        assert majorant("M", 2, 16.0) == pytest.approx(0.25)

    def test_ordering_and_monotonicity(self):
        r = np.logspace(-6, 6, 2001)
        for mu in (0, 0.5, 1, 1.5, 2, 3):
            M, N, W = (majorant(k, mu, r) for k in "MNW")
            assert np.all(N <= M)
            assert np.all(np.diff(M) < 0)
            assert np.all(np.diff(W) < 0)
            if mu > 0:
                assert np.all(np.diff(N) < 0)
            else:
                # N_0 is constant on (0, 1]
                assert np.all(np.diff(N) <= 0)

    @pytest.mark.parametrize("mu", [0, 0.5, 1, 1.5, 2, 2.5, 3])
    def test_bessel_under_majorants(self, mu):
        rng = np.random.default_rng(7)
        rad = 10 ** rng.uniform(-4, 4, 4000)
        z = rad * np.exp(1j * rng.uniform(-1, 1, rad.size) * np.pi * (1 - 1e-9))
        c1 = np.max(np.abs(bessel_k_scaled(mu, z)) / majorant("M", mu, rad))
        c2 = np.max(np.abs(bessel_k_diff_scaled(mu, z)) * rad / majorant("N", mu, rad))
        assert np.isfinite(c1) and c1 < 100
        assert np.isfinite(c2) and c2 < 1000


class TestTricomi:
    @pytest.mark.parametrize("z,val", [
        (1, 0.5963473623231941), (10, 0.09156333393978808),
        (0.5 + 2j, 0.2021757095980912 - 0.33924011720925373j),
        (30 - 40j, 0.01209782271136795 + 0.015622076668363172j),
        (1e-3, 6.337874070325488),
    ])
    def test_values(self, z, val):
        assert rel(tricomi_u11(z), val) < 1e-13

    def test_asymptotic(self):
        for z in (1e3, 1e5, 1e7):
            assert tricomi_u11(z) * z == pytest.approx(1.0, abs=2.0 / z)

    def test_small_argument_constant(self):
        # U(1,1,z) = -gamma - log z + O(z log z)
        z = 1e-8
        assert tricomi_u11(z) == pytest.approx(-EULER_GAMMA - math.log(z), abs=1e-6)

    def test_branch_switch_continuity(self):
        z = 2 * np.exp(1j * np.linspace(-1.5, 1.5, 31))
        a = tricomi_u11(z * (1 - 1e-12))
        b = tricomi_u11(z * (1 + 1e-12))
        assert np.max(np.abs(a - b) / np.abs(b)) < 1e-11


def test_harmonic_numbers():
    assert harmonic_number(0) == 0
    assert harmonic_number(1) == 1
    assert harmonic_number(4) == pytest.approx(25 / 12, rel=1e-15)
    with pytest.raises(DomainError):
        harmonic_number(-1)


def test_euler_constant():
    assert EULER_GAMMA == pytest.approx(0.57721566490153286060, rel=1e-16)
