import os
import subprocess
import sys

import numpy as np
import pytest

from impgreen import NUMBA_ENABLED, backend_name, set_threads
from impgreen._kernels import scaled_pair
from impgreen.errors import DomainError
from impgreen.kernel import psi_fixed, theta_batch
from impgreen.transform import KernelParams, scaled_bessel_ratio, split_difference

needs_numba = pytest.mark.skipif(not NUMBA_ENABLED, reason="numba backend disabled")


def _pairs(n, d, seed):
    rng = np.random.default_rng(seed)
    X = np.column_stack([rng.normal(size=(n, d - 1)), rng.uniform(0.05, 2, n)])
    Y = np.column_stack([rng.normal(size=(n, d - 1)), rng.uniform(0.05, 2, n)])
    return X, Y


@needs_numba
@pytest.mark.parametrize("d,s,beta", [(2, 1 + 1j, 0.5), (3, 0.1 + 10j, 1.0), (4, 3.0, 2.0), (5, 0.5 - 2j, 0.3)])
def test_theta_backends_agree(d, s, beta):
    X, Y = _pairs(200, d, d)
    params = KernelParams(s, beta, d)
    a = theta_batch(X, Y, params, backend="numba")
    b = theta_batch(X, Y, params, backend="numpy")
    for f in ("illu", "refl", "imp"):
        np.testing.assert_allclose(getattr(a, f), getattr(b, f), rtol=1e-12, atol=0)


@needs_numba
def test_psi_backends_agree_complex_points():
    rng = np.random.default_rng(4)
    Z = np.column_stack([rng.normal(size=(100, 2)), rng.uniform(0.5, 2, 100)]).astype(complex)
    Z += 0.02j * rng.normal(size=Z.shape)
    omega2, zd, r = split_difference(Z)
    params = KernelParams(2 - 1j, 0.8, 3)
    np.testing.assert_allclose(psi_fixed(omega2, zd, r, params, "numba"),
                               psi_fixed(omega2, zd, r, params, "numpy"), rtol=1e-11)


@needs_numba
@pytest.mark.parametrize("two_mu", [0, 1, 2, 3, 4, 5])
def test_scalar_bessel_matches_vectorized(two_mu):
    w = np.array([0.01 + 0.02j, 1.5 - 0.5j, 4.0 + 3.0j, 9 - 12j, 25 + 1j, 0.3 + 40j])
    A, B = scaled_bessel_ratio(two_mu, w)
    for wi, ai, bi in zip(w, A, B):
        a, b = scaled_pair(two_mu, wi)
        assert abs(a - ai) <= 1e-13 * abs(ai)
        assert abs(b - bi) <= 1e-12 * max(abs(bi), abs(ai))


def test_unknown_backend_request():
    if NUMBA_ENABLED:
        pytest.skip("only meaningful without numba")
    with pytest.raises(DomainError):
        psi_fixed(np.ones(1), np.ones(1), np.ones(1), KernelParams(1, 1, 3), "numba")


def test_threads():
    assert set_threads() >= 1
    if NUMBA_ENABLED:
        with pytest.raises(ValueError):
            set_threads(0)


def test_numpy_fallback_in_subprocess():
    code = (
        "import numpy as np, impgreen\n"
        "from impgreen.kernel import green_components, closed_form_d3_beta1\n"
        "from impgreen.transform import KernelParams\n"
        "assert impgreen.backend_name() == 'numpy'\n"
        "p = KernelParams(2 + 3j, 1.0, 3)\n"
        "x, y = [0.1, 0.2, 0.9], [0.0, 0.0, 0.4]\n"
        "g = green_components(x, y, p).g_half\n"
        "c = closed_form_d3_beta1(x, y, p.s)\n"
        "assert abs(g - c) <= 1e-10 * abs(c), (g, c)\n"
        "print('ok')\n"
    )
    env = {**os.environ, "IMPGREEN_NUMBA": "0"}
    proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "ok"


def test_backend_name():
    assert backend_name() == ("numba" if NUMBA_ENABLED else "numpy")
