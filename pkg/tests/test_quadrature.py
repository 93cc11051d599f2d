from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import beta as beta_fn

from fracgronwall.errors import IntegrabilityError
from fracgronwall.quadrature import KernelQuadrature, cumulative_integral


@pytest.mark.parametrize(("beta", "nu"), [(2 / 3, 0.25), (0.5, -0.5), (0.3, -0.9), (0.9, 1.3)])
def test_kernel_quadrature_monomials(beta, nu):
    N = 256
    edges = (np.arange(N + 1) / N) ** (2.0 / beta)
    targets = np.array([1e-9, 3e-5, 0.1, 0.55, 1.0])
    kq = KernelQuadrature(edges, beta, targets, lam=nu)
    got = kq.integrate(lambda s: s**nu)
    exact = beta_fn(beta, nu + 1.0) * targets ** (beta + nu)
    np.testing.assert_allclose(got, exact, rtol=1e-10)


@settings(deadline=None, max_examples=40)
@given(st.floats(-0.99, 3.0))
def test_cumulative_integral_powers(lam):
    t = np.array([1e-6, 0.5, 1.0, 2.0])
    got = cumulative_integral(lambda s: s**lam, t)
    np.testing.assert_allclose(got, t ** (lam + 1.0) / (lam + 1.0), rtol=1e-12)


def test_cumulative_integral_logs():
    assert cumulative_integral(lambda s: np.log(s) ** 2, [1.0])[0] == pytest.approx(2.0, rel=1e-13)
    got = cumulative_integral(lambda s: s**-0.5 * (1.0 - np.log(s)), [1.0])[0]
    assert got == pytest.approx(6.0, rel=1e-13)


def test_cumulative_integral_mixed_powers():
    # binomial series of int_0^(2^-36) s^(1.6/3) (s^(-11/12) + s^(-5/6))^1.6 ds
    g = lambda s: s ** (1.6 / 3) * (s ** (-11 / 12) + s ** (-5 / 6)) ** 1.6
    got = cumulative_integral(g, [2.0**-36])[0]
    assert got == pytest.approx(3.1006056029335931, rel=5e-15)


def test_cumulative_integral_shape_and_errors():
    out = cumulative_integral(lambda s: s**-0.5 + s**2, [[0.0, 1.0], [0.25, 0.0]])
    np.testing.assert_allclose(out, [[0.0, 2.0 + 1 / 3], [1.0 + 0.25**3 / 3, 0.0]], rtol=1e-13)
    with pytest.raises(IntegrabilityError):
        cumulative_integral(lambda s: s**-2.0, [1.0])
