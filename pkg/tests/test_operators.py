from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from fracgronwall.errors import DomainError, ProblemError
from fracgronwall.operators import (
    GradedMesh,
    WeightedSample,
    frac_derivative,
    frac_integral,
    frac_integral_at,
    kernel_bound,
    kernel_diff_bound,
    phi,
)
from fracgronwall.special import gamma


def test_mesh():
    m = GradedMesh.for_beta(2.0, 8, 0.5)
    assert m.r == 4.0
    assert m.nodes[0] == 0.0 and m.nodes[-1] == 2.0
    np.testing.assert_array_equal(m.refined().nodes[::2], m.nodes)
    with pytest.raises(ValueError):
        GradedMesh(1.0, 1)
    with pytest.raises(ValueError):
        WeightedSample(m, 0.0, np.ones(3))


@pytest.mark.parametrize(("beta", "nu"), [(0.5, 0.0), (2 / 3, 0.25), (0.3, -0.5), (0.9, 1.5)])
def test_monomial_rule(beta, nu):
    m = GradedMesh.for_beta(1.0, 256, beta)
    got = frac_integral(beta, f"t^({nu!r})", m).unweighted
    exact = math.gamma(nu + 1) / math.gamma(nu + beta + 1) * m.nodes[1:] ** (nu + beta)
    np.testing.assert_allclose(got, exact, rtol=1e-10)
    at = frac_integral_at(beta, f"t^({nu!r})", np.array([0.3, 1.0]), mesh=m)
    np.testing.assert_allclose(at, exact[-1] * np.array([0.3, 1.0]) ** (nu + beta), rtol=1e-10)


def test_derivative():
    m = GradedMesh.for_beta(1.0, 256, 0.5)
    # D^(1/2) t^(-1/2) = 0 and D^(1/2) 1 = t^(-1/2) / Gamma(1/2)
    d0 = frac_derivative(0.5, "t^(-1/2)", mesh=m)
    assert np.all(np.abs(d0) <= 1e-6 * m.nodes[1:-1] ** -0.5)
    d = frac_derivative(0.5, 1, mesh=m)
    np.testing.assert_allclose(d, m.nodes[1:-1] ** -0.5 / gamma(0.5), rtol=1e-8)


def test_phi():
    assert phi(0.5, 2.0) == pytest.approx(math.sqrt(2) - 1, rel=1e-15)
    # phi(1 + d) behaves like mu d^(1 - mu)
    for mu in (0.1, 0.5, 0.9):
        assert phi(mu, 1 + 1e-8) == pytest.approx(mu * 1e-8 ** (1 - mu), rel=1e-6)
    with pytest.raises(DomainError):
        phi(0.5, 1.0)
    with pytest.raises(DomainError):
        phi(1.0, 2.0)


@settings(deadline=None)
@given(st.floats(0.01, 0.99), st.floats(1.0 + 1e-9, 1e6), st.floats(1.0 + 1e-9, 1e6))
def test_phi_monotone(mu, a, b):
    lo, hi = sorted((a, b))
    assert phi(mu, lo) <= phi(mu, hi) * (1 + 1e-12)


def test_kernel_bound_values():
    lhs, rhs = kernel_bound(2 / 3, 2, 1, 1.0)
    assert lhs == pytest.approx(1.5, rel=1e-10)
    assert rhs == pytest.approx(math.sqrt(18 / 5), rel=1e-10)
    assert kernel_bound(2 / 3, 2, 0, 0.5) == (0.0, 0.0)
    lhs, rhs = kernel_bound(2 / 3, 2, "t^(-1/2)", 1.0)
    exact, _ = quad(lambda s: (1 - s) ** (-1 / 3) * s**-0.5, 0, 1, epsabs=1e-13)
    assert lhs == pytest.approx(exact, rel=1e-8)
    assert lhs <= rhs


def test_kernel_diff_bound_values():
    assert kernel_diff_bound(2 / 3, 2, 1, 0.5, 0.5) == (0.0, 0.0)
    lhs, rhs = kernel_diff_bound(2 / 3, 2, 0, 0.25, 0.5)
    assert lhs == 0.0 and rhs >= 0.0
    lhs, rhs = kernel_diff_bound(2 / 3, 2, 1, 0.25, 0.5)
    assert 0.0 < lhs <= rhs
    with pytest.raises(ProblemError, match="p > 1/beta"):
        kernel_bound(2 / 3, 1.2, 1, 1.0)
