from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import erfcx

from fracgronwall.errors import DomainError
from fracgronwall.special import gamma, mittag_leffler, pow_safe

# int_0^inf s^(-1/3) e^(-s) ds, 30-digit mpmath quadrature
GAMMA_TWO_THIRDS = 1.3541179394264004


def test_gamma_values():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-15)
    assert gamma(2 / 3) == pytest.approx(GAMMA_TWO_THIRDS, rel=1e-14)
    np.testing.assert_allclose(gamma(np.array([0.5, 5.0])), [math.sqrt(math.pi), 24.0], rtol=1e-14)
    with pytest.raises(DomainError):
        gamma(0.0)


@given(st.floats(0.1, 5.0))
def test_gamma_recurrence(x):
    assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-13)
    assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-13)


def test_mittag_leffler_exp():
    for z in np.linspace(-10.0, 10.0, 41):
        assert mittag_leffler(1.0, 1.0, float(z)) == pytest.approx(math.exp(z), rel=1e-12)
    assert mittag_leffler(1.0, 1.0, 1.0) == pytest.approx(math.e, rel=1e-15)


def test_mittag_leffler_erfc():
    # E_{1/2,1}(z) = exp(z^2) erfc(-z) = erfcx(-z)
    assert mittag_leffler(0.5, 1.0, 1.0) == pytest.approx(5.008980080762283, rel=1e-13)
    for z in (-3.0, -0.5, 0.0, 0.7, 2.5):
        assert mittag_leffler(0.5, 1.0, z) == pytest.approx(float(erfcx(-z)), rel=1e-10)


def test_mittag_leffler_zero():
    assert mittag_leffler(2 / 3, 2 / 3, 0.0) == pytest.approx(1.0 / GAMMA_TWO_THIRDS, rel=1e-14)


def test_pow_safe():
    assert pow_safe(0.0, 0.5) == 0.0
    assert pow_safe(0.0, 0.0) == 1.0
    assert pow_safe(4.0, 0.5) == 2.0
    with pytest.raises(DomainError):
        pow_safe(0.0, -0.5)
    with pytest.raises(DomainError):
        pow_safe(-1.0, 2.0)
