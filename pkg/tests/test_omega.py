from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracgronwall.errors import DomainError
from fracgronwall.omega import PLAIN, PTH, OmegaTransform


_numeric = OmegaTransform("u^(1/2)+u", 2, PTH)


def test_mu():
    assert OmegaTransform("u^(1/2)", 2, PTH).mu(4.0) == pytest.approx(2 * math.sqrt(2), rel=1e-14)
    assert OmegaTransform("u", 1, PLAIN).mu(3.0) == pytest.approx(3.0, rel=1e-14)
    assert OmegaTransform("u", 2, PTH).mu(1.0) == pytest.approx(2.0, rel=1e-14)


def test_closed_forms():
    log = OmegaTransform("u", 1, PLAIN)
    assert log.Omega(math.e) == pytest.approx(1.0, rel=1e-14)
    assert log.Omega_inv(0.0) == pytest.approx(1.0, rel=1e-14)
    assert log.domain_sup() == math.inf

    sq = OmegaTransform("u^(1/2)", 2, PTH)
    assert sq.Omega(4.0) == pytest.approx(math.sqrt(2), rel=1e-14)
    assert sq.Omega_inv(math.sqrt(2)) == pytest.approx(4.0, rel=1e-14)
    assert sq.Omega_at_zero == pytest.approx(-math.sqrt(2), rel=1e-14)

    assert OmegaTransform("u^2", 1, PLAIN).domain_sup() == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize(("omega", "p", "mode"), [
    ("u^(1/2)+u", 2, PTH),
    ("u^(1/2)+u", 2, PLAIN),
    ("u+u^(1/2)", 1.6, PTH),
    ("ln(1+u)", 1, PLAIN),
    ("u^(1/2)+1", 2, PTH),
])
def test_numeric_transform(omega, p, mode):
    tr = OmegaTransform(omega, p, mode)
    assert tr.power_law is None
    assert tr.Omega(1.0) == 0.0
    x = np.array([0.1, 1.0, 7.0])
    np.testing.assert_allclose(tr.Omega_inv(tr.Omega(x)), x, rtol=1e-8)
    xs = np.geomspace(1e-6, 1e6, 200)
    assert np.all(np.diff(tr.Omega(xs)) > 0)


def test_inverse_domain():
    with pytest.raises(DomainError):
        _numeric.Omega_inv(400.0)
    with pytest.raises(DomainError):
        _numeric.Omega_inv(_numeric.Omega_at_zero - 0.1)


def test_example_sup_is_infinite():
    assert OmegaTransform("u^(1/2)+u", 2, PTH).domain_sup() == math.inf


def test_numeric_matches_closed_form():
    closed = OmegaTransform("u^(1/2)", 2, PTH)
    numeric = OmegaTransform("u^(1/2)", 2, PTH, closed_form=False)
    xs = np.geomspace(1e-10, 1e10, 100)
    np.testing.assert_allclose(numeric.Omega(xs), closed.Omega(xs), rtol=1e-9, atol=1e-9)
    assert numeric.domain_sup() == math.inf
    assert OmegaTransform("u^2", 1, PLAIN, closed_form=False).domain_sup() == pytest.approx(1.0, rel=1e-6)


def test_tail_ratio():
    # t / mu(t) at 1e6 approximates 2^(1-p) K^p for K = lim u / omega(u)
    p = 2.0
    tr = OmegaTransform("u^(1/2)+u", p, PTH)
    ratio = 1e6 / tr.mu(1e6)
    assert ratio == pytest.approx(2.0 ** (1 - p), rel=0.1)



@settings(deadline=None, max_examples=100)
@given(st.floats(_numeric.Omega_at_zero * 0.999, 300.0))
def test_round_trip(y):
    # the domain starts at Omega(0); Omega grows like ln(x) / 2, so y = 300 means x near e^600
    assert abs(_numeric.Omega(_numeric.Omega_inv(y)) - y) <= 1e-8 * max(1.0, abs(y))
