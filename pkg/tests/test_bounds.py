from __future__ import annotations

import math

import numpy as np
import pytest

from fracgronwall.bounds import InequalityProblem, compute_bound, horizon_t1
from fracgronwall.errors import DomainError, HorizonCollapseError, ProblemError
from fracgronwall.operators import GradedMesh
from fracgronwall.solver import extremal_inequality_solve

t = np.linspace(0.01, 1.0, 100)


def test_thm21_trivial():
    B = compute_bound(InequalityProblem("1+t", 1, 0, p=1), "thm21")
    np.testing.assert_allclose(B(t), 1 + t, rtol=1e-12)
    B = compute_bound(InequalityProblem(2, 3, "t", p=1), "thm21")
    np.testing.assert_allclose(B(t), 2 * np.exp(1.5 * t**2), rtol=1e-12)


def test_thm21_square_root():
    # mu(t) = 2^(1/4) t^(1/4); inverting Omega by hand gives this closed form
    prob = InequalityProblem(1, 1, 1, "u^(1/2)", p=2, T=2)
    B = compute_bound(prob, "thm21")
    tt = np.linspace(0.01, 2.0, 50)
    np.testing.assert_allclose(B(tt), math.sqrt(2) * (1 + 0.75 * 2**0.25 * tt) ** (2 / 3), rtol=1e-12)
    mesh = GradedMesh(2.0, 256)
    u = extremal_inequality_solve(prob, "thm21", mesh)
    assert np.all(u(mesh.nodes[1:]) <= B(mesh.nodes[1:]))


def test_cor22():
    B = compute_bound(InequalityProblem(1, 1, 1, p=1, gamma=1), "cor22")
    np.testing.assert_allclose(B(t), np.exp(t), rtol=1e-12)
    B = compute_bound(InequalityProblem(1, 1, 1, p=2, gamma=0.5), "cor22")
    np.testing.assert_allclose(B(t), math.sqrt(2) * (1 + t / math.sqrt(2)), rtol=1e-12)
    # agrees with the general bound applied to omega = u^(p gamma)
    B2 = compute_bound(InequalityProblem(1, 1, 1, "u", p=2), "thm21")
    np.testing.assert_allclose(B(t), B2(t), rtol=1e-6)
    B = compute_bound(InequalityProblem("1+t", 1, 0, p=3, gamma=1), "cor22")
    np.testing.assert_allclose(B(t), 2 ** (2 / 3) * (1 + t), rtol=1e-12)


@pytest.mark.parametrize(("theorem", "weight"), [("thm23", 0.0), ("thm24", -0.5), ("thm25", -1 / 3)])
def test_zero_l(theorem, weight):
    prob = InequalityProblem(2, 1, 0, "u^(1/2)", p=2, beta=2 / 3, alpha=0.5, delta=1 / 3)
    B = compute_bound(prob, theorem)
    np.testing.assert_allclose(B(t), math.sqrt(2) * 2 * t**weight, rtol=1e-12)


def test_cor26_zero_l():
    B = compute_bound(InequalityProblem(2, 1, 0, p=2, beta=2 / 3, gamma=1), "cor26")
    np.testing.assert_allclose(B(t), math.sqrt(2) * 2 * t ** (-1 / 3), rtol=1e-12)


def test_example_bounds():
    tt = np.geomspace(1e-4, 2, 300)
    B = compute_bound(InequalityProblem(1, 1, "t^(-1/3)", "u^(1/2)", p=2, beta=2 / 3,
                                        alpha=0.5, delta=1 / 3, T=2), "thm24")
    np.testing.assert_allclose(B(tt), math.sqrt(2) * tt**-0.5 + 9 * tt**0.5, rtol=1e-12)
    B = compute_bound(InequalityProblem(1, 1, "t^(-1/2)", "u^(1/2)", p=2, beta=2 / 3,
                                        gamma=0.5, T=2), "cor26")
    np.testing.assert_allclose(B(tt), math.sqrt(2) * tt ** (-1 / 3) + 18 * tt ** (1 / 3), rtol=1e-12)


def test_zero_a_flags_convention():
    prob = InequalityProblem(0, 1, "t^(-1/3)", "u^(1/2)", p=2, beta=2 / 3, alpha=0.5, delta=1 / 3)
    B = compute_bound(prob, "thm24")
    assert any("a vanishes" in n for n in B.notes)


def test_horizon():
    assert horizon_t1(InequalityProblem(1, 1, 1, "u", p=1, T=3)) == 3.0
    prob = InequalityProblem(1, 1, 1, "u^2", p=1, T=2)
    assert horizon_t1(prob) == pytest.approx(1.0, rel=1e-5)
    B = compute_bound(prob, "thm21")
    with pytest.raises(DomainError):
        B(1.5)
    with pytest.raises(HorizonCollapseError):
        compute_bound(InequalityProblem(1e20, 1, 1, "u^2", p=1, T=2), "thm21")


def test_problem_errors():
    with pytest.raises(ProblemError, match="p > 1/beta"):
        compute_bound(InequalityProblem(1, 1, 1, p=1.4, beta=2 / 3), "thm23")
    with pytest.raises(ProblemError):
        compute_bound(InequalityProblem("1-t", 1, 1, p=1), "thm21")
    with pytest.raises(ProblemError):
        compute_bound(InequalityProblem(1, 1, 1, p=2, beta=2 / 3, gamma=0.5), "thm99")
    with pytest.raises(ProblemError):
        InequalityProblem(1, 1, 1, p=0.5)


def test_thm23_and_thm25_hand_values():
    # c^2 int l^p collapses to 9 t^(2/3) and 9 t respectively; Omega^-1(y) = (1 + y/sqrt2)^2
    B = compute_bound(InequalityProblem(1, 1, "t^(-1/3)", "u^(1/2)", p=2, beta=2 / 3), "thm23")
    np.testing.assert_allclose(B(t), math.sqrt(2) + 9 * t ** (2 / 3), rtol=1e-12)
    B = compute_bound(InequalityProblem(1, 1, "t^(-1/2)", "u^(1/2)", p=2, beta=2 / 3), "thm25")
    np.testing.assert_allclose(B(t), math.sqrt(2) * t ** (-1 / 3) + 9 * t ** (2 / 3), rtol=1e-12)


def test_linear_omega_bounds_dominate_extremal():
    mesh = GradedMesh.for_beta(1.0, 256, 2 / 3)
    tt = mesh.nodes[1:]
    prob = InequalityProblem(1, 1, "t^(-1/4)", "u", p=1.8, beta=2 / 3)
    u = extremal_inequality_solve(prob, "thm23", mesh)
    assert np.all(u(tt) <= compute_bound(prob, "thm23")(tt))
    prob = InequalityProblem(1, 1, "t^(-1/2)", "u", p=1.8, beta=2 / 3, gamma=1)
    u = extremal_inequality_solve(prob, "cor26", mesh)
    assert np.all(u(tt) <= compute_bound(prob, "cor26")(tt))
