r"""Picard solvers for weakly singular Volterra equations.

Two fixed-point problems are handled here.

The Riemann-Liouville initial value problem
:math:`D^\beta x = f(t, x)`, :math:`t^{1-\beta} x(t) \to x_0` is solved through
its integral form in the weighted variable :math:`v = t^{1-\beta} x`:

.. math::

    v(t) = x_0 + \frac{t^{1-\beta}}{\Gamma(\beta)}
        \int_0^t (t - s)^{\beta - 1} f(s, s^{\beta - 1} v(s))\, ds.

The extremal equations are the integral inequalities of
:mod:`fracgronwall.bounds` taken with equality. Their minimal solutions are
the tightest functions compatible with the inequalities and serve as an
independent check of the bound curves.

In both cases ``v`` is represented by its values at the nodes of a graded mesh
and interpolated linearly; the kernel integrals against that interpolant are
evaluated by a :class:`~fracgronwall.quadrature.KernelQuadrature` assembled once
per solve.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import InequalityProblem
from .errors import BlowUpError, ConvergenceError, DomainError, IntegrabilityError, ProblemError
from .expr import BinOp, Expr, Num, Pow, Var, as_expr, evaluate_masked
from .operators import GradedMesh, WeightedSample, _power_behaviour
from .quadrature import KernelQuadrature
from .special import gamma

logger = logging.getLogger(__name__)

BLOW_UP = 1e12
RELAXATION = 0.5


# {{{ problem types


@dataclass(frozen=True)
class Envelope:
    r"""Growth envelope of a right-hand side.

    Either :math:`|f(t, x)| \le l(t)\,\omega(t^{1-\beta}|x|)` (``omega`` given)
    or :math:`|f(t, x)| \le l(t)|x|^\gamma + k(t)` (``k`` and ``gamma`` given).
    """

    l: Expr
    omega: Expr | None = None
    k: Expr | None = None
    gamma: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "l", as_expr(self.l, ("t",)))
        if self.omega is not None:
            object.__setattr__(self, "omega", as_expr(self.omega, ("u",)))
        if self.k is not None:
            object.__setattr__(self, "k", as_expr(self.k, ("t",)))
        if (self.omega is None) == (self.gamma is None):
            raise ProblemError("an envelope needs either omega or (k, gamma)")
        if self.gamma is not None:
            if not 0.0 < self.gamma <= 1.0:
                raise ProblemError(f"gamma must lie in (0, 1], got {self.gamma}")
            if self.k is None:
                object.__setattr__(self, "k", as_expr(0, ("t",)))

    def growth(self, beta: float) -> tuple[Expr, Expr]:
        r"""``(L, omega)`` with :math:`|f(t, x)| \le L(t)\,\omega(t^{1-\beta}|x|)`.

        For the power form, :math:`l|x|^\gamma + k
        \le (t^{\gamma(\beta-1)} l + k)(u^\gamma + 1)` with :math:`u = t^{1-\beta}|x|`.
        """
        if self.omega is not None:
            return self.l, self.omega
        t = Var("t")
        L = BinOp("+", BinOp("*", Pow(t, self.gamma * (beta - 1.0)), self.l), self.k)
        om = BinOp("+", Pow(Var("u"), self.gamma), Num(1.0))
        return L, om


@dataclass(frozen=True)
class FIVPSpec:
    r"""Riemann-Liouville initial value problem :math:`D^\beta x = f(t, x)`.

    ``x0`` is the weighted initial value :math:`\lim_{t\to 0^+} t^{1-\beta} x(t)`.
    """

    beta: float
    x0: float
    f: Expr
    T: float = 1.0
    envelope: Envelope | None = None
    p: float = 2.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "f", as_expr(self.f, ("t", "x")))
        if not 0.0 < self.beta < 1.0:
            raise ProblemError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.T > 0:
            raise ProblemError(f"T must be positive, got {self.T}")
        if not math.isfinite(self.x0):
            raise ProblemError(f"x0 must be finite, got {self.x0}")
        if self.envelope is not None and not self.p > 1.0 / self.beta:
            raise ProblemError(
                f"the condition p > 1/beta is violated (p={self.p}, 1/beta={1.0 / self.beta:.6g})"
            )

    def rhs(self, s: np.ndarray, v: np.ndarray) -> np.ndarray:
        """``f(s, s^(beta-1) v)``, raising :class:`DomainError` with the location."""
        x = s ** (self.beta - 1.0) * v
        vals, ok = evaluate_masked(self.f, t=s, x=x)
        vals = np.asarray(vals, dtype=float) * np.ones_like(s)
        ok = np.asarray(ok) & np.isfinite(vals)
        if not np.all(ok):
            i = int(np.argmin(np.broadcast_to(ok, s.shape)))
            raise DomainError(f"f(t, x) cannot be evaluated at t={s[i]:.6g}, x={x[i]:.6g}")
        return vals


@dataclass(frozen=True)
class SolutionCurve:
    """Converged (or last) Picard iterate with diagnostics."""

    weighted: WeightedSample
    iterations: int
    residual: float
    converged: bool
    delta: float
    notes: tuple[str, ...] = field(default=())

    @property
    def mesh(self) -> GradedMesh:
        return self.weighted.mesh

    @property
    def x(self) -> np.ndarray:
        """Unweighted values ``x(t_i)`` at the nodes ``i >= 1``."""
        return self.weighted.unweighted


# }}}


# {{{ initial value problem


def _singularity(spec: FIVPSpec, v_probe) -> float:
    lam = 0.0
    for v0 in v_probe:
        try:
            l, c = _power_behaviour(lambda s, v0=v0: spec.rhs(s, np.full_like(s, v0)), spec.T)
        except DomainError:
            continue
        if c != 0.0:
            lam = min(lam, l)
    if lam <= -1.0:
        raise IntegrabilityError(
            f"f(s, s^(beta-1) x0) behaves like s^{lam:.4g} near 0, not integrable"
        )
    return lam


class _Operator:
    """The weighted Volterra map evaluated at a fixed set of targets."""

    def __init__(self, spec: FIVPSpec, edges: np.ndarray, targets: np.ndarray, lam: float):
        self.spec = spec
        self.targets = targets
        self.kq = KernelQuadrature(edges, spec.beta, targets, lam=lam)
        self.scale = targets ** (1.0 - spec.beta) / gamma(spec.beta)

    def __call__(self, nodes: np.ndarray, v: np.ndarray) -> np.ndarray:
        pts = self.kq.points
        F = self.spec.rhs(pts, np.interp(pts, nodes, v))
        return self.spec.x0 + self.scale * self.kq.apply(F)


def _residual_operator(spec: FIVPSpec, mesh: GradedMesh, lam: float) -> _Operator:
    nodes = mesh.nodes
    return _Operator(spec, mesh.refined().nodes, nodes[1:], lam)


def residual(spec: FIVPSpec, sol: SolutionCurve | WeightedSample, *, _op=None) -> float:
    r"""Largest defect of the weighted integral equation over the nodes ``t_i > 0``.

    The kernel integrals are evaluated on the mesh with twice as many cells,
    so the defect measures how well the node values satisfy the equation
    rather than reproducing the solver's own arithmetic.
    """
    w = sol.weighted if isinstance(sol, SolutionCurve) else sol
    nodes = w.mesh.nodes
    if _op is None:
        lam = _singularity(spec, (spec.x0, spec.x0 + 1.0))
        _op = _residual_operator(spec, w.mesh, lam)
    g = _op(nodes, w.values)
    return float(np.max(np.abs(w.values[1:] - g)))


def solve_volterra(
    spec: FIVPSpec,
    mesh: GradedMesh | None = None,
    tol: float = 1e-8,
    max_iter: int = 500,
    *,
    v_init=None,
    N: int = 1024,
) -> SolutionCurve:
    r"""Picard iteration for the weighted integral equation.

    Starts from :math:`v^0 \equiv x_0` (or ``v_init``). Stops once the
    sup-norm change is at most ``tol`` and the :func:`residual` is at most
    ``10 tol``. If the signed change oscillates, iterates are averaged with
    factor 0.5 from then on.

    :raises ConvergenceError: iterations exhausted; ``result`` holds the last
        iterate as a :class:`SolutionCurve` with ``converged=False``.
    :raises BlowUpError: the weighted values exceeded ``1e12``.
    """
    if mesh is None:
        mesh = GradedMesh.for_beta(spec.T, N, spec.beta)
    if abs(mesh.T - spec.T) > 1e-12 * spec.T:
        raise ProblemError(f"mesh horizon {mesh.T} differs from the problem horizon {spec.T}")
    nodes = mesh.nodes
    beta = spec.beta

    if v_init is None:
        v = np.full(nodes.size, float(spec.x0))
    else:
        v = np.broadcast_to(np.asarray(v_init, dtype=float), nodes.shape).copy()
    v[0] = spec.x0

    lam = _singularity(spec, (spec.x0, spec.x0 + 1.0))
    op = _Operator(spec, nodes, nodes[1:], lam)
    res_op = None

    notes: list[str] = []
    relax = 1.0
    signs: list[float] = []
    delta = math.inf
    res = math.inf
    it = 0

    def curve(converged: bool) -> SolutionCurve:
        return SolutionCurve(WeightedSample(mesh, 1.0 - beta, v), it, res, converged, delta, tuple(notes))

    while it < max_iter:
        g = op(nodes, v)
        change = g - v[1:]
        i = int(np.argmax(np.abs(change)))
        delta = float(abs(change[i]))
        v[1:] += relax * change
        it += 1

        if not np.all(np.isfinite(v)) or np.max(np.abs(v)) > BLOW_UP:
            v = np.nan_to_num(v, nan=BLOW_UP, posinf=BLOW_UP, neginf=-BLOW_UP)
            raise BlowUpError(
                f"weighted iterate exceeded {BLOW_UP:g} after {it} iterations", curve(False)
            )

        signs.append(math.copysign(1.0, change[i]))
        if relax == 1.0 and len(signs) >= 3 and signs[-1] != signs[-2] != signs[-3]:
            relax = RELAXATION
            notes.append(f"under-relaxation {RELAXATION} engaged at iteration {it}")
            logger.info("oscillating iterates, relaxing with factor %g", RELAXATION)

        logger.debug("iteration %d: delta %.3e", it, delta)
        if delta <= tol:
            if res_op is None:
                res_op = _residual_operator(spec, mesh, lam)
            res = residual(spec, WeightedSample(mesh, 1.0 - beta, v), _op=res_op)
            if res <= 10.0 * tol:
                return curve(True)

    if res_op is None:
        res_op = _residual_operator(spec, mesh, lam)
    res = residual(spec, WeightedSample(mesh, 1.0 - beta, v), _op=res_op)
    raise ConvergenceError(
        f"Picard iteration did not converge in {max_iter} iterations "
        f"(last change {delta:.3g}, residual {res:.3g})",
        curve(False),
    )


# }}}


# {{{ extremal equations


@dataclass(frozen=True)
class _Extremal:
    """``v = A + B [int_0^t (t-s)^(kappa-1) L(s) W(v(s)) ds]^(1/P)``."""

    A: np.ndarray
    B: np.ndarray
    L: Expr
    W: Expr
    kappa: float
    P: float
    weight: float


def _node_values(e: Expr, nodes: np.ndarray, name: str) -> np.ndarray:
    # the value at t = 0 is taken as the limit from the right
    t = np.maximum(nodes, nodes[1] * 1e-12)
    vals, ok = evaluate_masked(e, t=t)
    vals = np.asarray(vals, dtype=float) * np.ones_like(t)
    if not np.all(np.asarray(ok) & np.isfinite(vals)):
        raise ProblemError(f"{name}(t) cannot be evaluated on the mesh")
    return vals


def _extremal_form(prob: InequalityProblem, theorem: str, nodes: np.ndarray) -> _Extremal:
    a = _node_values(prob.a, nodes, "a")
    b = _node_values(prob.b, nodes, "b")
    t = Var("t")
    if theorem in ("thm21", "cor22"):
        W = prob.omega
        if theorem == "cor22":
            W = Pow(Var("u"), prob.p * prob.require_gamma())
        return _Extremal(a, b, prob.l, W, 1.0, prob.p, 0.0)

    beta = prob.require_beta()
    if theorem == "thm23":
        return _Extremal(a, b, prob.l, prob.omega, beta, 1.0, 0.0)
    if theorem == "thm24":
        if not prob.alpha > prob.delta >= 0.0:
            raise ProblemError(f"alpha > delta >= 0 is required (alpha={prob.alpha}, delta={prob.delta})")
        B = b * nodes ** (prob.alpha - prob.delta)
        return _Extremal(a, B, prob.l, prob.omega, beta, 1.0, prob.alpha)
    if theorem == "thm25":
        return _Extremal(a, b * nodes ** (1.0 - beta), prob.l, prob.omega, beta, 1.0, 1.0 - beta)
    if theorem == "cor26":
        g = prob.require_gamma()
        L = BinOp("*", prob.l, Pow(t, g * (beta - 1.0)))
        W = Pow(Var("u"), g)
        return _Extremal(a, b * nodes ** (1.0 - beta), L, W, beta, 1.0, 1.0 - beta)
    raise ProblemError(f"unknown theorem {theorem!r}")


def extremal_inequality_solve(
    prob: InequalityProblem,
    theorem: str,
    mesh: GradedMesh,
    tol: float = 1e-10,
    max_iter: int = 1000,
    *,
    history: list | None = None,
) -> WeightedSample:
    r"""Minimal solution of an inequality taken with equality.

    Monotone Picard iteration from :math:`u^0 = a`. The result is a
    :class:`WeightedSample` whose weight matches the form in which the
    inequality bounds the solution: :math:`t^\alpha u` for ``thm24``,
    :math:`t^{1-\beta} u` for ``thm25`` and ``cor26``, and :math:`u` itself
    otherwise. Calling the sample returns the unweighted :math:`u`.

    If ``history`` is a list, every iterate's node values are appended to it.

    :raises BlowUpError: values exceeded ``1e12``; the equation blows up
        inside the mesh horizon.
    :raises ConvergenceError: iterations exhausted.
    """
    nodes = mesh.nodes
    form = _extremal_form(prob, theorem, nodes)
    if np.any(form.A < 0) or np.any(form.B < 0):
        raise ProblemError("a and b must be nonnegative")

    lam, c = _power_behaviour(
        lambda s: np.asarray(evaluate_masked(form.L, t=s)[0], dtype=float) * np.ones_like(s), mesh.T
    )
    if c == 0.0:
        lam = 0.0
    kq = KernelQuadrature(nodes, form.kappa, nodes[1:], lam=lam)
    pts = kq.points
    Lp, ok = evaluate_masked(form.L, t=pts)
    Lp = np.asarray(Lp, dtype=float) * np.ones_like(pts)
    if not np.all(np.asarray(ok) & np.isfinite(Lp)) or np.any(Lp < 0):
        raise ProblemError("l must be finite and nonnegative on (0, T]")
    W = form.W

    v = form.A.copy()
    if history is not None:
        history.append(v.copy())
    for it in range(1, max_iter + 1):
        wv, ok = evaluate_masked(W, u=np.interp(pts, nodes, v))
        wv = np.asarray(wv, dtype=float) * np.ones_like(pts)
        if not np.all(ok):
            raise DomainError("omega cannot be evaluated at the current iterate")
        integral = np.maximum(kq.apply(Lp * wv), 0.0)
        new = form.A.copy()
        new[1:] += form.B[1:] * integral ** (1.0 / form.P)
        delta = float(np.max(np.abs(new - v)) / max(1.0, float(np.max(np.abs(new)))))
        v = new
        if history is not None:
            history.append(v.copy())
        if not np.all(np.isfinite(v)) or np.max(v) > BLOW_UP:
            v = np.nan_to_num(v, nan=BLOW_UP, posinf=BLOW_UP)
            raise BlowUpError(
                f"extremal iterate exceeded {BLOW_UP:g} after {it} iterations; "
                "the equation blows up before the mesh horizon",
                WeightedSample(mesh, form.weight, np.minimum(v, BLOW_UP)),
            )
        if delta <= tol:
            return WeightedSample(mesh, form.weight, v)

    raise ConvergenceError(
        f"extremal iteration did not converge in {max_iter} iterations (last change {delta:.3g})",
        WeightedSample(mesh, form.weight, v),
    )


# }}}
