r"""A priori bounds for Gronwall-type integral inequalities.

Every bound here has the shape

.. math::

    B(t) = 2^{1 - 1/p}\, t^{w}
        \left(\Omega^{-1}\left(\Omega(A^p(t)) + C^p(t) J(t)\right)\right)^{1/p},

where :math:`J(t) = \int_0^t g(s)\,ds` and :math:`A, C, g, w` and the
:math:`\mu` used to build :math:`\Omega` depend on the inequality:

========== ============================================== ===============
tag        inequality                                     :math:`\mu`
========== ============================================== ===============
``thm21``  :math:`u \le a + b (\int_0^t l\,\omega(u))^{1/p}`  plain
``thm23``  :math:`u \le a + b \int_0^t (t-s)^{\beta-1} l\,\omega(u)`  p-th
``thm24``  :math:`u \le a t^{-\alpha} + b t^{-\delta} \int_0^t (t-s)^{\beta-1} f(s, u)`,
           :math:`|f(t, x)| \le l(t)\,\omega(t^\alpha |x|)`  p-th
``thm25``  :math:`u \le a t^{\beta-1} + b(t) \int_0^t (t-s)^{\beta-1} f(s, u)`,
           :math:`|f(t, x)| \le l(t)\,\omega(t^{1-\beta} |x|)`  p-th
========== ============================================== ===============

The ``cor22`` and ``cor26`` curves are the closed forms obtained for
:math:`\omega(u) = u^{p\gamma}` in ``thm21`` and
:math:`l \omega(\cdot) = l(s) u^\gamma` in ``thm25``.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, HorizonCollapseError, IntegrabilityError, ProblemError
from .expr import Expr, as_expr, constant_value, evaluate, evaluate_masked
from .omega import PLAIN, PTH, OmegaTransform
from .quadrature import cumulative_integral


# {{{ problem


@dataclass(frozen=True)
class InequalityProblem:
    """Parameters of one integral inequality.

    ``a``, ``b`` and ``l`` are expressions in ``t`` (numbers are accepted),
    ``omega`` is an expression in ``u``.
    """

    a: Expr
    b: Expr
    l: Expr
    omega: Expr = field(default_factory=lambda: as_expr("u", ("u",)))
    p: float = 2.0
    beta: float | None = None
    alpha: float = 0.0
    delta: float = 0.0
    gamma: float | None = None
    T: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", as_expr(self.a, ("t",)))
        object.__setattr__(self, "b", as_expr(self.b, ("t",)))
        object.__setattr__(self, "l", as_expr(self.l, ("t",)))
        object.__setattr__(self, "omega", as_expr(self.omega, ("u",)))
        if not self.T > 0:
            raise ProblemError(f"T must be positive, got {self.T}")
        if not self.p >= 1:
            raise ProblemError(f"p must be >= 1, got {self.p}")

    @property
    def q(self) -> float:
        return math.inf if self.p == 1 else self.p / (self.p - 1.0)

    def sample_grid(self, n: int = 256) -> np.ndarray:
        return np.geomspace(self.T * 1e-6, self.T, n)

    def require_beta(self) -> float:
        beta = self.beta
        if beta is None or not 0.0 < beta < 1.0:
            raise ProblemError(f"beta must lie in (0, 1), got {beta}")
        if not self.p > 1.0 / beta:
            raise ProblemError(
                f"the condition p > 1/beta is violated (p={self.p}, 1/beta={1.0 / beta:.6g})"
            )
        return beta

    def require_gamma(self) -> float:
        g = self.gamma
        if g is None or not 0.0 < g <= 1.0:
            raise ProblemError(f"gamma must lie in (0, 1], got {g}")
        return g

    def validate_coefficients(self, constant_ab: bool = False) -> None:
        t = self.sample_grid()
        for name in ("a", "b"):
            e = getattr(self, name)
            if constant_ab and constant_value(e) is None:
                raise ProblemError(f"{name} must be a constant for this inequality")
            v = _values(e, t, name)
            if np.any(v < 0):
                raise ProblemError(f"{name} must be nonnegative, {name}({t[v < 0][0]:.6g}) < 0")
            if np.any(np.diff(v) < -1e-12 * np.maximum(1.0, np.abs(v[1:]))):
                i = int(np.argmax(np.diff(v) < -1e-12 * np.maximum(1.0, np.abs(v[1:]))))
                raise ProblemError(f"{name} must be nondecreasing, it decreases near t={t[i]:.6g}")
        lv = _values(self.l, t, "l")
        if np.any(lv < 0):
            raise ProblemError(f"l must be nonnegative, l({t[lv < 0][0]:.6g}) < 0")


def _values(e: Expr, t, name: str) -> np.ndarray:
    try:
        return np.asarray(evaluate(e, t=t), dtype=float) * np.ones_like(t)
    except DomainError as exc:
        raise ProblemError(f"{name}(t) cannot be evaluated: {exc}") from exc


# }}}


# {{{ curves


@dataclass(frozen=True)
class BoundCurve:
    """An upper bound ``B(t)`` valid on ``(0, T1]``.

    ``inner(t)`` is the weighted quantity ``t^(-weight_exponent) B(t)``, the
    bound on the weighted unknown (for example ``t^(1-beta) u(t)``).
    """

    inner: Callable[[np.ndarray], np.ndarray]
    T1: float
    theorem_tag: str
    weight_exponent: float = 0.0
    notes: tuple[str, ...] = ()

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0) or np.any(t > self.T1 * (1.0 + 1e-12)):
            raise DomainError(f"bound is only valid on (0, {self.T1:.6g}]")
        r = np.asarray(self.inner(t), dtype=float)
        if self.weight_exponent != 0.0:
            r = r * t**self.weight_exponent
        return float(r) if r.ndim == 0 else r

    __call__ = evaluate


def _integrand_exponent(g: Callable[[np.ndarray], np.ndarray], T: float) -> float | None:
    """Log-slope of ``g`` near 0, or ``None`` when ``g`` vanishes there."""
    s = T * np.array([1e-12, 1e-11, 1e-10])
    v = np.asarray(g(s), dtype=float)
    if np.any(v <= 0):
        return None
    return float(np.polyfit(np.log(s), np.log(v), 1)[0])


def _checked_integral(g, T: float, what: str):
    lam = _integrand_exponent(g, T)
    if lam is not None and lam <= -1.0 + 1e-3:
        raise IntegrabilityError(f"{what} behaves like s^{lam:.4g} near 0 and is not integrable")

    def J(t):
        return cumulative_integral(g, t)

    return J


def _expr_fn(e: Expr):
    c = constant_value(e)
    if c is not None:
        return lambda t: np.full(np.shape(t), c) if np.ndim(t) else c
    return lambda t: evaluate(e, t=t)


@dataclass(frozen=True)
class _Parts:
    tr: OmegaTransform
    Ap: Callable  # t -> A(t)^p
    Cp: Callable  # t -> C(t)^p
    J: Callable  # t -> int_0^t g
    notes: tuple[str, ...]

    def argument(self, t):
        """The argument ``Omega(A^p) + C^p J`` of the inverse."""
        t = np.asarray(t, dtype=float)
        ap = np.asarray(self.Ap(t), dtype=float)
        return self.tr.Omega(ap) + np.asarray(self.Cp(t), dtype=float) * self.J(t)

    def inner(self, t):
        p = self.tr.p
        return 2.0 ** (1.0 - 1.0 / p) * np.asarray(self.tr.Omega_inv(self.argument(t))) ** (1.0 / p)


def _curve(parts: _Parts, prob: InequalityProblem, tag: str, weight: float) -> BoundCurve:
    T1 = _horizon(parts, prob.T)
    notes = list(parts.notes) + list(parts.tr.notes)
    if T1 < prob.T:
        notes.append(f"the bound is void beyond T1={T1:.9g}")
    return BoundCurve(parts.inner, T1, tag, weight, tuple(notes))


def _zero_a_notes(prob: InequalityProblem, tr: OmegaTransform) -> tuple[str, ...]:
    a0 = float(np.min(np.abs(_values(prob.a, prob.sample_grid(8), "a"))))
    if a0 == 0.0:
        o0 = tr.Omega_at_zero
        if math.isinf(o0):
            return ("a vanishes where Omega(0) = -inf; the lower-divergence convention "
                    "Omega^-1(-inf) = 0 is used",)
        return (f"a vanishes; Omega(0) is taken as its finite limit {o0:.12g}",)
    return ()


# }}}


# {{{ horizon


def _horizon(parts: _Parts, T: float) -> float:
    sup = parts.tr.domain_sup()
    if math.isinf(sup):
        return T
    g = parts.argument
    t0 = T * 1e-12
    if float(g(t0)) >= sup:
        raise HorizonCollapseError(
            f"Omega(a^p) = {float(g(t0)):.6g} already reaches the end of the domain of "
            f"Omega^-1 ({sup:.6g})"
        )
    if float(g(T)) < sup:
        return T
    lo, hi = t0, T
    while hi - lo > 1e-6 * hi:
        mid = 0.5 * (lo + hi)
        if float(g(mid)) < sup:
            lo = mid
        else:
            hi = mid
    return lo


def horizon_t1(prob: InequalityProblem, tr: OmegaTransform | None = None, theorem: str = "thm21") -> float:
    """Largest ``T1 <= T`` for which the bound of *theorem* is defined."""
    parts = _PARTS[theorem](prob, tr)
    return _horizon(parts, prob.T)


# }}}


# {{{ theorems


def _thm21_parts(prob: InequalityProblem, tr: OmegaTransform | None = None) -> _Parts:
    prob.validate_coefficients()
    p = prob.p
    tr = tr or OmegaTransform(prob.omega, p, PLAIN)
    a, b, l = _expr_fn(prob.a), _expr_fn(prob.b), _expr_fn(prob.l)
    J = _checked_integral(lambda s: l(s), prob.T, "l")
    return _Parts(tr, lambda t: a(t) ** p, lambda t: b(t) ** p, J, _zero_a_notes(prob, tr))


def _thm23_parts(prob: InequalityProblem, tr: OmegaTransform | None = None) -> _Parts:
    beta = prob.require_beta()
    prob.validate_coefficients()
    p, q = prob.p, prob.q
    tr = tr or OmegaTransform(prob.omega, p, PTH)
    a, b, l = _expr_fn(prob.a), _expr_fn(prob.b), _expr_fn(prob.l)
    k = (q * (beta - 1.0) + 1.0) ** (1.0 / q)

    def Cp(t):
        return (t ** (beta - 1.0 + 1.0 / q) * b(t) / k) ** p

    J = _checked_integral(lambda s: l(s) ** p, prob.T, "l^p")
    return _Parts(tr, lambda t: a(t) ** p, Cp, J, _zero_a_notes(prob, tr))


def _thm24_parts(prob: InequalityProblem, tr: OmegaTransform | None = None) -> _Parts:
    beta = prob.require_beta()
    if not prob.alpha > prob.delta >= 0.0:
        raise ProblemError(f"alpha > delta >= 0 is required (alpha={prob.alpha}, delta={prob.delta})")
    prob.validate_coefficients(constant_ab=True)
    p, q = prob.p, prob.q
    tr = tr or OmegaTransform(prob.omega, p, PTH)
    a, b = constant_value(prob.a), constant_value(prob.b)
    l = _expr_fn(prob.l)
    k = (q * (beta - 1.0) + 1.0) ** (1.0 / q)
    e = prob.alpha - prob.delta + beta - 1.0 + 1.0 / q

    def Cp(t):
        return (b * t**e / k) ** p

    J = _checked_integral(lambda s: l(s) ** p, prob.T, "l^p")
    return _Parts(tr, lambda t: np.full(np.shape(t), a**p), Cp, J, _zero_a_notes(prob, tr))


def _thm25_parts(prob: InequalityProblem, tr: OmegaTransform | None = None) -> _Parts:
    beta = prob.require_beta()
    prob.validate_coefficients()
    if constant_value(prob.a) is None:
        raise ProblemError("a must be a constant for this inequality")
    p, q = prob.p, prob.q
    tr = tr or OmegaTransform(prob.omega, p, PTH)
    a = constant_value(prob.a)
    b, l = _expr_fn(prob.b), _expr_fn(prob.l)
    k = (q * beta - q + 1.0) ** (1.0 / q)

    def Cp(t):
        return (2.0 ** (1.0 / q) * b(t) * t ** (beta - 1.0 + 1.0 / q) / k) ** p

    J = _checked_integral(lambda s: s ** (p * (1.0 - beta)) * l(s) ** p, prob.T, "s^(p(1-beta)) l^p")
    return _Parts(tr, lambda t: np.full(np.shape(t), a**p), Cp, J, _zero_a_notes(prob, tr))


_PARTS = {
    "thm21": _thm21_parts,
    "thm23": _thm23_parts,
    "thm24": _thm24_parts,
    "thm25": _thm25_parts,
}


def thm21_bound(prob: InequalityProblem, tr: OmegaTransform | None = None) -> BoundCurve:
    r"""Bound for :math:`u \le a(t) + b(t)(\int_0^t l\,\omega(u))^{1/p}`."""
    return _curve(_thm21_parts(prob, tr), prob, "thm21", 0.0)


def thm23_bound(prob: InequalityProblem, tr: OmegaTransform | None = None) -> BoundCurve:
    r"""Bound for :math:`u \le a(t) + b(t)\int_0^t (t-s)^{\beta-1} l\,\omega(u)`."""
    return _curve(_thm23_parts(prob, tr), prob, "thm23", 0.0)


def thm24_bound(prob: InequalityProblem, tr: OmegaTransform | None = None) -> BoundCurve:
    r"""Bound for :math:`u \le a t^{-\alpha} + b t^{-\delta}\int_0^t (t-s)^{\beta-1} f(s, u)`."""
    return _curve(_thm24_parts(prob, tr), prob, "thm24", -prob.alpha)


def thm25_bound(prob: InequalityProblem, tr: OmegaTransform | None = None) -> BoundCurve:
    r"""Bound for :math:`u \le a t^{\beta-1} + b(t)\int_0^t (t-s)^{\beta-1} f(s, u)`."""
    beta = prob.require_beta()
    return _curve(_thm25_parts(prob, tr), prob, "thm25", beta - 1.0)


def cor22_bound(prob: InequalityProblem) -> BoundCurve:
    r"""Closed-form bound for :math:`u \le a(t) + b(t)(\int_0^t l u^{p\gamma})^{1/p}`."""
    g = prob.require_gamma()
    prob.validate_coefficients()
    p = prob.p
    a, b, l = _expr_fn(prob.a), _expr_fn(prob.b), _expr_fn(prob.l)
    J = _checked_integral(lambda s: l(s), prob.T, "l")
    pre = 2.0 ** (1.0 - 1.0 / p)

    if g == 1.0:
        def inner(t):
            return pre * a(t) * np.exp(2.0 ** (p - 1.0) * b(t) ** p / p * J(t))
    else:
        def inner(t):
            base = a(t) ** (p * (1.0 - g)) + (1.0 - g) * 2.0 ** ((p - 1.0) * g) * b(t) ** p * J(t)
            return pre * base ** (1.0 / (p * (1.0 - g)))

    return BoundCurve(inner, prob.T, "cor22", 0.0)


def cor26_bound(prob: InequalityProblem) -> BoundCurve:
    r"""Closed-form bound for :math:`u \le a t^{\beta-1} + b(t)\int_0^t (t-s)^{\beta-1} l u^\gamma`."""
    beta = prob.require_beta()
    g = prob.require_gamma()
    prob.validate_coefficients()
    if constant_value(prob.a) is None:
        raise ProblemError("a must be a constant for this inequality")
    p, q = prob.p, prob.q
    a = constant_value(prob.a)
    b, l = _expr_fn(prob.b), _expr_fn(prob.l)
    k = (q * beta - q + 1.0) ** (1.0 / q)
    pre = 2.0 ** (1.0 - 1.0 / p)

    def cp(t):
        return (2.0 ** (1.0 / q) * b(t) * t ** (beta - 1.0 + 1.0 / q) / k) ** p

    e = p * (1.0 - g) * (1.0 - beta)
    J = _checked_integral(lambda s: s**e * l(s) ** p, prob.T, "s^(p(1-gamma)(1-beta)) l^p")

    if g == 1.0:
        def inner(t):
            return pre * a * np.exp(2.0 ** (p - 1.0) * cp(t) / p * J(t))
    else:
        def inner(t):
            base = a ** (p * (1.0 - g)) + (1.0 - g) * 2.0 ** ((p - 1.0) * g) * cp(t) * J(t)
            return pre * base ** (1.0 / (p * (1.0 - g)))

    return BoundCurve(inner, prob.T, "cor26", beta - 1.0)


BOUNDS = {
    "thm21": thm21_bound,
    "cor22": cor22_bound,
    "thm23": thm23_bound,
    "thm24": thm24_bound,
    "thm25": thm25_bound,
    "cor26": cor26_bound,
}


def compute_bound(prob: InequalityProblem, theorem: str) -> BoundCurve:
    try:
        fn = BOUNDS[theorem]
    except KeyError:
        raise ProblemError(f"unknown theorem {theorem!r}; choose from {sorted(BOUNDS)}") from None
    return fn(prob)


# }}}
