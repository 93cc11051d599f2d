r"""Riemann-Liouville operators on graded meshes and related kernel estimates.

.. math::

    I^\beta \varphi(t) = \frac{1}{\Gamma(\beta)} \int_0^t (t - s)^{\beta - 1} \varphi(s)\, ds,
    \qquad
    D^\beta \varphi(t) = \frac{d}{dt} I^{1 - \beta} \varphi(t).

Functions are passed either as expressions in ``t`` or as
:class:`WeightedSample` objects holding ``t^w f(t)`` at mesh nodes. Samples are
interpolated linearly in the weighted variable, and the kernel is integrated
against that interpolant by :class:`~fracgronwall.quadrature.KernelQuadrature`.
"""

from __future__ import annotations

import warnings
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, IntegrabilityError, ProblemError
from .expr import Expr, as_expr, evaluate
from .quadrature import KernelQuadrature
from .special import gamma


# {{{ meshes and samples


@dataclass(frozen=True)
class GradedMesh:
    r"""Nodes :math:`t_i = T (i / N)^r` for :math:`i = 0, \dots, N`."""

    T: float
    N: int
    r: float = 1.0

    def __post_init__(self) -> None:
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if self.N < 2:
            raise ValueError(f"N must be at least 2, got {self.N}")
        if not self.r >= 1.0:
            raise ValueError(f"grading exponent must be >= 1, got {self.r}")

    @classmethod
    def for_beta(cls, T: float, N: int, beta: float) -> GradedMesh:
        """Mesh with the default grading ``r = 2 / beta``."""
        return cls(T, N, 2.0 / beta)

    @property
    def nodes(self) -> np.ndarray:
        t = self.T * (np.arange(self.N + 1) / self.N) ** self.r
        t[-1] = self.T
        return t

    def refined(self) -> GradedMesh:
        """The mesh with ``2N`` cells; its even nodes are the nodes of ``self``."""
        return GradedMesh(self.T, 2 * self.N, self.r)


@dataclass(frozen=True)
class WeightedSample:
    r"""Samples :math:`v_i = t_i^{w} f(t_i)` on a mesh.

    ``values[0]`` holds the limit of :math:`t^w f(t)` at :math:`0^+`.
    """

    mesh: GradedMesh
    weight_exponent: float
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.mesh.N + 1,):
            raise ValueError(f"expected {self.mesh.N + 1} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("weighted values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def weighted(self, s) -> np.ndarray:
        """Piecewise-linear interpolant of the weighted values."""
        return np.interp(s, self.mesh.nodes, self.values)

    def __call__(self, s) -> np.ndarray:
        """The unweighted function ``s^(-w) v(s)`` for ``s > 0``."""
        s = np.asarray(s, dtype=float)
        return s ** (-self.weight_exponent) * self.weighted(s)

    @property
    def unweighted(self) -> np.ndarray:
        """``f(t_i)`` at the nodes ``i >= 1``."""
        t = self.mesh.nodes[1:]
        return t ** (-self.weight_exponent) * self.values[1:]


def _power_behaviour(f: Callable[[np.ndarray], np.ndarray], T: float) -> tuple[float, float]:
    """``(lam, c)`` with ``f(s) ~ c s^lam`` as ``s -> 0``; ``(0, 0)`` if ``f`` vanishes."""
    s = T * np.array([1e-14, 1e-13, 1e-12])
    v = np.asarray(f(s), dtype=float)
    if np.all(v == 0):
        return 0.0, 0.0
    if np.any(v == 0) or np.any(np.sign(v) != np.sign(v[0])):
        return 0.0, float(v[0])
    lam = float(np.polyfit(np.log(s), np.log(np.abs(v)), 1)[0])
    snapped = round(lam * 120) / 120
    if abs(lam - snapped) < 1e-6:
        lam = snapped
    return lam, float(v[0] * s[0] ** (-lam))


def _as_function(f: WeightedSample | Expr | str | float, T: float):
    """Return ``(F, lam, c)`` for an input function."""
    if isinstance(f, WeightedSample):
        return f, -f.weight_exponent, float(f.values[0])
    e = as_expr(f, ("t",))

    def F(s):
        return np.asarray(evaluate(e, t=s), dtype=float) * np.ones_like(s)

    lam, c = _power_behaviour(F, T)
    return F, lam, c


# }}}


# {{{ fractional integral


def frac_integral_at(
    beta: float,
    f: WeightedSample | Expr | str | float,
    t,
    mesh: GradedMesh | None = None,
) -> np.ndarray:
    r""":math:`I^\beta f` at arbitrary points ``0 < t <= T``."""
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"beta must lie in (0, 1], got {beta}")
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    if isinstance(f, WeightedSample):
        mesh = f.mesh
    if mesh is None:
        T = float(flat.max())
        mesh = GradedMesh(T, 256, 2.0 / beta)
    F, lam, _ = _as_function(f, mesh.T)
    if lam <= -1.0:
        raise IntegrabilityError(f"integrand behaves like s^{lam:.4g} at 0, not integrable")

    order = np.argsort(flat, kind="stable")
    ts = flat[order]
    out = np.zeros_like(ts)
    pos = ts > 0
    if np.any(pos):
        kq = KernelQuadrature(mesh.nodes, beta, ts[pos], lam=lam)
        out[pos] = kq.integrate(F) / gamma(beta)
    res = np.empty_like(out)
    res[order] = out
    return res.reshape(t.shape)


def frac_integral(
    beta: float,
    f: WeightedSample | Expr | str | float,
    mesh: GradedMesh | None = None,
) -> WeightedSample:
    r""":math:`I^\beta f` at the mesh nodes as a :class:`WeightedSample`.

    If ``f ~ c s^lam`` near 0 then ``I^beta f ~ c Gamma(lam+1)/Gamma(lam+beta+1)
    t^(lam+beta)``; the result uses the weight ``t^(-(lam+beta))`` so that the
    weighted values stay bounded and tend to that constant.
    """
    if isinstance(f, WeightedSample):
        mesh = f.mesh
    if mesh is None:
        raise ValueError("a mesh is required for expression input")
    _, lam, c = _as_function(f, mesh.T)
    w = -(lam + beta) if c != 0.0 else 0.0
    t = mesh.nodes
    vals = np.empty_like(t)
    vals[1:] = frac_integral_at(beta, f, t[1:], mesh) * t[1:] ** w
    vals[0] = c * gamma(lam + 1.0) / gamma(lam + beta + 1.0) if c != 0.0 else 0.0
    return WeightedSample(mesh, w, vals)


# }}}


# {{{ fractional derivative


def frac_derivative(
    beta: float,
    f: WeightedSample | Expr | str | float,
    t=None,
    mesh: GradedMesh | None = None,
) -> np.ndarray:
    r""":math:`D^\beta f = \frac{d}{dt} I^{1-\beta} f` at interior points.

    Centered differences of :math:`g = I^{1-\beta} f` with step ``h`` equal to
    half the smaller adjacent mesh spacing (at most ``t/64``) and ``h/2``,
    combined by Richardson
    extrapolation. ``t`` defaults to all interior mesh nodes; the first and
    last node are rejected.
    """
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    if isinstance(f, WeightedSample):
        mesh = f.mesh
    if mesh is None:
        raise ValueError("a mesh is required")
    nodes = mesh.nodes
    if t is None:
        t = nodes[1:-1]
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    if np.any(flat <= nodes[0]) or np.any(flat >= nodes[-1]):
        raise DomainError("the derivative is only evaluated strictly inside (0, T)")

    k = np.clip(np.searchsorted(nodes, flat), 1, nodes.size - 1)
    left = flat - nodes[k - 1]
    right = nodes[k] - flat
    at_node = np.isclose(right, 0.0, rtol=0, atol=1e-15 * nodes[-1])
    kk = np.where(at_node, np.minimum(k + 1, nodes.size - 1), k)
    right = np.where(at_node, nodes[kk] - flat, right)
    left = np.where(left > 0, left, right)
    # the step also stays small relative to t, where g behaves like a power of t
    h = np.minimum(0.5 * np.minimum(left, right), flat / 64.0)

    pts = np.concatenate([flat - h, flat + h, flat - h / 2, flat + h / 2])
    g = frac_integral_at(1.0 - beta, f, pts, mesh)
    n = flat.size
    d1 = (g[n : 2 * n] - g[:n]) / (2 * h)
    d2 = (g[3 * n :] - g[2 * n : 3 * n]) / h
    return ((4.0 * d2 - d1) / 3.0).reshape(t.shape)


# }}}


# {{{ monotone helper and kernel estimates


def phi(mu_exp: float, t):
    r""":math:`\varphi(t) = (t^\mu - 1) / (t - 1)^\mu` for ``t > 1``.

    Written as ``expm1(mu log1p(d)) / d^mu`` with ``d = t - 1`` so that it stays
    accurate as ``t -> 1+``, where it behaves like ``mu d^(1 - mu)``.
    """
    if not 0.0 < mu_exp < 1.0:
        raise DomainError(f"mu must lie in (0, 1), got {mu_exp}")
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 1.0)):
        raise DomainError("phi is defined for t > 1")
    d = t - 1.0
    r = np.expm1(mu_exp * np.log1p(d)) / d**mu_exp
    return float(r) if r.ndim == 0 else r


def _quad(f, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        res = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=400, full_output=1, **kw)
    val, err = res[0], res[1]
    if not np.isfinite(val) or (len(res) > 3 and err > 1e-6 * max(abs(val), 1e-300)):
        raise IntegrabilityError(f"integral over ({a:.6g}, {b:.6g}) did not converge")
    return val


def _rho_fn(rho: Expr | str | float):
    e = as_expr(rho, ("t",))

    def f(s):
        return float(evaluate(e, t=s))

    return e, f


def _admissible(beta: float, p: float) -> float:
    if not 0.0 < beta < 1.0:
        raise ProblemError(f"beta must lie in (0, 1), got {beta}")
    if not p > 1.0 / beta:
        raise ProblemError(f"the condition p > 1/beta is violated (p={p}, beta={beta})")
    return p / (p - 1.0)


def _kernel_integral(beta: float, rho, t: float) -> float:
    # int_0^t (t / (t - s))^(1 - beta) rho(s) ds, split so the singular half uses QAWS
    if t == 0.0:
        return 0.0
    m = 0.5 * t
    left = _quad(lambda s: (t / (t - s)) ** (1.0 - beta) * rho(s), 0.0, m)
    right = _quad(lambda s: rho(s), m, t, weight="alg", wvar=(0.0, beta - 1.0))
    return left + t ** (1.0 - beta) * right


def _weighted_norm(beta: float, p: float, rho, a: float, b: float) -> float:
    if b <= a:
        return 0.0
    lam = _exponent_at_zero(rho) if a == 0.0 else 0.0
    if p * (1.0 - beta + lam) <= -1.0 + 1e-9:
        raise IntegrabilityError("s^(1-beta) rho(s) is not in L^p near 0")
    return _quad(lambda s: s ** (p * (1.0 - beta)) * abs(rho(s)) ** p, a, b) ** (1.0 / p)


def _exponent_at_zero(rho) -> float:
    s = np.array([1e-14, 1e-12])
    v = np.abs([rho(x) for x in s])
    if np.any(v == 0):
        return 0.0
    return float(np.log(v[1] / v[0]) / np.log(s[1] / s[0]))


def kernel_bound(beta: float, p: float, rho: Expr | str | float, t: float) -> tuple[float, float]:
    r"""Both sides of the Hölder estimate of the weakly singular kernel integral.

    .. math::

        \left|\int_0^t \left(\frac{t}{t-s}\right)^{1-\beta} \rho(s)\, ds\right|
        \le \frac{2^{1/q} t^{\beta - 1 + 1/q}}{(q\beta - q + 1)^{1/q}}
        \left(\int_0^t s^{p(1-\beta)} |\rho(s)|^p\, ds\right)^{1/p}
    """
    q = _admissible(beta, p)
    if not 0.0 < t <= 1.0:
        raise DomainError(f"t must lie in (0, 1], got {t}")
    e, rf = _rho_fn(rho)
    lhs = abs(_kernel_integral(beta, rf, t))
    k = 2.0 ** (1.0 / q) * t ** (beta - 1.0 + 1.0 / q) / (q * beta - q + 1.0) ** (1.0 / q)
    rhs = k * _weighted_norm(beta, p, rf, 0.0, t)
    return lhs, rhs


def kernel_diff_bound(
    beta: float, p: float, rho: Expr | str | float, t1: float, t2: float
) -> tuple[float, float]:
    r"""Both sides of the two-point (equicontinuity) kernel estimate.

    The right side is

    .. math::

        \frac{2^{1/q} (t_2 - t_1)^{\beta - 1 + 1/q}}{(q\beta - q + 1)^{1/q}}
        \|s^{1-\beta}\rho\|_{L^p(t_1, t_2)}
        + \left(\frac{(t_2 - t_1)^{e} + t_1^{e} - t_2^{e}}{q\beta - q + 1}\right)^{1/q}
        \|s^{1-\beta}\rho\|_{L^p(0, t_1)},
        \qquad e = 1 + q(\beta - 1).
    """
    q = _admissible(beta, p)
    if not 0.0 < t1 <= t2 <= 1.0:
        raise DomainError(f"0 < t1 <= t2 <= 1 is required, got t1={t1}, t2={t2}")
    e, rf = _rho_fn(rho)
    if t1 == t2:
        return 0.0, 0.0
    lhs = abs(_kernel_integral(beta, rf, t2) - _kernel_integral(beta, rf, t1))
    d = q * beta - q + 1.0
    ex = 1.0 + q * (beta - 1.0)
    first = (
        2.0 ** (1.0 / q) * (t2 - t1) ** (beta - 1.0 + 1.0 / q) / d ** (1.0 / q)
        * _weighted_norm(beta, p, rf, t1, t2)
    )
    bracket = max((t2 - t1) ** ex + t1**ex - t2**ex, 0.0)
    second = (bracket / d) ** (1.0 / q) * _weighted_norm(beta, p, rf, 0.0, t1)
    return lhs, first + second


# }}}


__all__ = [
    "GradedMesh",
    "WeightedSample",
    "frac_derivative",
    "frac_integral",
    "frac_integral_at",
    "kernel_bound",
    "kernel_diff_bound",
    "phi",
]
