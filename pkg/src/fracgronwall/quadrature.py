r"""Quadrature for integrands with power-type endpoint singularities.

Two tools live here:

* :func:`cumulative_integral` computes :math:`\int_0^t g(s)\,ds` for many
  targets when :math:`g` may be weakly singular at the origin.
* :class:`KernelQuadrature` computes the Abel-type integrals

  .. math::

      \int_0^t (t - s)^{\beta - 1} F(s)\, ds

  for a fixed set of targets, where :math:`F` is smooth on each cell of a
  given partition (it may have kinks at the cell edges) and behaves like
  :math:`s^\lambda` near the origin. The quadrature points do not depend on
  :math:`F`, so the rule is assembled once and then applied to many
  integrands. This is what Picard iterations need.
"""

from __future__ import annotations

import functools
import math
from collections.abc import Callable

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import IntegrabilityError

# geometric ratio above which a panel is split so that s^lambda stays smooth
PANEL_RATIO = 1.5


@functools.cache
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on ``[0, 1]``."""
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


@functools.cache
def gauss_jacobi_right(n: int, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``[0, 1]`` for the weight ``(1 - y)^(beta - 1)``."""
    if beta == 1.0:
        return gauss_legendre(n)
    x, w = roots_jacobi(n, beta - 1.0, 0.0)
    return 0.5 * (x + 1.0), w * 2.0 ** (-beta)


def grading_exponent(lam: float) -> int:
    """Substitution power ``k`` in ``s = c sigma^k`` that smooths ``s^lam``."""
    if not lam > -1.0:
        raise IntegrabilityError(f"integrand behaves like s^{lam:.4g} at 0, not integrable")
    return max(1, math.ceil(4.0 / (1.0 + min(lam, 0.0))))


@functools.cache
def _graded_rule(k: int) -> tuple[np.ndarray, np.ndarray]:
    # s = sigma^k on [0, 1] with GL16 on [0, 0.7] and [0.7, 1]
    x, w = gauss_legendre(16)
    sig = np.concatenate([0.7 * x, 0.7 + 0.3 * x])
    ws = np.concatenate([0.7 * w, 0.3 * w])
    return sig**k, ws * k * sig ** (k - 1)


def graded_points(c: float, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Points and weights for ``int_0^c F ds`` with ``F ~ s^lam`` at 0."""
    s, w = _graded_rule(k)
    return c * s, c * w


def geometric_panels(a: np.ndarray, b: np.ndarray, ratio: float = PANEL_RATIO):
    """Split each ``[a_i, b_i]`` (``a_i > 0``) into panels of ratio at most ``ratio``.

    Returns the panel edges ``(lo, hi)`` and the index of the parent interval.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = np.maximum(1, np.ceil(np.log(b / a) / math.log(ratio) - 1e-12)).astype(int)
    parent = np.repeat(np.arange(a.size), m)
    start = np.cumsum(m) - m
    j = np.arange(parent.size) - start[parent]
    q = (b / a)[parent] ** (1.0 / m[parent])
    lo = a[parent] * q**j
    hi = np.where(j == m[parent] - 1, b[parent], lo * q)
    return lo, hi, parent


def _panel_points(lo, hi, n):
    x, w = gauss_legendre(n)
    h = (hi - lo)[:, None]
    return (lo[:, None] + h * x).ravel(), (h * w).ravel()


def cumulative_integral(
    g: Callable[[np.ndarray], np.ndarray],
    t,
    *,
    order: int = 10,
) -> np.ndarray:
    r"""Values of :math:`\int_0^{t_i} g(s)\,ds` for an array of targets.

    The piece from 0 to the smallest positive target is integrated in the
    variable :math:`y = -\ln s`, where sums of powers :math:`s^\lambda` become
    smooth exponentials, up to :math:`s \approx 10^{-300}`; the remainder is
    the power-law tail :math:`s\,g(s) / (\lambda + 1)`. The increments
    between consecutive targets use Gauss-Legendre panels of bounded
    geometric ratio.
    """
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    if np.any(flat < 0):
        raise ValueError("targets must be nonnegative")
    out = np.zeros_like(flat)
    pos = np.unique(flat[flat > 0])
    if pos.size == 0:
        return out.reshape(t.shape)

    acc = np.empty_like(pos)
    acc[0] = _initial_piece(g, pos[0], order)
    if pos.size > 1:
        lo, hi, parent = geometric_panels(pos[:-1], pos[1:])
        s, w = _panel_points(lo, hi, order)
        gv = np.asarray(g(s), dtype=float) * w
        inc = np.bincount(np.repeat(parent, order), weights=gv, minlength=pos.size - 1)
        acc[1:] = acc[0] + np.cumsum(inc)
    if not np.all(np.isfinite(acc)):
        raise IntegrabilityError("the integrand is not finite on the integration range")

    out[flat > 0] = acc[np.searchsorted(pos, flat[flat > 0])]
    return out.reshape(t.shape)


# smallest s reached in the logarithmic variable
_Y_END = 690.0
_Y_PANEL = 1.0


def _initial_piece(g, t0: float, order: int) -> float:
    y0 = -math.log(t0)
    y1 = max(_Y_END, y0 + 10.0)
    n = math.ceil((y1 - y0) / _Y_PANEL)
    x, w = gauss_legendre(order)
    edges = y0 + (y1 - y0) * np.arange(n + 1) / n
    h = np.diff(edges)[:, None]
    y = (edges[:-1, None] + h * x).ravel()
    s = np.exp(-y)
    with np.errstate(all="ignore"):
        vals = (np.asarray(g(s), dtype=float) * s * (h * w).ravel()).reshape(n, order)
    # intermediate overflow (e.g. a power of a huge value) ends the range early
    finite = np.all(np.isfinite(vals), axis=1)
    m = n if np.all(finite) else int(np.argmin(finite))
    if m < min(n, 5):
        raise IntegrabilityError(f"the integrand is not finite near s={math.exp(-edges[m]):.3g}")
    body = math.fsum(vals[:m].ravel())

    # tail below s_end from the local power law there
    s_end = math.exp(-edges[m])
    se = np.array([s_end, s_end * math.e])
    with np.errstate(all="ignore"):
        ge = np.asarray(g(se), dtype=float)
    if np.all(ge == 0):
        return body
    if not np.all(np.isfinite(ge)) or ge[0] == 0 or np.sign(ge[0]) != np.sign(ge[1]):
        raise IntegrabilityError("the integrand has no power-law behaviour near 0")
    lam = float(np.log(ge[1] / ge[0]))
    if lam <= -1.0 + 1e-3:
        raise IntegrabilityError(f"the integrand behaves like s^{lam:.4g} near 0, not integrable")
    return body + float(ge[0]) * s_end / (lam + 1.0)


class KernelQuadrature:
    r"""Assembled rule for :math:`\int_0^{t_i} (t_i - s)^{\beta-1} F(s)\,ds`.

    :arg edges: increasing cell edges starting at 0; ``F`` is assumed smooth
        inside each cell.
    :arg beta: kernel exponent in ``(0, 1]``.
    :arg targets: increasing positive targets inside ``(0, edges[-1]]``.
    :arg lam: exponent of the ``s^lam`` behaviour of ``F`` at 0 (``> -1``).
    :arg near: number of cells next to each target that get a dedicated rule.

    Far from the target the kernel is smooth, so those cells share one set of
    points for all targets and the kernel weights form a (blocked) lower
    triangular matrix. Near the target the partial cell uses Gauss-Jacobi for
    the endpoint singularity and neighbouring cells use Gauss-Legendre with
    splitting that keeps every panel no wider than its distance to the target.
    """

    def __init__(
        self,
        edges,
        beta: float,
        targets,
        lam: float = 0.0,
        *,
        near: int = 4,
        far_order: int = 6,
        cache_bytes: float = 512e6,
        block: int = 256,
    ) -> None:
        edges = np.asarray(edges, dtype=float)
        targets = np.asarray(targets, dtype=float)
        if edges[0] != 0.0 or np.any(np.diff(edges) <= 0):
            raise ValueError("edges must start at 0 and increase strictly")
        if np.any(np.diff(targets) < 0) or targets.size == 0 or targets[0] <= 0:
            raise ValueError("targets must be positive and nondecreasing")
        if targets[-1] > edges[-1] * (1 + 1e-14):
            raise ValueError("targets must not exceed the last edge")
        if not 0.0 < beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {beta}")

        self.beta = float(beta)
        self.targets = targets
        self.k = grading_exponent(lam)
        self.near = near

        # shared points: cell 0 graded, other cells geometric GL panels
        s0, w0 = graded_points(edges[1], self.k)
        lo, hi, parent = geometric_panels(edges[1:-1], edges[2:])
        s1, w1 = _panel_points(lo, hi, far_order)
        cell = np.concatenate([np.zeros(s0.size, int), np.repeat(parent + 1, far_order)])
        self._shared_s = np.concatenate([s0, s1])
        self._shared_w = np.concatenate([w0, w1])
        cell_start = np.searchsorted(cell, np.arange(edges.size))

        # cell containing each target: edges[c] < t <= edges[c+1]
        c = np.clip(np.searchsorted(edges, targets, side="left") - 1, 0, edges.size - 2)
        first_near = np.maximum(0, c - near + 1)
        self._nfar = cell_start[first_near]

        sp_s, sp_w, sp_i = [], [], []
        for i, (t, c0, c1) in enumerate(zip(targets, first_near, c)):
            ss, ww = [], []
            for j in range(c0, c1 + 1):
                self._special(edges[j], min(edges[j + 1], t), t, ss, ww)
            s_arr = np.concatenate(ss)
            sp_s.append(s_arr)
            sp_w.append(np.concatenate(ww))
            sp_i.append(np.full(s_arr.size, i))
        self._sp_s = np.concatenate(sp_s)
        self._sp_w = np.concatenate(sp_w)
        self._sp_i = np.concatenate(sp_i)

        self.points = np.concatenate([self._shared_s, self._sp_s])
        self._nshared = self._shared_s.size

        self._blocks = [
            (i0, min(i0 + block, targets.size)) for i0 in range(0, targets.size, block)
        ]
        total = sum((i1 - i0) * int(self._nfar[i1 - 1]) for i0, i1 in self._blocks)
        self._cache = None
        if total * 8 <= cache_bytes:
            self._cache = [self._block_matrix(i0, i1) for i0, i1 in self._blocks]

    def _special(self, a, b, t, ss, ww):
        beta = self.beta
        if b <= a:
            return
        if a == 0.0:
            cc = min(b, 0.25 * t)
            s, w = graded_points(cc, self.k)
            ss.append(s)
            ww.append(w * (t - s) ** (beta - 1.0))
            if cc < b:
                self._special(cc, b, t, ss, ww)
            return
        if b >= t:
            a2 = max(a, t / PANEL_RATIO)
            y, wy = gauss_jacobi_right(12, beta)
            h = t - a2
            ss.append(a2 + h * y)
            ww.append(wy * h**beta)
            if a2 > a:
                self._special(a, a2, t, ss, ww)
            return
        if b > PANEL_RATIO * a:
            m = math.sqrt(a * b)
            self._special(a, m, t, ss, ww)
            self._special(m, b, t, ss, ww)
            return
        if b - a > t - b:
            m = 0.5 * (a + b)
            self._special(a, m, t, ss, ww)
            self._special(m, b, t, ss, ww)
            return
        x, w = gauss_legendre(8)
        s = a + (b - a) * x
        ss.append(s)
        ww.append((b - a) * w * (t - s) ** (beta - 1.0))

    def _block_matrix(self, i0: int, i1: int) -> np.ndarray:
        n = int(self._nfar[i1 - 1])
        s = self._shared_s[:n]
        d = self.targets[i0:i1, None] - s[None, :]
        mask = np.arange(n)[None, :] < self._nfar[i0:i1, None]
        d = np.where(mask, d, 1.0)
        m = d ** (self.beta - 1.0) if self.beta != 1.0 else np.ones_like(d)
        m *= self._shared_w[:n]
        m[~mask] = 0.0
        return m

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Integrals for ``F`` given by its values at :attr:`points`."""
        values = np.asarray(values, dtype=float)
        fs = values[: self._nshared]
        out = np.bincount(
            self._sp_i, weights=self._sp_w * values[self._nshared :], minlength=self.targets.size
        )
        for b, (i0, i1) in enumerate(self._blocks):
            n = int(self._nfar[i1 - 1])
            if n == 0:
                continue
            m = self._cache[b] if self._cache is not None else self._block_matrix(i0, i1)
            out[i0:i1] += m @ fs[:n]
        return out

    def integrate(self, F: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Integrals for a vectorized callable ``F``."""
        return self.apply(F(self.points))
