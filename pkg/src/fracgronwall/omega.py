r"""The :math:`\Omega`-transform of a nonlinearity :math:`\omega`.

Given a nondecreasing, nonnegative :math:`\omega` and :math:`p \ge 1`, define

.. math::

    \mu(t) = \omega\left(2^{1 - 1/p} t^{1/p}\right) \quad \text{(plain)},
    \qquad
    \mu(t) = \omega^p\left(2^{1 - 1/p} t^{1/p}\right) \quad \text{(p-th)},

and :math:`\Omega(x) = \int_1^x \mathrm{d}t / \mu(t)`. This module evaluates
:math:`\mu`, :math:`\Omega`, :math:`\Omega^{-1}` and the supremum of the range
of :math:`\Omega`, which is the right end of the domain of
:math:`\Omega^{-1}`.

Pure power laws :math:`\omega(u) = C u^g` are detected numerically and use
exact closed forms. Everything else goes through a monotone table of
:math:`\Omega` on a geometric grid plus per-point Gauss-Legendre corrections.
"""

from __future__ import annotations

import math
import threading

import numpy as np

from .errors import DomainError, InconclusiveError
from .expr import Expr, as_expr, evaluate_masked
from .quadrature import gauss_legendre

PLAIN = "plain"
PTH = "p-th"

X_MIN = 1e-12
X_MAX = 1e12
X_LIMIT = 1e300
KNOTS = 2049

TAIL_FIT = (1e3, 1e6)
TAIL_BAND = 0.05


def _power_law_fit(omega: Expr) -> tuple[float, float] | None:
    """Return ``(C, g)`` when ``omega(u) == C u^g`` to rounding, else ``None``."""
    u = np.array([1e-6, 1e-3, 0.3, 1.0, 2.0, 10.0, 1e3, 1e6])
    v, ok = evaluate_masked(omega, u=u)
    if not np.all(ok) or np.any(v <= 0):
        return None
    c = v[3]
    g = math.log(v[4] / c) / math.log(2.0)
    if abs(g) > 50:
        return None
    pred = c * u**g
    if np.max(np.abs(v / pred - 1.0)) > 1e-12:
        return None
    # snap exponents that are rationals with small denominators
    for den in range(1, 25):
        num = round(g * den)
        if abs(g - num / den) < 1e-12:
            g = num / den
            break
    return float(c), float(g)


class OmegaTransform:
    """Numeric :math:`\\Omega`, its inverse and the supremum of its range.

    :arg omega: expression in ``u``.
    :arg p: exponent ``p >= 1``.
    :arg power_mode: ``"plain"`` or ``"p-th"``.
    :arg closed_form: use exact formulas when ``omega`` is a pure power law.

    Instances are safe to share between threads; the only mutable state is the
    on-demand growth of the table above ``1e12``, which is guarded by a lock.
    """

    def __init__(
        self,
        omega: Expr | str | float,
        p: float = 1.0,
        power_mode: str = PLAIN,
        *,
        closed_form: bool = True,
    ) -> None:
        if power_mode not in (PLAIN, PTH):
            raise ValueError(f"power_mode must be {PLAIN!r} or {PTH!r}, got {power_mode!r}")
        if not p >= 1.0:
            raise DomainError(f"p must be >= 1, got {p}")

        self.omega = as_expr(omega, ("u",))
        self.p = float(p)
        self.power_mode = power_mode
        self.notes: list[str] = []
        self._lock = threading.Lock()

        self._validate_omega()

        fit = _power_law_fit(self.omega) if closed_form else None
        if fit is not None:
            c, g = fit
            if power_mode == PLAIN:
                self.power_law = (c * 2.0 ** ((1.0 - 1.0 / p) * g), g / p)
            else:
                self.power_law = (c**p * 2.0 ** ((p - 1.0) * g), g)
        else:
            self.power_law = None
            self._build_table()

        self._sup: float | None = None

    # {{{ mu

    def _validate_omega(self) -> None:
        u = np.geomspace(1e-9, 1e9, 400)
        v, ok = evaluate_masked(self.omega, u=u)
        if not np.all(ok):
            bad = u[~ok][0]
            raise DomainError(f"omega cannot be evaluated at u={bad:.6g}")
        if np.any(v < 0):
            raise DomainError(f"omega is negative at u={u[v < 0][0]:.6g}")
        dv = np.diff(v)
        if np.any(dv < -1e-12 * np.abs(v[1:])):
            i = int(np.argmax(dv < -1e-12 * np.abs(v[1:])))
            raise DomainError(f"omega is decreasing near u={u[i]:.6g}")
        if np.any(v == 0):
            self.notes.append(
                "omega vanishes near 0; Omega is taken as -inf where the "
                "integral of 1/mu diverges"
            )

    def mu(self, t):
        """:math:`\\mu(t)` for ``t > 0``; overflow maps to ``inf``."""
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("mu is only evaluated for t > 0")
        p = self.p
        if self.power_law is not None:
            c, kappa = self.power_law
            with np.errstate(over="ignore"):
                r = c * t**kappa
            return float(r) if r.ndim == 0 else r
        with np.errstate(over="ignore"):
            u = 2.0 ** (1.0 - 1.0 / p) * t ** (1.0 / p)
        v, ok = evaluate_masked(self.omega, u=u)
        if not np.all(ok | (u > 1e3)):
            bad = u[np.asarray(~ok & (u <= 1e3))]
            raise DomainError(f"omega cannot be evaluated at u={float(np.ravel(bad)[0]):.6g}")
        v = np.where(ok, v, np.inf)
        if self.power_mode == PTH:
            with np.errstate(over="ignore"):
                v = v**p
        return float(v) if v.ndim == 0 else v

    # }}}

    # {{{ table

    def _segment(self, a, b, n=10):
        """``int_a^b dt / mu`` by Gauss-Legendre in ``ln t`` (vectorized, a, b > 0)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        x, w = gauss_legendre(n)
        la, lb = np.log(a), np.log(b)
        h = (lb - la)[..., None]
        t = np.exp(la[..., None] + h * x)
        m = self.mu(t)
        with np.errstate(divide="ignore"):
            f = np.where(m > 0, t / m, np.inf)
        return np.sum(f * w * h, axis=-1)

    def _build_table(self) -> None:
        lo = math.log10(X_MIN)
        hi = math.log10(X_MAX)
        x = 10.0 ** np.linspace(lo, hi, KNOTS)
        x[(KNOTS - 1) // 2] = 1.0
        self._ratio = x[1] / x[0]

        m = self.mu(x)
        zero = m <= 0
        seg = self._refined_segments(x[:-1], x[1:])
        # a segment touching a zero of mu is undefined in the table
        seg[zero[:-1] | zero[1:]] = np.inf

        i1 = (KNOTS - 1) // 2
        tab = np.empty_like(x)
        tab[i1] = 0.0
        tab[i1 + 1 :] = np.cumsum(seg[i1:])
        tab[:i1] = -np.cumsum(seg[:i1][::-1])[::-1]
        if np.any(zero):
            if zero[i1]:
                raise DomainError("mu vanishes at 1, Omega is undefined")
            self._zero_knot = int(np.nonzero(zero)[0].max())
            # locate the last zero t0 of mu inside the next segment
            lo_, hi_ = x[self._zero_knot], x[self._zero_knot + 1]
            for _ in range(200):
                mid = 0.5 * (lo_ + hi_)
                if mid in (lo_, hi_):
                    break
                if self.mu(mid) > 0:
                    hi_ = mid
                else:
                    lo_ = mid
            self._t0 = lo_
        else:
            self._zero_knot = -1

        self._x = x
        self._tab = tab
        self._lowfit = self._low_extrapolation()

    def _refined_segments(self, a, b, depth=0):
        coarse = self._segment(a, b, 5)
        fine = self._segment(a, b, 10)
        with np.errstate(invalid="ignore"):
            bad = np.abs(fine - coarse) > 1e-12 * np.abs(fine) + 1e-15
        bad &= np.isfinite(fine)
        # depth cap: rounding noise in omega must not trigger endless bisection
        if np.any(bad) and depth < 6:
            m = np.sqrt(a[bad] * b[bad])
            fine[bad] = self._refined_segments(a[bad], m, depth + 1) + self._refined_segments(
                m, b[bad], depth + 1
            )
        return fine

    def _grow(self, x_needed: float) -> None:
        with self._lock:
            while self._x[-1] < min(x_needed, X_LIMIT):
                x0 = self._x[-1]
                n = 256
                new = x0 * self._ratio ** np.arange(1, n + 1)
                new = new[new <= X_LIMIT * self._ratio]
                m = self.mu(new)
                if not np.all(np.isfinite(m)):
                    new = new[np.isfinite(m)]
                    if new.size == 0:
                        return
                seg = self._refined_segments(np.concatenate([[x0], new[:-1]]), new)
                tab = self._tab[-1] + np.cumsum(seg)
                self._x = np.concatenate([self._x, new])
                self._tab = np.concatenate([self._tab, tab])
                if new.size < n:
                    return

    def _low_extrapolation(self):
        # power law fitted to mu on [X_MIN, 10 X_MIN]
        if self._zero_knot >= 0:
            return None
        m0, m1 = self.mu(np.array([X_MIN, 10 * X_MIN]))
        kappa = math.log10(m1 / m0)
        return m0, kappa

    # }}}

    # {{{ Omega

    def Omega(self, x):
        """:math:`\\Omega(x)`; ``x = 0`` gives the (possibly infinite) limit."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(np.isnan(x)):
            raise DomainError("Omega is defined for x >= 0")
        if self.power_law is not None:
            r = self._omega_closed(x)
        else:
            r = self._omega_numeric(x)
        return float(r) if r.ndim == 0 else r

    def _omega_closed(self, x):
        c, kappa = self.power_law
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if kappa == 1.0:
                r = np.log(x) / c
            else:
                r = (x ** (1.0 - kappa) - 1.0) / (c * (1.0 - kappa))
        if kappa >= 1.0:
            r = np.where(x == 0, -np.inf, r)
        return np.asarray(r, dtype=float)

    def _omega_numeric(self, x):
        flat = x.ravel()
        if flat.size and flat.max() > self._x[-1]:
            self._grow(float(flat.max()))
            if flat.max() > self._x[-1]:
                raise DomainError(f"Omega cannot be evaluated beyond x={self._x[-1]:.3g}")
        out = np.empty_like(flat)
        xs, tab = self._x, self._tab

        low = flat < xs[0]
        mid = ~low
        if np.any(mid):
            xm = flat[mid]
            k = np.clip(np.searchsorted(xs, xm, side="right") - 1, 0, xs.size - 2)
            at = xm == xs[k]
            val = tab[k].copy()
            rest = ~at
            if np.any(rest):
                kr = k[rest]
                with np.errstate(invalid="ignore"):
                    val[rest] = tab[kr] + self._segment(xs[kr], xm[rest])
                if self._zero_knot >= 0:
                    # beside a zero of mu integrate back from the right knot
                    idx = np.nonzero(rest)[0]
                    val[idx[kr < self._zero_knot]] = -np.inf
                    for j in idx[kr == self._zero_knot]:
                        val[j] = tab[k[j] + 1] - self._edge_integral(xm[j], xs[k[j] + 1])
            out[mid] = val
        if np.any(low):
            out[low] = self._omega_low(flat[low])
        return out.reshape(x.shape)

    def _edge_integral(self, a, b):
        # int_a^b dt / mu next to the zero t0 of mu, by panels in ln(t - t0)
        if a <= self._t0:
            return np.inf
        la, lb = math.log(a - self._t0), math.log(b - self._t0)
        m = max(1, math.ceil((lb - la) / 0.5))
        edges = np.linspace(la, lb, m + 1)
        x, w = gauss_legendre(10)
        h = np.diff(edges)[:, None]
        d = np.exp(edges[:-1, None] + h * x)
        mu = self.mu(self._t0 + d)
        with np.errstate(divide="ignore"):
            f = np.where(mu > 0, d / mu, np.inf)
        return float(np.sum(f * w * h))

    def _omega_low(self, x):
        if self._lowfit is None:
            return np.full_like(x, -np.inf)
        m0, kappa = self._lowfit
        xm = self._x[0]
        e = 1.0 - kappa
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            lr = np.log(x / xm)
            if e == 0.0:
                tail = -xm / m0 * lr
            else:
                tail = -xm / m0 * np.expm1(e * lr) / e
        r = self._tab[0] - tail
        if kappa >= 1.0:
            r = np.where(x == 0, -np.inf, r)
        return r

    @property
    def Omega_at_zero(self) -> float:
        """:math:`\\lim_{x \\to 0^+} \\Omega(x)` (``-inf`` when the integral diverges)."""
        return float(self.Omega(0.0))

    # }}}

    # {{{ inverse

    def Omega_inv(self, y):
        """:math:`\\Omega^{-1}(y)` for ``y`` below :meth:`domain_sup`."""
        y = np.asarray(y, dtype=float)
        if np.any(np.isnan(y)):
            raise DomainError("Omega_inv of NaN")
        sup = self.domain_sup()
        if np.any(y >= sup):
            raise DomainError(
                f"Omega_inv argument {float(np.max(y)):.6g} is outside the domain "
                f"(supremum {sup:.6g})"
            )
        lo = self.Omega_at_zero
        if np.any(y < lo - 1e-12 * max(1.0, abs(lo))):
            raise DomainError(f"Omega_inv argument below Omega(0) = {lo:.6g}")
        if self.power_law is not None:
            r = self._inv_closed(y)
        else:
            r = self._inv_numeric(y)
        return float(r) if r.ndim == 0 else r

    def _inv_closed(self, y):
        c, kappa = self.power_law
        with np.errstate(over="ignore", invalid="ignore"):
            if kappa == 1.0:
                r = np.exp(c * y)
            else:
                base = np.maximum(1.0 + c * (1.0 - kappa) * y, 0.0)
                r = base ** (1.0 / (1.0 - kappa))
        return np.where(np.isneginf(y), 0.0, r)

    def _inv_numeric(self, y):
        flat = y.ravel().copy()
        out = np.zeros_like(flat)
        fin = np.isfinite(flat)
        if not np.any(fin):
            return out.reshape(y.shape)
        yf = flat[fin]
        while yf.max() >= self._tab[-1] and self._x[-1] < X_LIMIT:
            n0 = self._x.size
            self._grow(self._x[-1] * self._ratio**256)
            if self._x.size == n0:
                break
        if yf.max() >= self._tab[-1]:
            raise DomainError("Omega_inv argument beyond the representable range")

        xs, tab = self._x, self._tab
        k = np.searchsorted(tab, yf, side="right") - 1
        below = k < 0
        a = np.where(below, 0.0, xs[np.clip(k, 0, None)])
        b = xs[np.clip(k + 1, 0, xs.size - 1)]
        res = np.empty_like(yf)

        if np.any(below):
            res[below] = self._inv_low(yf[below])
        inside = ~below
        if np.any(inside):
            la, lb = np.log(a[inside]), np.log(b[inside])
            yi = yf[inside]
            for _ in range(60):
                lm = 0.5 * (la + lb)
                om = self._omega_numeric(np.exp(lm))
                right = om < yi
                la = np.where(right, lm, la)
                lb = np.where(right, lb, lm)
            res[inside] = np.exp(0.5 * (la + lb))
        out[fin] = res
        return out.reshape(y.shape)

    def _inv_low(self, y):
        if self._lowfit is None:
            return np.full_like(y, self._x[self._zero_knot + 1] if self._zero_knot >= 0 else 0.0)
        m0, kappa = self._lowfit
        xm = self._x[0]
        tail = self._tab[0] - y
        e = 1.0 - kappa
        z = tail * m0 / xm
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if e == 0.0:
                return xm * np.exp(-z)
            arg = -z * e
            lr = np.where(arg > -1.0, np.log1p(np.maximum(arg, -1.0)) / e, -np.inf)
            return xm * np.exp(lr)

    # }}}

    # {{{ supremum

    def domain_sup(self) -> float:
        r"""Supremum of the range of :math:`\Omega` (``inf`` if the tail diverges)."""
        if self._sup is None:
            self._sup = self._compute_sup()
        return self._sup

    @property
    def omega_sup(self) -> float:
        return self.domain_sup()

    def _compute_sup(self) -> float:
        if self.power_law is not None:
            c, kappa = self.power_law
            return math.inf if kappa <= 1.0 else 1.0 / (c * (kappa - 1.0))

        t = np.geomspace(*TAIL_FIT, 31)
        m = self.mu(t)
        slope = float(np.polyfit(np.log(t), np.log(m), 1)[0])
        if slope <= 1.0 - TAIL_BAND:
            return math.inf
        if slope < 1.0 + TAIL_BAND:
            # borderline growth: decide on the decay of t / mu(t)
            r = t / m
            if r[-1] / r[0] >= 0.5:
                self.notes.append(
                    f"tail exponent {slope:.4f} is near 1; t/mu(t) does not decay "
                    "fast enough for a convergent tail, treated as divergent"
                )
                return math.inf
            raise InconclusiveError(
                f"tail exponent of mu is {slope:.4f}, within {TAIL_BAND} of the critical value 1"
            )
        # convergent tail: push the table out until the remaining tail is negligible
        x = X_MAX
        while True:
            xs = min(x * 1e12, X_LIMIT)
            self._grow(xs)
            xe = float(self._x[-1])
            m1, m0 = self.mu(np.array([xe, xe / 10.0]))
            s = math.log10(m1 / m0) if np.isfinite(m1) and m0 > 0 else slope
            s = max(s, 1.0 + 1e-3)
            tail = xe / m1 / (s - 1.0) if np.isfinite(m1) else 0.0
            base = float(self._tab[-1])
            if tail <= 1e-13 * max(1.0, abs(base)) or xe >= X_LIMIT or xe <= x:
                return base + tail
            x = xe

    # }}}


def mu(tr: OmegaTransform, t):
    return tr.mu(t)


def Omega(tr: OmegaTransform, x):
    return tr.Omega(x)


def Omega_inv(tr: OmegaTransform, y):
    return tr.Omega_inv(y)


def domain_sup(tr: OmegaTransform) -> float:
    return tr.domain_sup()
