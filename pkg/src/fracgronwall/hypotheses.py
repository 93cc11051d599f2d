r"""Sampling checks for the hypotheses of the global existence results.

Every check returns a verdict in ``{"pass", "fail", "inconclusive"}`` with a
short evidence string. Integrability near the origin is decided numerically
from the power exponent of the function there; nothing is proved
symbolically.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, InconclusiveError
from .expr import Expr, as_expr, evaluate_masked, to_text
from .omega import PTH, OmegaTransform

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

MARGIN = 0.02
P_SEARCH = 10.0
T_RANGE = (1e-6, 10.0)
X_RANGE = (0.0, 100.0)
RATIO_POINTS = (1e3, 1e4, 1e5, 1e6)
REL_SLACK = 1e-9


# {{{ reports


@dataclass(frozen=True)
class Check:
    name: str
    verdict: str
    evidence: str


@dataclass(frozen=True)
class HypothesisReport:
    theorem_tag: str
    checks: tuple[Check, ...]
    admissible_p_interval: tuple[float, float] | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def verdict(self) -> str:
        verdicts = {c.verdict for c in self.checks}
        if verdicts <= {PASS}:
            return PASS
        if FAIL in verdicts:
            return FAIL
        return INCONCLUSIVE

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        d["checks"] = [asdict(c) for c in self.checks]
        if self.admissible_p_interval is not None:
            d["admissible_p_interval"] = list(self.admissible_p_interval)
        d["notes"] = list(self.notes)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"{self.theorem_tag}: {self.verdict}"]
        lines += [f"  [{c.verdict}] {c.name}: {c.evidence}" for c in self.checks]
        if self.admissible_p_interval is not None:
            lo, hi = self.admissible_p_interval
            lines.append(f"  admissible p in ({lo:.6g}, {hi:.6g})")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def _fn(g: Expr | str | float | Callable) -> Callable[[np.ndarray], np.ndarray]:
    if callable(g) and not isinstance(g, Expr):
        return g
    e = as_expr(g, ("t",))

    def f(t):
        vals, ok = evaluate_masked(e, t=t)
        vals = np.asarray(vals, dtype=float) * np.ones_like(t)
        return np.where(ok, vals, np.nan)

    return f


# }}}


# {{{ integrability near the origin


@dataclass(frozen=True)
class LpLocResult:
    """Outcome of :func:`lp_loc_membership`.

    ``exponent`` is the power ``lam`` with ``g ~ t^lam`` at 0 (``inf`` if ``g``
    vanishes identically near 0).
    """

    verdict: str
    exponent: float
    regression_exponent: float
    p: float
    evidence: str

    def upper_p(self) -> float:
        """Supremum of the ``p`` with ``p * lam > -1``."""
        return math.inf if self.exponent >= 0 else -1.0 / self.exponent


def _local_slopes(g, ts):
    h = 0.5
    out = []
    for t in ts:
        with np.errstate(all="ignore"):
            v = np.abs(g(np.array([t * math.exp(-h), t * math.exp(h)])))
        # stay clear of subnormals and overflow, where slopes lose accuracy
        if not np.all(np.isfinite(v)) or np.any(v < 1e-280) or np.any(v > 1e280):
            break
        out.append(float(np.log(v[1] / v[0]) / (2 * h)))
    return out


def power_exponent(g, t_probe: float = 1e-3) -> tuple[float, float]:
    """``(lam, lam_regression)`` for ``|g(t)| ~ c t^lam`` as ``t -> 0``.

    ``lam_regression`` is the least-squares slope of ``ln|g|`` against
    ``ln t`` over ``[1e-8, t_probe]``. Sums of powers bias that slope towards
    the subdominant terms, so ``lam`` follows the local slope further down
    (to ``1e-296``) for as long as it keeps settling.
    """
    g = _fn(g)
    t = np.geomspace(1e-8, t_probe, 64)
    with np.errstate(all="ignore"):
        v = np.abs(np.asarray(g(t), dtype=float))
    if np.any(~np.isfinite(v)):
        bad = t[~np.isfinite(v)][0]
        raise DomainError(f"function cannot be evaluated near 0 (t={bad:.3g})")
    if np.all(v == 0):
        return math.inf, math.inf
    if np.any(v == 0):
        raise DomainError("function changes between zero and nonzero values near 0")
    lam_reg = float(np.polyfit(np.log(t), np.log(v), 1)[0])

    slopes = _local_slopes(g, 10.0 ** -np.arange(8.0, 297.0, 8.0))
    lam = lam_reg
    prev = None
    for s in slopes:
        if prev is not None and abs(s - prev) > 0.05:
            break
        lam = prev = s
    return lam, lam_reg


def lp_loc_membership(g, p: float, t_probe: float = 1e-3) -> LpLocResult:
    r"""Is :math:`g \in L^p` near the origin?

    With :math:`g \sim t^\lambda`, membership holds iff :math:`p\lambda > -1`.
    Within ``0.02`` of the threshold the verdict is ``inconclusive``.
    """
    lam, lam_reg = power_exponent(g, t_probe)
    if lam == math.inf:
        return LpLocResult(PASS, lam, lam_reg, p, "vanishes near 0")
    m = p * lam
    if m > -1.0 + MARGIN:
        verdict = PASS
    elif m < -1.0 - MARGIN:
        verdict = FAIL
    else:
        verdict = INCONCLUSIVE
    ev = f"exponent {lam:.6g} (regression {lam_reg:.6g}), p*exponent = {m:.6g}"
    return LpLocResult(verdict, lam, lam_reg, p, ev)


def _interval(beta: float, results: list[LpLocResult]) -> tuple[float, float]:
    lo = 1.0 / beta
    hi = min([lo + P_SEARCH] + [r.upper_p() for r in results])
    return lo, hi


def _interval_check(name: str, beta: float, results: list[LpLocResult], labels: list[str]):
    lo, hi = _interval(beta, results)
    ev = "; ".join(f"{lab}: exponent {r.exponent:.6g}" for lab, r in zip(labels, results))
    if hi <= lo:
        return Check(name, FAIL, f"no p > 1/beta = {lo:.6g} works ({ev})"), None
    # the verdict is taken at the middle of the interval, where every
    # exponent test is as far from its threshold as it can be
    mid = 0.5 * (lo + hi)
    margins = [mid * r.exponent for r in results if r.exponent != math.inf]
    if margins and min(margins) <= -1.0 + MARGIN:
        return Check(name, INCONCLUSIVE, f"interval ({lo:.6g}, {hi:.6g}) too narrow ({ev})"), (lo, hi)
    return Check(name, PASS, f"p in ({lo:.6g}, {hi:.6g}) ({ev})"), (lo, hi)


# }}}


# {{{ growth at infinity


@dataclass(frozen=True)
class RatioResult:
    verdict: str
    K: float
    ratios: tuple[float, ...]
    evidence: str


def asymptotic_ratio_k(omega: Expr | str) -> RatioResult:
    r"""Estimate :math:`K = \lim_{u\to\infty} u / \omega(u)`.

    Samples at ``u = 1e3 ... 1e6``. A ratio growing like a positive power of
    ``u`` (log-slope above 0.05 on the last decade) is reported as ``inf``;
    otherwise the geometric decay of successive differences is extrapolated.
    Non-monotone drift beyond 20 % is ``inconclusive``.
    """
    om = as_expr(omega, ("u",))
    u = np.array(RATIO_POINTS)
    w, ok = evaluate_masked(om, u=u)
    w = np.asarray(w, dtype=float) * np.ones_like(u)
    if not np.all(ok) or np.any(~np.isfinite(w)) or np.any(w <= 0):
        return RatioResult(FAIL, math.nan, (), "omega must be positive and finite at large u")
    r = u / w
    rt = tuple(float(x) for x in r)
    d = np.diff(r)
    monotone = np.all(d >= 0) or np.all(d <= 0)
    if not monotone:
        drift = (r.max() - r.min()) / r.mean()
        if drift > 0.2:
            return RatioResult(INCONCLUSIVE, math.nan, rt, f"non-monotone ratios, drift {drift:.3g}")
        return RatioResult(PASS, float(r[-1]), rt, f"ratios settle near {r[-1]:.6g}")

    slope = math.log10(r[-1] / r[-2])
    if slope > 0.05:
        return RatioResult(PASS, math.inf, rt, f"ratio grows like u^{slope:.3g}")
    if d[-1] == 0:
        K = float(r[-1])
    else:
        rho = d[-1] / d[-2] if d[-2] != 0 else 0.0
        K = float(r[-1] + d[-1] * rho / (1.0 - rho)) if 0 <= rho < 1 else float(r[-1])
    if K <= 1e-3 * max(r[0], 1e-300) or slope < -0.05:
        return RatioResult(FAIL, 0.0, rt, f"ratio decays like u^{slope:.3g}, K = 0")
    return RatioResult(PASS, K, rt, f"K ~ {K:.6g}")


# }}}


# {{{ sampled inequalities


@dataclass(frozen=True)
class EnvelopeResult:
    verdict: str
    worst_ratio: float
    witness: tuple[float, float] | None
    skipped: int
    evidence: str


def _box(t_range, x_range, n):
    t = np.geomspace(t_range[0], t_range[1], n)
    x = np.linspace(x_range[0], x_range[1], n)
    return t, x


def envelope_check(
    f: Expr | str,
    l: Expr | str,
    omega: Expr | str,
    beta: float,
    *,
    k: Expr | str | None = None,
    weighted: bool = True,
    t_range=T_RANGE,
    x_range=X_RANGE,
    n: int = 64,
) -> EnvelopeResult:
    r"""Sample :math:`|f(t, x)| \le l(t)\,\omega(t^{1-\beta}|x|) + k(t)`.

    With ``weighted=False`` the argument of :math:`\omega` is :math:`|x|`,
    which is the power-growth form :math:`l(t)|x|^\gamma + k(t)`. A relative
    slack of ``1e-9`` absorbs rounding. Points where any side cannot be
    evaluated are skipped and counted.
    """
    fe = as_expr(f, ("t", "x"))
    le = as_expr(l, ("t",))
    oe = as_expr(omega, ("u",))
    t, x = _box(t_range, x_range, n)
    T, X = np.meshgrid(t, x, indexing="ij")
    fv, fok = evaluate_masked(fe, t=T, x=X)
    lv, lok = evaluate_masked(le, t=T)
    U = (T ** (1.0 - beta) if weighted else 1.0) * np.abs(X)
    ov, ook = evaluate_masked(oe, u=U)
    env = np.asarray(lv) * np.asarray(ov) * np.ones_like(T)
    ok = np.asarray(fok) & np.asarray(lok) & np.asarray(ook)
    if k is not None:
        kv, kok = evaluate_masked(as_expr(k, ("t",)), t=T)
        env = env + np.asarray(kv) * np.ones_like(T)
        ok = ok & np.asarray(kok)
    lhs = np.abs(np.asarray(fv, dtype=float)) * np.ones_like(T)
    ok &= np.isfinite(lhs) & np.isfinite(env)
    skipped = int(np.count_nonzero(~ok))
    if not np.any(ok):
        return EnvelopeResult(INCONCLUSIVE, math.nan, None, skipped, "no point could be evaluated")

    excess = np.where(ok, lhs - env * (1.0 + REL_SLACK), -np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(ok & (lhs > 0), lhs / env, 0.0)
    i = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    worst = float(ratio[i])
    note = f", {skipped} points skipped" if skipped else ""
    if np.any(excess > 0):
        j = np.unravel_index(int(np.argmax(np.where(excess > 0, ratio, -np.inf))), ratio.shape)
        w = (float(T[j]), float(X[j]))
        return EnvelopeResult(
            FAIL, float(ratio[j]), w, skipped,
            f"|f| exceeds the envelope by a factor {ratio[j]:.6g} at t={w[0]:.6g}, x={w[1]:.6g}{note}",
        )
    return EnvelopeResult(
        PASS, worst, (float(T[i]), float(X[i])), skipped,
        f"{np.count_nonzero(ok)} samples, largest |f|/envelope = {worst:.6g}{note}",
    )


@dataclass(frozen=True)
class LipschitzResult:
    verdict: str
    worst_ratio: float
    witness: tuple[float, float, float] | None
    skipped: int
    evidence: str


def lipschitz_check(
    f: Expr | str,
    l: Expr | str,
    *,
    t_range=T_RANGE,
    x_range=X_RANGE,
    n: int = 64,
) -> LipschitzResult:
    r"""Sample :math:`|f(t,x) - f(t,y)| \le l(t)|x - y|` over ``n^3`` triples."""
    fe = as_expr(f, ("t", "x"))
    t, x = _box(t_range, x_range, n)
    T, X = np.meshgrid(t, x, indexing="ij")
    fv, fok = evaluate_masked(fe, t=T, x=X)
    fv = np.where(fok, np.asarray(fv, dtype=float) * np.ones_like(T), np.nan)
    lv = _fn(l)(t)
    diff = np.abs(fv[:, :, None] - fv[:, None, :])
    dx = np.abs(x[:, None] - x[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        q = diff / dx[None, :, :]
    valid = np.isfinite(q) & (dx[None, :, :] > 0) & np.isfinite(lv)[:, None, None]
    skipped = int(np.count_nonzero(~np.isfinite(q) & (dx[None, :, :] > 0)))
    ratio = np.where(valid, q / np.where(lv > 0, lv, np.nan)[:, None, None], 0.0)
    ratio = np.where(valid & (q == 0), 0.0, ratio)
    excess = valid & (q > lv[:, None, None] * (1.0 + REL_SLACK))
    note = f", {skipped} triples skipped" if skipped else ""
    if np.any(excess):
        j = np.unravel_index(int(np.argmax(np.where(excess, np.nan_to_num(ratio, posinf=1e300), -1.0))), q.shape)
        w = (float(t[j[0]]), float(x[j[1]]), float(x[j[2]]))
        return LipschitzResult(
            FAIL, float(ratio[j]), w, skipped,
            f"quotient {q[j]:.6g} exceeds l(t) = {lv[j[0]]:.6g} at t={w[0]:.6g}, x={w[1]:.6g}, y={w[2]:.6g}{note}",
        )
    worst = float(np.max(np.where(valid, ratio, 0.0)))
    return LipschitzResult(
        PASS, worst, None, skipped,
        f"{int(np.count_nonzero(valid))} triples, largest quotient/l = {worst:.6g}{note}",
    )


# }}}


# {{{ theorem-level reports


def _envelope_as_check(name: str, res: EnvelopeResult) -> Check:
    return Check(name, res.verdict, res.evidence)


def _domain_sup_check(omega: Expr, p: float) -> Check:
    try:
        sup = OmegaTransform(omega, p, PTH).domain_sup()
    except InconclusiveError as exc:
        return Check("Omega domain", INCONCLUSIVE, str(exc))
    if sup == math.inf:
        return Check("Omega domain", PASS, f"sup of Omega is +inf at p={p:.6g}")
    return Check("Omega domain", FAIL, f"sup of Omega is {sup:.6g} at p={p:.6g}")


def _weighted_fn(g, e: float):
    gf = _fn(g)
    return lambda t: t**e * gf(t)


def _lp(name: str, g, p: float, checks: list, results: list, labels: list):
    try:
        r = lp_loc_membership(g, p)
    except DomainError as exc:
        checks.append(Check(name, INCONCLUSIVE, str(exc)))
        return
    results.append(r)
    labels.append(name)


def thm37_check(
    f: Expr | str,
    l: Expr | str,
    omega: Expr | str,
    beta: float,
    **box,
) -> HypothesisReport:
    r"""Global existence under :math:`|f| \le l(t)\,\omega(t^{1-\beta}|x|)`."""
    checks: list[Check] = []
    results: list[LpLocResult] = []
    labels: list[str] = []
    _lp("t^(1-beta) l", _weighted_fn(l, 1.0 - beta), 1.0 / beta, checks, results, labels)
    interval = None
    if results:
        c, interval = _interval_check("L^p near 0", beta, results, labels)
        checks.append(c)
    r = asymptotic_ratio_k(omega)
    checks.append(Check("lim u/omega(u)", r.verdict, r.evidence))
    if interval is not None:
        checks.append(_domain_sup_check(as_expr(omega, ("u",)), 0.5 * sum(interval)))
    checks.append(_envelope_as_check("growth envelope", envelope_check(f, l, omega, beta, **box)))
    return HypothesisReport("thm37", tuple(checks), interval)


def cor38_check(
    l: Expr | str,
    k: Expr | str,
    gamma: float,
    beta: float,
    f: Expr | str | None = None,
    **box,
) -> HypothesisReport:
    r"""Global existence under :math:`|f| \le l(t)|x|^\gamma + k(t)`.

    The combined envelope is :math:`(t^{\gamma(\beta-1)} l + k)(u^\gamma + 1)`
    in the weighted variable :math:`u = t^{1-\beta}|x|`.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    checks: list[Check] = []
    results: list[LpLocResult] = []
    labels: list[str] = []
    _lp("t^((1-gamma)(1-beta)) l", _weighted_fn(l, (1.0 - gamma) * (1.0 - beta)), 1.0 / beta,
        checks, results, labels)
    _lp("t^(1-beta) k", _weighted_fn(k, 1.0 - beta), 1.0 / beta, checks, results, labels)
    interval = None
    if results:
        c, interval = _interval_check("L^p near 0", beta, results, labels)
        checks.append(c)
    if f is not None:
        om = f"u^({gamma!r})"
        res = envelope_check(f, l, om, beta, k=k, weighted=False, **box)
        checks.append(_envelope_as_check("power envelope", res))
    le, ke = as_expr(l, ("t",)), as_expr(k, ("t",))
    combined = (
        f"L(t) = t^({gamma * (beta - 1.0)!r})*({to_text(le)}) + {to_text(ke)}, "
        f"omega(u) = u^({gamma!r}) + 1"
    )
    return HypothesisReport("cor38", tuple(checks), interval, (combined,))


def thm310_check(
    f: Expr | str,
    l: Expr | str,
    beta: float,
    *,
    weighted_l: bool = False,
    **box,
) -> HypothesisReport:
    r"""Uniqueness under :math:`|f(t,x) - f(t,y)| \le l(t)|x-y|`.

    The integrability conditions are :math:`l \in L^p` and
    :math:`t^{1-\beta}|f(t,0)| \in L^p` near 0. With ``weighted_l=True`` the
    first is replaced by the weaker :math:`t^{1-\beta} l \in L^p`.
    """
    fe = as_expr(f, ("t", "x"))
    checks: list[Check] = []
    res = lipschitz_check(fe, l, **box)
    checks.append(Check("Lipschitz bound", res.verdict, res.evidence))

    def f0(t):
        vals, ok = evaluate_masked(fe, t=t, x=np.zeros_like(t))
        return np.where(ok, t ** (1.0 - beta) * np.abs(np.asarray(vals) * np.ones_like(t)), np.nan)

    results: list[LpLocResult] = []
    labels: list[str] = []
    lg = _weighted_fn(l, 1.0 - beta) if weighted_l else _fn(l)
    _lp("t^(1-beta) l" if weighted_l else "l", lg, 1.0 / beta, checks, results, labels)
    _lp("t^(1-beta)|f(t,0)|", f0, 1.0 / beta, checks, results, labels)
    interval = None
    if results:
        c, interval = _interval_check("L^p near 0", beta, results, labels)
        checks.append(c)
    return HypothesisReport("thm310", tuple(checks), interval)


# }}}
