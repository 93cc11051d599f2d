"""Command line front end.

Usage::

    fracgronwall MODE [--config PATH] [--preset NAME] [--out PATH]
                      [--format csv|json] [--p P] [--N N] [--tol TOL] [--T T]

Exit codes are listed in :data:`EXIT_CODES`.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from collections.abc import Sequence

import numpy as np

from . import config as cfgmod
from .bounds import InequalityProblem, compute_bound, thm25_bound
from .config import Config
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    ExprSyntaxError,
    HorizonCollapseError,
    InconclusiveError,
    IntegrabilityError,
    ProblemError,
)
from .hypotheses import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    Check,
    HypothesisReport,
    cor38_check,
    envelope_check,
    thm37_check,
    thm310_check,
)
from .omega import PTH, OmegaTransform
from .presets import PRESETS, preset, preset_text
from .solver import extremal_inequality_solve, solve_volterra
from .special import gamma

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_HORIZON = 3
EXIT_NUMERIC = 4
EXIT_NOT_CONVERGED = 5
EXIT_INCONCLUSIVE = 6
EXIT_DOMINANCE = 7

EXIT_CODES = {
    EXIT_OK: "success",
    EXIT_CHECK_FAILED: "a hypothesis check failed",
    EXIT_CONFIG: "invalid configuration or inadmissible problem",
    EXIT_HORIZON: "the bound has no validity horizon",
    EXIT_NUMERIC: "numeric failure (domain or integrability)",
    EXIT_NOT_CONVERGED: "iteration did not converge or blew up",
    EXIT_INCONCLUSIVE: "a numeric test was inconclusive",
    EXIT_DOMINANCE: "the solution is not dominated by the bound",
}

DOMINANCE_SLACK = 1e-2

logger = logging.getLogger(__name__)


class _Exit(Exception):
    def __init__(self, code: int, message: str = "") -> None:
        super().__init__(message)
        self.code = code


# {{{ output


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def render(columns: dict[str, np.ndarray], meta: dict, fmt: str) -> str:
    """Serialize named columns with metadata as CSV or JSON text."""
    names = list(columns)
    data = [np.asarray(columns[n], dtype=float) for n in names]
    if fmt == "json":
        doc = {
            "meta": meta,
            "columns": names,
            "data": {n: [float(x) for x in d] for n, d in zip(names, data)},
        }
        return json.dumps(doc, indent=1, allow_nan=True) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k} = {v}\n")
    buf.write(",".join(names) + "\n")
    for row in zip(*data):
        buf.write(",".join(_fmt(x) for x in row) + "\n")
    return buf.getvalue()


def _emit(cfg: Config, text: str, summary: list[str]) -> None:
    out = cfg.values.get("out")
    if out:
        try:
            with open(out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise _Exit(EXIT_CONFIG, f"cannot write {out!r}: {exc.strerror}") from exc
        for line in summary:
            print(line)
    else:
        sys.stdout.write(text)


# }}}


# {{{ pipelines


def run_bound(cfg: Config) -> int:
    theorem = cfg.theorem()
    prob = cfg.inequality()
    curve = compute_bound(prob, theorem)
    mesh = cfg.mesh(prob.beta, curve.T1)
    t = mesh.nodes[1:]
    cols = {"t": t, "bound": curve(t)}
    meta = {"mode": "bound", "theorem": theorem, "T1": _fmt(curve.T1)}
    if cfg.flag("extremal"):
        u = extremal_inequality_solve(
            prob, theorem, mesh, tol=cfg.number("tol", 1e-10), max_iter=cfg.integer("max_iter", 1000)
        )
        cols["u_extremal"] = u(t)
        ratio = float(np.max(cols["u_extremal"] / cols["bound"]))
        meta["max_extremal_over_bound"] = _fmt(ratio)
    for i, n in enumerate(curve.notes):
        meta[f"note{i}"] = n
    summary = [f"theorem {theorem}", f"T1 = {curve.T1:.17g}"]
    if "max_extremal_over_bound" in meta:
        summary.append(f"max u_extremal/bound = {meta['max_extremal_over_bound']}")
    _emit(cfg, render(cols, meta, cfg.fmt), summary)
    return EXIT_OK


def _solution_columns(sol) -> dict[str, np.ndarray]:
    t = sol.mesh.nodes[1:]
    return {"t": t, "v": sol.weighted.values[1:], "x": sol.x}


def _solve_meta(sol) -> dict:
    return {
        "mode": "solve",
        "iterations": sol.iterations,
        "residual": _fmt(sol.residual),
        "converged": str(sol.converged).lower(),
    }


def run_solve(cfg: Config) -> int:
    spec = cfg.fivp()
    mesh = cfg.mesh(spec.beta, spec.T)
    tol = cfg.number("tol", 1e-8)
    max_iter = cfg.integer("max_iter", 500)
    try:
        sol = solve_volterra(spec, mesh, tol=tol, max_iter=max_iter)
    except ConvergenceError as exc:
        if exc.result is not None:
            meta = _solve_meta(exc.result)
            _emit(cfg, render(_solution_columns(exc.result), meta, cfg.fmt), [str(exc)])
        raise
    summary = [f"iterations = {sol.iterations}", f"residual = {sol.residual:.6g}"]
    summary += [f"note: {n}" for n in sol.notes]
    _emit(cfg, render(_solution_columns(sol), _solve_meta(sol), cfg.fmt), summary)
    return EXIT_OK


def _route(cfg: Config) -> str:
    if cfg.has("route"):
        r = cfg.raw("route")
        if r not in cfgmod.ROUTES:
            raise ConfigError(f"route must be one of {', '.join(cfgmod.ROUTES)}, got {r!r}")
        return r
    if cfg.has("gamma") or cfg.has("k"):
        return "cor38"
    if cfg.has("omega"):
        return "thm37"
    return "thm310"


def _report(cfg: Config) -> HypothesisReport:
    route = _route(cfg)
    beta = cfg.number("beta")
    if not 0.0 < beta < 1.0:
        raise ConfigError(f"beta must lie in (0, 1), got {beta}")
    box = cfg.box()
    if route == "thm37":
        rep = thm37_check(cfg.expr("f", ("t", "x")), cfg.expr("l", ("t",)),
                          cfg.expr("omega", ("u",)), beta, **box)
    elif route == "cor38":
        f = cfg.expr("f", ("t", "x")) if cfg.has("f") else None
        rep = cor38_check(cfg.expr("l", ("t",)), cfg.expr("k", ("t",), "0"),
                          cfg.number("gamma"), beta, f=f, **box)
    else:
        rep = thm310_check(cfg.expr("f", ("t", "x")), cfg.expr("l", ("t",)), beta,
                           weighted_l=cfg.flag("weighted_l"), **box)
    if cfg.has("p") and rep.admissible_p_interval is not None:
        p = cfg.number("p")
        lo, hi = rep.admissible_p_interval
        ok = lo < p < hi
        chk = Check("chosen p", PASS if ok else FAIL,
                    f"p = {p:.6g} {'lies' if ok else 'does not lie'} in ({lo:.6g}, {hi:.6g})")
        rep = HypothesisReport(rep.theorem_tag, rep.checks + (chk,), rep.admissible_p_interval, rep.notes)
    return rep


_VERDICT_EXIT = {PASS: EXIT_OK, FAIL: EXIT_CHECK_FAILED, INCONCLUSIVE: EXIT_INCONCLUSIVE}


def run_check(cfg: Config) -> int:
    rep = _report(cfg)
    text = rep.to_json() + "\n" if cfg.fmt == "json" else rep.to_text() + "\n"
    out = cfg.values.get("out")
    if out:
        _emit(cfg, text, [rep.to_text()])
    else:
        sys.stdout.write(text)
    return _VERDICT_EXIT[rep.verdict]


def run_verify(cfg: Config) -> int:
    spec = cfg.fivp()
    env = spec.envelope
    if env is None:
        raise ConfigError("verify needs a growth envelope: 'l' with 'omega', or 'l' with 'k'/'gamma'")
    beta, p = spec.beta, spec.p
    box = cfg.box()

    # a broken envelope must be caught before any comparison is made
    if env.omega is not None:
        res = envelope_check(spec.f, env.l, env.omega, beta, **box)
    else:
        res = envelope_check(spec.f, env.l, f"u^({env.gamma!r})", beta, k=env.k, weighted=False, **box)
    print(f"envelope check: {res.verdict}: {res.evidence}")
    if res.verdict != PASS:
        return _VERDICT_EXIT[res.verdict]

    L, om = env.growth(beta)
    prob = InequalityProblem(abs(spec.x0), 1.0 / gamma(beta), L, om, p=p, beta=beta, T=spec.T)
    tr = OmegaTransform(prob.omega, p, PTH)
    sup = tr.domain_sup()
    curve = thm25_bound(prob, tr)

    mesh = cfg.mesh(beta, spec.T)
    sol = solve_volterra(spec, mesh, tol=cfg.number("tol", 1e-8), max_iter=cfg.integer("max_iter", 500))
    t = mesh.nodes[1:]
    inside = t <= curve.T1
    v = np.abs(sol.weighted.values[1:])
    bound_w = np.full_like(t, np.nan)
    bound_w[inside] = curve(t[inside]) * t[inside] ** (1.0 - beta)
    ratio = np.where(inside, v / bound_w, 0.0)
    i = int(np.argmax(ratio))
    worst = float(ratio[i])

    cols = {"t": t, "v": sol.weighted.values[1:], "x": sol.x, "bound": np.where(inside, curve(np.minimum(t, curve.T1)), np.nan)}
    meta = {
        "mode": "verify",
        "theorem": "thm25",
        "T1": _fmt(curve.T1),
        "domain_sup": "inf" if sup == math.inf else _fmt(sup),
        "iterations": sol.iterations,
        "residual": _fmt(sol.residual),
        "max_weighted_ratio": _fmt(worst),
    }
    summary = [
        f"domain sup of Omega = {meta['domain_sup']}",
        f"T1 = {curve.T1:.17g}",
        f"solution: {sol.iterations} iterations, residual {sol.residual:.3g}",
        f"worst margin: |v|/bound = {worst:.6g} at t = {t[i]:.6g}",
    ]
    if cfg.values.get("out"):
        _emit(cfg, render(cols, meta, cfg.fmt), summary)
    else:
        for line in summary:
            print(line)
    if curve.T1 < spec.T:
        print(f"note: the bound is only valid up to T1 = {curve.T1:.6g} < T = {spec.T:.6g}")
    if worst > 1.0 + DOMINANCE_SLACK:
        print(
            f"dominance violated at t = {t[i]:.17g}: |v| = {v[i]:.17g} > bound {bound_w[i]:.17g}",
            file=sys.stderr,
        )
        return EXIT_DOMINANCE
    return EXIT_OK


RUNNERS = {"bound": run_bound, "solve": run_solve, "check": run_check, "verify": run_verify}


# }}}


# {{{ entry point


def _parser() -> argparse.ArgumentParser:
    codes = "\n".join(f"  {c}  {d}" for c, d in EXIT_CODES.items())
    ap = argparse.ArgumentParser(
        prog="fracgronwall",
        description="Gronwall-type bounds and fractional initial value problems.",
        epilog=f"exit codes:\n{codes}",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("mode", choices=cfgmod.MODES)
    ap.add_argument("name", nargs="?", help="preset name (example mode only)")
    ap.add_argument("--config", help="configuration file (key = value lines, or .json)")
    ap.add_argument("--preset", help="start from a built-in example")
    ap.add_argument("--out", help="output file (default: standard output)")
    ap.add_argument("--format", choices=cfgmod.FORMATS)
    ap.add_argument("--p", help="Hoelder exponent p")
    ap.add_argument("--N", help="number of mesh cells")
    ap.add_argument("--tol", help="iteration tolerance")
    ap.add_argument("--T", help="horizon")
    ap.add_argument("--show", action="store_true", help="print the preset configuration (example mode)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _config(args) -> Config:
    mode = args.mode
    layers: list[dict[str, str]] = []
    strict: list[bool] = []
    preset_name = args.preset
    if mode == "example":
        preset_name = args.name
    elif args.name is not None:
        raise ConfigError(f"unexpected argument {args.name!r}")
    if preset_name:
        pmode, values = preset(preset_name)
        if mode == "example":
            mode = pmode
        layers.append(values)
        strict.append(False)
    elif mode == "example":
        raise ConfigError("example mode needs a preset name")
    if args.config:
        layers.append(cfgmod.load(args.config))
        strict.append(True)
    flags = {
        k: v for k, v in (
            ("p", args.p), ("N", args.N), ("tol", args.tol), ("T", args.T),
            ("out", args.out), ("format", args.format),
        ) if v is not None
    }
    layers.append(flags)
    strict.append(False)
    if not args.config and not preset_name:
        raise ConfigError("give --config or --preset")
    return Config.build(mode, *layers, strict=tuple(strict))


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.mode == "example" and (args.name is None or args.show):
        if args.name is None:
            for name, (mode, _) in PRESETS.items():
                print(f"{name}\t{mode}")
            return EXIT_OK
        try:
            sys.stdout.write(preset_text(args.name))
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK

    try:
        cfg = _config(args)
        return RUNNERS[cfg.mode](cfg)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, ProblemError, ExprSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HorizonCollapseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HORIZON
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except InconclusiveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (DomainError, IntegrabilityError, FloatingPointError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


# }}}


if __name__ == "__main__":
    sys.exit(main())
