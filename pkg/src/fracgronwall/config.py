"""Flat key-value configuration for the command line front end.

A configuration is either an INI-like text file of ``key = value`` lines
(section headers are optional and ignored) or a flat JSON object. Numbers may
be written as constant expressions such as ``2/3``.
"""

from __future__ import annotations

import configparser
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType

from .bounds import BOUNDS, InequalityProblem
from .errors import ConfigError, ExprSyntaxError, ProblemError
from .expr import Expr, as_expr, constant_value
from .operators import GradedMesh
from .solver import Envelope, FIVPSpec

MODES = ("bound", "solve", "check", "verify", "example")
FORMATS = ("csv", "json")
ROUTES = ("thm37", "cor38", "thm310")

_COMMON = {"mode", "T", "N", "r", "p", "tol", "max_iter", "out", "format"}
_BOX = {"t_min", "t_max", "x_min", "x_max"}
MODE_KEYS: Mapping[str, frozenset[str]] = MappingProxyType({
    "bound": frozenset(_COMMON | {
        "theorem", "a", "b", "l", "omega", "beta", "alpha", "delta", "gamma", "extremal",
    }),
    "solve": frozenset(_COMMON | {"f", "x0", "beta"}),
    "check": frozenset(_COMMON | _BOX | {
        "route", "f", "l", "omega", "k", "gamma", "beta", "weighted_l",
    }),
    "verify": frozenset(_COMMON | _BOX | {"f", "x0", "beta", "l", "omega", "k", "gamma"}),
})

DEFAULT_N = {"bound": 256, "solve": 1024, "check": 0, "verify": 1024}


# {{{ parsing


def parse_text(text: str, fmt: str = "ini") -> dict[str, str]:
    """Parse configuration text into a flat ``{key: value}`` mapping."""
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON configuration: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("a JSON configuration must be an object")
        out = {}
        for k, v in data.items():
            if isinstance(v, (dict, list)):
                raise ConfigError(f"key {k!r}: nested values are not supported")
            out[str(k)] = json.dumps(v) if isinstance(v, bool) else str(v)
        return out

    cp = configparser.ConfigParser(interpolation=None, strict=True)
    cp.optionxform = str
    body = text if text.lstrip().startswith("[") else "[config]\n" + text
    try:
        cp.read_string(body)
    except configparser.Error as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    out: dict[str, str] = {}
    for section in cp.sections():
        for k, v in cp.items(section):
            if k in out:
                raise ConfigError(f"key {k!r} given twice")
            out[k] = v.strip()
    return out


def load(path: str | Path) -> dict[str, str]:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {str(p)!r}: {exc.strerror}") from exc
    return parse_text(text, "json" if p.suffix.lower() == ".json" else "ini")


# }}}


# {{{ typed access


@dataclass(frozen=True)
class Config:
    """Validated configuration for one mode."""

    mode: str
    values: Mapping[str, str]

    @classmethod
    def build(cls, mode: str, *layers: Mapping[str, str], strict: tuple[bool, ...] = ()) -> Config:
        """Merge layers (later wins). Keys of strict layers must belong to ``mode``."""
        if mode not in MODE_KEYS:
            raise ConfigError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
        allowed = MODE_KEYS[mode]
        merged: dict[str, str] = {}
        for i, layer in enumerate(layers):
            is_strict = strict[i] if i < len(strict) else True
            for k, v in layer.items():
                if k not in allowed:
                    if is_strict:
                        raise ConfigError(f"unknown key {k!r} for mode {mode!r}")
                    continue
                merged[k] = v
        if merged.get("mode", mode) != mode:
            raise ConfigError(f"configuration is for mode {merged['mode']!r}, not {mode!r}")
        return cls(mode, MappingProxyType(merged))

    def has(self, key: str) -> bool:
        return key in self.values

    def raw(self, key: str, default: str | None = None) -> str:
        if key in self.values:
            return self.values[key]
        if default is None:
            raise ConfigError(f"missing required key {key!r} for mode {self.mode!r}")
        return default

    def number(self, key: str, default: float | None = None) -> float:
        if key not in self.values:
            if default is None:
                raise ConfigError(f"missing required key {key!r} for mode {self.mode!r}")
            return default
        text = self.values[key]
        try:
            v = constant_value(as_expr(text, ()))
        except (ExprSyntaxError, ValueError) as exc:
            raise ConfigError(f"key {key!r}: {exc}") from exc
        if v is None or not math.isfinite(v):
            raise ConfigError(f"key {key!r}: expected a number, got {text!r}")
        return v

    def integer(self, key: str, default: int) -> int:
        v = self.number(key, float(default))
        if v != int(v):
            raise ConfigError(f"key {key!r}: expected an integer, got {self.values[key]!r}")
        return int(v)

    def flag(self, key: str, default: bool = False) -> bool:
        if key not in self.values:
            return default
        v = self.values[key].strip().lower()
        if v in ("1", "true", "yes", "on"):
            return True
        if v in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"key {key!r}: expected a boolean, got {self.values[key]!r}")

    def expr(self, key: str, variables: tuple[str, ...], default: str | None = None) -> Expr:
        text = self.raw(key, default)
        try:
            return as_expr(text, variables)
        except ExprSyntaxError as exc:
            raise ConfigError(f"key {key!r}: {exc}") from exc

    # {{{ derived objects

    @property
    def fmt(self) -> str:
        f = self.raw("format", "csv")
        if f not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {f!r}")
        return f

    def mesh(self, beta: float | None, T: float | None = None) -> GradedMesh:
        T = self.number("T", 1.0) if T is None else T
        N = self.integer("N", DEFAULT_N[self.mode])
        r = self.number("r", 2.0 / beta if beta else 1.0)
        try:
            return GradedMesh(T, N, r)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def theorem(self) -> str:
        th = self.raw("theorem")
        if th not in BOUNDS:
            raise ConfigError(f"theorem must be one of {', '.join(BOUNDS)}, got {th!r}")
        return th

    def inequality(self) -> InequalityProblem:
        th = self.theorem()
        kw = {}
        for key in ("beta", "gamma"):
            if self.has(key):
                kw[key] = self.number(key)
        return _problem(
            InequalityProblem,
            a=self.expr("a", ("t",)),
            b=self.expr("b", ("t",)),
            l=self.expr("l", ("t",)),
            omega=self.expr("omega", ("u",), "u" if th in ("cor22", "cor26") else None),
            p=self.number("p", 2.0),
            alpha=self.number("alpha", 0.0),
            delta=self.number("delta", 0.0),
            T=self.number("T", 1.0),
            **kw,
        )

    def envelope(self) -> Envelope | None:
        if not self.has("l"):
            if any(self.has(k) for k in ("omega", "k", "gamma")):
                raise ConfigError("an envelope needs the key 'l'")
            return None
        l = self.expr("l", ("t",))
        if self.has("omega"):
            if self.has("gamma") or self.has("k"):
                raise ConfigError("give either 'omega' or 'k'/'gamma', not both")
            return _problem(Envelope, l=l, omega=self.expr("omega", ("u",)))
        k = self.expr("k", ("t",), "0")
        return _problem(Envelope, l=l, k=k, gamma=self.number("gamma", 1.0))

    def fivp(self, T: float | None = None) -> FIVPSpec:
        return _problem(
            FIVPSpec,
            beta=self.number("beta"),
            x0=self.number("x0"),
            f=self.expr("f", ("t", "x")),
            T=self.number("T", 1.0) if T is None else T,
            envelope=self.envelope() if self.mode == "verify" else None,
            p=self.number("p", 2.0),
        )

    def box(self) -> dict:
        return {
            "t_range": (self.number("t_min", 1e-6), self.number("t_max", 10.0)),
            "x_range": (self.number("x_min", 0.0), self.number("x_max", 100.0)),
        }

    # }}}


def _problem(cls, **kw):
    try:
        return cls(**kw)
    except ProblemError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


# }}}
