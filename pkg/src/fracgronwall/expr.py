r"""Closed-form scalar expressions in ``t``, ``x`` and ``u``.

Grammar (lowest to highest precedence)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" unary)?          # right-associative
    atom   := NUMBER | NAME | FUNC "(" args ")" | "(" expr ")"

``FUNC`` is one of ``exp``, ``ln``, ``abs``, ``sqrt`` (one argument) or
``min``, ``max`` (two arguments). Exponents must be constant and are folded
to a float at parse time, so ``t^(-1/3)`` becomes a power node with exponent
``-0.333...``. ``sqrt(e)`` is stored as ``e^0.5``. There is no implicit
multiplication: ``2t`` is a syntax error.

Evaluation works on floats and on numpy arrays (broadcast elementwise).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownVariableError

ALL_VARIABLES = frozenset({"t", "x", "u"})
UNARY_FUNCTIONS = ("exp", "ln", "abs", "sqrt")
BINARY_FUNCTIONS = ("min", "max")

ArrayLike = Union[float, np.ndarray]


# {{{ tree


class Expr:
    """Base class of all expression nodes. Nodes are immutable."""

    __slots__ = ()

    @property
    def variables(self) -> frozenset[str]:
        raise NotImplementedError

    def _eval(self, env: dict[str, ArrayLike], strict: bool) -> ArrayLike:
        raise NotImplementedError

    def __call__(self, **bindings: ArrayLike) -> ArrayLike:
        return evaluate(self, **bindings)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, eq=True, repr=True)
class Num(Expr):
    value: float

    @property
    def variables(self) -> frozenset[str]:
        return frozenset()

    def _eval(self, env, strict):
        return self.value


@dataclass(frozen=True)
class Var(Expr):
    name: str

    @property
    def variables(self) -> frozenset[str]:
        return frozenset({self.name})

    def _eval(self, env, strict):
        return env[self.name]


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    @property
    def variables(self) -> frozenset[str]:
        return self.operand.variables

    def _eval(self, env, strict):
        return -self.operand._eval(env, strict)


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def variables(self) -> frozenset[str]:
        return self.left.variables | self.right.variables

    def _eval(self, env, strict):
        a = self.left._eval(env, strict)
        b = self.right._eval(env, strict)
        if self.op == "+":
            return np.add(a, b)
        if self.op == "-":
            return np.subtract(a, b)
        if self.op == "*":
            return np.multiply(a, b)

        bad = np.asarray(b) == 0
        if np.any(bad):
            _domain(self, "division by zero", env, bad, strict)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(bad, np.nan, np.divide(a, np.where(bad, 1.0, b)))


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: float

    @property
    def variables(self) -> frozenset[str]:
        return self.base.variables

    def _eval(self, env, strict):
        b = np.asarray(self.base._eval(env, strict), dtype=float)
        e = self.exponent
        if e == 0.0:
            # empty-product convention, also for 0^0
            return np.ones_like(b) if b.ndim else 1.0

        bad = np.zeros(b.shape, dtype=bool)
        if e < 0:
            bad |= b == 0
        if not float(e).is_integer():
            bad |= b < 0
        if np.any(bad):
            reason = "zero to a negative power" if e < 0 and np.any(b == 0) else (
                "negative base with non-integer exponent"
            )
            _domain(self, reason, env, bad, strict)

        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            r = np.power(np.where(bad, 1.0, b), e)
        r = np.where(bad, np.nan, r)
        return r if r.ndim else float(r)


@dataclass(frozen=True)
class Call(Expr):
    name: str
    args: tuple[Expr, ...]

    @property
    def variables(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for a in self.args:
            out = out | a.variables
        return out

    def _eval(self, env, strict):
        vals = [a._eval(env, strict) for a in self.args]
        if self.name == "exp":
            with np.errstate(over="ignore"):
                return np.exp(vals[0])
        if self.name == "abs":
            return np.abs(vals[0])
        if self.name == "min":
            return np.minimum(vals[0], vals[1])
        if self.name == "max":
            return np.maximum(vals[0], vals[1])
        if self.name == "ln":
            x = np.asarray(vals[0], dtype=float)
            bad = ~(x > 0)
            if np.any(bad):
                _domain(self, "logarithm of a non-positive value", env, bad, strict)
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.where(bad, np.nan, np.log(np.where(bad, 1.0, x)))
            return r if r.ndim else float(r)
        raise AssertionError(self.name)


def _domain(node: Expr, reason: str, env, bad, strict: bool) -> None:
    if not strict:
        return
    bad = np.asarray(bad)
    idx = tuple(np.argwhere(bad)[0]) if bad.ndim else ()
    where = []
    for name in sorted(node.variables):
        v = np.broadcast_to(np.asarray(env[name], dtype=float), bad.shape)
        where.append(f"{name}={float(v[idx])!r}")
    raise DomainError(f"{reason} in {to_text(node)!r} at {', '.join(where) or 'constant'}")


# }}}


# {{{ evaluation


def evaluate(e: Expr, **bindings: ArrayLike) -> ArrayLike:
    """Evaluate *e* under *bindings*; raise :class:`DomainError` on any bad point.

    Array bindings broadcast against each other. The result is always finite.
    """
    missing = e.variables - bindings.keys()
    if missing:
        raise KeyError(f"missing bindings for {sorted(missing)}")

    env = {k: (np.asarray(v, dtype=float) if np.ndim(v) else float(v))
           for k, v in bindings.items()}
    shape = np.broadcast_shapes(*(np.shape(v) for v in env.values())) if env else ()
    r = np.broadcast_to(np.asarray(e._eval(env, strict=True), dtype=float), shape)
    bad = ~np.isfinite(r)
    if np.any(bad):
        _domain(e, "non-finite result", env, bad, True)
    return float(r) if not shape else np.array(r)


def evaluate_masked(e: Expr, **bindings: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`evaluate` but returns ``(values, ok)`` instead of raising.

    Entries where evaluation failed carry NaN and ``ok == False``.
    """
    env = {k: np.asarray(v, dtype=float) for k, v in bindings.items()}
    shape = np.broadcast_shapes(*(v.shape for v in env.values())) if env else ()
    r = np.broadcast_to(np.asarray(e._eval(env, strict=False), dtype=float), shape)
    ok = np.isfinite(r)
    return np.where(ok, r, np.nan), ok


def as_expr(value: Expr | float | int | str, allowed=("t",)) -> Expr:
    """Coerce constants and text to an :class:`Expr`."""
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return parse(value, set(allowed))
    return Num(float(value))


def constant_value(e: Expr) -> float | None:
    """Return the value of a variable-free expression, otherwise ``None``."""
    if e.variables:
        return None
    return float(evaluate(e))


# }}}


# {{{ printing


def _fmt_number(v: float) -> str:
    s = repr(float(v))
    return f"({s})" if v < 0 or s.startswith("-") else s


def to_text(e: Expr) -> str:
    """Fully parenthesized text that parses back to a structurally equal tree."""
    if isinstance(e, Num):
        return _fmt_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_text(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Pow):
        return f"({to_text(e.base)}^{_fmt_number(e.exponent)})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_text(a) for a in e.args)})"
    raise TypeError(type(e))


# }}}


# {{{ parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}",
                                  len(text[:pos].encode()))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), len(text[:pos].encode())))
        pos = m.end()
    tokens.append(_Token("end", "", len(text.encode())))
    return tokens


class _Parser:
    def __init__(self, text: str, allowed: frozenset[str]) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0
        self.allowed = allowed

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> _Token:
        if self.tok.text != text or self.tok.kind == "end":
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, message: str):
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"{message}, found {what}", t.offset)

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            self.fail("unexpected token")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            e = BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        if self.tok.kind == "op" and self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            start = self.tok.offset
            rhs = self.unary()
            if rhs.variables:
                raise ExprSyntaxError("exponent must be constant", start)
            try:
                exponent = float(evaluate(rhs))
            except DomainError as exc:
                raise ExprSyntaxError(f"bad exponent: {exc}", start) from None
            return Pow(base, exponent)
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "name":
            self.advance()
            if t.text in UNARY_FUNCTIONS or t.text in BINARY_FUNCTIONS:
                return self.call(t)
            if t.text not in self.allowed:
                raise UnknownVariableError(t.text, t.offset)
            return Var(t.text)
        if t.kind == "op" and t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expected a number, variable, function or '('")

    def call(self, name: _Token) -> Expr:
        self.expect("(")
        args = [self.expr()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        arity = 1 if name.text in UNARY_FUNCTIONS else 2
        if len(args) != arity:
            raise ExprSyntaxError(
                f"{name.text}() takes {arity} argument(s), got {len(args)}", name.offset)
        if name.text == "sqrt":
            return Pow(args[0], 0.5)
        return Call(name.text, tuple(args))


def parse(text: str, allowed_vars=frozenset({"t"})) -> Expr:
    """Parse *text* into an expression over *allowed_vars* (a subset of t, x, u)."""
    allowed = frozenset(allowed_vars)
    if not allowed <= ALL_VARIABLES:
        raise ValueError(f"allowed variables must be a subset of {sorted(ALL_VARIABLES)}")
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text, allowed).parse()


def substitute(e: Expr, name: str, value: float) -> Expr:
    """Replace variable *name* by the constant *value*."""
    if isinstance(e, Var):
        return Num(float(value)) if e.name == name else e
    if isinstance(e, Num):
        return e
    if isinstance(e, Neg):
        return Neg(substitute(e.operand, name, value))
    if isinstance(e, BinOp):
        return BinOp(e.op, substitute(e.left, name, value), substitute(e.right, name, value))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, name, value), e.exponent)
    if isinstance(e, Call):
        return Call(e.name, tuple(substitute(a, name, value) for a in e.args))
    raise TypeError(type(e))


def rename(e: Expr, old: str, new: str) -> Expr:
    """Rename variable *old* to *new* (e.g. reuse an ``l(t)`` as a function of ``u``)."""
    if isinstance(e, Var):
        return Var(new) if e.name == old else e
    if isinstance(e, Num):
        return e
    if isinstance(e, Neg):
        return Neg(rename(e.operand, old, new))
    if isinstance(e, BinOp):
        return BinOp(e.op, rename(e.left, old, new), rename(e.right, old, new))
    if isinstance(e, Pow):
        return Pow(rename(e.base, old, new), e.exponent)
    if isinstance(e, Call):
        return Call(e.name, tuple(rename(a, old, new) for a in e.args))
    raise TypeError(type(e))


# }}}
