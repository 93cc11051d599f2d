"""Built-in example problems, stored as configuration text."""

from __future__ import annotations

from .config import parse_text
from .errors import ConfigError

# name -> (default mode, configuration text)
PRESETS: dict[str, tuple[str, str]] = {
    "example-2.8": ("bound", """\
# u <= t^(-1/2) + t^(-1/3) int_0^t (t-s)^(-1/3) s^(-1/12) u^(1/2)(s) ds
theorem = thm24
a = 1
b = 1
alpha = 1/2
delta = 1/3
beta = 2/3
p = 2
l = t^(-1/3)
omega = u^(1/2)
T = 2
"""),
    "example-2.9": ("bound", """\
# u <= t^(-1/3) + int_0^t (t-s)^(-1/3) s^(-1/2) u^(1/2)(s) ds
theorem = cor26
a = 1
b = 1
beta = 2/3
gamma = 1/2
p = 2
l = t^(-1/2)
omega = u^(1/2)
T = 2
"""),
    "example-3.12": ("check", """\
# D^(2/3) x = t^(-3/4) x^(1/2) + t^(-1/2) x,  t^(1/3) x(t) -> 1
route = thm37
f = t^(-3/4)*x^(1/2) + t^(-1/2)*x
x0 = 1
beta = 2/3
l = t^(-11/12) + t^(-5/6)
omega = u^(1/2) + u
p = 1.6
T = 1
"""),
    "example-3.13": ("check", """\
# D^(2/3) x = t^(-2/3) ln(1 + x^(1/2)),  t^(1/3) x(t) -> 1
route = cor38
f = t^(-2/3)*ln(1 + x^(1/2))
x0 = 1
beta = 2/3
l = t^(-2/3)
k = 0
gamma = 1/2
p = 1.75
T = 1
"""),
    "example-3.14": ("check", """\
# D^(2/3) x = t^(-1/2) x^2/(1+x) + t^(-3/4),  t^(1/3) x(t) -> 1
# l is the Lipschitz constant in x; with k = |f(t,0)| it also gives the
# growth envelope l|x| + k used by verify
route = thm310
f = t^(-1/2)*x^2/(1 + x) + t^(-3/4)
x0 = 1
beta = 2/3
l = t^(-1/2)
k = t^(-3/4)
gamma = 1
p = 1.75
T = 1
N = 2048
tol = 1e-8
"""),
    "linear-ml": ("solve", """\
# D^(2/3) x = x,  t^(1/3) x(t) -> 1; solution Gamma(2/3) t^(-1/3) E_{2/3,2/3}(t^(2/3))
f = x
x0 = 1
beta = 2/3
T = 1
N = 4096
"""),
}


def preset(name: str) -> tuple[str, dict[str, str]]:
    """``(default mode, key-value mapping)`` of a built-in example."""
    try:
        mode, text = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    return mode, parse_text(text)


def preset_text(name: str) -> str:
    mode, text = PRESETS[name] if name in PRESETS else preset(name)
    return f"mode = {mode}\n{text}"
