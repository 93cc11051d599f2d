r"""Gamma, two-parameter Mittag-Leffler and a singularity-safe power."""

from __future__ import annotations

import math

import mpmath
import numpy as np

from .errors import ConvergenceError, DomainError

# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients)
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _gamma_lanczos(x: float) -> float:
    if x < 0.5:
        # reflection keeps the series argument >= 0.5
        return math.pi / (math.sin(math.pi * x) * _gamma_lanczos(1.0 - x))

    x -= 1.0
    s = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        s += c / (x + i)
    w = x + _LANCZOS_G + 0.5
    # split the power to postpone overflow for large arguments
    h = w ** (0.5 * (x + 0.5))
    return math.sqrt(2.0 * math.pi) * h * (h * math.exp(-w)) * s


def gamma(x):
    """Gamma function for ``x > 0`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise DomainError(f"gamma is only defined here for x > 0, got {x!r}")
    if xa.ndim == 0:
        return _gamma_lanczos(float(xa))
    return np.vectorize(_gamma_lanczos, otypes=[float])(xa)


def pow_safe(base, exponent: float):
    """``base**exponent`` for ``base >= 0`` with ``0**0 = 1`` and ``0**e = 0`` for e > 0."""
    b = np.asarray(base, dtype=float)
    if np.any(b < 0):
        raise DomainError(f"pow_safe requires a non-negative base, got {base!r}")
    if exponent < 0 and np.any(b == 0):
        raise DomainError(f"0 raised to the negative power {exponent}")
    with np.errstate(divide="ignore"):
        r = np.power(b, exponent)
    return float(r) if r.ndim == 0 else r


def mittag_leffler(rho: float, sigma: float, z: float, *, kmax: int = 10_000) -> float:
    r"""Two-parameter Mittag-Leffler function :math:`E_{\rho,\sigma}(z)` for real z.

    Direct power series :math:`\sum_k z^k / \Gamma(\rho k + \sigma)`. This is a
    reference implementation for moderate arguments (``|z| <= 50``), not a
    general-purpose special function. Nonnegative arguments are summed in
    double precision with compensated summation; negative arguments, whose
    alternating series cancels catastrophically, are summed in extended
    precision.
    """
    if not 0.0 < rho <= 1.0:
        raise DomainError(f"rho must lie in (0, 1], got {rho}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if abs(z) > 50:
        raise DomainError(f"series evaluation is limited to |z| <= 50, got {z}")

    if z == 0:
        return 1.0 / gamma(sigma)
    if z > 0:
        return _ml_positive(rho, sigma, z, kmax)
    return _ml_extended(rho, sigma, z, kmax)


def _ml_positive(rho: float, sigma: float, z: float, kmax: int) -> float:
    lz = math.log(z)
    terms = []
    prev = -math.inf
    small = 0
    k = 0
    while True:
        lt = k * lz - math.lgamma(rho * k + sigma)
        term = math.exp(lt)
        terms.append(term)
        growing = lt > prev
        prev = lt
        if not growing and term < 1e-17 * math.fsum(terms):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        k += 1
        if k >= kmax and growing:
            raise ConvergenceError(f"Mittag-Leffler series terms still growing at k={k}")
        if k >= 50 * kmax:
            raise ConvergenceError("Mittag-Leffler series did not converge")
    return math.fsum(terms)


def _ml_extended(rho: float, sigma: float, z: float, kmax: int) -> float:
    # the largest term is about exp(|z|^(1/rho)); the result is O(1) or smaller,
    # so carry enough digits to absorb the cancellation
    peak_digits = abs(z) ** (1.0 / rho) / math.log(10.0)
    dps = int(40 + 1.2 * peak_digits)
    with mpmath.workdps(dps):
        # exact binary inputs; a double-rounded Gamma argument would be fatal here
        mrho, msigma = mpmath.mpf(rho), mpmath.mpf(sigma)
        mz = mpmath.mpf(z)
        zk = mpmath.mpf(1)
        total = mpmath.mpf(0)
        eps = mpmath.mpf(10) ** (-(dps - 5))
        prev = mpmath.mpf(0)
        k = 0
        small = 0
        while True:
            term = zk * mpmath.rgamma(mrho * k + msigma)
            total += term
            growing = abs(term) > abs(prev)
            prev = term
            if not growing and abs(term) < eps * max(abs(total), mpmath.mpf(10) ** -300):
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
            k += 1
            zk *= mz
            if k >= kmax and growing:
                raise ConvergenceError(f"Mittag-Leffler series terms still growing at k={k}")
            if k >= 50 * kmax:
                raise ConvergenceError("Mittag-Leffler series did not converge")
        return float(total)
