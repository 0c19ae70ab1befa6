"""Real special functions used by the closed-form radial integrals.

Everything here works on plain floats; :func:`log_gamma` also accepts numpy
arrays because the two-electron kernels evaluate it over whole batches of
primitive exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LaguerrePolynomial",
    "gamma_fn",
    "log_gamma",
    "lower_incomplete_gamma",
    "upper_incomplete_gamma",
    "gauss2f1_restricted",
    "laguerre_expand",
]

# Lanczos approximation, g = 7, n = 9 (relative error ~1e-15 for x > 0.5).
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
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_FLOAT_MAX_LOG = math.log(np.finfo(float).max)


def _lanczos_sum(z):
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc = acc + c / (z + i)
    return acc


def log_gamma(x):
    """Natural log of the gamma function for ``x > 0``.

    Accepts a float or a numpy array; raises ``ValueError`` if any argument is
    not strictly positive.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0.0)):
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    # Shift small arguments up by one so the Lanczos sum stays accurate.
    small = arr < 0.5
    xs = np.where(small, arr + 1.0, arr)
    z = xs - 1.0
    t = z + _LANCZOS_G + 0.5
    out = _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(_lanczos_sum(z))
    out = np.where(small, out - np.log(np.where(small, arr, 1.0)), out)
    if np.ndim(out) == 0:
        return float(out)
    return out


def gamma_fn(x: float) -> float:
    """Gamma function for real ``x > 0``.

    Raises ``OverflowError`` instead of returning ``inf`` once the result
    leaves the double range (roughly ``x > 171.6``); use :func:`log_gamma`
    there.
    """
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"gamma_fn requires x > 0, got {x!r}")
    if x < 0.5:
        return gamma_fn(x + 1.0) / x
    lg = log_gamma(x)
    if lg > _FLOAT_MAX_LOG:
        raise OverflowError(f"gamma({x}) overflows; use log_gamma")
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    # Split the power so t**(z+1/2) cannot overflow before exp(-t) scales it.
    half = t ** (0.5 * (z + 0.5))
    return math.sqrt(2.0 * math.pi) * half * math.exp(-t) * half * _lanczos_sum(z)


def _log_abs_gamma_sign(x: float) -> tuple[float, float]:
    """(log|Gamma(x)|, sign) for any real x that is not a non-positive integer."""
    if x > 0.0:
        return log_gamma(x), 1.0
    if x == math.floor(x):
        raise ValueError(f"gamma has a pole at {x}")
    # Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    s = math.sin(math.pi * x)
    val = math.log(math.pi) - math.log(abs(s)) - log_gamma(1.0 - x)
    return val, math.copysign(1.0, s)


def _check_incomplete_args(a: float, x: float) -> None:
    if not a > 0.0:
        raise ValueError(f"incomplete gamma requires a > 0, got a={a!r}")
    if not x >= 0.0:
        raise ValueError(f"incomplete gamma requires x >= 0, got x={x!r}")


def _gamma_series(a: float, x: float) -> float:
    # gamma(a, x) = e^{-x} x^a sum_n x^n / (a (a+1) ... (a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-17:
            break
    else:
        raise ArithmeticError(f"incomplete gamma series failed for a={a}, x={x}")
    return total * math.exp(-x + a * math.log(x))


def _gamma_contfrac(a: float, x: float) -> float:
    # Upper Gamma(a, x) by modified Lentz evaluation of the Legendre fraction.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise ArithmeticError(f"incomplete gamma fraction failed for a={a}, x={x}")
    return math.exp(-x + a * math.log(x)) * h


def lower_incomplete_gamma(a: float, x: float) -> float:
    """Lower incomplete gamma, the integral of t^(a-1) e^(-t) over [0, x]."""
    a = float(a)
    x = float(x)
    _check_incomplete_args(a, x)
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return math.exp(log_gamma(a)) - _gamma_contfrac(a, x)


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Upper incomplete gamma, the integral of t^(a-1) e^(-t) over [x, inf)."""
    a = float(a)
    x = float(x)
    _check_incomplete_args(a, x)
    if x == 0.0:
        return math.exp(log_gamma(a))
    if x < a + 1.0:
        return math.exp(log_gamma(a)) - _gamma_series(a, x)
    return _gamma_contfrac(a, x)


def gauss2f1_restricted(b: float, c: float, z: float, max_terms: int = 20000) -> tuple[float, bool]:
    """Sum 2F1(1, b; c; z) = sum_j (b)_j / (c)_j z^j for 0 <= z < 1.

    Returns ``(partial_sum, converged)``. The flag is false when ``max_terms``
    terms were used without the relative term size dropping below 1e-16.
    """
    if not (b > 0.0 and c > 0.0):
        raise ValueError(f"gauss2f1_restricted requires b, c > 0, got b={b}, c={c}")
    if not 0.0 <= z < 1.0:
        raise ValueError(f"gauss2f1_restricted requires 0 <= z < 1, got z={z}")
    term = 1.0
    total = 1.0
    for j in range(max_terms):
        term *= (b + j) / (c + j) * z
        total += term
        if term <= 1e-16 * total:
            return total, True
    return total, False


@dataclass(frozen=True)
class LaguerrePolynomial:
    """Generalized Laguerre polynomial L_q^gamma(x) in monomial form.

    ``coefficients[j]`` multiplies ``x**j``.
    """

    degree: int
    upper_index: float
    coefficients: tuple[float, ...]

    def __call__(self, x):
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc


def laguerre_expand(q: int, gamma: float) -> LaguerrePolynomial:
    """Monomial coefficients of L_q^gamma with real upper index.

    coefficient of x**j is (-1)^j C(q + gamma, q - j) / j!, where the binomial
    is the gamma-function generalization. Each coefficient is assembled from
    log-gamma differences so that large ``q + gamma`` does not overflow.
    """
    if int(q) != q or q < 0:
        raise ValueError(f"Laguerre degree must be a non-negative integer, got {q!r}")
    q = int(q)
    gamma = float(gamma)
    if not gamma + q > -1.0:
        raise ValueError(f"Laguerre expansion requires gamma + q > -1, got gamma={gamma}, q={q}")
    log_top = log_gamma(q + gamma + 1.0)
    coefs = []
    for j in range(q + 1):
        arg = gamma + j + 1.0
        if arg <= 0.0 and arg == math.floor(arg):
            # 1/Gamma vanishes at its poles
            coefs.append(0.0)
            continue
        lg, sign = _log_abs_gamma_sign(arg)
        mag = log_top - lg - math.lgamma(q - j + 1.0) - math.lgamma(j + 1.0)
        coefs.append(sign * (-1.0) ** j * math.exp(mag))
    return LaguerrePolynomial(q, gamma, tuple(coefs))
