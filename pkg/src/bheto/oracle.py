"""Quadrature reference values for the radial integrals.

Test infrastructure only: nothing in the SCF path imports this module.

Two independent integrators are provided. The ``quad_*`` functions evaluate
the integrands with mpmath at 30 significant digits and integrate by
tanh-sinh quadrature (slow, high precision). The ``de_*`` functions use a
vectorized double-exponential rule in double precision, halving the step
until two levels agree to ``rtol``; they are fast enough for randomized
property tests. Both cope with the algebraic end-point behavior
``r^(2 nu - 2)`` of the non-integer families.
"""

from __future__ import annotations

from typing import Callable, Sequence

import math

import mpmath as mp
import numpy as np

from .basis import BasisFunction

__all__ = [
    "QuadratureError",
    "quadrature_oracle",
    "quad_overlap",
    "quad_kinetic",
    "quad_nuclear",
    "quad_weighted_norm",
    "quad_slater_rk",
    "de_quad",
    "de_overlap",
    "de_weighted_norm",
    "de_kinetic",
    "de_nuclear",
    "de_slater_rk",
]

_DPS = 30


class QuadratureError(ArithmeticError):
    pass


def quadrature_oracle(
    func: Callable, breakpoints: Sequence[float] = (), a=0, b=mp.inf, rtol: float = 1e-11, atol: float = 0.0
) -> float:
    """Integrate ``func`` over ``[a, b]`` (default the half line).

    ``breakpoints`` split the domain where the integrand changes scale. Raises
    :class:`QuadratureError` if the error estimate exceeds ``rtol |value| + atol``.
    """
    with mp.workdps(_DPS):
        pts = [mp.mpf(a)] + [mp.mpf(x) for x in sorted(breakpoints) if a < x < b] + [b if b == mp.inf else mp.mpf(b)]
        val, err = mp.quad(func, pts, error=True, maxdegree=10)
        if err > rtol * abs(val) + atol:
            raise QuadratureError(f"quadrature error estimate {float(err):.2e} exceeds rtol {rtol:g}, atol {atol:g}")
        return float(val)


def _u(f: BasisFunction):
    prims = [(mp.mpf(p.coefficient), mp.mpf(p.power) + 1, mp.mpf(p.exponent)) for p in f.primitives]

    def u(r):
        return mp.fsum(c * r**m for c, m, _ in prims) * mp.exp(-prims[0][2] * r)

    def du(r):
        z = prims[0][2]
        return mp.fsum(c * (m * r ** (m - 1) - z * r**m) for c, m, _ in prims) * mp.exp(-z * r)

    return u, du


def _breaks(*zetas: float) -> list[float]:
    pts = set()
    for z in zetas:
        for s in (0.5, 2.0, 8.0, 24.0):
            pts.add(s / z)
    return sorted(pts)


def quad_overlap(f: BasisFunction, g: BasisFunction) -> float:
    uf, _ = _u(f)
    ug, _ = _u(g)
    return quadrature_oracle(lambda r: uf(r) * ug(r), _breaks(f.zeta + g.zeta))


def quad_weighted_norm(f: BasisFunction, g: BasisFunction, alpha: float) -> float:
    """Integral of R_f R_g r^(2 - alpha), the measure the BHETO sets are orthonormal under."""
    uf, _ = _u(f)
    ug, _ = _u(g)
    a = mp.mpf(alpha)
    # normalized functions: values are O(1), so an absolute floor handles zero off-diagonals
    return quadrature_oracle(lambda r: uf(r) * ug(r) * r ** (-a), _breaks(f.zeta + g.zeta), atol=1e-13)


def quad_kinetic(f: BasisFunction, g: BasisFunction) -> float:
    uf, duf = _u(f)
    ug, dug = _u(g)
    cent = mp.mpf(f.l * (f.l + 1)) / 2
    return quadrature_oracle(
        lambda r: duf(r) * dug(r) / 2 + cent * uf(r) * ug(r) / r**2, _breaks(f.zeta + g.zeta)
    )


def quad_nuclear(f: BasisFunction, g: BasisFunction, Z: float) -> float:
    uf, _ = _u(f)
    ug, _ = _u(g)
    return -Z * quadrature_oracle(lambda r: uf(r) * ug(r) / r, _breaks(f.zeta + g.zeta))


def _pair_terms(fa: BasisFunction, fb: BasisFunction):
    return [
        (mp.mpf(pa.coefficient) * mp.mpf(pb.coefficient), mp.mpf(pa.power + pb.power + 2), mp.mpf(fa.zeta + fb.zeta))
        for pa in fa.primitives
        for pb in fb.primitives
    ]


def quad_slater_rk(fa, fb, fc, fd, k: int, nested: bool = False) -> float:
    """R^k(ab; cd) by quadrature over the electron-2 coordinate.

    The inner radial potential of the ``(a, b)`` density is taken from mpmath's
    incomplete gamma functions; with ``nested=True`` it is itself obtained by
    quadrature, giving a fully numerical double integral (slow).
    """
    rho1 = _pair_terms(fa, fb)
    uc, _ = _u(fc)
    ud, _ = _u(fd)
    kk = mp.mpf(k)

    def potential(t):
        inner_lo = mp.mpf(0)
        inner_hi = mp.mpf(0)
        for c, a, beta in rho1:
            # int_0^t s^(a+k) e^(-beta s) ds and int_t^inf s^(a-k-1) e^(-beta s) ds
            inner_lo += c * mp.gammainc(a + kk + 1, 0, beta * t) / beta ** (a + kk + 1)
            inner_hi += c * mp.gammainc(a - kk, beta * t, mp.inf) / beta ** (a - kk)
        return inner_lo / t ** (kk + 1) + inner_hi * t**kk

    def potential_nested(t):
        def dens(s):
            return mp.fsum(c * s**a * mp.exp(-beta * s) for c, a, beta in rho1)

        lo = mp.quad(lambda s: dens(s) * s**kk, [0, t])
        hi = mp.quad(lambda s: dens(s) / s ** (kk + 1), [t, mp.inf])
        return lo / t ** (kk + 1) + hi * t**kk

    pot = potential_nested if nested else potential
    zetas = [fa.zeta + fb.zeta, fc.zeta + fd.zeta]
    return quadrature_oracle(lambda t: uc(t) * ud(t) * pot(t), _breaks(*zetas), rtol=1e-11)


# ---------------------------------------------------------------------------
# double-exponential quadrature in double precision

# The left end reaches x ~ 1e-277 so that integrands as singular as x^-0.9
# lose nothing to truncation; the right end is far into the exponential tail.
_T_LEFT = 6.7
_T_RIGHT = 5.0


def _de_grid(h: float):
    t = np.arange(-_T_LEFT, _T_RIGHT + 0.5 * h, h)
    u = 0.5 * math.pi * np.sinh(t)
    du = 0.5 * math.pi * np.cosh(t)
    return u, du


def _half_line(h: float, scale: float, start=0.0):
    """Exp-sinh nodes and weights for ``[start, inf)``; ``start`` may be an array."""
    u, du = _de_grid(h)
    e = scale * np.exp(u)
    x = np.asarray(start, dtype=float)[..., None] + e
    return x, np.broadcast_to(e * du * h, x.shape)


def _finite(h: float, c):
    """Tanh-sinh nodes and weights for ``[0, c]``; ``c`` may be an array."""
    u, du = _de_grid(h)
    c = np.asarray(c, dtype=float)[..., None]
    x = c / (1.0 + np.exp(-2.0 * u))
    w = c * du * h / (2.0 * np.cosh(u) ** 2)
    return x, w


def _refine(evaluate, rtol: float, h0: float = 1.0 / 8.0, levels: int = 5) -> tuple[float, float]:
    # evaluate(h) -> (integral, integral of |integrand|); the second number is
    # the scale below which cancellation makes relative accuracy meaningless
    prev, _ = evaluate(h0)
    h = h0
    for _ in range(levels):
        h *= 0.5
        cur, scale = evaluate(h)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-3 * scale):
            return float(cur), float(scale)
        prev = cur
    raise QuadratureError(f"double-exponential rule did not settle: last change {abs(cur - prev):.2e}")


def de_quad(func: Callable, scale: float = 1.0, rtol: float = 1e-13, with_scale: bool = False):
    """Integral of a vectorized ``func`` over the half line, ``scale`` the decay length.

    With ``with_scale=True`` returns ``(value, integral of |func|)``.
    """

    def ev(h):
        x, w = _half_line(h, scale)
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            y = func(x)
        y = np.where(np.isfinite(y), y, 0.0)
        return math.fsum(w * y), math.fsum(w * np.abs(y))

    val, mag = _refine(ev, rtol)
    return (val, mag) if with_scale else val


def _u_arr(f: BasisFunction, x, deriv: bool = False, shift: float = 0.0):
    # reduced radial u = r R (or u'), times x^shift, with powers applied in log space
    z = f.zeta
    lx = np.log(x)
    out = np.zeros_like(x)
    for p in f.primitives:
        c, m = p.coefficient, p.power + 1.0 + shift
        if deriv:
            out = out + c * (m * np.exp((m - 1.0) * lx - z * x) - z * np.exp(m * lx - z * x))
        else:
            out = out + c * np.exp(m * lx - z * x)
    return out


def de_weighted_norm(f: BasisFunction, g: BasisFunction, alpha: float, rtol: float = 1e-13, with_scale: bool = False):
    """Integral of R_f R_g r^(2 - alpha); the weight is split between the two factors."""
    h = -0.5 * alpha
    return de_quad(lambda x: _u_arr(f, x, shift=h) * _u_arr(g, x, shift=h), 1.0 / (f.zeta + g.zeta), rtol, with_scale)


def de_overlap(f: BasisFunction, g: BasisFunction, rtol: float = 1e-13, with_scale: bool = False):
    return de_quad(lambda x: _u_arr(f, x) * _u_arr(g, x), 1.0 / (f.zeta + g.zeta), rtol, with_scale)


def de_kinetic(f: BasisFunction, g: BasisFunction, rtol: float = 1e-13, with_scale: bool = False):
    cent = 0.5 * f.l * (f.l + 1)
    return de_quad(
        lambda x: 0.5 * _u_arr(f, x, True) * _u_arr(g, x, True) + cent * _u_arr(f, x) * _u_arr(g, x) / x**2,
        1.0 / (f.zeta + g.zeta),
        rtol,
        with_scale,
    )


def de_nuclear(f: BasisFunction, g: BasisFunction, Z: float, rtol: float = 1e-13, with_scale: bool = False):
    out = de_quad(lambda x: _u_arr(f, x) * _u_arr(g, x) / x, 1.0 / (f.zeta + g.zeta), rtol, True)
    val, mag = -Z * out[0], Z * out[1]
    return (val, mag) if with_scale else val


def de_slater_rk(fa, fb, fc, fd, k: int, rtol: float = 1e-12, with_scale: bool = False):
    """R^k(ab; cd) as a fully numerical double integral.

    For each outer node ``t`` the inner integral is split at ``t`` so that the
    kernel ``r_<^k / r_>^(k+1)`` is smooth on both pieces.
    """
    s1 = 1.0 / (fa.zeta + fb.zeta)
    s2 = 1.0 / (fc.zeta + fd.zeta)

    def rho(x):
        return _u_arr(fa, x) * _u_arr(fb, x)

    def inner(x, w, power):
        r = rho(x) * x**power
        r = np.where(np.isfinite(r), r, 0.0)
        return np.sum(r * w, axis=1), np.sum(np.abs(r) * w, axis=1)

    def ev(h):
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            t, wt = _half_line(h, s2)
            g = _u_arr(fc, t) * _u_arr(fd, t)
            keep = np.isfinite(g) & (np.abs(g * wt) > 0.0)
            t, wt, g = t[keep], wt[keep], g[keep]
            lo, lo_abs = inner(*_finite(h, t), k)
            hi, hi_abs = inner(*_half_line(h, s1, t), -(k + 1))
            pot = lo / t ** (k + 1) + hi * t**k
            pot_abs = lo_abs / t ** (k + 1) + hi_abs * t**k
        return math.fsum(wt * g * pot), math.fsum(wt * np.abs(g) * pot_abs)

    val, mag = _refine(ev, rtol)
    return (val, mag) if with_scale else val
