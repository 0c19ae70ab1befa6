"""One-center radial integrals over exponential primitives.

All integrals reduce to the moment ``A(mu, beta) = Gamma(mu + 1) / beta^(mu + 1)``
and, for the electron repulsion, to the two-range kernel

    W(a, b1; b, k, b2) = int int s^a e^(-b1 s) t^b e^(-b2 t) r_<^k / r_>^(k+1) ds dt

in the reduced radial functions ``u = r R``. Each ordered region of ``W`` is a
Gauss 2F1(1, ...) series; arguments close to 1 are routed through the
complementary ordering so that every series is summed with ratio <= 0.6.

The scalar functions below use compensated summation and serve as the
reference path. :func:`channel_tables` evaluates the same formulas over numpy
batches and is what the SCF code calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .angular import angular_table
from .basis import BasisFunction, BasisSetSpec
from .specfun import gauss2f1_restricted, log_gamma

__all__ = [
    "ChannelIntegralTables",
    "basic_a",
    "overlap",
    "kinetic",
    "nuclear",
    "two_range_w",
    "slater_rk",
    "channel_tables",
    "SERIES_SWITCH",
]

# Largest 2F1 argument summed directly.
SERIES_SWITCH = 0.6


def basic_a(mu: float, beta: float) -> float:
    """Gamma(mu + 1) / beta^(mu + 1) for mu > -1, beta > 0."""
    if not mu > -1.0:
        raise ValueError(f"basic_a requires mu > -1, got {mu}")
    if not beta > 0.0:
        raise ValueError(f"basic_a requires beta > 0, got {beta}")
    return math.exp(log_gamma(mu + 1.0) - (mu + 1.0) * math.log(beta))


def _check_same_l(f: BasisFunction, g: BasisFunction) -> None:
    if f.l != g.l:
        raise ValueError(f"one-electron integrals need equal l, got {f.l} and {g.l}")


def overlap(f: BasisFunction, g: BasisFunction) -> float:
    _check_same_l(f, g)
    beta = f.zeta + g.zeta
    return math.fsum(
        a.coefficient * b.coefficient * basic_a(a.power + b.power + 2.0, beta)
        for a, b in product(f.primitives, g.primitives)
    )


def kinetic(f: BasisFunction, g: BasisFunction) -> float:
    """(1/2) int u_f' u_g' dr + l(l+1)/2 int u_f u_g / r^2 dr."""
    _check_same_l(f, g)
    zf, zg = f.zeta, g.zeta
    beta = zf + zg
    cent = 0.5 * f.l * (f.l + 1)
    terms = []
    for a, b in product(f.primitives, g.primitives):
        # u = c r^m e^(-zeta r), u' = c (m r^(m-1) - zeta r^m) e^(-zeta r)
        m, n = a.power + 1.0, b.power + 1.0
        cc = a.coefficient * b.coefficient
        low = 0.5 * m * n + cent
        if low != 0.0:
            terms.append(cc * low * basic_a(m + n - 2.0, beta))
        terms.append(-0.5 * cc * (m * zg + n * zf) * basic_a(m + n - 1.0, beta))
        terms.append(0.5 * cc * (zf * zg) * basic_a(m + n, beta))
    return math.fsum(terms)


def nuclear(f: BasisFunction, g: BasisFunction, Z: float) -> float:
    """-Z int u_f u_g / r dr."""
    _check_same_l(f, g)
    beta = f.zeta + g.zeta
    return -Z * math.fsum(
        a.coefficient * b.coefficient * basic_a(a.power + b.power + 1.0, beta)
        for a, b in product(f.primitives, g.primitives)
    )


def _region_direct(p: float, beta: float, q: float, delta: float) -> float:
    n = p + q + 2.0
    z = delta / (beta + delta)
    hyp, ok = gauss2f1_restricted(n, q + 2.0, z)
    if not ok:
        raise ArithmeticError(f"2F1 series did not converge (p={p}, q={q}, z={z})")
    return math.exp(log_gamma(n) - n * math.log(beta + delta)) / (q + 1.0) * hyp


def _region_swapped_integer(p: float, beta: float, q: int, delta: float) -> float:
    # int y^q e^(-delta y) int_y^inf x^p e^(-beta x) dx dy via the finite
    # incomplete-gamma sum for integer q.
    s = beta + delta
    terms = [
        math.exp(log_gamma(p + j + 1.0) + j * math.log(delta) - math.lgamma(j + 1.0) - (p + j + 1.0) * math.log(s))
        for j in range(q + 1)
    ]
    return math.exp(math.lgamma(q + 1.0) - (q + 1.0) * math.log(delta)) * math.fsum(terms)


def _region(p: float, beta: float, q: float, delta: float, fast: bool = True) -> float:
    """int_0^inf x^p e^(-beta x) int_0^x y^q e^(-delta y) dy dx."""
    z = delta / (beta + delta)
    if z <= SERIES_SWITCH or not p > -1.0:
        return _region_direct(p, beta, q, delta)
    full = basic_a(p, beta) * basic_a(q, delta)
    if fast and q == int(q) and q >= 0:
        return full - _region_swapped_integer(p, beta, int(q), delta)
    return full - _region_direct(q, delta, p, beta)


def two_range_w(a: float, beta1: float, b: float, k: int, beta2: float, fast: bool = True) -> float:
    """Two-range kernel W for reduced powers ``a``, ``b`` and multipole ``k``.

    Symmetric under ``(a, beta1) <-> (b, beta2)``. ``fast=False`` disables the
    integer-power closed form (used to cross-check it).
    """
    if not (a + k > -1.0 and b + k > -1.0 and a + b > -1.0):
        raise ValueError(f"two_range_w diverges for a={a}, b={b}, k={k}")
    if not (beta1 > 0.0 and beta2 > 0.0):
        raise ValueError("two_range_w needs positive exponents")
    t1 = _region(b - k - 1.0, beta2, a + k, beta1, fast)
    t2 = _region(a - k - 1.0, beta1, b + k, beta2, fast)
    # Sort the two terms so (a, beta1) <-> (b, beta2) gives a bitwise-equal sum.
    return min(t1, t2) + max(t1, t2)


def slater_rk(fa: BasisFunction, fb: BasisFunction, fc: BasisFunction, fd: BasisFunction, k: int) -> float:
    """Slater radial integral R^k(ab; cd); electron 1 carries ``u_a u_b``."""
    b1 = fa.zeta + fb.zeta
    b2 = fc.zeta + fd.zeta
    terms = []
    for pa, pb in product(fa.primitives, fb.primitives):
        for pc, pd in product(fc.primitives, fd.primitives):
            w = two_range_w(pa.power + pb.power + 2.0, b1, pc.power + pd.power + 2.0, k, b2)
            terms.append(pa.coefficient * pb.coefficient * pc.coefficient * pd.coefficient * w)
    return math.fsum(terms)


# --------------------------------------------------------------------------
# Batched evaluation for whole channel blocks


def _log_gamma_arr(x):
    return np.asarray(log_gamma(np.asarray(x, dtype=float)), dtype=float)


def _hyp_series(n, c, z, max_terms=20000):
    term = np.ones_like(z)
    total = np.ones_like(z)
    active = z > 0.0
    j = 0
    while np.any(active):
        if j >= max_terms:
            raise ArithmeticError("batched 2F1 series did not converge")
        term = np.where(active, term * (n + j) / (c + j) * z, 0.0)
        total = total + term
        active = active & (term > 1e-17 * total)
        j += 1
    return total


def _region_direct_arr(p, beta, q, delta):
    n = p + q + 2.0
    s = beta + delta
    z = delta / s
    pref = np.exp(_log_gamma_arr(n) - n * np.log(s)) / (q + 1.0)
    return pref * _hyp_series(n, q + 2.0, z)


def _region_arr(p, beta, q, delta):
    p, beta, q, delta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (p, beta, q, delta)))
    out = np.empty(p.shape)
    z = delta / (beta + delta)
    swap = (z > SERIES_SWITCH) & (p > -1.0)
    d = ~swap
    if np.any(d):
        out[d] = _region_direct_arr(p[d], beta[d], q[d], delta[d])
    if np.any(swap):
        ps, bs, qs, ds = p[swap], beta[swap], q[swap], delta[swap]
        full = np.exp(_log_gamma_arr(ps + 1.0) - (ps + 1.0) * np.log(bs) + _log_gamma_arr(qs + 1.0) - (qs + 1.0) * np.log(ds))
        out[swap] = full - _region_direct_arr(qs, ds, ps, bs)
    return out


def _two_range_w_arr(a, beta1, b, k, beta2):
    t1 = _region_arr(b - k - 1.0, beta2, a + k, beta1)
    t2 = _region_arr(a - k - 1.0, beta1, b + k, beta2)
    return np.minimum(t1, t2) + np.maximum(t1, t2)


@dataclass(frozen=True)
class _PairDensity:
    """Primitive products u_a u_b for all (a, b) in two channels."""

    shape: tuple[int, int]
    power: np.ndarray
    exponent: np.ndarray
    weights: np.ndarray  # (n_a * n_b, n_prim) coefficient map


def _pair_density(fa_list, fb_list) -> _PairDensity:
    powers, exps, rows, cols, vals = [], [], [], [], []
    col = 0
    for i, fa in enumerate(fa_list):
        for j, fb in enumerate(fb_list):
            pair = i * len(fb_list) + j
            for pa, pb in product(fa.primitives, fb.primitives):
                powers.append(pa.power + pb.power + 2.0)
                exps.append(fa.zeta + fb.zeta)
                rows.append(pair)
                cols.append(col)
                vals.append(pa.coefficient * pb.coefficient)
                col += 1
    weights = np.zeros((len(fa_list) * len(fb_list), col))
    weights[rows, cols] = vals
    return _PairDensity((len(fa_list), len(fb_list)), np.array(powers), np.array(exps), weights)


def _rk_block(d1: _PairDensity, d2: _PairDensity, k: int) -> np.ndarray:
    a = d1.power[:, None]
    b1 = d1.exponent[:, None]
    b = d2.power[None, :]
    b2 = d2.exponent[None, :]
    w = _two_range_w_arr(a, b1, b, float(k), b2)
    r = d1.weights @ w @ d2.weights.T
    return r.reshape(d1.shape + d2.shape)


@dataclass(frozen=True)
class ChannelIntegralTables:
    """Integral tables for one basis set and nuclear charge.

    ``S``, ``T``, ``V`` map ``l`` to matrices. ``rk`` maps
    ``(la, lb, lc, ld, k)`` to the tensor ``R^k(ab; cd)`` with indices in the
    channel order of the basis set: Coulomb blocks use ``(l, l, l', l', 0)``
    and exchange blocks ``(l, l', l, l', k)``.
    """

    Z: float
    S: dict
    T: dict
    V: dict
    rk: dict

    @property
    def h(self) -> dict:
        return {l: self.T[l] + self.V[l] for l in self.S}


def _one_electron(fs, fn, *args) -> np.ndarray:
    n = len(fs)
    m = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            m[i, j] = m[j, i] = fn(fs[i], fs[j], *args)
    return m


@lru_cache(maxsize=256)
def channel_tables(basis: BasisSetSpec, Z: float) -> ChannelIntegralTables:
    """All one- and two-electron tables needed by the closed-shell Fock build.

    Only the multipole orders allowed by the angular selection rules are
    computed. Results are cached on ``(basis, Z)``; the returned object must
    be treated as read-only.
    """
    ls = basis.l_values
    S, T, V = {}, {}, {}
    for l in ls:
        fs = basis.channel(l)
        S[l] = _one_electron(fs, overlap)
        T[l] = _one_electron(fs, kinetic)
        V[l] = _one_electron(fs, nuclear, Z)
    ang = angular_table(max(ls))
    dens = {}
    for la in ls:
        for lb in ls:
            if la <= lb:
                dens[(la, lb)] = _pair_density(basis.channel(la), basis.channel(lb))
    rk = {}
    for l1 in ls:
        for l2 in ls:
            if l1 <= l2:
                blk = _rk_block(dens[(l1, l1)], dens[(l2, l2)], 0)
                rk[(l1, l1, l2, l2, 0)] = blk
                rk[(l2, l2, l1, l1, 0)] = blk.transpose(2, 3, 0, 1)
            lo, hi = min(l1, l2), max(l1, l2)
            for k, _ in ang[(l1, l2)]:
                key = (l1, l2, l1, l2, k)
                if key in rk:
                    continue
                if l1 <= l2:
                    rk[key] = _rk_block(dens[(l1, l2)], dens[(l1, l2)], k)
                else:
                    rk[key] = rk[(lo, hi, lo, hi, k)].transpose(1, 0, 3, 2)
    for arr in list(S.values()) + list(T.values()) + list(V.values()) + list(rk.values()):
        arr.setflags(write=False)
    return ChannelIntegralTables(float(Z), S, T, V, rk)
