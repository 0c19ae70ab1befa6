"""Radial basis functions and basis-set notation.

Three radial families are supported:

``BHETO``
    Complete orthonormal exponential-type orbitals with non-integer principal
    quantum number ``n* = p + nu``,

        R(r) = N (2 zeta r)^(l + nu - 1) exp(-zeta r) L_{p-l}^{2l + 2nu - alpha}(2 zeta r)

    orthonormal under the weight ``r^(2 - alpha)`` at equal ``zeta``.
``STF``
    Nodeless Slater functions ``r^(n-1) exp(-zeta r)`` with integer ``n = p + 1``.
``NSTF``
    Slater functions with a real principal quantum number ``n*`` and gamma
    normalization.

Every function is reduced to a short list of primitives ``c r^mu exp(-zeta r)``,
which is all the integral code ever sees.

Basis sets are written as digit strings, one digit per function, with ``-``
separating angular momentum blocks: ``"1122-22"`` is two 1s, two 2s and two 2p
functions. Digit ``d`` in block ``l`` gives ``p = d - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .specfun import laguerre_expand, log_gamma

__all__ = [
    "BHETO",
    "STF",
    "NSTF",
    "FAMILIES",
    "BasisConstraintError",
    "RadialPrimitive",
    "BasisFunction",
    "BasisSkeleton",
    "BasisSetSpec",
    "CuspReport",
    "parse_notation",
    "format_notation",
    "build_basis_function",
    "build_basis_set",
    "evaluate_radial",
    "cusp_diagnostic",
    "NU_MIN",
    "NU_MAX_DEFAULT",
    "ALPHA_MARGIN",
]

BHETO = "BHETO"
STF = "STF"
NSTF = "NSTF"
FAMILIES = (BHETO, STF, NSTF)

# Kinetic integrability of an l = 0 channel with leading power r^(nu-1).
NU_MIN = 0.5
NU_MAX_DEFAULT = 1.1
ALPHA_MARGIN = 1e-9


class BasisConstraintError(ValueError):
    """A basis parameter violates one of the admissibility inequalities.

    ``constraint`` holds the failed inequality in readable form.
    """

    def __init__(self, constraint: str, detail: str = ""):
        self.constraint = constraint
        msg = f"basis constraint violated: {constraint}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


@dataclass(frozen=True)
class RadialPrimitive:
    coefficient: float
    power: float
    exponent: float

    def __post_init__(self):
        if not self.power > -1.0:
            raise BasisConstraintError("mu > -1", f"mu={self.power}")
        if not self.exponent > 0.0:
            raise BasisConstraintError("zeta > 0", f"zeta={self.exponent}")


@dataclass(frozen=True)
class BasisFunction:
    """One normalized radial function and its primitive expansion.

    ``nu`` is the fractional part of the principal quantum number, so
    ``n_star = p + nu`` for every family (``nu = 1`` for STFs). ``alpha`` is
    ``None`` for the Slater families.
    """

    family: str
    l: int
    p: int
    nu: float
    alpha: float | None
    zeta: float
    primitives: tuple[RadialPrimitive, ...]
    norm: float

    @property
    def n_star(self) -> float:
        return self.p + self.nu

    @property
    def label(self) -> str:
        return f"{self.p + 1}{'spdfgh'[self.l]}"

    @property
    def min_power(self) -> float:
        return min(pr.power for pr in self.primitives)

    def scaled(self, factor: float) -> "BasisFunction":
        """Same function multiplied by ``factor`` (primitives and norm)."""
        prims = tuple(replace(pr, coefficient=pr.coefficient * factor) for pr in self.primitives)
        return replace(self, primitives=prims, norm=self.norm * abs(factor))

    def __call__(self, r):
        return evaluate_radial(self, r)


@dataclass(frozen=True)
class BasisSkeleton:
    """Parsed notation: ordered ``(l, p)`` slots, no parameter values yet."""

    notation: str
    family: str
    slots: tuple[tuple[int, int], ...]

    @property
    def l_values(self) -> tuple[int, ...]:
        return tuple(sorted({l for l, _ in self.slots}))

    def __len__(self):
        return len(self.slots)


@dataclass(frozen=True)
class BasisSetSpec:
    """A complete basis: functions in notation order plus shared parameters."""

    family: str
    notation: str
    functions: tuple[BasisFunction, ...]
    shared_nu: float | None = None
    shared_alpha: float | None = None
    channels: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        chans: dict[int, list[BasisFunction]] = {}
        for f in self.functions:
            chans.setdefault(f.l, []).append(f)
        object.__setattr__(self, "channels", {l: tuple(fs) for l, fs in sorted(chans.items())})

    @property
    def l_values(self) -> tuple[int, ...]:
        return tuple(self.channels)

    @property
    def zetas(self) -> tuple[float, ...]:
        return tuple(f.zeta for f in self.functions)

    def channel(self, l: int) -> tuple[BasisFunction, ...]:
        return self.channels[l]

    def __len__(self):
        return len(self.functions)


def _strip(s: str) -> str:
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    return s.replace(" ", "")


def parse_notation(s: str, family: str = BHETO) -> BasisSkeleton:
    """Parse a notation string such as ``"(12-2)"`` into ordered slots.

    Block ``l`` (0-based, split on ``-``) may only hold digits ``d >= l + 1``.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown basis family {family!r}")
    body = _strip(s)
    if not body:
        raise ValueError("empty basis notation")
    slots = []
    for l, block in enumerate(body.split("-")):
        if not block:
            raise ValueError(f"empty block for l={l} in notation {s!r}")
        for ch in block:
            if not ch.isdigit():
                raise ValueError(f"invalid character {ch!r} in notation {s!r}")
            d = int(ch)
            if d <= l:
                raise ValueError(f"digit {d} not allowed in the l={l} block of {s!r} (need digit >= {l + 1})")
            slots.append((l, d - 1))
    return BasisSkeleton(body, family, tuple(slots))


def format_notation(slots: Iterable[tuple[int, int]]) -> str:
    """Inverse of :func:`parse_notation` for slots sorted by ``l``."""
    blocks: dict[int, str] = {}
    for l, p in slots:
        blocks[l] = blocks.get(l, "") + str(p + 1)
    if not blocks:
        return ""
    lmax = max(blocks)
    missing = [l for l in range(lmax + 1) if l not in blocks]
    if missing:
        raise ValueError(f"no functions for l={missing[0]}; notation blocks cannot be skipped")
    return "-".join(blocks[l] for l in range(lmax + 1))


def _bheto_function(l: int, p: int, nu: float, alpha: float, zeta: float) -> BasisFunction:
    q = p - l
    if q < 0:
        raise BasisConstraintError("p >= l", f"p={p}, l={l}")
    if alpha is None:
        raise BasisConstraintError("alpha required for BHETO")
    gamma = 2 * l + 2 * nu - alpha
    if not gamma > -1.0:
        raise BasisConstraintError(
            "alpha < 2l + 2nu + 1", f"alpha={alpha}, l={l}, nu={nu}, limit={2 * l + 2 * nu + 1}"
        )
    lag = laguerre_expand(q, gamma)
    two_z = 2.0 * zeta
    log_norm = 0.5 * ((3.0 - alpha) * math.log(two_z) + math.lgamma(q + 1.0) - log_gamma(q + gamma + 1.0))
    norm = math.exp(log_norm)
    lead = l + nu - 1.0
    prims = []
    for j, a in enumerate(lag.coefficients):
        if a == 0.0:
            continue
        coef = math.copysign(math.exp(log_norm + (lead + j) * math.log(two_z) + math.log(abs(a))), a)
        prims.append(RadialPrimitive(coef, lead + j, zeta))
    return BasisFunction(BHETO, l, p, nu, alpha, zeta, tuple(prims), norm)


def _slater_function(family: str, l: int, p: int, n_star: float, zeta: float) -> BasisFunction:
    if family == STF:
        n = p + 1
        log_norm = (n + 0.5) * math.log(2.0 * zeta) - 0.5 * math.lgamma(2 * n + 1.0)
        nu = 1.0
    else:
        if not n_star > 0.0:
            raise BasisConstraintError("n* > 0", f"n*={n_star}")
        if not n_star > l:
            raise BasisConstraintError("n* > l", f"n*={n_star}, l={l}")
        n = n_star
        log_norm = (n + 0.5) * math.log(2.0 * zeta) - 0.5 * log_gamma(2 * n + 1.0)
        nu = n_star - p
    norm = math.exp(log_norm)
    prim = RadialPrimitive(norm, n - 1.0, zeta)
    return BasisFunction(family, l, p, nu, None, zeta, (prim,), norm)


def build_basis_function(
    family: str,
    l: int,
    p: int,
    nu: float = 1.0,
    alpha: float | None = None,
    zeta: float = 1.0,
    n_star: float | None = None,
) -> BasisFunction:
    """Build one normalized radial function.

    For ``NSTF`` the principal quantum number is ``n_star`` if given, else
    ``p + nu``. ``alpha`` is only used by ``BHETO``.
    """
    if not zeta > 0.0 or not math.isfinite(zeta):
        raise BasisConstraintError("zeta > 0", f"zeta={zeta}")
    if l < 0 or p < l:
        raise BasisConstraintError("0 <= l <= p", f"l={l}, p={p}")
    if family == BHETO:
        if not nu > 0.0:
            raise BasisConstraintError("nu > 0", f"nu={nu}")
        return _bheto_function(l, p, float(nu), alpha, float(zeta))
    if family == STF:
        return _slater_function(STF, l, p, float(p + 1), float(zeta))
    if family == NSTF:
        ns = float(p + nu) if n_star is None else float(n_star)
        return _slater_function(NSTF, l, p, ns, float(zeta))
    raise ValueError(f"unknown basis family {family!r}")


def _check_pair_integrability(functions: Sequence[BasisFunction]) -> None:
    # Reduced radial u = r R behaves as r^(mu+1); u'u' and u u / r^2 need a
    # combined power above 1 to be integrable at the origin.
    by_l: dict[int, list[BasisFunction]] = {}
    for f in functions:
        by_l.setdefault(f.l, []).append(f)
    for l, fs in by_l.items():
        m = min(f.min_power for f in fs) + 1.0
        if not 2.0 * m > 1.0:
            raise BasisConstraintError(
                "kinetic integrability: reduced powers m + m' > 1", f"l={l}, smallest reduced power {m}"
            )


def build_basis_set(
    notation: str | BasisSkeleton,
    zetas: Sequence[float],
    family: str = BHETO,
    nu: float | None = None,
    alpha: float | None = None,
    n_stars: Sequence[float] | None = None,
    nu_max: float = NU_MAX_DEFAULT,
) -> BasisSetSpec:
    """Bind parameters to a notation string.

    ``zetas`` are taken in notation order. ``nu`` and ``alpha`` are shared by
    the whole set. For ``NSTF`` a per-function ``n_stars`` list may replace
    the shared ``nu``.
    """
    skel = notation if isinstance(notation, BasisSkeleton) else parse_notation(notation, family)
    family = skel.family
    zetas = [float(z) for z in zetas]
    if len(zetas) != len(skel.slots):
        raise ValueError(f"notation {skel.notation!r} needs {len(skel.slots)} zeta values, got {len(zetas)}")
    if family == BHETO:
        if nu is None or alpha is None:
            raise ValueError("BHETO basis sets need both nu and alpha")
        nu = float(nu)
        alpha = float(alpha)
        if not nu > NU_MIN:
            raise BasisConstraintError(f"nu > {NU_MIN}", f"nu={nu}")
        if not nu <= nu_max:
            raise BasisConstraintError(f"nu <= nu_max = {nu_max}", f"nu={nu}")
        l_min = min(skel.l_values)
        limit = 2 * l_min + 2 * nu + 1 - ALPHA_MARGIN
        if not alpha < limit:
            raise BasisConstraintError("alpha < 2 l_min + 2 nu + 1", f"alpha={alpha}, limit={limit}")
    elif family == STF:
        nu = 1.0
        alpha = None
    else:
        alpha = None
        if n_stars is None:
            if nu is None:
                raise ValueError("NSTF basis sets need nu or explicit n_stars")
            n_stars = [p + float(nu) for _, p in skel.slots]
        elif len(n_stars) != len(skel.slots):
            raise ValueError(f"need {len(skel.slots)} n* values, got {len(n_stars)}")
    functions = []
    for i, ((l, p), z) in enumerate(zip(skel.slots, zetas)):
        if family == NSTF:
            functions.append(build_basis_function(NSTF, l, p, zeta=z, n_star=n_stars[i]))
        else:
            functions.append(build_basis_function(family, l, p, nu=nu, alpha=alpha, zeta=z))
    _check_pair_integrability(functions)
    return BasisSetSpec(family, skel.notation, tuple(functions), shared_nu=nu, shared_alpha=alpha)


def evaluate_radial(f: BasisFunction, r):
    """Sum of ``c r^mu exp(-zeta r)`` over the primitives of ``f``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("evaluate_radial needs r > 0")
    out = np.zeros_like(r)
    for pr in f.primitives:
        out = out + pr.coefficient * r**pr.power
    out = out * np.exp(-f.zeta * r)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CuspReport:
    """Near-origin behavior of an s orbital.

    ``behavior`` is one of ``"finite"`` (ratio R'(0)/R(0) defined),
    ``"divergent"`` (R blows up at r -> 0), ``"vanishing"`` (R(0) = 0) or
    ``"singular-slope"`` (R(0) finite but R'(0) infinite).
    """

    behavior: str
    ratio: float | None
    target: float
    satisfied: bool
    message: str


def cusp_diagnostic(functions: Sequence[BasisFunction], coefficients: Sequence[float], Z: float, rtol: float = 1e-6) -> CuspReport:
    """Classify the behavior of ``sum_i c_i f_i`` as r -> 0 against Kato's cusp ``-Z``."""
    if any(f.l != 0 for f in functions):
        raise ValueError("cusp diagnostic applies to l = 0 orbitals only")
    terms = []
    for f, c in zip(functions, coefficients):
        if c == 0.0:
            continue
        for pr in f.primitives:
            terms.append((pr.power, c * pr.coefficient, pr.exponent))
    target = -float(Z)
    if not terms:
        return CuspReport("vanishing", None, target, False, "orbital is identically zero")
    tol = 1e-12
    lead = min(mu for mu, _, _ in terms)
    if lead < -tol:
        return CuspReport("divergent", None, target, False, f"divergent at origin (leading power r^{lead:.6g})")
    if lead > tol:
        return CuspReport("vanishing", None, target, False, f"vanishes at origin (leading power r^{lead:.6g})")
    value = math.fsum(w for mu, w, _ in terms if abs(mu) <= tol)
    if any(tol < mu < 1.0 - tol for mu, _, _ in terms):
        return CuspReport("singular-slope", None, target, False, "finite at origin but with an infinite slope")
    slope = math.fsum(-z * w for mu, w, z in terms if abs(mu) <= tol)
    slope += math.fsum(w for mu, w, _ in terms if abs(mu - 1.0) <= tol)
    if value == 0.0:
        return CuspReport("vanishing", None, target, False, "R(0) = 0")
    ratio = slope / value
    ok = abs(ratio - target) <= rtol * abs(target)
    msg = "cusp satisfied" if ok else f"cusp ratio {ratio:.10g} differs from {target:.10g}"
    return CuspReport("finite", ratio, target, ok, msg)
