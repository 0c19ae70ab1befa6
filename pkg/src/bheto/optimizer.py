"""Derivative-free minimization of the SCF energy over nonlinear basis parameters.

Powell's direction-set method with golden-section line searches. Parameters
are optimized in an unconstrained space: orbital exponents through
``zeta = exp(t)`` and bounded parameters (``nu``, ``alpha``) through an affine
logistic map onto ``(lo, hi)``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .basis import BasisConstraintError, BasisSkeleton, build_basis_set
from .scf import AtomSystem, LinearDependenceError, SCFOptions, run_scf

__all__ = [
    "PENALTY",
    "GOLDEN",
    "Slot",
    "OptimizationProblem",
    "LineSearchResult",
    "PowellResult",
    "bracket_minimum",
    "golden_section",
    "line_minimize",
    "powell_minimize",
    "multistart_starts",
    "multistart_minimize",
    "scf_problem",
    "write_trace_csv",
]

PENALTY = 1e6
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
_INV_PHI = 1.0 / GOLDEN


@dataclass(frozen=True)
class Slot:
    """One optimized parameter. ``kind`` is ``"log"`` or ``"logistic"``."""

    name: str
    kind: str = "log"
    lo: float = 0.0
    hi: float = math.inf

    def to_internal(self, value: float) -> float:
        if self.kind == "log":
            if not value > 0.0:
                raise ValueError(f"{self.name} must be positive, got {value}")
            return math.log(value)
        if not self.lo < value < self.hi:
            # start exactly on a closed upper bound: pull inside by a hair
            if value == self.hi:
                value = self.hi - 1e-12 * max(1.0, abs(self.hi))
            else:
                raise ValueError(f"{self.name}={value} outside ({self.lo}, {self.hi})")
        y = (value - self.lo) / (self.hi - self.lo)
        return math.log(y / (1.0 - y))

    def to_external(self, t: float) -> float:
        if self.kind == "log":
            return math.exp(t)
        if t >= 0:
            y = 1.0 / (1.0 + math.exp(-t))
        else:
            e = math.exp(t)
            y = e / (1.0 + e)
        return self.lo + (self.hi - self.lo) * y

    def distance_to_bound(self, value: float) -> float:
        if self.kind == "log":
            return value
        return min(value - self.lo, self.hi - value)


@dataclass
class OptimizationProblem:
    """Named parameter slots, an objective in natural units, and the evaluation trace.

    ``objective`` receives a dict ``{slot name: value}``. Exceptions are turned
    into the :data:`PENALTY` value; the problem itself never raises during a
    search.
    """

    slots: list[Slot]
    objective: Callable[[dict], float]
    trace: list = field(default_factory=list)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.slots]

    def to_internal(self, params: dict) -> np.ndarray:
        return np.array([s.to_internal(params[s.name]) for s in self.slots])

    def to_external(self, t: Sequence[float]) -> dict:
        return {s.name: s.to_external(float(v)) for s, v in zip(self.slots, t)}

    def __call__(self, t: Sequence[float]) -> float:
        key = tuple(float(v) for v in t)
        if key in self._cache:
            return self._cache[key]
        params = self.to_external(key)
        try:
            e = float(self.objective(params))
            if not math.isfinite(e):
                e = PENALTY
        except (BasisConstraintError, LinearDependenceError, ArithmeticError, ValueError, np.linalg.LinAlgError):
            e = PENALTY
        self._cache[key] = e
        self.trace.append((params, e))
        return e


@dataclass
class LineSearchResult:
    x: float
    fx: float
    bracketed: bool
    evaluations: int


def bracket_minimum(f: Callable[[float], float], x0: float = 0.0, step: float = 0.1, f0: float | None = None, max_expand: int = 60):
    """Find ``(a, b, c)`` with ``f(b) < f(a)`` and ``f(b) < f(c)`` by golden expansion.

    Returns ``((a, b, c), (fa, fb, fc))`` or ``None`` when no bracket is found
    within ``max_expand`` expansion steps.
    """
    fa = f(x0) if f0 is None else f0
    a, b = x0, x0 + step
    fb = f(b)
    if fb >= fa:
        c, fc = b, fb
        b2 = x0 - step
        fb2 = f(b2)
        if fb2 >= fa:
            return (b2, x0, c), (fb2, fa, fc)
        a, fa, b, fb = x0, fa, b2, fb2
    c = b + GOLDEN * (b - a)
    fc = f(c)
    n = 0
    while fc < fb:
        if n >= max_expand:
            return None
        a, fa, b, fb = b, fb, c, fc
        c = b + GOLDEN * (b - a)
        fc = f(c)
        n += 1
    if a > c:
        a, c, fa, fc = c, a, fc, fa
    return (a, b, c), (fa, fb, fc)


def golden_section(f: Callable[[float], float], bracket, tol: float = 1e-8, fb: float | None = None, max_iter: int = 500) -> tuple[float, float]:
    """Golden-section reduction of a bracket ``(a, b, c)`` until ``c - a < tol``.

    Returns the best interior point and its value.
    """
    a, b, c = bracket
    if a > c:
        a, c = c, a
    if not a <= b <= c:
        raise ValueError(f"middle point {b} not inside ({a}, {c})")
    fb = f(b) if fb is None else fb
    for _ in range(max_iter):
        if c - a < tol:
            break
        # probe the larger sub-interval
        if b - a > c - b:
            x = b - (1.0 - _INV_PHI) * (b - a)
            fx = f(x)
            if fx < fb:
                c, b, fb = b, x, fx
            else:
                a = x
        else:
            x = b + (1.0 - _INV_PHI) * (c - b)
            fx = f(x)
            if fx < fb:
                a, b, fb = b, x, fx
            else:
                c = x
    return b, fb


def line_minimize(f: Callable[[np.ndarray], float], x: np.ndarray, d: np.ndarray, fx: float, step: float = 0.1, tol: float = 1e-8) -> tuple[np.ndarray, float, LineSearchResult]:
    count = [0]

    def g(s):
        count[0] += 1
        return f(x + s * d)

    br = bracket_minimum(g, 0.0, step, f0=fx)
    if br is None:
        return x, fx, LineSearchResult(0.0, fx, False, count[0])
    (a, b, c), (_, fb, _) = br
    s, fs = golden_section(g, (a, b, c), tol=tol, fb=fb)
    if fs >= fx:
        return x, fx, LineSearchResult(0.0, fx, True, count[0])
    return x + s * d, fs, LineSearchResult(s, fs, True, count[0])


@dataclass
class PowellResult:
    params: dict
    energy: float
    cycles: int
    evaluations: int
    converged: bool
    trace: list
    near_bounds: list

    def best_so_far(self) -> list[float]:
        out, best = [], math.inf
        for _, e in self.trace:
            best = min(best, e)
            out.append(best)
        return out


def powell_minimize(
    problem: OptimizationProblem,
    start: dict,
    ftol: float = 1e-11,
    max_cycles: int = 200,
    line_tol: float = 1e-8,
    step: float = 0.1,
    bound_tol: float = 1e-6,
) -> PowellResult:
    """Powell's direction-set minimization.

    Directions start as unit vectors. After each cycle the direction of
    largest decrease is replaced by the normalized cycle displacement when
    Powell's test allows it, and the set is reset to unit vectors every ``n``
    cycles. Stops when a full cycle lowers the energy by less than ``ftol``.
    """
    n = len(problem.slots)
    x = problem.to_internal(start)
    fx = problem(x)
    best_x, best_f = x.copy(), fx
    dirs = np.eye(n)
    converged = False
    cycle = 0
    for cycle in range(1, max_cycles + 1):
        x0, f0 = x.copy(), fx
        big_drop, big_i = 0.0, 0
        for i in range(n):
            f_before = fx
            x, fx, _ = line_minimize(problem, x, dirs[i], fx, step=step, tol=line_tol)
            if f_before - fx > big_drop:
                big_drop, big_i = f_before - fx, i
        if fx < best_f:
            best_x, best_f = x.copy(), fx
        if f0 - fx < ftol:
            converged = True
            break
        disp = x - x0
        norm = np.linalg.norm(disp)
        if norm > 0.0:
            fe = problem(x0 + 2.0 * disp)
            if fe < f0:
                lhs = 2.0 * (f0 - 2.0 * fx + fe) * (f0 - fx - big_drop) ** 2
                rhs = big_drop * (f0 - fe) ** 2
                if lhs < rhs:
                    d = disp / norm
                    x, fx, _ = line_minimize(problem, x, d, fx, step=step, tol=line_tol)
                    dirs[big_i] = dirs[n - 1]
                    dirs[n - 1] = d
        if fx < best_f:
            best_x, best_f = x.copy(), fx
        if cycle % n == 0:
            dirs = np.eye(n)
    params = problem.to_external(best_x)
    near = []
    for s in problem.slots:
        if s.kind == "logistic" and s.distance_to_bound(params[s.name]) < bound_tol * max(1.0, abs(s.hi)):
            near.append(s.name)
    if near:
        warnings.warn(f"optimum at bound for {', '.join(near)}", RuntimeWarning, stacklevel=2)
    return PowellResult(params, best_f, cycle, len(problem.trace), converged, list(problem.trace), near)


def multistart_starts(problem: OptimizationProblem, start: dict, n_starts: int = 1, spread: float = 0.1) -> list[dict]:
    """Deterministic start points around ``start``; the first is ``start`` itself.

    Start ``k`` shifts internal coordinate ``i`` by ``spread * cos(2 pi k (i + 1) / n_starts)``,
    i.e. relative exponent changes of about ``spread`` and comparable logistic moves.
    """
    t0 = problem.to_internal(start)
    out = [dict(start)]
    for k in range(1, n_starts):
        shift = spread * np.cos(2.0 * math.pi * k * np.arange(1, len(t0) + 1) / n_starts)
        p = dict(start)
        p.update(problem.to_external(t0 + shift))
        out.append(p)
    return out


def multistart_minimize(
    make_problem: Callable[[], OptimizationProblem],
    start: dict,
    n_starts: int = 1,
    spread: float = 0.1,
    **powell_kw,
) -> PowellResult:
    """Best of ``n_starts`` Powell runs from :func:`multistart_starts`.

    ``make_problem`` returns a fresh problem per run so traces stay separate.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    starts = multistart_starts(make_problem(), start, n_starts, spread)
    best = None
    for s in starts:
        result = powell_minimize(make_problem(), s, **powell_kw)
        if best is None or result.energy < best.energy:
            best = result
    return best


def scf_problem(
    system: AtomSystem,
    skeleton: BasisSkeleton,
    params: dict,
    optimize: Sequence[str],
    bounds: dict | None = None,
    scf_options: SCFOptions | None = None,
) -> OptimizationProblem:
    """Objective ``E_SCF`` over the slots named in ``optimize``.

    ``params`` holds every parameter needed to build the basis: ``zeta1`` ...
    ``zetaN`` in notation order, and ``nu``/``alpha`` where the family needs
    them. Names not in ``optimize`` stay fixed. ``bounds`` overrides the
    default ``(0.5, 1.1)`` for ``nu`` and ``(0, 2.9)`` for ``alpha``.
    """
    lim = {"nu": (0.5, 1.1), "alpha": (0.0, 2.9)}
    lim.update(bounds or {})
    slots = []
    for name in optimize:
        if name not in params:
            raise KeyError(f"unknown parameter {name!r}")
        if name.startswith("zeta"):
            lo, hi = lim.get(name, (0.0, math.inf))
            slots.append(Slot(name, "log", lo, hi))
        else:
            lo, hi = lim[name]
            slots.append(Slot(name, "logistic", lo, hi))
    fixed = dict(params)
    nz = len(skeleton.slots)
    opts = scf_options or SCFOptions()

    def objective(values):
        p = dict(fixed)
        p.update(values)
        zetas = [p[f"zeta{i + 1}"] for i in range(nz)]
        basis = build_basis_set(skeleton, zetas, nu=p.get("nu"), alpha=p.get("alpha"), nu_max=lim["nu"][1])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            sol = run_scf(system, basis, opts)
        if not sol.converged:
            return PENALTY
        return sol.total_energy

    return OptimizationProblem(slots, objective)


def write_trace_csv(path, result: PowellResult) -> None:
    names = list(result.params)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["evaluation", *names, "energy"])
        for i, (p, e) in enumerate(result.trace):
            w.writerow([i, *(repr(p.get(n, float("nan"))) for n in names), repr(e)])
