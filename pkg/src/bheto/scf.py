"""Closed-shell atomic Hartree-Fock-Roothaan solver.

The Roothaan problem ``F C = S C eps`` block-diagonalizes over angular
momentum channels. Each block is reduced to a standard symmetric eigenproblem
through the Cholesky factor of the overlap matrix and solved with cyclic
Jacobi rotations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .angular import angular_table
from .basis import BasisSetSpec
from .integrals import ChannelIntegralTables, channel_tables

__all__ = [
    "AtomSystem",
    "SCFOptions",
    "SCFSolution",
    "LinearDependenceError",
    "IllConditionedBasisWarning",
    "cholesky_factor",
    "symmetric_eigen",
    "build_fock",
    "density_matrices",
    "energy_terms",
    "condition_numbers",
    "orthonormal_tables",
    "rounding_estimate",
    "run_scf",
]


class LinearDependenceError(np.linalg.LinAlgError):
    """Cholesky met a non-positive pivot: the basis is numerically linearly dependent."""

    def __init__(self, pivot: int, value: float, channel: int | None = None):
        self.pivot = pivot
        self.value = value
        self.channel = channel
        where = f" in channel l={channel}" if channel is not None else ""
        super().__init__(f"basis numerically linearly dependent{where}: pivot {pivot} = {value:.3e}")


class IllConditionedBasisWarning(UserWarning):
    pass


@dataclass(frozen=True)
class AtomSystem:
    """Nuclear charge and closed-shell occupation.

    ``occupancies[l]`` is the number of doubly occupied radial orbitals in
    channel ``l``; each holds ``2(2l + 1)`` electrons.
    """

    Z: float
    n_electrons: int
    occupancies: tuple[tuple[int, int], ...]

    def __init__(self, Z, n_electrons, occupancies):
        occ = occupancies.items() if isinstance(occupancies, dict) else occupancies
        occ = tuple(sorted((int(l), int(n)) for l, n in occ if n))
        object.__setattr__(self, "Z", float(Z))
        object.__setattr__(self, "n_electrons", int(n_electrons))
        object.__setattr__(self, "occupancies", occ)
        if not self.Z > 0:
            raise ValueError(f"nuclear charge must be positive, got {Z}")
        count = sum(n * 2 * (2 * l + 1) for l, n in occ)
        if count != self.n_electrons:
            raise ValueError(f"occupancies hold {count} electrons, expected {self.n_electrons}")

    @property
    def occ(self) -> dict[int, int]:
        return dict(self.occupancies)

    @classmethod
    def closed_shell(cls, Z: float, n_electrons: int) -> "AtomSystem":
        """Aufbau occupation for 2 (He-like), 4 (Be-like) or 10 (Ne-like) electrons."""
        table = {2: {0: 1}, 4: {0: 2}, 10: {0: 2, 1: 1}, 12: {0: 3, 1: 1}, 18: {0: 3, 1: 2}}
        if n_electrons not in table:
            raise ValueError(f"no default closed-shell configuration for {n_electrons} electrons")
        return cls(Z, n_electrons, table[n_electrons])


@dataclass
class SCFOptions:
    mixing: float = 0.5
    max_iter: int = 500
    energy_tol: float = 1e-12
    density_tol: float = 1e-9
    max_dim: int = 32
    cond_warn: float = 1e10
    precision_warn: float = 1e-6


@dataclass
class SCFSolution:
    coefficients: dict
    orbital_energies: dict
    total_energy: float
    kinetic_energy: float
    potential_energy: float
    iterations: int
    converged: bool
    condition_numbers: dict
    one_electron_energy: float = 0.0
    two_electron_energy: float = 0.0
    density: dict = field(default_factory=dict, repr=False)
    warnings: list = field(default_factory=list)
    rounding_estimate: float = 0.0

    @property
    def virial_ratio(self) -> float:
        return -self.potential_energy / self.kinetic_energy


def cholesky_factor(S, max_dim: int = 32, channel: int | None = None) -> np.ndarray:
    """Lower-triangular ``L`` with ``L L^T = S``.

    Pivots at or below ``64 eps * S_jj`` count as non-positive and raise
    :class:`LinearDependenceError` carrying the pivot index.
    """
    S = np.asarray(S)
    if S.dtype != np.longdouble:
        S = S.astype(float)
    n = S.shape[0]
    if S.shape != (n, n):
        raise ValueError("cholesky_factor needs a square matrix")
    if n > max_dim:
        raise ValueError(f"matrix dimension {n} exceeds cap {max_dim}")
    if not np.allclose(S, S.T, rtol=1e-12, atol=0.0):
        raise ValueError("cholesky_factor needs a symmetric matrix")
    L = np.zeros_like(S)
    eps = float(np.finfo(float).eps)
    for j in range(n):
        d = S[j, j] - L[j, :j] @ L[j, :j]
        if not d > 64.0 * eps * abs(S[j, j]):
            raise LinearDependenceError(j, d, channel)
        L[j, j] = np.sqrt(d)
        L[j + 1 :, j] = (S[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def _lower_inverse(L: np.ndarray) -> np.ndarray:
    n = L.shape[0]
    inv = np.zeros_like(L)
    for i in range(n):
        inv[i, i] = 1.0 / L[i, i]
        for j in range(i):
            inv[i, j] = -(L[i, j:i] @ inv[j:i, j]) / L[i, i]
    return inv


def symmetric_eigen(A, max_sweeps: int = 100, guess=None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
    ``1e-14`` times the norm of ``A``. Each eigenvector is signed so that its
    largest-magnitude component is positive.

    ``guess`` is an optional orthogonal matrix of approximate eigenvectors;
    the rotations then start from ``guess^T A guess``, which needs far fewer
    sweeps inside an SCF loop.
    """
    a = np.array(A, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("symmetric_eigen needs a square matrix")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-10 * (np.abs(a).max() if a.size else 1.0)):
        raise ValueError("symmetric_eigen needs a symmetric matrix")
    a = 0.5 * (a + a.T)
    if guess is None:
        v = np.eye(n)
    else:
        v = np.array(guess, dtype=float)
        a = v.T @ a @ v
        a = 0.5 * (a + a.T)
    scale = np.linalg.norm(a)
    thresh = 1e-14 * scale
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise ArithmeticError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    for j in range(n):
        i = int(np.argmax(np.abs(v[:, j])))
        if v[i, j] < 0:
            v[:, j] = -v[:, j]
    return w, v


def _coulomb_exchange(P: dict, tables: ChannelIntegralTables) -> tuple[dict, dict]:
    ls = sorted(tables.S)
    ang = angular_table(max(ls))
    J, K = {}, {}
    for l in ls:
        n = tables.S[l].shape[0]
        j = np.zeros((n, n))
        kx = np.zeros((n, n))
        for lp in ls:
            if lp not in P:
                continue
            j += np.einsum("pqrs,rs->pq", tables.rk[(l, l, lp, lp, 0)], P[lp])
            for k, lam in ang[(l, lp)]:
                kx += lam * np.einsum("prqs,rs->pq", tables.rk[(l, lp, l, lp, k)], P[lp])
        J[l] = 0.5 * (j + j.T)
        K[l] = 0.5 * (kx + kx.T)
    return J, K


def build_fock(P: dict, tables: ChannelIntegralTables) -> dict:
    """Closed-shell Fock matrices per channel.

    ``F[l] = h[l] + sum_l' [ R^0 . P[l'] - 1/2 sum_k Lambda_k(l, l') R^k . P[l'] ]``
    with ``P[l']`` carrying the full shell occupation ``2(2l' + 1)``.
    """
    J, K = _coulomb_exchange(P, tables)
    h = tables.h
    return {l: h[l] + J[l] - 0.5 * K[l] for l in h}


def density_matrices(C: dict, system: AtomSystem) -> dict:
    occ = system.occ
    P = {}
    for l, c in C.items():
        n = occ.get(l, 0)
        cocc = c[:, :n]
        P[l] = 2.0 * (2 * l + 1) * (cocc @ cocc.T)
    return P


def energy_terms(P: dict, tables: ChannelIntegralTables) -> dict:
    """Energy decomposition assembled term by term (no Fock matrix)."""
    J, K = _coulomb_exchange(P, tables)
    kin = sum(np.sum(P[l] * tables.T[l]) for l in P)
    nuc = sum(np.sum(P[l] * tables.V[l]) for l in P)
    coul = 0.5 * sum(np.sum(P[l] * J[l]) for l in P)
    exch = -0.25 * sum(np.sum(P[l] * K[l]) for l in P)
    return {
        "kinetic": float(kin),
        "nuclear": float(nuc),
        "coulomb": float(coul),
        "exchange": float(exch),
        "one_electron": float(kin + nuc),
        "two_electron": float(coul + exch),
        "total": float(kin + nuc + coul + exch),
    }


def _trace_energy(P, h, F) -> float:
    return 0.5 * float(sum(np.sum(P[l] * (h[l] + F[l])) for l in P))


def condition_numbers(tables: ChannelIntegralTables) -> dict:
    out = {}
    for l, s in tables.S.items():
        w, _ = symmetric_eigen(s)
        out[l] = float(w[-1] / w[0]) if w[0] > 0 else math.inf
    return out


def _check_occupations(system: AtomSystem, basis: BasisSetSpec) -> None:
    for l, n in system.occupancies:
        if l not in basis.channels:
            raise ValueError(f"system occupies l={l} but the basis has no such channel")
        if n > len(basis.channel(l)):
            raise ValueError(f"channel l={l} has {len(basis.channel(l))} functions for {n} occupied orbitals")


def orthonormal_tables(tables: ChannelIntegralTables, X: dict) -> ChannelIntegralTables:
    """Re-express all tables in the basis ``phi X[l]`` (``X[l] = L^-T`` makes it orthonormal).

    The contractions run in the dtype of ``X``; the results are rounded to
    float64. With extended-precision ``X`` this keeps the cancellation in
    ill-conditioned sets out of the transformed tables.
    """
    S, T, V, rk = {}, {}, {}, {}

    def tr(m, x):
        return (x.T @ m.astype(x.dtype) @ x).astype(float)

    for l, x in X.items():
        S[l] = tr(tables.S[l], x)
        T[l] = tr(tables.T[l], x)
        V[l] = tr(tables.V[l], x)
    for key, r in tables.rk.items():
        la, lb, lc, ld, _ = key
        xa = X[la]
        r = np.tensordot(r.astype(xa.dtype), xa, axes=([0], [0]))
        r = np.tensordot(r, X[lb], axes=([0], [0]))
        r = np.tensordot(r, X[lc], axes=([0], [0]))
        r = np.tensordot(r, X[ld], axes=([0], [0]))
        rk[key] = r.astype(float)
    return ChannelIntegralTables(tables.Z, S, T, V, rk)


def rounding_estimate(P: dict, tables: ChannelIntegralTables, X: dict, W: dict | None = None) -> float:
    """First-order bound on the energy error from float64 rounding of the integral tables.

    Each table element carries a relative error of about ``eps``; the
    orthonormal transform can amplify it by up to ``|X|^2`` (one-electron) and
    ``|X|^4`` (two-electron), i.e. ``cond(S)`` and ``cond(S)^2``. The bound
    contracts absolute values of every factor. ``W`` is the energy-weighted
    density, which carries the sensitivity to overlap errors.
    """
    ax = {l: np.abs(x) for l, x in X.items()}
    mag = ChannelIntegralTables(
        tables.Z,
        {l: np.abs(m) for l, m in tables.S.items()},
        {l: np.abs(m) for l, m in tables.T.items()},
        {l: np.abs(m) for l, m in tables.V.items()},
        {k: np.abs(m) for k, m in tables.rk.items()},
    )
    mag = orthonormal_tables(mag, ax)
    aP = {l: np.abs(m) for l, m in P.items()}
    J, K = _coulomb_exchange(aP, mag)
    total = sum(np.sum(aP[l] * (mag.T[l] + mag.V[l] + 0.5 * J[l] + 0.25 * K[l])) for l in aP)
    if W is not None:
        total += sum(np.sum(np.abs(W[l]) * mag.S[l]) for l in W)
    return float(np.finfo(float).eps * total)


def run_scf(system: AtomSystem, basis: BasisSetSpec, options: SCFOptions | None = None) -> SCFSolution:
    """Self-consistent field iterations with damped density updates.

    Each channel is first transformed with ``X = L^-T`` from the Cholesky
    factor of its overlap matrix, so the iterations solve the standard problem
    ``F' C' = C' eps`` and the density is compared in an orthonormal basis.
    Starts from the core-Hamiltonian guess, mixes ``P <- (1 - m) P + m P_new``
    and stops when both the energy change and the largest density change fall
    below the thresholds in ``options``. Non-convergence is reported through
    ``SCFSolution.converged``; a linearly dependent basis raises
    :class:`LinearDependenceError`.

    Nearly dependent sets pass the Cholesky test but lose accuracy roughly as
    ``cond(S)^2 * eps`` in the two-electron part.
    ``SCFSolution.rounding_estimate`` bounds that loss and a warning is issued
    when it exceeds ``options.precision_warn``.
    """
    opts = options or SCFOptions()
    _check_occupations(system, basis)
    tables = channel_tables(basis, system.Z)
    ls = sorted(tables.S)

    msgs = []
    conds = condition_numbers(tables)
    for l, c in conds.items():
        if c > opts.cond_warn:
            msg = f"overlap matrix for l={l} has condition number {c:.3e} (> {opts.cond_warn:.0e})"
            msgs.append(msg)
            warnings.warn(msg, IllConditionedBasisWarning, stacklevel=2)

    # extended precision where cond(S) * eps would otherwise reach the energy
    X = {
        l: _lower_inverse(cholesky_factor(tables.S[l].astype(np.longdouble), opts.max_dim, channel=l)).T
        for l in ls
    }
    otab = orthonormal_tables(tables, X)
    h = otab.h

    def diagonalize(F, guess=None):
        C, eps = {}, {}
        for l in ls:
            w, v = symmetric_eigen(0.5 * (F[l] + F[l].T), guess=None if guess is None else guess[l])
            C[l] = v
            eps[l] = w
        return C, eps

    C, eps = diagonalize(h)
    P = density_matrices(C, system)
    e_old = math.inf
    converged = False
    it = 0
    for it in range(1, opts.max_iter + 1):
        F = build_fock(P, otab)
        energy = _trace_energy(P, h, F)
        C, eps = diagonalize(F, C)
        P_new = density_matrices(C, system)
        dp = max(float(np.max(np.abs(P_new[l] - P[l]))) for l in ls)
        if abs(energy - e_old) < opts.energy_tol and dp < opts.density_tol:
            converged = True
            P = P_new
            break
        e_old = energy
        P = {l: (1.0 - opts.mixing) * P[l] + opts.mixing * P_new[l] for l in ls}

    F = build_fock(P, otab)
    total = _trace_energy(P, h, F)
    terms = energy_terms(P, otab)
    kin = terms["kinetic"]
    occ = system.occ
    W = {}
    for l in ls:
        n = occ.get(l, 0)
        W[l] = 2.0 * (2 * l + 1) * (C[l][:, :n] * eps[l][:n]) @ C[l][:, :n].T
    rounding = rounding_estimate(P, tables, X, W)
    if rounding > opts.precision_warn:
        msg = f"integral rounding may shift the energy by up to {rounding:.1e} hartree (near-dependent basis)"
        msgs.append(msg)
        warnings.warn(msg, IllConditionedBasisWarning, stacklevel=2)
    return SCFSolution(
        coefficients={l: (X[l] @ C[l]).astype(float) for l in ls},
        orbital_energies=eps,
        total_energy=total,
        kinetic_energy=kin,
        potential_energy=total - kin,
        iterations=it,
        converged=converged,
        condition_numbers=conds,
        one_electron_energy=terms["one_electron"],
        two_electron_energy=terms["two_electron"],
        density={l: (X[l] @ P[l] @ X[l].T).astype(float) for l in ls},
        warnings=msgs,
        rounding_estimate=rounding,
    )
