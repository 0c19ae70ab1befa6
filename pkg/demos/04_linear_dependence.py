"""
Near-duplicate noninteger Slater functions
==========================================

Two NSTFs with the same exponent and almost the same principal quantum
number are almost the same function. The overlap matrix becomes singular
as the difference shrinks; the solver warns above condition number 1e10
and refuses an exactly dependent pair.

The pair spans {f, df/dn*} in the limit, so the exact energy settles near
-2.7886. Float64 integrals cannot resolve that limit: rounding in the
orthonormalized two-electron integrals grows like cond(S)^2. The last
column is the solver's first-order bound on that error; past 1e-6 hartree
it triggers its own warning. Beyond cond(S) = 1e10 the noise can also
silently remove a direction from the variational space (last row), so
there the condition warning is the one to heed.
"""

import warnings

from bheto import AtomSystem, LinearDependenceError, build_basis_set, run_scf
from bheto.basis import NSTF

he = AtomSystem.closed_shell(2, 2)
print(f"{'dn*':>8}  {'cond(S)':>10}  {'E_total':>20}  {'rounding bound':>14}")
for dn in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]:
    basis = build_basis_set("11", [1.7, 1.7], family=NSTF, n_stars=[1.3, 1.3 + dn])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = run_scf(he, basis)
    print(f"{dn:8.0e}  {sol.condition_numbers[0]:10.2e}  {sol.total_energy:20.12f}  {sol.rounding_estimate:14.1e}")

same = build_basis_set("11", [1.7, 1.7], family=NSTF, n_stars=[1.3, 1.3])
try:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        run_scf(he, same)
except LinearDependenceError as exc:
    print("\nidentical pair:", exc)
