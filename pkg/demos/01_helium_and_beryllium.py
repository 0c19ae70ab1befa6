"""
Single SCF runs: helium and beryllium
=====================================

Helium in one Slater function has a closed-form answer, which makes it a
convenient first check. Beryllium in the minimal BH-ETO set "(12)" then
reproduces a printed table value to all digits.
"""

from bheto import AtomSystem, build_basis_set, run_scf
from bheto.basis import STF
from bheto.harness import diagnostics_report, embedded_cases, evaluate_case

# He 1s^2 in a single 1s Slater function: E(zeta) = zeta^2 - 2 Z zeta + 5 zeta / 8,
# minimized at zeta = Z - 5/16.
he = run_scf(AtomSystem.closed_shell(2, 2), build_basis_set("1", [1.6875], family=STF))
print(f"He  E = {he.total_energy:.14f}   (closed form -2.84765625)")
print(f"    virial -V/T = {he.virial_ratio:.12f}")

# Be with the two-function BH-ETO set, parameters as printed.
be = next(c for c in embedded_cases() if c.label == "Be" and c.source.endswith("(12) opt"))
sol = evaluate_case(be)
print(f"\nBe  nu={be.nu}  alpha={be.alpha}  zeta={be.zetas}")
print(f"    E = {sol.total_energy:.14f}   printed {be.reference_energy:.14f}")
print()
print(diagnostics_report(be, sol))
