"""
BH-ETOs approach Slater functions as alpha -> 3
===============================================

With nu = 1 the Laguerre tail of a BH-ETO is scaled by (3 - alpha), so the
function tends to the plain Slater function. The energy of Be in the "(12)"
set, exponents fixed, should therefore approach the STF energy as alpha
climbs towards 3.
"""

from dataclasses import replace

from bheto.basis import STF
from bheto.harness import embedded_cases, evaluate_case, scan

case = next(c for c in embedded_cases() if c.label == "Be" and c.source.endswith("(12) alpha->3"))
e_stf = evaluate_case(replace(case, family=STF, nu=None, alpha=None, alpha_policy="none")).total_energy
print(f"STF reference with zeta = {case.zetas}: {e_stf:.12f}\n")

print(f"{'alpha':>10}  {'E_total':>18}  {'|E - E_STF|':>12}")
for row in scan(case, "alpha", [2.0, 2.5, 2.9, 2.99, 2.999, 2.9999, 2.99999]):
    print(f"{row.value:>10}  {row.energy:18.12f}  {abs(row.energy - e_stf):12.3e}")

# beyond the constraint alpha < 2 l + 2 nu + 1 = 3 the row is marked, not fatal
print(scan(case, "alpha", [3.2])[0].status)
