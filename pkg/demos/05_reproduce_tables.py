"""
Reproducing the printed tables
==============================

Every embedded parameter set is run through the SCF and compared with its
printed total energy. The same comparison is available from the command
line as ``bheto reproduce all``.
"""

from bheto.harness import TOLERANCE, embedded_cases, reproduce

rows = reproduce(embedded_cases(), jobs=4)
print(f"{'case':44s} {'printed':>20} {'computed':>20} {'dE':>10}")
for r in rows:
    print(f"{r.source:44s} {r.e_paper:20.12f} {r.e_computed:20.12f} {r.delta:10.1e}  {r.status}")
passed = sum(r.passed for r in rows)
print(f"\n{passed}/{len(rows)} within {TOLERANCE:g} hartree")
