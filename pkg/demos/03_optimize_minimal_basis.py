"""
Optimizing nonlinear parameters with Powell's method
====================================================

The exponents, nu and alpha enter the energy nonlinearly. Powell's
direction-set method with golden-section line searches minimizes the SCF
energy without derivatives; bounded parameters are mapped through a
logistic transform so the search itself is unconstrained.
"""

import warnings

from bheto import AtomSystem, parse_notation, powell_minimize, scf_problem

be = AtomSystem.closed_shell(4, 4)
start = {"zeta1": 3.7, "zeta2": 1.0, "nu": 0.98, "alpha": 2.5}
problem = scf_problem(be, parse_notation("12"), start, list(start), bounds={"alpha": (0.0, 2.9)})
result = powell_minimize(problem, start)

print("Be (12) from", start)
for name, value in result.params.items():
    print(f"  {name:6s} {value:.10f}")
print(f"  E = {result.energy:.12f} after {result.cycles} cycles, {result.evaluations} SCF runs")
print("  printed optimum -14.56492264690451\n")

# Li- prefers alpha beyond the cap: the optimizer ends at the bound and says so.
li = AtomSystem.closed_shell(3, 4)
start = {"zeta1": 2.6, "zeta2": 0.48, "nu": 0.97, "alpha": 2.5}
problem = scf_problem(li, parse_notation("12"), start, list(start), bounds={"alpha": (0.0, 2.9)})
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    result = powell_minimize(problem, start)
print(f"Li- (12): alpha = {result.params['alpha']:.8f}, E = {result.energy:.12f}")
for w in caught:
    print("  warning:", w.message)
