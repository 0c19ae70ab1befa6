"""Closed-shell atomic Hartree-Fock-Roothaan calculations over BH-ETO, STF and NSTF radial bases."""

from .angular import angular_table, three_j_zero_squared
from .basis import (
    BHETO,
    NSTF,
    STF,
    BasisConstraintError,
    BasisFunction,
    BasisSetSpec,
    build_basis_function,
    build_basis_set,
    cusp_diagnostic,
    parse_notation,
)
from .harness import CaseRecord, embedded_cases, evaluate_case, parse_config, serialize_config
from .integrals import channel_tables, kinetic, nuclear, overlap, slater_rk
from .optimizer import powell_minimize, scf_problem
from .scf import AtomSystem, LinearDependenceError, SCFOptions, SCFSolution, run_scf

__version__ = "0.1.0"

__all__ = [
    "BHETO",
    "STF",
    "NSTF",
    "AtomSystem",
    "BasisConstraintError",
    "BasisFunction",
    "BasisSetSpec",
    "CaseRecord",
    "LinearDependenceError",
    "SCFOptions",
    "SCFSolution",
    "angular_table",
    "build_basis_function",
    "build_basis_set",
    "channel_tables",
    "cusp_diagnostic",
    "embedded_cases",
    "evaluate_case",
    "kinetic",
    "nuclear",
    "overlap",
    "parse_config",
    "parse_notation",
    "powell_minimize",
    "run_scf",
    "scf_problem",
    "serialize_config",
    "slater_rk",
    "three_j_zero_squared",
]
