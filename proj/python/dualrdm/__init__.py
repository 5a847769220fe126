"""Dual reduced-density-matrix lower bounds for two-body fermionic Hamiltonians."""

from ._core import (
    CurvePoint,
    DataError,
    Error,
    IntegralSet,
    NewtonConfig,
    NewtonError,
    NewtonTrace,
    NonConvergenceError,
    NumericalError,
    ParseError,
    ProjectionOptions,
    ProjectionResult,
    ReducedHamiltonian,
    SpinOrbitalIntegrals,
    build_reduced_hamiltonian,
    hubbard_dimer,
    load_fcidump,
    pair_index,
    parse_fcidump,
    project,
    random_two_body,
    sample_delta_curve,
    solve_dual,
    solve_fci,
    spinify,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
