"""Quaternionic and coquaternionic mechanics.

Submodules: :mod:`~splitq.algebra` (hypercomplex arithmetic),
:mod:`~splitq.hamiltonian` (polynomial Hamiltonians),
:mod:`~splitq.dynamics` (flows and integrators),
:mod:`~splitq.spectral` (two-level systems) and :mod:`~splitq.cli`.
"""
from .algebra import HyperComplex, Signature, conj, exp_hc, inverse, mul, norm2, polar, to_matrix
from .dynamics import FlowKind, FixedPointClass, Method, Trajectory, classify_fixed_point, energy_drift, integrate, rhs
from .hamiltonian import AnalyticSpec, HamiltonianSpec, PhasePoint, cr_residual, evaluate, expand_analytic, partials
from .spectral import (
    HMatrix2,
    PTPhase,
    SpinorQ,
    TwoLevelParams,
    build_h,
    eigenvalues,
    heisenberg_evolve,
    hopf_map,
    mode_fixed_points,
    pauli,
    pt_phase,
    rabi,
    state_from_angles,
)

QUATERNION = Signature.QUATERNION
COQUATERNION = Signature.COQUATERNION

__version__ = "0.1.0"
