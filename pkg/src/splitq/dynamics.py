"""Hamiltonian flows over the complexified phase space ``(x0, p0, x1, p1)``.

Each :class:`FlowKind` is a fixed linear map from the 16 partials
``dH_m/dv`` (component ``m`` of ``H``, variable ``v``) to the four phase-space
velocities. The maps are stored as sign tensors, which keeps the flows
declarative and lets one compiled kernel integrate all of them.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .algebra import HyperComplex
from .errors import (
    EmptyTrajectory,
    IncompatibleHamiltonian,
    IntegrationDiverged,
    NonSeparable,
    StepSizeInvalid,
)
from .hamiltonian import HamiltonianSpec, PhasePoint, partials

__all__ = [
    "FlowKind",
    "Method",
    "FixedPointClass",
    "Trajectory",
    "rhs",
    "integrate",
    "classify_fixed_point",
    "stability",
    "energy_drift",
]

X0, P0, X1, P1 = range(4)


def _tensor(entries):
    A = np.zeros((4, 4, 4))
    for (out, comp, var), sign in entries.items():
        A[out, comp, var] = sign
    A.setflags(write=False)
    return A


# (velocity of, component of H, derivative variable) -> sign
_CANONICAL_MODE0 = {(X0, 0, P0): 1, (P0, 0, X0): -1}
_SWAPPED_MODE1 = {(P1, 0, X1): 1, (X1, 0, P1): -1}
_GRADIENT_H1 = {
    (P0, 1, P0): 1, (X0, 1, X0): 1,
    (P1, 1, P1): 1, (X1, 1, X1): 1,
}
_H2_H3 = {
    (P0, 2, X1): 1, (P0, 3, P1): 1,
    (X0, 2, P1): -1, (X0, 3, X1): 1,
    (P1, 2, X0): -1, (P1, 3, P0): 1,
    (X1, 2, P0): 1, (X1, 3, X0): 1,
}


class FlowKind(enum.Enum):
    """Flow families and the Hamiltonian components each accepts."""

    #: one real degree of freedom, ``p0' = -dH/dx0, x0' = dH/dp0``
    COMPLEX_CANONICAL = "ComplexCanonical"
    #: analytic ``H0 + i H1``; velocities from ``H0`` with the second pair swapped
    COMPLEXIFIED_CLASSICAL = "ComplexifiedClassical"
    #: real state, complex energy: symplectic flow of ``H0`` plus gradient flow of ``H1``
    NON_HERMITIAN_REAL = "NonHermitianReal"
    #: two-dimensional real oscillator family
    QUATERNIONIC = "Quaternionic"
    #: real ``H`` on coquaternionic phase space
    COQUATERNIONIC_REAL = "CoquaternionicReal"
    #: ``H0 + i H1`` on coquaternionic phase space
    COQUATERNIONIC_COMPLEX = "CoquaternionicComplex"
    #: fully coquaternion-valued ``H0 + i H1 + j H2 + k H3``
    COQUATERNIONIC_FULL = "CoquaternionicFull"

    @classmethod
    def parse(cls, value: "FlowKind | str") -> "FlowKind":
        if isinstance(value, FlowKind):
            return value
        for kind in cls:
            if value in (kind.value, kind.name) or str(value).lower() == kind.value.lower():
                return kind
        raise ValueError(f"unknown flow kind {value!r}; expected one of {[k.value for k in cls]}")

    @property
    def tensor(self) -> np.ndarray:
        return _TENSORS[self]

    @property
    def allowed_components(self) -> frozenset[int]:
        return _ALLOWED[self]

    @property
    def leapfrog_ok(self) -> bool:
        return self in (
            FlowKind.COMPLEXIFIED_CLASSICAL,
            FlowKind.QUATERNIONIC,
            FlowKind.COQUATERNIONIC_REAL,
        )


_TENSORS = {
    FlowKind.COMPLEX_CANONICAL: _tensor(_CANONICAL_MODE0),
    FlowKind.COMPLEXIFIED_CLASSICAL: _tensor({**_CANONICAL_MODE0, **_SWAPPED_MODE1}),
    FlowKind.NON_HERMITIAN_REAL: _tensor(
        {**_CANONICAL_MODE0, (X1, 0, P1): 1, (P1, 0, X1): -1,
         (P0, 1, P0): 1, (X0, 1, X0): 1, (P1, 1, P1): 1, (X1, 1, X1): 1}
    ),
    FlowKind.QUATERNIONIC: _tensor({**_CANONICAL_MODE0, (X1, 0, P1): 1, (P1, 0, X1): -1}),
    FlowKind.COQUATERNIONIC_REAL: _tensor({**_CANONICAL_MODE0, **_SWAPPED_MODE1}),
    FlowKind.COQUATERNIONIC_COMPLEX: _tensor({**_CANONICAL_MODE0, **_SWAPPED_MODE1, **_GRADIENT_H1}),
    FlowKind.COQUATERNIONIC_FULL: _tensor(
        {**_CANONICAL_MODE0, **_SWAPPED_MODE1, **_GRADIENT_H1, **_H2_H3}
    ),
}

_ALLOWED = {
    FlowKind.COMPLEX_CANONICAL: frozenset({0}),
    FlowKind.COMPLEXIFIED_CLASSICAL: frozenset({0, 1}),
    FlowKind.NON_HERMITIAN_REAL: frozenset({0, 1}),
    FlowKind.QUATERNIONIC: frozenset({0}),
    FlowKind.COQUATERNIONIC_REAL: frozenset({0}),
    FlowKind.COQUATERNIONIC_COMPLEX: frozenset({0, 1}),
    FlowKind.COQUATERNIONIC_FULL: frozenset({0, 1, 2, 3}),
}


class Method(enum.Enum):
    RK4 = "RK4"
    SYMPLECTIC_LEAPFROG = "SymplecticLeapfrog"

    @classmethod
    def parse(cls, value: "Method | str") -> "Method":
        if isinstance(value, Method):
            return value
        aliases = {"rk4": cls.RK4, "symplecticleapfrog": cls.SYMPLECTIC_LEAPFROG,
                   "leapfrog": cls.SYMPLECTIC_LEAPFROG}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown method {value!r}; expected 'RK4' or 'SymplecticLeapfrog'") from None


class FixedPointClass(enum.Enum):
    CENTRE = "Centre"
    FOCUS = "Focus"
    VORTEX = "Vortex"
    DEGENERATE = "Degenerate"


def _check_compatible(kind: FlowKind, h: HamiltonianSpec) -> None:
    extra = h.nonzero_components() - kind.allowed_components
    if extra:
        names = ", ".join(f"H{m}" for m in sorted(extra))
        raise IncompatibleHamiltonian(f"{kind.value} flow does not accept nonzero {names}")


def rhs(kind: FlowKind | str, h: HamiltonianSpec, s) -> PhasePoint:
    """Phase-space velocity ``(x0', p0', x1', p1')`` of the chosen flow at ``s``."""
    kind = FlowKind.parse(kind)
    _check_compatible(kind, h)
    return PhasePoint.from_array(np.einsum("imv,mv->i", kind.tensor, partials(h, s)))


def rhs_array(kind: FlowKind | str, h: HamiltonianSpec, states) -> np.ndarray:
    """Vectorised :func:`rhs` over ``(..., 4)`` states."""
    kind = FlowKind.parse(kind)
    _check_compatible(kind, h)
    return np.einsum("imv,...mv->...i", kind.tensor, h.partials_array(states))


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution: ``times`` (n,), ``states`` (n, 4), ``energy_samples`` (n, 4)."""

    times: np.ndarray
    states: np.ndarray
    energy_samples: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.states, dtype=float).reshape(-1, 4)
        e = np.asarray(self.energy_samples, dtype=float).reshape(-1, 4)
        if not (len(t) == len(s) == len(e)):
            raise ValueError("times, states and energy samples must have equal length")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)
        object.__setattr__(self, "energy_samples", e)

    def __len__(self):
        return len(self.times)

    def point(self, i: int) -> PhasePoint:
        return PhasePoint.from_array(self.states[i])

    def energy(self, i: int, sig="coquaternion") -> HyperComplex:
        return HyperComplex.from_array(self.energy_samples[i], sig)

    @property
    def final(self) -> PhasePoint:
        return self.point(-1)


def integrate(
    kind: FlowKind | str,
    h: HamiltonianSpec,
    s0,
    t_end: float,
    dt: float,
    method: Method | str = Method.RK4,
    sample_every: int = 1,
) -> Trajectory:
    """Fixed-step integration from ``s0`` up to ``t_end``.

    The step is shrunk to ``t_end / ceil(t_end / dt)`` so the last sample
    lands exactly on ``t_end``. ``sample_every`` thins the stored samples; the
    final state is always kept.
    """
    kind = FlowKind.parse(kind)
    method = Method.parse(method)
    if not (math.isfinite(dt) and dt > 0):
        raise StepSizeInvalid(f"dt must be a positive finite number, got {dt!r}")
    if not (math.isfinite(t_end) and t_end > 0):
        raise StepSizeInvalid(f"t_end must be a positive finite number, got {t_end!r}")
    if int(sample_every) < 1:
        raise ValueError("sample_every must be at least 1")
    _check_compatible(kind, h)
    if method is Method.SYMPLECTIC_LEAPFROG:
        if not kind.leapfrog_ok:
            raise NonSeparable(f"leapfrog is not available for the {kind.value} flow")
        if not h.is_separable(kind.allowed_components & {0}):
            raise NonSeparable("leapfrog needs a Hamiltonian of the form T(p) + V(x)")

    s0 = s0.as_array() if isinstance(s0, PhasePoint) else np.asarray(s0, dtype=float).reshape(4)
    nsteps = max(1, math.ceil(t_end / dt - 1e-9))
    step = t_end / nsteps
    every = int(sample_every)
    recorded = list(range(0, nsteps + 1, every))
    if recorded[-1] != nsteps:
        recorded.append(nsteps)

    out = np.empty((len(recorded), 4))
    kernel = _kernels.rk4 if method is Method.RK4 else _kernels.leapfrog
    rows = kernel(
        np.ascontiguousarray(h.coefficients, dtype=np.float64),
        np.ascontiguousarray(h.exponents, dtype=np.int64),
        np.ascontiguousarray(kind.tensor),
        s0.astype(np.float64),
        step,
        nsteps,
        every,
        out,
    )
    if rows < 0:
        t_bad = recorded[-rows - 1] * step
        raise IntegrationDiverged(f"state became non-finite by t = {t_bad:.6g}")

    times = np.array(recorded, dtype=float) * step
    times[-1] = t_end
    return Trajectory(times, out, h.eval_array(out))


def classify_fixed_point(b: complex) -> FixedPointClass:
    """Type of the linear critical point of ``z' = b z``."""
    b = complex(b)
    if not (math.isfinite(b.real) and math.isfinite(b.imag)):
        raise ValueError(f"b must be finite, got {b!r}")
    tol = 1e-12 * (1.0 + abs(b))
    re_zero = abs(b.real) <= tol
    im_zero = abs(b.imag) <= tol
    if re_zero and im_zero:
        return FixedPointClass.DEGENERATE
    if re_zero:
        return FixedPointClass.CENTRE
    if im_zero:
        return FixedPointClass.FOCUS
    return FixedPointClass.VORTEX


def stability(b: complex) -> int:
    """``+1`` for a source, ``-1`` for a sink, ``0`` when neutral."""
    b = complex(b)
    if abs(b.real) <= 1e-12 * (1.0 + abs(b)):
        return 0
    return 1 if b.real > 0 else -1


def energy_drift(traj: Trajectory) -> tuple[float, float]:
    """Worst drift of the energy components from their initial values.

    Returns ``(max_abs_drift, relative_drift)``. Each component's drift is
    divided by its initial magnitude, or left absolute when that magnitude is
    below ``1e-12``.
    """
    if len(traj) == 0:
        raise EmptyTrajectory("trajectory has no samples")
    e = traj.energy_samples
    dev = np.max(np.abs(e - e[0]), axis=0)
    ref = np.abs(e[0])
    rel = np.where(ref > 1e-12, dev / np.where(ref > 1e-12, ref, 1.0), dev)
    return float(dev.max()), float(rel.max())
