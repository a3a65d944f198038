"""Two-level quaternionic and coquaternionic quantum systems.

Matrices with hypercomplex entries are stored as ``(2, 2, 4)`` component
arrays. Because the entries do not commute, products are formed entry by
entry with the algebra's own multiplication, and scalars are multiplied from
the left unless stated otherwise. Time evolution uses the complex unit ``i``
acting from the left, i.e. the Schrodinger equation ``i z' = H z``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .algebra import (
    HyperComplex,
    Signature,
    conj_arrays,
    exp_arrays,
    from_matrix_arrays,
    mul_arrays,
    norm2_arrays,
    to_matrix_arrays,
)
from .dynamics import FixedPointClass, classify_fixed_point
from .errors import NonUnitDirection, NotNormalized, StepSizeInvalid, WrongSignature

__all__ = [
    "HMatrix2",
    "TwoLevelParams",
    "SpinorQ",
    "PTPhase",
    "pauli",
    "build_h",
    "bloch_hamiltonian",
    "eigenvalues",
    "pt_phase",
    "mode_exponents",
    "mode_fixed_points",
    "rabi",
    "heisenberg_evolve",
    "state_from_angles",
    "hopf_map",
    "spectrum_arrays",
]


class HMatrix2:
    """2x2 matrix with hypercomplex entries."""

    __slots__ = ("entries", "sig")

    def __init__(self, entries, sig: Signature | str = Signature.COQUATERNION):
        self.sig = Signature.parse(sig)
        arr = np.empty((2, 2, 4))
        if isinstance(entries, np.ndarray) and entries.shape == (2, 2, 4):
            arr[:] = entries
        else:
            for a in range(2):
                for b in range(2):
                    e = entries[a][b]
                    if isinstance(e, HyperComplex):
                        arr[a, b] = e.as_array()
                    elif isinstance(e, complex):
                        arr[a, b] = (e.real, e.imag, 0.0, 0.0)
                    elif np.ndim(e) == 0:
                        arr[a, b] = (float(e), 0.0, 0.0, 0.0)
                    else:
                        arr[a, b] = e
        arr.setflags(write=False)
        self.entries = arr

    @classmethod
    def identity(cls, sig: Signature | str = Signature.COQUATERNION) -> "HMatrix2":
        return cls([[1.0, 0.0], [0.0, 1.0]], sig)

    @classmethod
    def zeros(cls, sig: Signature | str = Signature.COQUATERNION) -> "HMatrix2":
        return cls(np.zeros((2, 2, 4)), sig)

    def __getitem__(self, idx) -> HyperComplex:
        a, b = idx
        return HyperComplex.from_array(self.entries[a, b], self.sig)

    def _like(self, arr) -> "HMatrix2":
        return HMatrix2(np.asarray(arr, dtype=float), self.sig)

    def __add__(self, other: "HMatrix2") -> "HMatrix2":
        return self._like(self.entries + other.entries)

    def __sub__(self, other: "HMatrix2") -> "HMatrix2":
        return self._like(self.entries - other.entries)

    def __neg__(self):
        return self._like(-self.entries)

    def __mul__(self, scale: float) -> "HMatrix2":
        return self._like(self.entries * float(scale))

    __rmul__ = __mul__

    def __matmul__(self, other: "HMatrix2") -> "HMatrix2":
        # (AB)_ab = sum_c A_ac B_cb with noncommuting entries
        prod = mul_arrays(self.entries[:, :, None, :], other.entries[None, :, :, :], self.sig)
        return self._like(prod.sum(axis=1))

    def lmul(self, q: HyperComplex) -> "HMatrix2":
        """Entrywise ``q * A_ab``."""
        return self._like(mul_arrays(q.as_array(), self.entries, self.sig))

    def rmul(self, q: HyperComplex) -> "HMatrix2":
        """Entrywise ``A_ab * q``."""
        return self._like(mul_arrays(self.entries, q.as_array(), self.sig))

    def dagger(self) -> "HMatrix2":
        return self._like(conj_arrays(self.entries.transpose(1, 0, 2)))

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return self.isclose(self.dagger(), atol)

    def isclose(self, other: "HMatrix2", atol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.entries - other.entries)) <= atol)

    def max_abs_diff(self, other: "HMatrix2") -> float:
        return float(np.max(np.abs(self.entries - other.entries)))

    def to_matrix(self) -> np.ndarray:
        """Block matrix representation: 4x4 real (coquaternion) or 4x4 complex (quaternion)."""
        blocks = to_matrix_arrays(self.entries, self.sig)  # (2, 2, 2, 2)
        return np.block([[blocks[0, 0], blocks[0, 1]], [blocks[1, 0], blocks[1, 1]]])

    @classmethod
    def from_matrix(cls, m, sig: Signature | str) -> "HMatrix2":
        sig = Signature.parse(sig)
        m = np.asarray(m)
        blocks = np.empty((2, 2, 2, 2), dtype=m.dtype)
        for a in range(2):
            for b in range(2):
                blocks[a, b] = m[2 * a:2 * a + 2, 2 * b:2 * b + 2]
        return cls(from_matrix_arrays(blocks, sig), sig)

    def __eq__(self, other):
        if not isinstance(other, HMatrix2):
            return NotImplemented
        return self.sig is other.sig and np.array_equal(self.entries, other.entries)

    def __repr__(self):
        rows = [[str(self[a, b]) for b in range(2)] for a in range(2)]
        return f"HMatrix2({rows}, sig={self.sig.value})"


# ---------------------------------------------------------------------------
# Pauli matrices and Hamiltonians


def pauli(l: int, sig: Signature | str = Signature.COQUATERNION) -> HMatrix2:
    """The five (co)quaternionic Pauli matrices, ``l = 1..5``.

    ``sigma_2, sigma_4, sigma_5`` carry ``-u`` above and ``+u`` below the
    diagonal for ``u = i, j, k`` respectively.
    """
    sig = Signature.parse(sig)
    if l not in (1, 2, 3, 4, 5):
        raise ValueError(f"Pauli index must be in 1..5, got {l!r}")
    if l == 1:
        return HMatrix2([[0.0, 1.0], [1.0, 0.0]], sig)
    if l == 3:
        return HMatrix2([[1.0, 0.0], [0.0, -1.0]], sig)
    u = HyperComplex.unit({2: "i", 4: "j", 5: "k"}[l], sig)
    return HMatrix2([[0.0, -u], [u, 0.0]], sig)


@dataclass(frozen=True)
class TwoLevelParams:
    """Hermitian two-level Hamiltonian ``[[s + t, q], [conj(q), s - t]]``.

    Six real parameters: ``s``, ``t`` and the four components of ``q``.
    """

    s: float
    t: float
    q: HyperComplex

    def __post_init__(self):
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "t", float(self.t))
        if not isinstance(self.q, HyperComplex):
            object.__setattr__(self, "q", HyperComplex.from_array(self.q))

    @property
    def sig(self) -> Signature:
        return self.q.sig

    @classmethod
    def from_omega_n(cls, omega: float, n, sig: Signature | str = Signature.COQUATERNION):
        """Parameters of ``omega/2 * 1 + sum_l n_l sigma_l`` for a unit 5-vector ``n``."""
        n = _unit_direction(n)
        q = HyperComplex(n[0], -n[1], -n[3], -n[4], sig)
        return cls(float(omega) / 2, n[2], q)

    def to_omega_n(self) -> tuple[float, np.ndarray]:
        """Inverse dictionary; ``n`` is returned unnormalised."""
        q0, q1, q2, q3 = self.q.components
        return 2 * self.s, np.array([q0, -q1, self.t, -q2, -q3])

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.t, *self.q.components])


def _unit_direction(n) -> np.ndarray:
    n = np.asarray(n, dtype=float).reshape(-1)
    if n.shape != (5,):
        raise NonUnitDirection(f"direction must have 5 components, got {n.shape[0]}")
    if abs(float(n @ n) - 1.0) > 1e-12:
        raise NonUnitDirection(f"direction has squared length {float(n @ n)!r}, expected 1")
    return n


def build_h(params: TwoLevelParams) -> HMatrix2:
    sig = params.sig
    q = params.q
    return HMatrix2([[params.s + params.t, q], [q.conj(), params.s - params.t]], sig)


def bloch_hamiltonian(omega: float, n, sig: Signature | str = Signature.COQUATERNION) -> HMatrix2:
    """``omega/2 * 1 + sum_l n_l sigma_l`` assembled directly from the Pauli matrices."""
    sig = Signature.parse(sig)
    n = _unit_direction(n)
    h = HMatrix2.identity(sig) * (0.5 * float(omega))
    for l in range(1, 6):
        h = h + pauli(l, sig) * n[l - 1]
    return h


def eigenvalues(params: TwoLevelParams) -> tuple[complex, complex]:
    """``s +/- sqrt(t**2 + conj(q) q)``, complex conjugate when the radicand is negative."""
    gap = np.sqrt(complex(params.t * params.t + params.q.norm2(), 0.0))
    return complex(params.s + gap), complex(params.s - gap)


class PTPhase(enum.Enum):
    UNBROKEN = "Unbroken"
    BROKEN = "Broken"
    EXCEPTIONAL = "Exceptional"


def _discriminant(params: TwoLevelParams) -> tuple[float, float]:
    q = params.q.as_array()
    disc = params.t * params.t + params.q.norm2()
    scale = 1.0 + params.t * params.t + float(q @ q)
    return disc, 1e-12 * scale


def pt_phase(params: TwoLevelParams) -> PTPhase:
    if params.sig is not Signature.COQUATERNION:
        raise WrongSignature("quaternionic Hermitian matrices always have a real spectrum")
    disc, tol = _discriminant(params)
    if disc > tol:
        return PTPhase.UNBROKEN
    if disc < -tol:
        return PTPhase.BROKEN
    return PTPhase.EXCEPTIONAL


def mode_exponents(params: TwoLevelParams) -> tuple[complex, complex]:
    """Rates ``b = i E`` of the eigenmode flows ``z' = i E z``."""
    e_plus, e_minus = eigenvalues(params)
    return 1j * e_plus, 1j * e_minus


def mode_fixed_points(params: TwoLevelParams) -> tuple[FixedPointClass, FixedPointClass]:
    b_plus, b_minus = mode_exponents(params)
    return classify_fixed_point(b_plus), classify_fixed_point(b_minus)


# ---------------------------------------------------------------------------
# dynamics


def rabi(omega: float, t: float) -> tuple[float, float]:
    """Coefficients of ``sigma_4(t) = c4 sigma_4 + c5 sigma_5`` for ``H = omega/2 * 1``."""
    return math.cos(omega * t), math.sin(omega * t)


def _generator(h: HMatrix2) -> HMatrix2:
    # i z' = H z  =>  z' = G z with G = -i H (left multiplication)
    return h.lmul(HyperComplex(0.0, -1.0, 0.0, 0.0, h.sig))


def heisenberg_evolve(
    h: HMatrix2, obs: HMatrix2, t: float, dt: float = 1e-2, method: str = "rk4"
) -> HMatrix2:
    """Heisenberg-picture observable ``U(t)^dagger obs U(t)`` with ``U' = G U``, ``G = -i H``.

    ``method="rk4"`` integrates ``A' = G^dagger A + A G`` with classic RK4 on
    the block-matrix representation; the RK4 step is linear in ``A`` so it is
    assembled once as a 16x16 propagator and raised to the step count.
    ``method="expm"`` forms ``U`` by a matrix exponential instead.
    """
    if not (math.isfinite(dt) and dt > 0):
        raise StepSizeInvalid(f"dt must be a positive finite number, got {dt!r}")
    if t == 0:
        return obs
    sig = h.sig
    g = _generator(h)
    if method == "expm":
        u = HMatrix2.from_matrix(scipy.linalg.expm(g.to_matrix() * t), sig)
        return HMatrix2.from_matrix(u.dagger().to_matrix() @ obs.to_matrix() @ u.to_matrix(), sig)
    if method != "rk4":
        raise ValueError(f"unknown method {method!r}; expected 'rk4' or 'expm'")

    nsteps = max(1, math.ceil(abs(t) / dt - 1e-9))
    step = t / nsteps
    left = g.dagger().to_matrix()
    right = g.to_matrix()
    dim = left.shape[0]
    eye = np.eye(dim)
    # vec(L A + A R) = (I kron L + R^T kron I) vec(A), column-major vec
    L = np.kron(eye, left) + np.kron(right.T, eye)
    Lh = L * step
    prop = np.eye(dim * dim) + Lh
    term = Lh
    for k in (2, 3, 4):
        term = term @ Lh / k
        prop = prop + term
    prop = np.linalg.matrix_power(prop, nsteps)
    a0 = obs.to_matrix()
    vec = prop @ a0.reshape(-1, order="F")
    return HMatrix2.from_matrix(vec.reshape(dim, dim, order="F"), sig)


# ---------------------------------------------------------------------------
# states and the Hopf map


@dataclass(frozen=True)
class SpinorQ:
    z1: HyperComplex
    z2: HyperComplex

    def __post_init__(self):
        if self.z1.sig is not self.z2.sig:
            raise ValueError("spinor components must share a signature")

    @property
    def sig(self) -> Signature:
        return self.z1.sig

    def norm(self) -> float:
        """``conj(z1) z1 + conj(z2) z2``; indefinite for coquaternions."""
        return self.z1.norm2() + self.z2.norm2()

    def right_multiply(self, u: HyperComplex) -> "SpinorQ":
        return SpinorQ(self.z1 * u, self.z2 * u)

    def as_array(self) -> np.ndarray:
        return np.stack([self.z1.as_array(), self.z2.as_array()])


def state_from_angles(theta: float, phi1: float, phi2: float, phi3: float) -> SpinorQ:
    """``(cos(theta/2), sin(theta/2) exp(u phi1))`` with
    ``u = i cos(phi2) + j sin(phi2) cos(phi3) + k sin(phi2) sin(phi3)``."""
    sig = Signature.QUATERNION
    u = np.array([
        0.0,
        math.cos(phi2),
        math.sin(phi2) * math.cos(phi3),
        math.sin(phi2) * math.sin(phi3),
    ])
    z2 = exp_arrays(u * phi1, sig) * math.sin(theta / 2)
    return SpinorQ(HyperComplex(math.cos(theta / 2), sig=sig), HyperComplex.from_array(z2, sig))


def _expectation(state: SpinorQ, m: HMatrix2) -> HyperComplex:
    z = state.as_array()
    mz = mul_arrays(m.entries, z[None, :, :], state.sig).sum(axis=1)
    return HyperComplex.from_array(mul_arrays(conj_arrays(z), mz, state.sig).sum(axis=0), state.sig)


def hopf_map(state: SpinorQ, dim: int | None = None) -> np.ndarray:
    """Bloch vector ``n_l = Re <z|sigma_l|z>``.

    ``dim=3`` gives the complex map ``S^3 -> S^2`` and requires the ``j`` and
    ``k`` parts of the state to vanish; ``dim=5`` gives ``S^7 -> S^4``. The
    default picks 3 for complex-valued states and 5 otherwise. Coquaternionic
    states are accepted as well; their image lies on a hyperboloid rather
    than a sphere.
    """
    z = state.as_array()
    if abs(state.norm() - 1.0) > 1e-10:
        raise NotNormalized(f"state norm is {state.norm()!r}, expected 1")
    is_complex = not np.any(z[:, 2:])
    if dim is None:
        dim = 3 if is_complex else 5
    if dim not in (3, 5):
        raise ValueError("dim must be 3 or 5")
    if dim == 3 and not is_complex:
        raise ValueError("the complex Hopf map needs states without j and k parts")
    return np.array([_expectation(state, pauli(l, state.sig)).q0 for l in range(1, dim + 1)])


def spectrum_arrays(grid, sig: Signature | str = Signature.COQUATERNION):
    """Vectorised eigenvalues and PT phases over ``(n, 6)`` rows of ``(s, t, q0..q3)``.

    Returns ``(e_plus, e_minus, phases)`` where ``phases`` is a list of
    :class:`PTPhase`, or of ``None`` for quaternionic input.
    """
    sig = Signature.parse(sig)
    grid = np.asarray(grid, dtype=float).reshape(-1, 6)
    s, t, q = grid[:, 0], grid[:, 1], grid[:, 2:]
    disc = t * t + norm2_arrays(q, sig)
    gap = np.sqrt(disc.astype(complex))
    e_plus, e_minus = s + gap, s - gap
    if sig is not Signature.COQUATERNION:
        return e_plus, e_minus, [None] * len(grid)
    tol = 1e-12 * (1.0 + t * t + np.einsum("ij,ij->i", q, q))
    phases = [
        PTPhase.UNBROKEN if d > e else PTPhase.BROKEN if d < -e else PTPhase.EXCEPTIONAL
        for d, e in zip(disc, tol)
    ]
    return e_plus, e_minus, phases
