"""Quaternion and coquaternion (split-quaternion) arithmetic.

Both algebras share the basis ``1, i, j, k`` with ``i**2 = -1`` and
``ij = -ji = k``. They differ in the square of ``j`` and ``k``: ``-1`` for
quaternions and ``+1`` for coquaternions. Every product in this module is
written in terms of that single sign, so the two multiplication tables can
never drift apart.

Two layers are provided:

* array functions (:func:`mul_arrays`, :func:`conj_arrays`, ...) acting on
  ``(..., 4)`` float arrays, used by the vectorised checks and the flows;
* the immutable :class:`HyperComplex` value type with operator overloads.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from numbers import Real

import numpy as np

from .errors import NullCoquaternion, SignatureMismatch, Unrepresentable

__all__ = [
    "Signature",
    "HyperComplex",
    "Branch",
    "PolarForm",
    "mul",
    "conj",
    "norm2",
    "inverse",
    "polar",
    "exp_hc",
    "to_matrix",
    "from_matrix",
    "to_real_matrix",
    "null_tolerance",
    "mul_arrays",
    "conj_arrays",
    "norm2_arrays",
    "exp_arrays",
    "to_matrix_arrays",
]


class Signature(enum.Enum):
    QUATERNION = "quaternion"
    COQUATERNION = "coquaternion"

    @property
    def jj(self) -> float:
        """Square of ``j`` (and of ``k``)."""
        return -1.0 if self is Signature.QUATERNION else 1.0

    @property
    def metric(self) -> np.ndarray:
        """Diagonal of the quadratic form ``conj(q) q``."""
        return np.array([1.0, 1.0, -self.jj, -self.jj])

    @classmethod
    def parse(cls, value: "Signature | str") -> "Signature":
        if isinstance(value, Signature):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown signature {value!r}; expected 'quaternion' or 'coquaternion'"
            ) from None


# ---------------------------------------------------------------------------
# array layer


def mul_arrays(a, b, sig: Signature) -> np.ndarray:
    """Hypercomplex product of two ``(..., 4)`` arrays (broadcasting)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    s = sig.jj
    r0 = a0 * b0 - a1 * b1 + s * (a2 * b2 + a3 * b3)
    r1 = a0 * b1 + a1 * b0 - s * (a2 * b3 - a3 * b2)
    r2 = a0 * b2 + a2 * b0 + a3 * b1 - a1 * b3
    r3 = a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1
    return np.stack(np.broadcast_arrays(r0, r1, r2, r3), axis=-1)


def conj_arrays(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def norm2_arrays(q, sig: Signature) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return (q * q) @ sig.metric


def _cos_sinc(vv):
    """Return ``(cos r, sin(r)/r)`` with ``r**2 = vv``; ``vv < 0`` gives cosh/sinh."""
    vv = np.asarray(vv, dtype=float)
    r = np.sqrt(np.abs(vv))
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(vv >= 0, np.cos(r), np.cosh(r))
        s = np.where(vv >= 0, np.sin(r), np.sinh(r)) / r
    small = np.abs(vv) < 1e-8
    c = np.where(small, 1.0 - vv / 2 + vv * vv / 24, c)
    s = np.where(small, 1.0 - vv / 6 + vv * vv / 120, s)
    return c, s


def exp_arrays(q, sig: Signature) -> np.ndarray:
    """Closed-form exponential of ``(..., 4)`` arrays."""
    q = np.asarray(q, dtype=float)
    v = q[..., 1:]
    vv = (v * v) @ sig.metric[1:]
    c, s = _cos_sinc(vv)
    scale = np.exp(q[..., 0])
    return np.concatenate(
        [(scale * c)[..., None], (scale * s)[..., None] * v], axis=-1
    )


def to_matrix_arrays(q, sig: Signature) -> np.ndarray:
    """2x2 matrix representation; real for coquaternions, complex for quaternions.

    Coquaternion units map to ``i -> [[0,1],[-1,0]]``, ``j -> [[0,1],[1,0]]``,
    ``k -> [[1,0],[0,-1]]``. Quaternions use the complex form
    ``[[q0 + i q1, q2 + i q3], [-q2 + i q3, q0 - i q1]]``. In both cases the
    determinant equals ``conj(q) q``.
    """
    q = np.asarray(q, dtype=float)
    q0, q1, q2, q3 = np.moveaxis(q, -1, 0)
    if sig is Signature.COQUATERNION:
        rows = [[q0 + q3, q1 + q2], [q2 - q1, q0 - q3]]
    else:
        rows = [[q0 + 1j * q1, q2 + 1j * q3], [-q2 + 1j * q3, q0 - 1j * q1]]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def from_matrix_arrays(m, sig: Signature) -> np.ndarray:
    """Inverse of :func:`to_matrix_arrays` (projects onto the image)."""
    m = np.asarray(m)
    a, b = m[..., 0, 0], m[..., 0, 1]
    c, d = m[..., 1, 0], m[..., 1, 1]
    if sig is Signature.COQUATERNION:
        a, b, c, d = (np.real(x) for x in (a, b, c, d))
        comps = [(a + d) / 2, (b - c) / 2, (b + c) / 2, (a - d) / 2]
    else:
        comps = [
            np.real(a + d) / 2,
            np.imag(a - d) / 2,
            np.real(b - c) / 2,
            np.imag(b + c) / 2,
        ]
    return np.stack(comps, axis=-1).astype(float)


def null_tolerance(q) -> float:
    """Scale-relative zero threshold for ``conj(q) q``."""
    q = np.asarray(q, dtype=float)
    return 1e-12 * (1.0 + float(q @ q))


# ---------------------------------------------------------------------------
# value type


@dataclass(frozen=True)
class HyperComplex:
    """A quaternion or coquaternion ``q0 + i q1 + j q2 + k q3``."""

    q0: float = 0.0
    q1: float = 0.0
    q2: float = 0.0
    q3: float = 0.0
    sig: Signature = Signature.COQUATERNION

    def __post_init__(self):
        for name in ("q0", "q1", "q2", "q3"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "sig", Signature.parse(self.sig))

    @classmethod
    def from_array(cls, arr, sig: Signature | str = Signature.COQUATERNION):
        a = np.asarray(arr, dtype=float).reshape(4)
        return cls(a[0], a[1], a[2], a[3], sig)

    @classmethod
    def unit(cls, name: str, sig: Signature | str = Signature.COQUATERNION):
        """Basis element ``'1'``, ``'i'``, ``'j'`` or ``'k'``."""
        comps = [0.0] * 4
        comps["1ijk".index(name)] = 1.0
        return cls(*comps, sig=sig)

    @property
    def components(self) -> tuple[float, float, float, float]:
        return (self.q0, self.q1, self.q2, self.q3)

    def as_array(self) -> np.ndarray:
        return np.array(self.components)

    @property
    def real(self) -> float:
        return self.q0

    @property
    def imag(self) -> "HyperComplex":
        return HyperComplex(0.0, self.q1, self.q2, self.q3, self.sig)

    def is_real(self) -> bool:
        return self.q1 == 0.0 and self.q2 == 0.0 and self.q3 == 0.0

    def _coerce(self, other) -> "HyperComplex":
        if isinstance(other, HyperComplex):
            if other.sig is not self.sig:
                raise SignatureMismatch(
                    f"cannot combine {self.sig.value} with {other.sig.value}"
                )
            return other
        if isinstance(other, Real):
            return HyperComplex(float(other), 0.0, 0.0, 0.0, self.sig)
        if isinstance(other, complex):
            return HyperComplex(other.real, other.imag, 0.0, 0.0, self.sig)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return HyperComplex.from_array(self.as_array() + other.as_array(), self.sig)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return HyperComplex.from_array(self.as_array() - other.as_array(), self.sig)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return HyperComplex(-self.q0, -self.q1, -self.q2, -self.q3, self.sig)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Real):
            return HyperComplex.from_array(self.as_array() * float(other), self.sig)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, Real):
            return self * other
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(other, self)

    def __truediv__(self, other):
        if isinstance(other, Real):
            return HyperComplex.from_array(self.as_array() / float(other), self.sig)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(self, inverse(other))

    def conj(self) -> "HyperComplex":
        return conj(self)

    def norm2(self) -> float:
        return norm2(self)

    def inverse(self) -> "HyperComplex":
        return inverse(self)

    def exp(self) -> "HyperComplex":
        return exp_hc(self)

    def isclose(self, other, atol: float = 1e-12) -> bool:
        other = self._coerce(other)
        return bool(np.max(np.abs(self.as_array() - other.as_array())) <= atol)

    def __str__(self):
        q0, q1, q2, q3 = self.components
        return f"{q0!r}{q1:+}i{q2:+}j{q3:+}k"


def _check_same(a: HyperComplex, b: HyperComplex) -> Signature:
    if a.sig is not b.sig:
        raise SignatureMismatch(f"cannot multiply {a.sig.value} by {b.sig.value}")
    return a.sig


def mul(a: HyperComplex, b: HyperComplex) -> HyperComplex:
    sig = _check_same(a, b)
    return HyperComplex.from_array(mul_arrays(a.as_array(), b.as_array(), sig), sig)


def conj(q: HyperComplex) -> HyperComplex:
    return HyperComplex(q.q0, -q.q1, -q.q2, -q.q3, q.sig)


def norm2(q: HyperComplex) -> float:
    """``conj(q) q``; indefinite for coquaternions."""
    return float(norm2_arrays(q.as_array(), q.sig))


def inverse(q: HyperComplex) -> HyperComplex:
    n = norm2(q)
    if abs(n) <= null_tolerance(q.as_array()):
        raise NullCoquaternion(f"{q} is null (conj(q) q = {n!r}) and has no inverse")
    return HyperComplex.from_array(conj_arrays(q.as_array()) / n, q.sig)


def exp_hc(q: HyperComplex) -> HyperComplex:
    return HyperComplex.from_array(exp_arrays(q.as_array(), q.sig), q.sig)


def to_matrix(q: HyperComplex) -> np.ndarray:
    return to_matrix_arrays(q.as_array(), q.sig)


def from_matrix(m, sig: Signature | str) -> HyperComplex:
    sig = Signature.parse(sig)
    return HyperComplex.from_array(from_matrix_arrays(m, sig), sig)


def to_real_matrix(q: HyperComplex) -> np.ndarray:
    """Real matrix representation: 2x2 for coquaternions, 4x4 for quaternions."""
    m = to_matrix(q)
    if q.sig is Signature.COQUATERNION:
        return m
    re, im = m.real, m.imag
    return np.block([[re, -im], [im, re]])


# ---------------------------------------------------------------------------
# polar decomposition


class Branch(enum.Enum):
    CIRCULAR = "circular"  # m (cos a + u sin a), u*u = -1
    HYPERBOLIC = "hyperbolic"  # m (cosh a + u sinh a), u*u = +1, conj(q) q > 0
    HYPERBOLIC_NEGATIVE = "hyperbolic_negative"  # m u (cosh a + u sinh a), conj(q) q < 0
    NULL = "null"  # m (1 + u a), u nilpotent with unit Euclidean length


@dataclass(frozen=True)
class PolarForm:
    magnitude: float
    axis: HyperComplex
    angle: float
    branch: Branch

    def reconstruct(self) -> HyperComplex:
        m, a, u = self.magnitude, self.angle, self.axis
        if self.branch is Branch.CIRCULAR:
            return (u * math.sin(a) + math.cos(a)) * m
        if self.branch is Branch.HYPERBOLIC:
            return (u * math.sinh(a) + math.cosh(a)) * m
        if self.branch is Branch.HYPERBOLIC_NEGATIVE:
            return (u * math.cosh(a) + math.sinh(a)) * m
        return (u * a + 1.0) * m


def _length(v: np.ndarray) -> float:
    # rescaled so subnormal components do not underflow to zero
    big = float(np.abs(v).max())
    return big * float(np.linalg.norm(v / big))


def polar(q: HyperComplex) -> PolarForm:
    """Polar decomposition, choosing the branch from the sign of ``conj(v) v``.

    ``v = i q1 + j q2 + k q3`` is the imaginary part. Real scalars map to the
    circular branch with axis ``i`` and angle ``0`` (or ``pi`` when negative).

    >>> p = polar(HyperComplex(1, 1, 0, 0))
    >>> p.branch, round(p.angle, 12)
    (<Branch.CIRCULAR: 'circular'>, 0.785398163397)
    """
    sig = q.sig
    arr = q.as_array()
    v = arr[1:]
    tol = null_tolerance(arr)
    i_unit = HyperComplex.unit("i", sig)

    if not v.any():
        ang = math.pi if q.q0 < 0 else 0.0
        return PolarForm(abs(q.q0), i_unit, ang, Branch.CIRCULAR)

    if sig is Signature.QUATERNION:
        r = _length(v)
        axis = HyperComplex(0.0, *(v / r), sig=sig)
        return PolarForm(math.hypot(q.q0, r), axis, math.atan2(r, q.q0), Branch.CIRCULAR)

    vv = float((v * v) @ sig.metric[1:])
    if vv > tol:
        r = math.sqrt(vv)
        axis = HyperComplex(0.0, *(v / r), sig=sig)
        return PolarForm(math.hypot(q.q0, r), axis, math.atan2(r, q.q0), Branch.CIRCULAR)

    if vv < -tol:
        r = math.sqrt(-vv)
        axis = HyperComplex(0.0, *(v / r), sig=sig)
        n = q.q0 * q.q0 - r * r
        if n > tol:
            m = math.copysign(math.sqrt(n), q.q0)
            return PolarForm(m, axis, math.atanh(r / q.q0), Branch.HYPERBOLIC)
        if n < -tol:
            m = math.sqrt(-n)
            return PolarForm(m, axis, math.atanh(q.q0 / r), Branch.HYPERBOLIC_NEGATIVE)
        raise Unrepresentable(f"{q} is null with a hyperbolic imaginary part")

    if abs(q.q0) > tol:
        length = _length(v)
        axis = HyperComplex(0.0, *(v / length), sig=sig)
        return PolarForm(q.q0, axis, length / q.q0, Branch.NULL)
    raise Unrepresentable(f"{q} has a null imaginary part and no real part")
