"""Fast deterministic property checks behind ``splitq selfcheck``."""
from __future__ import annotations

from typing import Callable, Iterator

import numpy as np
import scipy.linalg

from .algebra import (
    HyperComplex,
    Signature,
    conj_arrays,
    exp_arrays,
    mul_arrays,
    norm2_arrays,
    polar,
    to_matrix_arrays,
)
from .dynamics import FlowKind, rhs_array
from .hamiltonian import AnalyticSpec, HamiltonianSpec, expand_analytic

SEED = 20240611
N_SAMPLES = 2000

# Unit products written out independently of algebra.mul_arrays:
# (left, right) -> (sign, result) for quaternions, then coquaternions.
BASIS_TABLE = {
    Signature.QUATERNION: {
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "i"): (-1, "k"),
        ("j", "k"): (1, "i"), ("k", "j"): (-1, "i"),
        ("k", "i"): (1, "j"), ("i", "k"): (-1, "j"),
    },
    Signature.COQUATERNION: {
        ("i", "i"): (-1, "1"), ("j", "j"): (1, "1"), ("k", "k"): (1, "1"),
        ("i", "j"): (1, "k"), ("j", "i"): (-1, "k"),
        ("j", "k"): (-1, "i"), ("k", "j"): (1, "i"),
        ("k", "i"): (1, "j"), ("i", "k"): (-1, "j"),
    },
}


def basis_product(a: str, b: str, sig: Signature) -> np.ndarray:
    """Expected product of two basis units as a component vector."""
    out = np.zeros(4)
    if a == "1":
        out["1ijk".index(b)] = 1.0
    elif b == "1":
        out["1ijk".index(a)] = 1.0
    else:
        sign, unit = BASIS_TABLE[sig][(a, b)]
        out["1ijk".index(unit)] = sign
    return out


Mul = Callable[[np.ndarray, np.ndarray, Signature], np.ndarray]


def _checks(mul: Mul) -> Iterator[tuple[str, Callable[[], str | None]]]:
    rng = np.random.default_rng(SEED)
    sigs = (Signature.QUATERNION, Signature.COQUATERNION)
    eye = np.eye(4)

    def table():
        for sig in sigs:
            for a in "1ijk":
                for b in "1ijk":
                    got = mul(eye["1ijk".index(a)], eye["1ijk".index(b)], sig)
                    if not np.array_equal(got, basis_product(a, b, sig)):
                        return f"{sig.value} {a}*{b} gave {got.tolist()}"
        return None

    def associativity():
        for sig in sigs:
            a, b, c = rng.standard_normal((3, N_SAMPLES, 4))
            err = np.abs(mul(mul(a, b, sig), c, sig) - mul(a, mul(b, c, sig), sig)).max()
            if err > 1e-12:
                return f"{sig.value} residual {err:.3e}"
        return None

    def conjugation():
        for sig in sigs:
            a, b = rng.standard_normal((2, N_SAMPLES, 4))
            lhs = conj_arrays(mul(a, b, sig))
            rhs = mul(conj_arrays(b), conj_arrays(a), sig)
            err = np.abs(lhs - rhs).max()
            if err > 1e-12:
                return f"{sig.value} residual {err:.3e}"
        return None

    def homomorphism():
        for sig in sigs:
            a, b = rng.standard_normal((2, N_SAMPLES, 4))
            err = np.abs(
                to_matrix_arrays(mul(a, b, sig), sig)
                - to_matrix_arrays(a, sig) @ to_matrix_arrays(b, sig)
            ).max()
            if err > 1e-12:
                return f"{sig.value} residual {err:.3e}"
        return None

    def determinant():
        for sig in sigs:
            q = rng.standard_normal((N_SAMPLES, 4))
            err = np.abs(np.linalg.det(to_matrix_arrays(q, sig)) - norm2_arrays(q, sig)).max()
            if err > 1e-10:
                return f"{sig.value} residual {err:.3e}"
        return None

    def polar_reconstruction():
        for sig in sigs:
            for q in rng.standard_normal((200, 4)):
                h = HyperComplex.from_array(q, sig)
                err = np.abs(polar(h).reconstruct().as_array() - q).max()
                if err > 1e-12 * (1 + np.abs(q).max()):
                    return f"{sig.value} {h}: residual {err:.3e}"
        return None

    def exponential():
        for sig in sigs:
            for q in rng.standard_normal((100, 4)):
                expect = scipy.linalg.expm(to_matrix_arrays(q, sig))
                got = to_matrix_arrays(exp_arrays(q, sig), sig)
                err = np.abs(got - expect).max()
                if err > 1e-10 * (1 + np.abs(expect).max()):
                    return f"{sig.value} residual {err:.3e}"
        return None

    def flow_equivalence():
        states = rng.uniform(-1.5, 1.5, (500, 4))
        for text in ("(p^2 + x^2)/2", "p^2/2 + x^3"):
            h = expand_analytic(AnalyticSpec.parse(text))
            a = rhs_array(FlowKind.COQUATERNIONIC_REAL, h.component(0), states)
            b = rhs_array(FlowKind.COMPLEXIFIED_CLASSICAL, h, states)
            # complex Hamilton equations via holomorphic derivatives
            d = h.partials_array(states)
            c = np.stack([d[:, 0, 1], -d[:, 0, 0], d[:, 1, 1], -d[:, 1, 0]], axis=-1)
            err = max(np.abs(a - b).max(), np.abs(a - c).max())
            if err > 1e-12:
                return f"{text}: residual {err:.3e}"
        return None

    def flow_reduction():
        states = rng.uniform(-1, 1, (200, 4))
        coeffs = rng.standard_normal((6, 4))
        exps = rng.integers(0, 3, (6, 4))
        complex_part = HamiltonianSpec(zip(coeffs * [1, 1, 0, 0], exps))
        real_part = HamiltonianSpec(zip(coeffs * [1, 0, 0, 0], exps))
        err = max(
            np.abs(rhs_array(FlowKind.COQUATERNIONIC_FULL, complex_part, states)
                   - rhs_array(FlowKind.COQUATERNIONIC_COMPLEX, complex_part, states)).max(),
            np.abs(rhs_array(FlowKind.COQUATERNIONIC_FULL, real_part, states)
                   - rhs_array(FlowKind.COQUATERNIONIC_REAL, real_part, states)).max(),
        )
        if err > 1e-12:
            return f"residual {err:.3e}"
        return None

    yield "mul-table", table
    yield "associativity", associativity
    yield "conj-antihomomorphism", conjugation
    yield "matrix-homomorphism", homomorphism
    yield "determinant", determinant
    yield "polar-reconstruction", polar_reconstruction
    yield "exp-matrix", exponential
    yield "flow-equivalence", flow_equivalence
    yield "flow-reduction", flow_reduction


def run_selfcheck(mul: Mul | None = None, echo: Callable[[str], None] | None = print) -> int:
    """Run every check in order; return 0 on success, 1 at the first failure.

    ``mul`` replaces the array product for the algebra checks, which lets
    tests confirm that a broken table is caught.
    """
    mul = mul or mul_arrays
    for name, check in _checks(mul):
        problem = check()
        if problem is not None:
            if echo:
                echo(f"FAIL {name}: {problem}")
            return 1
        if echo:
            echo(f"ok   {name}")
    return 0
