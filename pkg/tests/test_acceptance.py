"""Exit criteria, one test per criterion.

A PASS/FAIL line for each criterion is printed in the pytest terminal summary.
Time limits include everything the test does, numba compilation included.
"""
import math
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

from splitq.algebra import HyperComplex, Signature, mul_arrays, norm2_arrays, to_matrix_arrays
from splitq.dynamics import FixedPointClass, FlowKind, Method, energy_drift, integrate, rhs_array, stability
from splitq.hamiltonian import AnalyticSpec, HamiltonianSpec, expand_analytic
from splitq.spectral import (
    HMatrix2,
    PTPhase,
    SpinorQ,
    TwoLevelParams,
    build_h,
    eigenvalues,
    heisenberg_evolve,
    hopf_map,
    mode_exponents,
    mode_fixed_points,
    pauli,
    pt_phase,
    rabi,
)

pytestmark = pytest.mark.acceptance

Q, C = Signature.QUATERNION, Signature.COQUATERNION
OSC_TEXT = "(p^2 + x^2)/2"
CUBIC_TEXT = "p^2/2 + x^3"


def quaternionic_oscillator():
    return HamiltonianSpec([(0.5, (2, 0, 0, 0)), (0.5, (0, 2, 0, 0)), (0.5, (0, 0, 2, 0)), (0.5, (0, 0, 0, 2))])


def coquaternionic_oscillator():
    return HamiltonianSpec([(0.5, (2, 0, 0, 0)), (0.5, (0, 2, 0, 0)), (-0.5, (0, 0, 2, 0)), (-0.5, (0, 0, 0, 2))])


def real_energy_starts(spec: AnalyticSpec, n: int, seed: int) -> np.ndarray:
    """Phase points with H1 = 0, kept off the real slice where x^3 orbits escape."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        x = complex(rng.uniform(-1, 1), rng.uniform(0.5, 1) * rng.choice([-1, 1]))
        energy = rng.uniform(-0.5, 0.5)
        # solve H(x, p) = energy for p using the kinetic term p^2/2
        v = spec(x, 0)
        p = np.sqrt(2 * (energy - v))
        out.append((x.real, p.real, x.imag, p.imag))
    return np.array(out)


def complex_rk4(spec: AnalyticSpec, s0, t_end: float, dt: float) -> np.ndarray:
    """Independent oracle: RK4 on (z, w) = (x0 + i x1, p0 + i p1) with complex arithmetic."""
    dz = {(a - 1, b): a * c for (a, b), c in spec.coeffs.items() if a}
    dw = {(a, b - 1): b * c for (a, b), c in spec.coeffs.items() if b}

    def ev(poly, z, w):
        return sum(c * z**a * w**b for (a, b), c in poly.items())

    def f(y):
        return np.array([ev(dw, *y), -ev(dz, *y)])

    n = math.ceil(t_end / dt - 1e-9)
    h = t_end / n
    y = np.array([complex(s0[0], s0[2]), complex(s0[1], s0[3])])
    out = [y]
    for _ in range(n):
        k1 = f(y)
        k2 = f(y + h / 2 * k1)
        k3 = f(y + h / 2 * k2)
        k4 = f(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(y)
    z = np.array(out)
    return np.stack([z[:, 0].real, z[:, 1].real, z[:, 0].imag, z[:, 1].imag], axis=-1)


BASIS = "1ijk"
# row unit times column unit, written out by hand; "-k" means minus k
TABLES = {
    Q: [["1", "i", "j", "k"], ["i", "-1", "k", "-j"], ["j", "-k", "-1", "i"], ["k", "j", "-i", "-1"]],
    C: [["1", "i", "j", "k"], ["i", "-1", "k", "-j"], ["j", "-k", "1", "-i"], ["k", "j", "i", "1"]],
}


def test_01_algebra_tables(criterion):
    with criterion(1, "algebra tables: 32 basis products match exactly", 1.0):
        eye = np.eye(4)
        checked = 0
        for sig, table in TABLES.items():
            for r, a in enumerate(BASIS):
                for c, b in enumerate(BASIS):
                    word = table[r][c]
                    want = np.zeros(4)
                    want[BASIS.index(word.lstrip("-"))] = -1.0 if word.startswith("-") else 1.0
                    got = (HyperComplex.from_array(eye[r], sig) * HyperComplex.from_array(eye[c], sig)).as_array()
                    assert np.array_equal(got, want), f"{sig.value}: {a}*{b} = {got}, expected {word}"
                    checked += 1
        assert checked == 32


def test_02_representation_oracle(criterion):
    with criterion(2, "representation: M(ab) = M(a)M(b), det M(q) = conj(q)q over 1e4 pairs", 5.0):
        rng = np.random.default_rng(202)
        for sig in (Q, C):
            a, b = rng.standard_normal((2, 10_000, 4))
            hom = np.abs(to_matrix_arrays(mul_arrays(a, b, sig), sig)
                         - to_matrix_arrays(a, sig) @ to_matrix_arrays(b, sig)).max()
            assert hom <= 1e-12, f"{sig.value}: homomorphism residual {hom:.3e}"
            det = np.abs(np.linalg.det(to_matrix_arrays(a, sig)) - norm2_arrays(a, sig)).max()
            assert det <= 1e-10, f"{sig.value}: determinant residual {det:.3e}"


def test_03_equivalence_theorem(criterion):
    with criterion(3, "equivalence: CoquaternionicReal = ComplexifiedClassical (velocities, trajectories)", 30.0):
        rng = np.random.default_rng(303)
        for text in (OSC_TEXT, CUBIC_TEXT):
            spec = AnalyticSpec.parse(text)
            h = expand_analytic(spec)
            points = rng.uniform(-2, 2, (1000, 4))
            va = rhs_array(FlowKind.COQUATERNIONIC_REAL, h.component(0), points)
            vb = rhs_array(FlowKind.COMPLEXIFIED_CLASSICAL, h, points)
            err = np.abs(va - vb).max()
            assert err <= 1e-12, f"{text}: velocity residual {err:.3e}"

            for s0 in real_energy_starts(spec, 10, seed=7 if text == OSC_TEXT else 8):
                ta = integrate(FlowKind.COQUATERNIONIC_REAL, h.component(0), s0, 10.0, 1e-3)
                tb = integrate(FlowKind.COMPLEXIFIED_CLASSICAL, h, s0, 10.0, 1e-3)
                err = np.abs(ta.states - tb.states).max()
                assert err <= 1e-8, f"{text}: trajectory residual {err:.3e} from {s0}"
                # the shared trajectory also solves the complex equations of motion
                oracle = complex_rk4(spec, s0, 10.0, 1e-3)
                scale = 1 + np.abs(oracle).max()
                err = np.abs(ta.states - oracle).max() / scale
                assert err <= 1e-8, f"{text}: complex-oracle residual {err:.3e} from {s0}"


def test_04_energy_conservation(criterion):
    with criterion(4, "energy: oscillator drift <= 1e-8 over t = 100, |H1| <= 1e-8", 30.0):
        rng = np.random.default_rng(404)
        for kind, h in ((FlowKind.QUATERNIONIC, quaternionic_oscillator()),
                        (FlowKind.COQUATERNIONIC_REAL, coquaternionic_oscillator())):
            tested = 0
            while tested < 3:
                s0 = rng.uniform(-1, 1, 4)
                if abs(h.eval_array(s0)[0]) < 0.05:
                    continue  # the indefinite energy needs a nonzero reference
                traj = integrate(kind, h, s0, 100.0, 1e-3, sample_every=10)
                rel = energy_drift(traj)[1]
                assert rel <= 1e-8, f"{kind.value}: relative drift {rel:.3e}"
                tested += 1
        # H1 is conserved exactly; RK4 truncation error scales as dt^4, so the
        # cubic, whose orbits reach larger |x|, runs at half the step
        for text, dt in ((OSC_TEXT, 1e-3), (CUBIC_TEXT, 5e-4)):
            spec = AnalyticSpec.parse(text)
            h = expand_analytic(spec)
            for s0 in real_energy_starts(spec, 10, seed=44):
                assert abs(h.eval_array(s0)[1]) <= 1e-14
                traj = integrate(FlowKind.COMPLEXIFIED_CLASSICAL, h, s0, 10.0, dt)
                h1 = np.abs(traj.energy_samples[:, 1]).max()
                assert h1 <= 1e-8, f"{text}: |H1| reached {h1:.3e}"


def test_05_spectral_oracle(criterion):
    with criterion(5, "spectrum: E+- match 4x4 real eigenvalues (mult. 2) to 1e-10, phase = sign", 10.0):
        rng = np.random.default_rng(505)
        rows = rng.standard_normal((10_000, 6))
        mats = []
        formula = []
        for s, t, *q in rows:
            p = TwoLevelParams(s, t, HyperComplex(*q, sig=C))
            mats.append(build_h(p).to_matrix())
            formula.append(eigenvalues(p))
            disc = t * t + q[0] ** 2 + q[1] ** 2 - q[2] ** 2 - q[3] ** 2
            want = PTPhase.UNBROKEN if disc > 0 else PTPhase.BROKEN
            assert pt_phase(p) is want, f"phase mismatch at {(s, t, *q)}"
        numeric = np.linalg.eigvals(np.array(mats))
        worst = 0.0
        for (e_plus, e_minus), w in zip(formula, numeric):
            rest = list(w)
            for e in (e_plus, e_plus, e_minus, e_minus):
                k = min(range(len(rest)), key=lambda i: abs(rest[i] - e))
                worst = max(worst, abs(rest.pop(k) - e))
        assert worst <= 1e-10, f"eigenvalue residual {worst:.3e}"


def test_06_pt_transition(criterion):
    with criterion(6, "PT transition: centres when unbroken, opposite-stability pair when broken", 10.0):
        counts = {p: 0 for p in PTPhase}
        for s in (0.0, 0.5):
            for t in np.linspace(-2, 2, 101):
                for q2 in np.linspace(-2, 2, 101):
                    p = TwoLevelParams(s, t, HyperComplex(0, 0, q2, 0, sig=C))
                    phase = pt_phase(p)
                    counts[phase] += 1
                    classes = mode_fixed_points(p)
                    if phase is PTPhase.UNBROKEN:
                        assert classes == (FixedPointClass.CENTRE, FixedPointClass.CENTRE), (s, t, q2)
                    elif phase is PTPhase.BROKEN:
                        assert FixedPointClass.CENTRE not in classes, (s, t, q2)
                        assert sorted(stability(b) for b in mode_exponents(p)) == [-1, 1], (s, t, q2)
                        if s != 0:
                            assert classes == (FixedPointClass.VORTEX, FixedPointClass.VORTEX)
        assert counts[PTPhase.UNBROKEN] and counts[PTPhase.BROKEN]


def test_07_rabi(criterion):
    with criterion(7, "Rabi: Heisenberg sigma_4(t) matches cos/sin to 1e-8 at 100 times", 5.0):
        omega = 1.3
        h = HMatrix2.identity(C) * (omega / 2)
        s4, s5 = pauli(4, C), pauli(5, C)
        for t in np.linspace(0, 10, 100):
            c4, c5 = rabi(omega, t)
            out = heisenberg_evolve(h, s4, t, dt=1e-2)
            want = s4 * c4 + s5 * c5
            err = out.max_abs_diff(want)
            assert err <= 1e-8, f"t = {t}: residual {err:.3e}"


def test_08_hopf_invariance(criterion):
    with criterion(8, "Hopf: unit 5-vectors and phase invariance to 1e-12 over 1e3 spinors", 5.0):
        rng = np.random.default_rng(808)
        for _ in range(1000):
            z = rng.standard_normal(8)
            z /= np.linalg.norm(z)
            state = SpinorQ(HyperComplex.from_array(z[:4], Q), HyperComplex.from_array(z[4:], Q))
            n = hopf_map(state)
            assert abs(np.linalg.norm(n) - 1) <= 1e-12
            angle = rng.uniform(0, 2 * math.pi)
            for axis in ([1, 0, 0], rng.standard_normal(3)):
                axis = np.asarray(axis, dtype=float) / np.linalg.norm(axis)
                phase = HyperComplex(math.cos(angle), *(math.sin(angle) * axis), sig=Q)
                err = np.abs(hopf_map(state.right_multiply(phase)) - n).max()
                assert err <= 1e-12, f"phase residual {err:.3e}"


def test_09_integrator_order(criterion):
    with criterion(9, "integrators: RK4 error ratio >= 12 on halving dt; leapfrog band <= 1e-4 over 1e4 periods", 60.0):
        h = quaternionic_oscillator()
        s0 = np.array([1.0, 0.0, 0.5, -0.25])
        t_end = 2 * math.pi

        def exact(t):
            c, s = math.cos(t), math.sin(t)
            x0, p0, x1, p1 = s0
            return np.array([x0 * c + p0 * s, p0 * c - x0 * s, x1 * c + p1 * s, p1 * c - x1 * s])

        errs = []
        for dt in (0.1, 0.05):
            traj = integrate(FlowKind.QUATERNIONIC, h, s0, t_end, dt)
            errs.append(np.abs(traj.final.as_array() - exact(t_end)).max())
        assert errs[0] / errs[1] >= 12, f"RK4 error ratio {errs[0] / errs[1]:.2f}"

        traj = integrate(FlowKind.QUATERNIONIC, h, s0, 1e4 * 2 * math.pi, 1e-2,
                         method=Method.SYMPLECTIC_LEAPFROG, sample_every=100)
        rel = energy_drift(traj)[1]
        assert rel <= 1e-4, f"leapfrog relative energy excursion {rel:.3e}"


def test_10_cli_determinism(criterion, tmp_path):
    with criterion(10, "CLI: repeated simulate is byte-identical; selfcheck exits 0", 10.0):
        scenario = str(resources.files("splitq").joinpath("data/oscillator.json"))
        outputs = []
        for n in range(2):
            path = tmp_path / f"run{n}.csv"
            subprocess.run([sys.executable, "-m", "splitq", "simulate", scenario, "--output", str(path)],
                           check=True, capture_output=True)
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]
        assert len(outputs[0]) > 0
        res = subprocess.run([sys.executable, "-m", "splitq", "selfcheck"], capture_output=True, text=True)
        assert res.returncode == 0, res.stdout + res.stderr
