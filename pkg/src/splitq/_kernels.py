"""Compiled fixed-step integrators over polynomial Hamiltonians.

All kernels take the Hamiltonian as ``coef`` (n_terms x 4 components) and
``exps`` (n_terms x 4 exponents), and a flow as the sign tensor ``A`` with
``velocity[i] = sum_{m,v} A[i, m, v] * dH_m/dv``.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def velocity(coef, exps, A, s, out, P):
    P[:, :] = 0.0
    for t in range(exps.shape[0]):
        for v in range(4):
            ev = exps[t, v]
            if ev == 0:
                continue
            mono = float(ev)
            for w in range(4):
                ew = exps[t, w] - 1 if w == v else exps[t, w]
                if ew > 0:
                    mono *= s[w] ** ew
            for m in range(4):
                P[m, v] += coef[t, m] * mono
    for i in range(4):
        acc = 0.0
        for m in range(4):
            for v in range(4):
                a = A[i, m, v]
                if a != 0.0:
                    acc += a * P[m, v]
        out[i] = acc


@njit(cache=True, nogil=True)
def _finite(s):
    for i in range(s.shape[0]):
        if not np.isfinite(s[i]):
            return False
    return True


@njit(cache=True, nogil=True)
def rk4(coef, exps, A, s0, h, nsteps, every, out):
    """Classic RK4; writes every ``every``-th state (and the last) into ``out``.

    Returns the number of rows written, negated if the state became non-finite.
    """
    s = s0.copy()
    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    tmp = np.empty(4)
    P = np.empty((4, 4))
    out[0, :] = s
    row = 1
    for step in range(1, nsteps + 1):
        velocity(coef, exps, A, s, k1, P)
        for i in range(4):
            tmp[i] = s[i] + 0.5 * h * k1[i]
        velocity(coef, exps, A, tmp, k2, P)
        for i in range(4):
            tmp[i] = s[i] + 0.5 * h * k2[i]
        velocity(coef, exps, A, tmp, k3, P)
        for i in range(4):
            tmp[i] = s[i] + h * k3[i]
        velocity(coef, exps, A, tmp, k4, P)
        for i in range(4):
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if step % every == 0 or step == nsteps:
            out[row, :] = s
            row += 1
            if not _finite(s):
                return -row
    return row


@njit(cache=True, nogil=True)
def leapfrog(coef, exps, A, s0, h, nsteps, every, out):
    """Kick-drift-kick for separable flows (momenta at odd, positions at even indices)."""
    s = s0.copy()
    vel = np.empty(4)
    P = np.empty((4, 4))
    out[0, :] = s
    row = 1
    # momentum rates depend on positions only, so the closing kick's rates
    # are reused by the next opening kick
    velocity(coef, exps, A, s, vel, P)
    for step in range(1, nsteps + 1):
        s[1] += 0.5 * h * vel[1]
        s[3] += 0.5 * h * vel[3]
        velocity(coef, exps, A, s, vel, P)
        s[0] += h * vel[0]
        s[2] += h * vel[2]
        velocity(coef, exps, A, s, vel, P)
        s[1] += 0.5 * h * vel[1]
        s[3] += 0.5 * h * vel[3]
        if step % every == 0 or step == nsteps:
            out[row, :] = s
            row += 1
            if not _finite(s):
                return -row
    return row
