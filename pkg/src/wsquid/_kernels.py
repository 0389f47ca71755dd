"""Compiled fixed-step RK4 propagation for H(t) = A + w(t) B in sparse (COO) form."""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _apply(ar, ac, av, br, bc, bv, w, x, out):
    # out = -i (A + w B) x
    for k in range(out.shape[0]):
        out[k] = 0.0
    for k in range(ar.shape[0]):
        out[ar[k]] += av[k] * x[ac[k]]
    for k in range(br.shape[0]):
        out[br[k]] += w * bv[k] * x[bc[k]]
    for k in range(out.shape[0]):
        out[k] = -1j * out[k]


@njit(cache=True, nogil=True)
def rk4(ar, ac, av, br, bc, bv, omega, psi0, dt, nsteps, stride, check_every, growth_tol, renormalize, rates):
    """Integrate d psi/dt = -i H(t) psi.

    ``omega`` holds the envelope on the half-step grid: omega[2k] at t_k,
    omega[2k+1] at t_k + dt/2. States are stored every ``stride`` steps and
    at the final step. With ``renormalize`` the state is rescaled to unit
    norm after every step and jump_prob[k] = dt <psi|rates|psi> is recorded
    before step k. Returns (states, steps, jump_prob, first step whose norm
    grew by more than growth_tol or -1).
    """
    d = psi0.shape[0]
    nrec = nsteps // stride + 1
    if nsteps % stride != 0:
        nrec += 1
    states = np.empty((nrec, d), dtype=np.complex128)
    steps = np.empty(nrec, dtype=np.int64)
    jump_prob = np.zeros(nsteps)
    psi = psi0.copy()
    k1 = np.empty(d, dtype=np.complex128)
    k2 = np.empty(d, dtype=np.complex128)
    k3 = np.empty(d, dtype=np.complex128)
    k4 = np.empty(d, dtype=np.complex128)
    tmp = np.empty(d, dtype=np.complex128)
    states[0] = psi
    steps[0] = 0
    rec = 1
    bad = -1
    last_norm = 0.0
    for i in range(d):
        last_norm += psi[i].real ** 2 + psi[i].imag ** 2
    for n in range(nsteps):
        if renormalize:
            p = 0.0
            for i in range(d):
                p += rates[i] * (psi[i].real ** 2 + psi[i].imag ** 2)
            jump_prob[n] = p * dt
        w0 = omega[2 * n]
        wh = omega[2 * n + 1]
        w1 = omega[2 * n + 2]
        _apply(ar, ac, av, br, bc, bv, w0, psi, k1)
        for i in range(d):
            tmp[i] = psi[i] + 0.5 * dt * k1[i]
        _apply(ar, ac, av, br, bc, bv, wh, tmp, k2)
        for i in range(d):
            tmp[i] = psi[i] + 0.5 * dt * k2[i]
        _apply(ar, ac, av, br, bc, bv, wh, tmp, k3)
        for i in range(d):
            tmp[i] = psi[i] + dt * k3[i]
        _apply(ar, ac, av, br, bc, bv, w1, tmp, k4)
        for i in range(d):
            psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if renormalize:
            nrm = 0.0
            for i in range(d):
                nrm += psi[i].real ** 2 + psi[i].imag ** 2
            nrm = np.sqrt(nrm)
            for i in range(d):
                psi[i] /= nrm
        elif (n + 1) % check_every == 0:
            nrm = 0.0
            for i in range(d):
                nrm += psi[i].real ** 2 + psi[i].imag ** 2
            if bad < 0 and nrm > last_norm + growth_tol:
                bad = n
            last_norm = nrm
        if (n + 1) % stride == 0 or n + 1 == nsteps:
            states[rec] = psi
            steps[rec] = n + 1
            rec += 1
    return states, steps, jump_prob, bad
