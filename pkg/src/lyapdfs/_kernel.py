"""Compiled fixed-step RK4 loop for the closed-loop master equation.

The state is the row-major vectorized density matrix. Feedback traces are
linear functionals of it (see ``control.field_functionals``), so the field law
is re-evaluated cheaply at every Runge-Kutta stage.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _fields(x, u, w, kappas, j0, eps_den, eps_num, f_max, out):
    """Fill ``out`` with the field law at ``x``; return (numerator, denominator, saturated)."""
    n = x.shape[0]
    num = 0j
    for i in range(n):
        num += u[i] * x[i]
    den = 0j
    saturated = False
    for k in range(w.shape[0]):
        t = 0j
        for i in range(n):
            t += w[k, i] * x[i]
        if k == j0:
            den = t
            if abs(t) < eps_den:
                if abs(num.real) < eps_num:
                    out[k] = 0.0
                else:
                    s = -num.real * t.imag if t.imag != 0.0 else -num.real
                    out[k] = f_max if s >= 0.0 else -f_max
                    saturated = True
            else:
                out[k] = (-1j * num / t).real
        else:
            out[k] = (-1j * kappas[k] * np.conj(t)).real
    return num.real, den, saturated


@njit(cache=True)
def _generator(x, f, H0, Hs, D, N):
    H = H0.copy()
    for k in range(Hs.shape[0]):
        for a in range(N):
            for b in range(N):
                H[a, b] += f[k] * Hs[k, a, b]
    n = N * N
    y = np.empty(n, dtype=np.complex128)
    for i in range(n):
        s = 0j
        for j in range(n):
            s += D[i, j] * x[j]
        y[i] = s
    for a in range(N):
        for b in range(N):
            s = 0j
            for c in range(N):
                s += H[a, c] * x[c * N + b] - x[a * N + c] * H[c, b]
            y[a * N + b] += -1j * s
    return y


@njit(cache=True)
def _hermitize_and_trace(x, N, renormalize):
    for a in range(N):
        for b in range(a, N):
            v = 0.5 * (x[a * N + b] + np.conj(x[b * N + a]))
            x[a * N + b] = v
            x[b * N + a] = np.conj(v)
    tr = 0.0
    for a in range(N):
        tr += x[a * N + a].real
    if renormalize and tr > 0.0:
        for i in range(x.shape[0]):
            x[i] /= tr
    return tr


@njit(cache=True)
def rk4_closed_loop(x0, H0, Hs, D, u, w, kappas, j0, eps_den, eps_num, f_max,
                    dt, n_steps, stride, renormalize, frozen, f_frozen):
    N = H0.shape[0]
    F = Hs.shape[0]
    n_rec = n_steps // stride + 1
    if n_steps % stride != 0:
        n_rec += 1
    states = np.empty((n_rec, N * N), dtype=np.complex128)
    fields = np.zeros((n_rec, F))
    nums = np.zeros(n_rec)
    dens = np.zeros(n_rec, dtype=np.complex128)
    sats = np.zeros(n_rec, dtype=np.bool_)
    steps = np.zeros(n_rec, dtype=np.int64)

    f = np.zeros(F)
    tmp = np.zeros(F)
    x = x0.copy()
    sat_count = 0
    max_drift = 0.0

    rec = 0
    states[0] = x
    if frozen:
        fields[0] = f_frozen
    else:
        nums[0], dens[0], sats[0] = _fields(x, u, w, kappas, j0, eps_den, eps_num, f_max, tmp)
        fields[0] = tmp
    rec = 1

    for s in range(1, n_steps + 1):
        if frozen:
            f[:] = f_frozen
            k1 = _generator(x, f, H0, Hs, D, N)
            k2 = _generator(x + 0.5 * dt * k1, f, H0, Hs, D, N)
            k3 = _generator(x + 0.5 * dt * k2, f, H0, Hs, D, N)
            k4 = _generator(x + dt * k3, f, H0, Hs, D, N)
        else:
            _, _, sat = _fields(x, u, w, kappas, j0, eps_den, eps_num, f_max, f)
            sat_count += sat
            k1 = _generator(x, f, H0, Hs, D, N)
            xs = x + 0.5 * dt * k1
            _, _, sat = _fields(xs, u, w, kappas, j0, eps_den, eps_num, f_max, f)
            sat_count += sat
            k2 = _generator(xs, f, H0, Hs, D, N)
            xs = x + 0.5 * dt * k2
            _, _, sat = _fields(xs, u, w, kappas, j0, eps_den, eps_num, f_max, f)
            sat_count += sat
            k3 = _generator(xs, f, H0, Hs, D, N)
            xs = x + dt * k3
            _, _, sat = _fields(xs, u, w, kappas, j0, eps_den, eps_num, f_max, f)
            sat_count += sat
            k4 = _generator(xs, f, H0, Hs, D, N)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tr = _hermitize_and_trace(x, N, renormalize)
        drift = abs(tr - 1.0)
        if drift > max_drift:
            max_drift = drift
        blown_up = not (np.isfinite(tr) and tr > 0.0)
        if blown_up or s % stride == 0 or s == n_steps:
            states[rec] = x
            steps[rec] = s
            if frozen:
                fields[rec] = f_frozen
            else:
                nums[rec], dens[rec], sats[rec] = _fields(x, u, w, kappas, j0, eps_den, eps_num, f_max, tmp)
                fields[rec] = tmp
            rec += 1
        if blown_up:
            break
    return (states[:rec], steps[:rec], fields[:rec], nums[:rec], dens[:rec], sats[:rec],
            sat_count, max_drift)
