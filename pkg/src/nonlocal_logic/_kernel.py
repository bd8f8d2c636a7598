"""Compiled inner loop for the capacity search.

Same arithmetic as ``measures.gain_lower_bound`` on the logical record,
without the validation layers; the tests pin the two against each other.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _entropy(p):
    s = 0.0
    for x in p:
        if x > 1e-300:
            s -= x * np.log2(x)
    return s


@njit(cache=True)
def gain_and_input_ebits(w, psi, m_dim, g_dim, h_out, h_in):
    """(S(Tr_B rho_out) - S(rho_out), E(psi)) for output ``w @ psi``.

    ``h_out`` and ``h_in`` are unnormalized Hadamard matrices (complex dtype).
    """
    big = np.dot(w, psi).reshape(m_dim, g_dim)
    rec = np.dot(big, big.conj().T)
    hr = np.dot(h_out, rec)
    diag = np.empty(m_dim)
    for z in range(m_dim):
        acc = 0.0
        for j in range(m_dim):
            acc += (hr[z, j] * h_out[z, j]).real
        diag[z] = max(acc / m_dim, 0.0)
    if m_dim <= g_dim:
        spec = np.linalg.eigvalsh(rec)
    else:
        spec = np.linalg.eigvalsh(np.dot(big.conj().T, big))
    for i in range(spec.size):
        if spec[i] < 0.0:
            spec[i] = 0.0
    amp = np.dot(h_in, psi)
    probs = (amp.real**2 + amp.imag**2) / psi.size
    return _entropy(diag) - _entropy(spec), _entropy(probs)


@njit(cache=True)
def with_column(w, col_index, rows, ext):
    out = w.copy()
    out[:, col_index] = 0.0
    for k in range(rows.size):
        out[rows[k], col_index] = ext[k]
    return out


@njit(cache=True)
def ext_from_reals(y):
    v = y[:4] + 1j * y[4:]
    nrm = np.sqrt(np.sum(y * y))
    if nrm < 1e-300:
        v = np.zeros(4, dtype=np.complex128)
        v[3] = 1.0
        return v
    return v / nrm


@njit(cache=True)
def state_from_reals(x):
    half = x.size // 2
    v = x[:half] + 1j * x[half:]
    nrm = np.sqrt(np.sum(x * x))
    if nrm < 1e-300:
        v = np.zeros(half, dtype=np.complex128)
        v[0] = 1.0
        return v
    return v / nrm
