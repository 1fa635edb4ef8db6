"""Pure-numpy Monte Carlo kernels, vectorized across pairs.

This is the fallback for :mod:`steerlab._kernels_numba` and mirrors its
arithmetic exactly: probabilities accumulate over rest indices in the same
ascending order, collapse amplitudes use the same ``(c * basis) * inv``
expression shape, and sampling uses the same threshold comparisons.  For
identical uniform matrices the two backends produce bit-identical outputs.
"""

import numpy as np


def _measure_qubit_batch(states, stride, basis, u):
    """Measure one qubit (by stride) of every row register in ``states``;
    collapse the rows in place and return the outcome indices."""
    m, dim = states.shape
    rest = [b for b in range(dim) if (b // stride) % 2 == 0]
    c_all = np.empty((2, m, len(rest)), np.complex128)
    p_all = np.zeros((2, m), np.float64)
    for k in range(2):
        for j, base in enumerate(rest):
            c = np.conj(basis[k, 0]) * states[:, base] + np.conj(basis[k, 1]) * states[:, base + stride]
            c_all[k, :, j] = c
            p_all[k] += c.real * c.real + c.imag * c.imag
    kk = (u >= p_all[0]).astype(np.int8)
    chosen = kk != 0
    pk = np.where(chosen, p_all[1], p_all[0])
    inv = 1.0 / np.sqrt(pk)
    b0 = np.where(chosen, basis[1, 0], basis[0, 0])
    b1 = np.where(chosen, basis[1, 1], basis[0, 1])
    csel = np.where(chosen[:, None], c_all[1], c_all[0])
    for j, base in enumerate(rest):
        states[:, base] = csel[:, j] * b0 * inv
        states[:, base + stride] = csel[:, j] * b1 * inv
    return kk


_CONTROL_REST = (0, 1, 4, 5)  # indices with both control qubits (strides 8, 2) at 0


def _measure_control_pair_batch(states, basis, u):
    """Joint 4-outcome measurement of the two control qubits of every
    four-qubit row register; collapse in place, return outcome indices."""
    m = states.shape[0]
    nout = basis.shape[0]
    c_all = np.empty((nout, m, 4), np.complex128)
    p_all = np.zeros((nout, m), np.float64)
    for k in range(nout):
        for j, base in enumerate(_CONTROL_REST):
            c = (np.conj(basis[k, 0]) * states[:, base]
                 + np.conj(basis[k, 1]) * states[:, base + 2]
                 + np.conj(basis[k, 2]) * states[:, base + 8]
                 + np.conj(basis[k, 3]) * states[:, base + 10])
            c_all[k, :, j] = c
            p_all[k] += c.real * c.real + c.imag * c.imag
    cum0 = p_all[0]
    cum1 = cum0 + p_all[1]
    cum2 = cum1 + p_all[2]
    kk = ((u >= cum0).astype(np.int8) + (u >= cum1).astype(np.int8) + (u >= cum2).astype(np.int8))
    rows = np.arange(m)
    pk = p_all[kk, rows]
    csel = c_all[kk, rows, :]
    brow = basis[kk]
    inv = 1.0 / np.sqrt(pk)
    for j, base in enumerate(_CONTROL_REST):
        states[:, base] = csel[:, j] * brow[:, 0] * inv
        states[:, base + 2] = csel[:, j] * brow[:, 1] * inv
        states[:, base + 8] = csel[:, j] * brow[:, 2] * inv
        states[:, base + 10] = csel[:, j] * brow[:, 3] * inv
    return kk


def _control_pair_prob_batch(states, ket):
    """Per-row probability of finding the control qubits in ``ket``."""
    m = states.shape[0]
    p = np.zeros(m, np.float64)
    for base in _CONTROL_REST:
        c = (np.conj(ket[0]) * states[:, base]
             + np.conj(ket[1]) * states[:, base + 2]
             + np.conj(ket[2]) * states[:, base + 8]
             + np.conj(ket[3]) * states[:, base + 10])
        p += c.real * c.real + c.imag * c.imag
    return p


def fable_quartet(psi16, axis_bases, bell_rows, singlet_ket, carol_case, carol_first, uniforms):
    """Vectorized counterpart of the numba quartet kernel (same signature)."""
    n = uniforms.shape[0]
    axis = np.minimum((uniforms[:, 0] * 3.0).astype(np.int64), 2).astype(np.int8)
    alice = np.empty(n, np.int8)
    bob = np.empty(n, np.int8)
    c1 = np.full(n, -1, np.int8)
    c2 = np.full(n, -1, np.int8)
    bell = np.full(n, -1, np.int8)
    flag = np.full(n, -1, np.int8)
    states = np.tile(psi16, (n, 1))
    zbasis = axis_bases[2]

    def measure_ab():
        for ax in range(3):
            idx = np.nonzero(axis == ax)[0]
            if idx.size == 0:
                continue
            sub = states[idx]
            alice[idx] = _measure_qubit_batch(sub, 4, axis_bases[ax], uniforms[idx, 4])
            bob[idx] = _measure_qubit_batch(sub, 1, axis_bases[ax], uniforms[idx, 5])
            states[idx] = sub

    if carol_first:
        if carol_case == 1:
            c1[:] = _measure_qubit_batch(states, 8, zbasis, uniforms[:, 2])
            c2[:] = _measure_qubit_batch(states, 2, zbasis, uniforms[:, 3])
        else:
            k = _measure_control_pair_batch(states, bell_rows, uniforms[:, 2])
            bell[:] = k
            flag[:] = (k == 0).astype(np.int8)
        measure_ab()
    else:
        measure_ab()
        if carol_case == 1:
            c1[:] = _measure_qubit_batch(states, 8, zbasis, uniforms[:, 2])
            c2[:] = _measure_qubit_batch(states, 2, zbasis, uniforms[:, 3])
        else:
            ps = _control_pair_prob_batch(states, singlet_ket)
            flag[:] = (uniforms[:, 2] < ps).astype(np.int8)
    return axis, alice, bob, c1, c2, bell, flag


def fable_direct(prep_states, axis_bases, uniforms):
    """Vectorized counterpart of the numba direct-preparation kernel."""
    n = uniforms.shape[0]
    nprep = prep_states.shape[0]
    axis = np.minimum((uniforms[:, 0] * 3.0).astype(np.int64), 2).astype(np.int8)
    prep = np.minimum((uniforms[:, 1] * nprep).astype(np.int64), nprep - 1).astype(np.int8)
    alice = np.empty(n, np.int8)
    bob = np.empty(n, np.int8)
    states = prep_states[prep].copy()
    for ax in range(3):
        idx = np.nonzero(axis == ax)[0]
        if idx.size == 0:
            continue
        sub = states[idx]
        alice[idx] = _measure_qubit_batch(sub, 2, axis_bases[ax], uniforms[idx, 4])
        bob[idx] = _measure_qubit_batch(sub, 1, axis_bases[ax], uniforms[idx, 5])
        states[idx] = sub
    return axis, prep, alice, bob
