"""Numba-compiled Monte Carlo kernels: one explicit state collapse per pair.

Contract shared with :mod:`steerlab._kernels_numpy` (keep the two in sync):

* states are flat ``complex128`` vectors; qubit q of an n-qubit register has
  stride ``2**(n-1-q)``,
* a binary measurement samples outcome 0 iff ``u < p0``; a four-way
  measurement samples ``k = (u >= cum0) + (u >= cum1) + (u >= cum2)``,
* probabilities accumulate over rest indices in ascending order, collapse
  amplitudes are written as ``(c * basis) * inv`` — the numpy backend
  replicates these expressions verbatim so outputs agree bit for bit,
* uniform slots per pair: 0 axis draw, 1 preparation draw, 2 and 3 control
  measurements, 4 Alice, 5 Bob.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _measure_qubit(state, dim, stride, basis, u):
    """Measure one qubit (given by its stride) of a flat register in the
    2-ket basis whose rows are the outcome kets; collapse in place."""
    p0 = 0.0
    for base in range(dim):
        if (base // stride) % 2 == 0:
            c = np.conj(basis[0, 0]) * state[base] + np.conj(basis[0, 1]) * state[base + stride]
            p0 += c.real * c.real + c.imag * c.imag
    k = 0 if u < p0 else 1
    pk = 0.0
    for base in range(dim):
        if (base // stride) % 2 == 0:
            c = np.conj(basis[k, 0]) * state[base] + np.conj(basis[k, 1]) * state[base + stride]
            pk += c.real * c.real + c.imag * c.imag
    inv = 1.0 / np.sqrt(pk)
    for base in range(dim):
        if (base // stride) % 2 == 0:
            c = np.conj(basis[k, 0]) * state[base] + np.conj(basis[k, 1]) * state[base + stride]
            state[base] = c * basis[k, 0] * inv
            state[base + stride] = c * basis[k, 1] * inv
    return k


@njit(cache=True)
def _measure_control_pair(state, basis, u):
    """Joint measurement of the two control qubits (strides 8 and 2) of a
    four-qubit register; ``basis`` rows are kets on the controls' 4-dim
    space, component order |c1 c2⟩ = index 2*c1 + c2.  Collapses in place."""
    p0 = 0.0
    p1 = 0.0
    p2 = 0.0
    p3 = 0.0
    for ra in range(2):
        for rb in range(2):
            base = ra * 4 + rb
            for k in range(4):
                c = (np.conj(basis[k, 0]) * state[base]
                     + np.conj(basis[k, 1]) * state[base + 2]
                     + np.conj(basis[k, 2]) * state[base + 8]
                     + np.conj(basis[k, 3]) * state[base + 10])
                w = c.real * c.real + c.imag * c.imag
                if k == 0:
                    p0 += w
                elif k == 1:
                    p1 += w
                elif k == 2:
                    p2 += w
                else:
                    p3 += w
    cum0 = p0
    cum1 = cum0 + p1
    cum2 = cum1 + p2
    k = 0
    if u >= cum0:
        k += 1
    if u >= cum1:
        k += 1
    if u >= cum2:
        k += 1
    if k == 0:
        pk = p0
    elif k == 1:
        pk = p1
    elif k == 2:
        pk = p2
    else:
        pk = p3
    inv = 1.0 / np.sqrt(pk)
    for ra in range(2):
        for rb in range(2):
            base = ra * 4 + rb
            c = (np.conj(basis[k, 0]) * state[base]
                 + np.conj(basis[k, 1]) * state[base + 2]
                 + np.conj(basis[k, 2]) * state[base + 8]
                 + np.conj(basis[k, 3]) * state[base + 10])
            state[base] = c * basis[k, 0] * inv
            state[base + 2] = c * basis[k, 1] * inv
            state[base + 8] = c * basis[k, 2] * inv
            state[base + 10] = c * basis[k, 3] * inv
    return k


@njit(cache=True)
def _control_pair_prob(state, ket):
    """Probability that the two control qubits are found in ``ket``
    (no collapse; used when this is the final measurement of the pair)."""
    p = 0.0
    for ra in range(2):
        for rb in range(2):
            base = ra * 4 + rb
            c = (np.conj(ket[0]) * state[base]
                 + np.conj(ket[1]) * state[base + 2]
                 + np.conj(ket[2]) * state[base + 8]
                 + np.conj(ket[3]) * state[base + 10])
            p += c.real * c.real + c.imag * c.imag
    return p


@njit(cache=True)
def fable_quartet(psi16, axis_bases, bell_rows, singlet_ket, carol_case, carol_first, uniforms):
    """Simulate the four-qubit source pair by pair.

    Register order is (control1, output_a, control2, output_b) with strides
    (8, 4, 2, 1).  ``axis_bases[ax]`` holds the ±1 outcome kets of axis ax in
    the fixed order (x, y, z); the controls are always measured in z (index
    2) for case 1 or in the ``bell_rows`` basis / against ``singlet_ket`` for
    case 2.  Outputs use -1 for fields the configuration never populates.
    """
    n = uniforms.shape[0]
    axis = np.empty(n, np.int8)
    alice = np.empty(n, np.int8)
    bob = np.empty(n, np.int8)
    c1 = np.full(n, -1, np.int8)
    c2 = np.full(n, -1, np.int8)
    bell = np.full(n, -1, np.int8)
    flag = np.full(n, -1, np.int8)
    state = np.empty(16, np.complex128)
    zbasis = axis_bases[2]
    for i in range(n):
        ax = int(uniforms[i, 0] * 3.0)
        if ax > 2:
            ax = 2
        axis[i] = ax
        basis = axis_bases[ax]
        state[:] = psi16
        if carol_first:
            if carol_case == 1:
                c1[i] = _measure_qubit(state, 16, 8, zbasis, uniforms[i, 2])
                c2[i] = _measure_qubit(state, 16, 2, zbasis, uniforms[i, 3])
            else:
                k = _measure_control_pair(state, bell_rows, uniforms[i, 2])
                bell[i] = k
                flag[i] = 1 if k == 0 else 0
            alice[i] = _measure_qubit(state, 16, 4, basis, uniforms[i, 4])
            bob[i] = _measure_qubit(state, 16, 1, basis, uniforms[i, 5])
        else:
            alice[i] = _measure_qubit(state, 16, 4, basis, uniforms[i, 4])
            bob[i] = _measure_qubit(state, 16, 1, basis, uniforms[i, 5])
            if carol_case == 1:
                c1[i] = _measure_qubit(state, 16, 8, zbasis, uniforms[i, 2])
                c2[i] = _measure_qubit(state, 16, 2, zbasis, uniforms[i, 3])
            else:
                ps = _control_pair_prob(state, singlet_ket)
                flag[i] = 1 if uniforms[i, 2] < ps else 0
    return axis, alice, bob, c1, c2, bell, flag


@njit(cache=True)
def fable_direct(prep_states, axis_bases, uniforms):
    """Simulate directly prepared two-qubit pairs: draw a preparation index
    uniformly from the rows of ``prep_states``, then measure both qubits
    along the drawn axis."""
    n = uniforms.shape[0]
    axis = np.empty(n, np.int8)
    prep = np.empty(n, np.int8)
    alice = np.empty(n, np.int8)
    bob = np.empty(n, np.int8)
    nprep = prep_states.shape[0]
    state = np.empty(prep_states.shape[1], np.complex128)
    for i in range(n):
        ax = int(uniforms[i, 0] * 3.0)
        if ax > 2:
            ax = 2
        pr = int(uniforms[i, 1] * nprep)
        if pr > nprep - 1:
            pr = nprep - 1
        axis[i] = ax
        prep[i] = pr
        basis = axis_bases[ax]
        state[:] = prep_states[pr]
        alice[i] = _measure_qubit(state, 4, 2, basis, uniforms[i, 4])
        bob[i] = _measure_qubit(state, 4, 1, basis, uniforms[i, 5])
    return axis, prep, alice, bob
