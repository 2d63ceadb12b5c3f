"""Shared oracles for the test suite: unitary extraction and phase-aligned
comparison. Kept independent of the transpiler so they can judge it."""

import numpy as np

from rivetlite import sim
from rivetlite.circuit import Circuit, Gate


def phase_aligned_error(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - e^{i phi} b| with phi chosen at b's largest amplitude."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    k = int(np.argmax(np.abs(b)))
    if abs(b[k]) < 1e-12:
        return float(np.max(np.abs(a - b)))
    phase = a[k] / b[k]
    if abs(abs(phase) - 1.0) > 1e-9:
        return float("inf")
    return float(np.max(np.abs(a - phase * b)))


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Full 2^n x 2^n matrix, column b = circuit applied to basis state |b>."""
    n = c.num_qubits
    cols = []
    for b in range(1 << n):
        prep = tuple(Gate("x", (q,)) for q in range(n) if (b >> q) & 1)
        cols.append(sim.statevector(Circuit(n, prep + c.gates)))
    return np.stack(cols, axis=1)


def unitary_error(c1: Circuit, c2: Circuit) -> float:
    """Phase-aligned elementwise distance between two circuit unitaries."""
    u1 = circuit_unitary(c1)
    u2 = circuit_unitary(c2)
    return phase_aligned_error(u1.ravel(), u2.ravel())
