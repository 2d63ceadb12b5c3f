"""Pauli-basis measurement support.

Convention everywhere: character i counted from the RIGHT of the string acts
on qubit i (little-endian, same as bitstring keys).
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate
from .exceptions import CircuitError
from .sim import CountsDistribution

PAULI_ALPHABET = "IXYZ"


def _validate(n: int, p: str) -> None:
    if len(p) != n:
        raise CircuitError(
            f"pauli string length {len(p)} does not match {n} qubits")
    bad = sorted(set(p) - set(PAULI_ALPHABET))
    if bad:
        raise CircuitError(f"invalid pauli characters {bad} in {p!r}")


def create_rotation_circuit(n: int, p: str) -> Circuit:
    """Clifford prefix mapping a Pauli-basis measurement onto the Z basis.

    Per qubit: X -> h; Y -> sdg then h; I/Z -> nothing. Appending this to a
    state and reading Z-parity reproduces <P>.
    """
    _validate(n, p)
    gates: list[Gate] = []
    for q, ch in enumerate(reversed(p)):
        if ch == "X":
            gates.append(Gate("h", (q,)))
        elif ch == "Y":
            gates.append(Gate("sdg", (q,)))
            gates.append(Gate("h", (q,)))
    return Circuit(n, tuple(gates))


def random_pauli(n: int, seed: int) -> str:
    """Uniform i.i.d. string over IXYZ; Philox keeps it platform-stable."""
    if n < 1:
        raise CircuitError("need at least one qubit")
    rng = np.random.Generator(np.random.Philox(seed))
    draws = rng.integers(0, 4, size=n)
    return "".join(PAULI_ALPHABET[int(d)] for d in draws)


def expectation_from_counts(counts: CountsDistribution, p: str) -> float:
    """Parity-weighted average over counts: the sampled estimate of <P>.

    Assumes the state was rotated with create_rotation_circuit(p) before the
    Z-basis measurement; bits at I positions are ignored.
    """
    if not counts.counts:
        raise CircuitError("empty counts distribution")
    total = 0.0
    for key, freq in counts.frequencies().items():
        if len(key) != len(p):
            raise CircuitError(
                f"counts key width {len(key)} != pauli length {len(p)}")
        parity = sum(1 for bit, ch in zip(reversed(key), reversed(p))
                     if ch != "I" and bit == "1")
        total += freq * (-1.0 if parity % 2 else 1.0)
    return total
