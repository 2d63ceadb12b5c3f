"""Ideal dense statevector simulator: the package's correctness and training oracle.

Circuits are lowered once to a flat op tape (``CompiledCircuit``) and executed
by a kernel doing in-place amplitude-pair updates. The compiled Cython kernel
is selected at import when available; set ``RIVETLITE_PURE_PYTHON=1`` to force
the numpy fallback. Both kernels implement the identical contract and the
test suite runs against each.

Dense simulation is capped at 14 qubits; wider circuits are transpile-timing
territory, never simulated.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, Gate, ParamExpr, remove_final_measurements
from .exceptions import CircuitError, SimulationError

if os.environ.get("RIVETLITE_PURE_PYTHON"):
    from . import _kernels_py as _kernels
else:
    try:
        from . import _kernels_cy as _kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _kernels

KERNEL_BACKEND: str = _kernels.BACKEND
MAX_SIM_QUBITS = 14

_SQ2 = 1.0 / math.sqrt(2.0)
_FIXED_1Q = {
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "sx": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
}


def gate_matrix(name: str, params: Sequence[float] = ()) -> np.ndarray:
    """2x2 unitary of a single-qubit gate (numeric params only)."""
    if name in _FIXED_1Q:
        return _FIXED_1Q[name].copy()
    if name == "rx":
        t = params[0] / 2.0
        return np.array([[math.cos(t), -1j * math.sin(t)],
                         [-1j * math.sin(t), math.cos(t)]], dtype=complex)
    if name == "ry":
        t = params[0] / 2.0
        return np.array([[math.cos(t), -math.sin(t)],
                         [math.sin(t), math.cos(t)]], dtype=complex)
    if name == "rz":
        t = params[0] / 2.0
        return np.array([[np.exp(-1j * t), 0], [0, np.exp(1j * t)]], dtype=complex)
    if name == "u":
        t, p, l = params
        ct, st = math.cos(t / 2.0), math.sin(t / 2.0)
        return np.array([[ct, -np.exp(1j * l) * st],
                         [np.exp(1j * p) * st, np.exp(1j * (p + l)) * ct]], dtype=complex)
    raise SimulationError(f"no single-qubit matrix for gate {name!r}")


_KIND_2Q = {"cx": _kernels.KIND_CX, "cz": _kernels.KIND_CZ, "swap": _kernels.KIND_SWAP}


class CompiledCircuit:
    """A circuit lowered to kernel arrays, reusable across bindings.

    Lowering once and re-evaluating with different parameter values is what
    makes the training loops cheap: ``evaluate`` only refreshes the 2x2
    matrices of symbolic gates and hands the tape to the kernel.
    """

    def __init__(self, c: Circuit, max_qubits: int = MAX_SIM_QUBITS):
        if c.num_qubits > max_qubits:
            raise SimulationError(
                f"{c.num_qubits} qubits exceeds the {max_qubits}-qubit dense-simulation guard")
        self.num_qubits = c.num_qubits
        self.free_symbols = c.free_symbols
        kinds, q0, q1, midx = [], [], [], []
        mats: list[np.ndarray] = []
        # (mat slot, gate name, params) for gates whose matrix depends on the binding
        self._param_slots: list[tuple[int, str, tuple]] = []
        for g in c.gates:
            if g.name in _KIND_2Q:
                kinds.append(_KIND_2Q[g.name])
                q0.append(g.qubits[0])
                q1.append(g.qubits[1])
                midx.append(-1)
            else:
                kinds.append(_kernels.KIND_1Q)
                q0.append(g.qubits[0])
                q1.append(-1)
                midx.append(len(mats))
                if g.symbols:
                    self._param_slots.append((len(mats), g.name, g.params))
                    mats.append(np.eye(2, dtype=complex))
                else:
                    mats.append(gate_matrix(g.name, [float(p) for p in g.params]))
        self._kinds = np.asarray(kinds, dtype=np.int32)
        self._q0 = np.asarray(q0, dtype=np.int32)
        self._q1 = np.asarray(q1, dtype=np.int32)
        self._midx = np.asarray(midx, dtype=np.int32)
        self._mats = (np.stack(mats) if mats
                      else np.zeros((0, 2, 2), dtype=complex))

    def evaluate(self, binding: Mapping[str, float] | None = None) -> np.ndarray:
        """Run the tape from |0...0> and return the statevector."""
        if self.free_symbols:
            if binding is None or not self.free_symbols <= set(binding):
                missing = sorted(self.free_symbols - set(binding or {}))
                raise SimulationError(f"unbound symbols: {missing}")
            mats = self._mats.copy()
            for slot, name, params in self._param_slots:
                angles = [p.evaluate(binding) if isinstance(p, ParamExpr)
                          else (binding[p] if isinstance(p, str) else float(p))
                          for p in params]
                mats[slot] = gate_matrix(name, angles)
        else:
            mats = self._mats
        state = np.zeros(1 << self.num_qubits, dtype=complex)
        state[0] = 1.0
        _kernels.apply_ops(state, self._kinds, self._q0, self._q1, self._midx, mats)
        return state

    def ry_evaluator(self, order: Sequence[str]):
        """Vectorized re-binding when every symbolic gate is a bare ry(symbol).

        Returns ``run(values) -> state`` with ``values`` aligned to ``order``,
        or None when the shortcut does not apply. This is the training hot
        path: one mats copy plus vectorized trig instead of per-gate calls.
        """
        slots, sym = [], []
        for slot, name, params in self._param_slots:
            if name != "ry" or not isinstance(params[0], str):
                return None
            if params[0] not in order:
                return None
            slots.append(slot)
            sym.append(order.index(params[0]))
        slot_idx = np.asarray(slots, dtype=np.intp)
        sym_idx = np.asarray(sym, dtype=np.intp)
        kinds, q0, q1, midx = self._kinds, self._q0, self._q1, self._midx
        base = self._mats
        size = 1 << self.num_qubits

        def run(values: np.ndarray) -> np.ndarray:
            mats = base.copy()
            half = 0.5 * values[sym_idx]
            c, s = np.cos(half), np.sin(half)
            mats[slot_idx, 0, 0] = c
            mats[slot_idx, 0, 1] = -s
            mats[slot_idx, 1, 0] = s
            mats[slot_idx, 1, 1] = c
            state = np.zeros(size, dtype=complex)
            state[0] = 1.0
            _kernels.apply_ops(state, kinds, q0, q1, midx, mats)
            return state

        return run


def statevector(c: Circuit) -> np.ndarray:
    """Exact amplitudes from |0...0>; little-endian, qubit 0 = LSB."""
    if c.measurements:
        raise SimulationError("statevector requires a measurement-free circuit")
    if c.free_symbols:
        raise SimulationError(f"unbound symbols: {sorted(c.free_symbols)}")
    state = CompiledCircuit(c).evaluate()
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-9:
        raise SimulationError(f"statevector norm drifted to {norm}")
    return state


@dataclass(frozen=True)
class CountsDistribution:
    """Measurement counts keyed by little-endian bitstring."""

    counts: dict[str, int]
    shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise SimulationError("counts do not sum to shots")

    def frequencies(self) -> dict[str, float]:
        return {k: v / self.shots for k, v in self.counts.items()}


def sample(c: Circuit, shots: int, seed: int) -> CountsDistribution:
    """Multinomial sampling of the measured bits, deterministic per seed."""
    if not c.measurements:
        raise SimulationError("sample requires terminal measurements")
    if shots < 1:
        raise SimulationError("shots must be positive")
    state = statevector(remove_final_measurements(c))
    probs = np.abs(state) ** 2
    n = c.num_qubits
    nbits = max(cb for _, cb in c.measurements) + 1
    # map each basis index to its classical key index
    idx = np.arange(1 << n)
    key_idx = np.zeros(1 << n, dtype=np.int64)
    for q, cb in c.measurements:
        key_idx |= ((idx >> q) & 1) << cb
    pvals = np.bincount(key_idx, weights=probs, minlength=1 << nbits)
    pvals = np.clip(pvals, 0.0, None)
    pvals /= pvals.sum()
    rng = np.random.Generator(np.random.Philox(seed))
    drawn = rng.multinomial(shots, pvals)
    counts = {format(i, f"0{nbits}b"): int(k) for i, k in enumerate(drawn) if k > 0}
    return CountsDistribution(counts, shots)


def hellinger_fidelity(p: CountsDistribution, q: CountsDistribution) -> float:
    """(sum_k sqrt(p_k q_k))^2 over normalized frequencies; 1 iff identical."""
    if p.shots <= 0 or q.shots <= 0:
        raise SimulationError("empty counts distribution")
    pf, qf = p.frequencies(), q.frequencies()
    bc = sum(math.sqrt(pf[k] * qf[k]) for k in pf.keys() & qf.keys())
    return bc * bc


_PAULI_GATE = {"X": "x", "Y": "y", "Z": "z"}


def expectation(c: Circuit, pauli: str) -> float:
    """Exact <psi|P|psi>; pauli char i from the right acts on qubit i."""
    if c.measurements:
        raise SimulationError("expectation requires a measurement-free circuit")
    if len(pauli) != c.num_qubits:
        raise SimulationError(
            f"pauli length {len(pauli)} != circuit width {c.num_qubits}")
    if any(ch not in "IXYZ" for ch in pauli):
        raise CircuitError(f"invalid pauli string {pauli!r}")
    psi = statevector(c)
    phi = psi.copy()
    gates = [Gate(_PAULI_GATE[ch], (q,))
             for q, ch in enumerate(reversed(pauli)) if ch != "I"]
    if gates:
        prog = CompiledCircuit(Circuit(c.num_qubits, tuple(gates)))
        mats = prog._mats
        _kernels.apply_ops(phi, prog._kinds, prog._q0, prog._q1, prog._midx, mats)
    return float(np.vdot(psi, phi).real)


def permute(state: np.ndarray, layout) -> np.ndarray:
    """Reindex amplitudes so virtual qubit q lands at position layout[q]."""
    targets = list(layout.targets) if hasattr(layout, "targets") else list(layout)
    n = int(math.log2(state.shape[0]))
    if len(targets) != n or sorted(targets) != list(range(n)):
        raise SimulationError(f"layout {targets} is not a permutation of 0..{n - 1}")
    idx = np.arange(1 << n)
    dest = np.zeros(1 << n, dtype=np.int64)
    for q, p in enumerate(targets):
        dest |= ((idx >> q) & 1) << p
    out = np.empty_like(state)
    out[dest] = state
    return out


# --- counts JSON: {"shots": <int>, "counts": {"<bits>": <int>...}} ----------

def counts_to_dict(d: CountsDistribution) -> dict:
    return {"shots": d.shots, "counts": dict(sorted(d.counts.items()))}


def counts_from_dict(obj: dict) -> CountsDistribution:
    try:
        return CountsDistribution({str(k): int(v) for k, v in obj["counts"].items()},
                                  int(obj["shots"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SimulationError(f"malformed counts JSON: {exc}") from exc
