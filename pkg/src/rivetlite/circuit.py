"""Gate-level IR for virtual quantum circuits.

Circuits are immutable values: every editing operation returns a new
``Circuit``. Qubit 0 is the least-significant bit of a basis-state index and
Pauli/bit strings follow the same little-endian convention throughout the
package.

Gate vocabulary (fixed): h x y z s sdg sx rx ry rz cx cz swap u.
Anything else must be expressed in these gates before entering the IR.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Union

import numpy as np

from .exceptions import CircuitError

GATE_ARITY = {
    "h": 1, "x": 1, "y": 1, "z": 1, "s": 1, "sdg": 1, "sx": 1,
    "rx": 1, "ry": 1, "rz": 1, "u": 1,
    "cx": 2, "cz": 2, "swap": 2,
}
GATE_NPARAMS = {
    "h": 0, "x": 0, "y": 0, "z": 0, "s": 0, "sdg": 0, "sx": 0,
    "rx": 1, "ry": 1, "rz": 1, "u": 3,
    "cx": 0, "cz": 0, "swap": 0,
}
TWO_QUBIT_GATES = frozenset(("cx", "cz", "swap"))


@dataclass(frozen=True)
class ParamExpr:
    """Deferred angle expression: ``const + scale * prod_k (offset_k + coeff_k * x_k)``.

    Covers everything the encoders need (affine shifts, scaled symbols, and
    products of affine feature terms such as the pairwise ZZ-map angles)
    while staying trivially evaluatable at bind time.
    """

    const: float = 0.0
    scale: float = 1.0
    terms: tuple[tuple[float, float, str], ...] = ()

    @property
    def symbols(self) -> frozenset[str]:
        return frozenset(name for _, _, name in self.terms)

    def evaluate(self, binding: Mapping[str, float]) -> float:
        value = self.scale
        for offset, coeff, name in self.terms:
            if name not in binding:
                raise CircuitError(f"missing symbol {name!r} in binding")
            value *= offset + coeff * binding[name]
        return self.const + value

    def shifted(self, delta: float) -> "ParamExpr":
        return ParamExpr(self.const + delta, self.scale, self.terms)

    def to_json(self) -> dict:
        return {"const": self.const, "scale": self.scale,
                "terms": [[o, c, s] for o, c, s in self.terms]}

    @classmethod
    def from_json(cls, obj: dict) -> "ParamExpr":
        return cls(float(obj["const"]), float(obj["scale"]),
                   tuple((float(o), float(c), str(s)) for o, c, s in obj["terms"]))


Param = Union[float, str, ParamExpr]


def param_symbols(p: Param) -> frozenset[str]:
    if isinstance(p, str):
        return frozenset((p,))
    if isinstance(p, ParamExpr):
        return p.symbols
    return frozenset()


def shift_param(p: Param, delta: float) -> Param:
    """Angle shift ``p + delta``, deferring when p is symbolic."""
    if isinstance(p, str):
        return ParamExpr(const=delta, terms=((0.0, 1.0, p),))
    if isinstance(p, ParamExpr):
        return p.shifted(delta)
    return p + delta


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[Param, ...] = ()

    def __post_init__(self):
        if self.name not in GATE_ARITY:
            raise CircuitError(f"unknown gate {self.name!r}")
        if len(self.qubits) != GATE_ARITY[self.name]:
            raise CircuitError(
                f"{self.name} expects {GATE_ARITY[self.name]} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.name} qubits must be distinct: {self.qubits}")
        if len(self.params) != GATE_NPARAMS[self.name]:
            raise CircuitError(
                f"{self.name} expects {GATE_NPARAMS[self.name]} param(s), got {self.params}")

    @property
    def symbols(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for p in self.params:
            out |= param_symbols(p)
        return out

    def remapped(self, qubit_map: Mapping[int, int] | list[int]) -> "Gate":
        return Gate(self.name, tuple(qubit_map[q] for q in self.qubits), self.params)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over a virtual register, plus optional terminal measurements.

    ``measurements`` is a tuple of (qubit, classical bit) pairs; measurements
    always come after every gate, so the terminality invariant is structural.
    """

    num_qubits: int
    gates: tuple[Gate, ...] = ()
    measurements: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.num_qubits < 1:
            raise CircuitError("num_qubits must be positive")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measurements",
                           tuple((int(q), int(c)) for q, c in self.measurements))
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise CircuitError(f"qubit {q} out of range for {self.num_qubits}-qubit circuit")
        seen_q, seen_c = set(), set()
        for q, c in self.measurements:
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f"measured qubit {q} out of range")
            if q in seen_q:
                raise CircuitError(f"qubit {q} measured twice")
            if c in seen_c:
                raise CircuitError(f"classical bit {c} used twice")
            seen_q.add(q)
            seen_c.add(c)

    @cached_property
    def free_symbols(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for g in self.gates:
            out |= g.symbols
        return out

    @property
    def is_bound(self) -> bool:
        return not self.free_symbols


ParameterBinding = Mapping[str, float]


def append(base: Circuit, suffix: Circuit, qubit_map: Iterable[int] | None = None) -> Circuit:
    """Concatenate ``suffix`` after ``base`` with suffix qubits remapped.

    ``qubit_map[i]`` gives the base qubit carrying suffix qubit ``i``
    (defaults to the identity). Suffix measurements are carried over,
    remapped; the base must be unmeasured.
    """
    qmap = list(range(suffix.num_qubits)) if qubit_map is None else list(qubit_map)
    if len(qmap) != suffix.num_qubits:
        raise CircuitError(
            f"qubit_map length {len(qmap)} != suffix width {suffix.num_qubits}")
    if any(not 0 <= q < base.num_qubits for q in qmap):
        raise CircuitError(f"qubit_map {qmap} out of range for base width {base.num_qubits}")
    if len(set(qmap)) != len(qmap):
        raise CircuitError(f"qubit_map must be injective: {qmap}")
    if base.measurements:
        raise CircuitError("cannot append to a measured circuit")
    gates = base.gates + tuple(g.remapped(qmap) for g in suffix.gates)
    meas = tuple((qmap[q], c) for q, c in suffix.measurements)
    return Circuit(base.num_qubits, gates, meas)


def measure_all(c: Circuit) -> Circuit:
    """Copy with a terminal measurement (q, q) on every qubit."""
    if c.measurements:
        raise CircuitError("circuit already has measurements")
    return Circuit(c.num_qubits, c.gates, tuple((q, q) for q in range(c.num_qubits)))


def remove_final_measurements(c: Circuit) -> Circuit:
    return Circuit(c.num_qubits, c.gates, ())


def bind(c: Circuit, binding: ParameterBinding) -> Circuit:
    """Substitute every symbolic parameter; the binding must match free_symbols exactly."""
    free = c.free_symbols
    missing = free - set(binding)
    if missing:
        raise CircuitError(f"missing symbols in binding: {sorted(missing)}")
    unknown = set(binding) - free
    if unknown:
        raise CircuitError(f"unknown symbols in binding: {sorted(unknown)}")
    if not free:
        return c

    def resolve(p: Param) -> float:
        if isinstance(p, str):
            return float(binding[p])
        if isinstance(p, ParamExpr):
            return p.evaluate(binding)
        return p

    gates = tuple(
        Gate(g.name, g.qubits, tuple(resolve(p) for p in g.params)) if g.symbols else g
        for g in c.gates)
    return Circuit(c.num_qubits, gates, c.measurements)


def stats(c: Circuit) -> tuple[int, int, int]:
    """(depth, two-qubit gate count, total gate count).

    Depth is the longest gate-dependency chain; measurements do not count.
    """
    level = [0] * c.num_qubits
    two_q = 0
    for g in c.gates:
        d = 1 + max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = d
        if g.name in TWO_QUBIT_GATES:
            two_q += 1
    depth = max(level) if c.gates else 0
    return depth, two_q, len(c.gates)


_RC_1Q = ("h", "x", "y", "z", "s", "sdg", "sx", "rx", "ry", "rz", "u")
_RC_2Q = ("cx", "cz", "swap")


def random_circuit(n: int, depth: int, seed: int) -> Circuit:
    """Random circuit where every qubit receives a gate at every depth level.

    Uses a counter-based Philox stream so outputs are byte-identical across
    platforms for a fixed seed.
    """
    if n < 1 or depth < 1:
        raise CircuitError("need n >= 1 and depth >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    gates: list[Gate] = []
    for _ in range(depth):
        order = [int(q) for q in rng.permutation(n)]
        i = 0
        while i < len(order):
            if len(order) - i >= 2 and rng.random() < 0.45:
                name = _RC_2Q[int(rng.integers(len(_RC_2Q)))]
                qubits = (order[i], order[i + 1])
                i += 2
            else:
                name = _RC_1Q[int(rng.integers(len(_RC_1Q)))]
                qubits = (order[i],)
                i += 1
            params = tuple(float(a) for a in rng.uniform(0.0, 2.0 * math.pi,
                                                         GATE_NPARAMS[name]))
            gates.append(Gate(name, qubits, params))
    return Circuit(n, tuple(gates))


# --- compaction (verification plumbing) ------------------------------------

def used_qubits(c: Circuit) -> tuple[int, ...]:
    """Qubits touched by any gate or measurement, ascending."""
    used: set[int] = set()
    for g in c.gates:
        used.update(g.qubits)
    used.update(q for q, _ in c.measurements)
    return tuple(sorted(used))


def compact(c: Circuit, keep: Iterable[int] = ()) -> tuple[Circuit, dict[int, int]]:
    """Relabel the used qubits (plus ``keep``) down to 0..m-1.

    Returns the narrowed circuit and the old->new index map. Untouched
    qubits stay in |0> so dropping them preserves the state on the rest.
    """
    kept = sorted(set(used_qubits(c)) | set(keep))
    if not kept:
        kept = [0]
    mapping = {old: new for new, old in enumerate(kept)}
    gates = tuple(g.remapped(mapping) for g in c.gates)
    meas = tuple((mapping[q], cb) for q, cb in c.measurements)
    return Circuit(len(kept), gates, meas), mapping


# --- JSON format ------------------------------------------------------------
# {"n": int, "gates": [{"name", "qubits", "params"}...], "measurements": [[q, c]...]}
# Params are IEEE-754 doubles, plain symbol strings, or expression objects.

def _param_to_json(p: Param):
    if isinstance(p, ParamExpr):
        return p.to_json()
    return p


def _param_from_json(obj) -> Param:
    if isinstance(obj, dict):
        return ParamExpr.from_json(obj)
    if isinstance(obj, str):
        return obj
    return float(obj)


def to_dict(c: Circuit) -> dict:
    return {
        "n": c.num_qubits,
        "gates": [{"name": g.name, "qubits": list(g.qubits),
                   "params": [_param_to_json(p) for p in g.params]} for g in c.gates],
        "measurements": [[q, cb] for q, cb in c.measurements],
    }


def from_dict(obj: dict) -> Circuit:
    try:
        gates = tuple(
            Gate(str(g["name"]), tuple(int(q) for q in g["qubits"]),
                 tuple(_param_from_json(p) for p in g.get("params", ())))
            for g in obj.get("gates", ()))
        meas = tuple((int(q), int(cb)) for q, cb in obj.get("measurements", ()))
        return Circuit(int(obj["n"]), gates, meas)
    except (KeyError, TypeError, ValueError) as exc:
        raise CircuitError(f"malformed circuit JSON: {exc}") from exc


def to_json(c: Circuit, **kwargs) -> str:
    return json.dumps(to_dict(c), **kwargs)


def from_json(text: str) -> Circuit:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise CircuitError("circuit JSON must be an object")
    return from_dict(obj)


def circuit_hash(c: Circuit) -> str:
    """SHA-256 of the canonical JSON form; the transpile-reuse cache key."""
    canonical = json.dumps(to_dict(c), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
