"""Device models: coupling topology, native basis set, and error rates.

Error rates feed the noise-aware layout scoring only; nothing here simulates
noise. Rates default to a deterministic synthesis from a per-name seed
(documented ranges below) and can be overridden via a backend JSON file.
"""

from __future__ import annotations

import json
import re
import zlib
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources

import numpy as np

from .exceptions import BackendError

DEFAULT_BASIS = frozenset(("rz", "sx", "x", "cx"))

# synthesized error-rate ranges (uniform draws)
EDGE_ERROR_RANGE = (0.005, 0.03)
QUBIT_ERROR_RANGE = (0.0002, 0.001)
READOUT_ERROR_RANGE = (0.01, 0.05)


def _norm_edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Topology:
    num_physical: int
    edges: frozenset[tuple[int, int]]
    basis: frozenset[str] = DEFAULT_BASIS
    edge_error: dict[tuple[int, int], float] = field(default_factory=dict)
    qubit_error: tuple[float, ...] = ()
    readout_error: tuple[float, ...] = ()
    name: str = "custom"

    def __post_init__(self):
        if self.num_physical < 1:
            raise BackendError("device needs at least one qubit")
        edges = frozenset(_norm_edge(a, b) for a, b in self.edges)
        object.__setattr__(self, "edges", edges)
        for a, b in edges:
            if a == b:
                raise BackendError(f"self-loop on qubit {a}")
            if not (0 <= a < self.num_physical and 0 <= b < self.num_physical):
                raise BackendError(f"edge ({a},{b}) out of range")
        if self.num_physical > 1 and not self._connected():
            raise BackendError("coupling graph must be connected")
        if not self.qubit_error:
            object.__setattr__(self, "qubit_error", (0.0,) * self.num_physical)
        if not self.readout_error:
            object.__setattr__(self, "readout_error", (0.0,) * self.num_physical)

    def _connected(self) -> bool:
        seen = {0}
        frontier = deque((0,))
        adj = self.adjacency
        while frontier:
            for nxt in adj[frontier.popleft()]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return len(seen) == self.num_physical

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.num_physical)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(x)) for x in adj)

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        n = self.num_physical
        dist = np.full((n, n), -1, dtype=np.int32)
        for src in range(n):
            dist[src, src] = 0
            frontier = deque((src,))
            while frontier:
                u = frontier.popleft()
                for v in self.adjacency[u]:
                    if dist[src, v] < 0:
                        dist[src, v] = dist[src, u] + 1
                        frontier.append(v)
        return dist

    def coupled(self, a: int, b: int) -> bool:
        return _norm_edge(a, b) in self.edges

    def error_of(self, a: int, b: int) -> float:
        return self.edge_error.get(_norm_edge(a, b), 0.0)

    def fingerprint(self) -> str:
        import hashlib
        canonical = json.dumps(to_dict(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def _synth_errors(n: int, edges: frozenset[tuple[int, int]], seed: int):
    rng = np.random.Generator(np.random.Philox(seed))
    edge_error = {e: float(rng.uniform(*EDGE_ERROR_RANGE)) for e in sorted(edges)}
    qubit_error = tuple(float(x) for x in rng.uniform(*QUBIT_ERROR_RANGE, n))
    readout = tuple(float(x) for x in rng.uniform(*READOUT_ERROR_RANGE, n))
    return edge_error, qubit_error, readout


def _grid_edges(rows: int, cols: int) -> set[tuple[int, int]]:
    edges = set()
    for r in range(rows):
        for c in range(cols):
            q = r * cols + c
            if c + 1 < cols:
                edges.add((q, q + 1))
            if r + 1 < rows:
                edges.add((q, q + cols))
    return edges


def builtin_topology(name: str) -> Topology:
    """linear-N, ring-N, grid-RxC, or heavyhex-27.

    Deterministic: error rates are synthesized from a seed derived from the
    name, so repeated calls return identical devices.
    """
    if m := re.fullmatch(r"linear-(\d+)", name):
        n = int(m.group(1))
        if n < 1:
            raise BackendError(f"bad size in {name!r}")
        edges = {(i, i + 1) for i in range(n - 1)}
    elif m := re.fullmatch(r"ring-(\d+)", name):
        n = int(m.group(1))
        if n < 3:
            raise BackendError(f"ring needs >= 3 qubits: {name!r}")
        edges = {(i, (i + 1) % n) for i in range(n)}
    elif m := re.fullmatch(r"grid-(\d+)x(\d+)", name):
        rows, cols = int(m.group(1)), int(m.group(2))
        if rows < 1 or cols < 1:
            raise BackendError(f"bad grid shape {name!r}")
        n = rows * cols
        edges = _grid_edges(rows, cols)
    elif name == "heavyhex-27":
        fixture = json.loads(resources.files("rivetlite.fixtures")
                             .joinpath("heavyhex27.json").read_text())
        n = fixture["n"]
        edges = {tuple(e) for e in fixture["edges"]}
    else:
        raise BackendError(f"unknown builtin topology {name!r}")
    frozen = frozenset(_norm_edge(a, b) for a, b in edges)
    seed = zlib.crc32(name.encode())
    edge_error, qubit_error, readout = _synth_errors(n, frozen, seed)
    return Topology(n, frozen, DEFAULT_BASIS, edge_error, qubit_error, readout, name)


def distances(t: Topology) -> np.ndarray:
    """All-pairs shortest-path hop counts (cached on the topology)."""
    dist = t.distance_matrix
    if (dist < 0).any():
        raise BackendError("coupling graph is disconnected")
    return dist


# --- backend JSON ------------------------------------------------------------
# {"n": int, "edges": [[a,b]...], "basis": [...], "edge_error": {"a-b": f},
#  "qubit_error": [f...], "readout_error": [f...]}

def to_dict(t: Topology) -> dict:
    return {
        "n": t.num_physical,
        "edges": [list(e) for e in sorted(t.edges)],
        "basis": sorted(t.basis),
        "edge_error": {f"{a}-{b}": t.edge_error[(a, b)] for a, b in sorted(t.edge_error)},
        "qubit_error": list(t.qubit_error),
        "readout_error": list(t.readout_error),
    }


def from_dict(obj: dict, name: str = "custom") -> Topology:
    try:
        edges = frozenset(_norm_edge(int(a), int(b)) for a, b in obj["edges"])
        edge_error = {}
        for key, val in obj.get("edge_error", {}).items():
            a, b = key.split("-")
            edge_error[_norm_edge(int(a), int(b))] = float(val)
        return Topology(
            int(obj["n"]), edges,
            frozenset(obj.get("basis", sorted(DEFAULT_BASIS))),
            edge_error,
            tuple(float(x) for x in obj.get("qubit_error", ())),
            tuple(float(x) for x in obj.get("readout_error", ())),
            name,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise BackendError(f"malformed backend JSON: {exc}") from exc


def load(path_or_name: str) -> Topology:
    """Resolve a builtin name, else read a backend JSON file."""
    try:
        return builtin_topology(path_or_name)
    except BackendError:
        pass
    try:
        with open(path_or_name) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise BackendError(f"no builtin or file named {path_or_name!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BackendError(f"invalid backend JSON in {path_or_name!r}: {exc}") from exc
    return from_dict(obj, name=path_or_name)
