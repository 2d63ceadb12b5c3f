"""Incremental transpilation: reuse a transpiled prefix, transpile only the suffix.

The suffix is routed starting from the prefix's final layout — no layout
search — then translated and optimized in isolation and appended after the
prefix's physical gates. Nothing is ever rewritten across the seam, so the
cached prefix stays byte-identical.
"""

from __future__ import annotations

import hashlib
import threading
import time
from dataclasses import dataclass, field

from . import circuit as circ
from .backend import Topology
from .circuit import Circuit, circuit_hash
from .exceptions import TranspileError
from .transpiler import (TranspileOptions, TranspiledCircuit, optimize, route,
                         translate, transpile, unroll)


def _chain_hash(left_hash: str, right: Circuit) -> str:
    digest = hashlib.sha256(f"{left_hash}:{circuit_hash(right)}".encode())
    return digest.hexdigest()


def transpile_right(left: TranspiledCircuit, right: Circuit, t: Topology,
                    opts: TranspileOptions | None = None) -> TranspiledCircuit:
    """Append ``right`` to an already-transpiled prefix, transpiling only it.

    The prefix must be measurement-free (strip measurements before caching);
    measurements on the suffix are remapped through the new final layout.
    ``elapsed_seconds`` covers only the suffix work.
    """
    opts = opts or TranspileOptions()
    if left.physical.measurements:
        raise TranspileError("prefix still carries measurements; strip them first")
    if right.num_qubits != len(left.final_layout):
        raise TranspileError(
            f"suffix width {right.num_qubits} != prefix width {len(left.final_layout)}")
    t0 = time.perf_counter()
    unrolled = unroll(right)
    routed = route(unrolled, left.final_layout, t, opts)
    translated = translate(routed.physical, t.basis)
    optimized = optimize(translated, opts.optimization_level)
    elapsed = time.perf_counter() - t0
    physical = Circuit(t.num_physical,
                       left.physical.gates + optimized.gates,
                       optimized.measurements)
    return TranspiledCircuit(
        physical, left.initial_layout, routed.final_layout,
        _chain_hash(left.source_hash, right),
        elapsed_seconds=elapsed,
        stage_seconds={"suffix": elapsed})


def transpile_chain(prefix: TranspiledCircuit, suffixes, t: Topology,
                    opts: TranspileOptions | None = None) -> list[TranspiledCircuit]:
    """Fold transpile_right over ``suffixes``, keeping every intermediate."""
    out: list[TranspiledCircuit] = []
    current = prefix
    for suffix in suffixes:
        current = transpile_right(current, suffix, t, opts)
        out.append(current)
        if current.physical.measurements:
            current = TranspiledCircuit(
                circ.remove_final_measurements(current.physical),
                current.initial_layout, current.final_layout,
                current.source_hash, elapsed_seconds=current.elapsed_seconds)
    return out


@dataclass
class StitchCache:
    """Transpile-result cache keyed by source hash x device x options.

    Values are deterministic for a key, so concurrent duplicate inserts are
    benign (last writer wins with an identical value).
    """

    _entries: dict = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)
    hits: int = 0
    misses: int = 0

    def _key(self, source_hash: str, t: Topology, opts: TranspileOptions) -> tuple:
        return (source_hash, t.fingerprint(), opts.key())

    def transpile(self, c: Circuit, t: Topology,
                  opts: TranspileOptions | None = None) -> TranspiledCircuit:
        opts = opts or TranspileOptions()
        key = self._key(circuit_hash(c), t, opts)
        with self._lock:
            if key in self._entries:
                self.hits += 1
                return self._entries[key]
        value = transpile(c, t, opts)
        with self._lock:
            self.misses += 1
            self._entries[key] = value
        return value

    def transpile_right(self, left: TranspiledCircuit, right: Circuit, t: Topology,
                        opts: TranspileOptions | None = None) -> TranspiledCircuit:
        opts = opts or TranspileOptions()
        key = self._key(_chain_hash(left.source_hash, right), t, opts)
        with self._lock:
            if key in self._entries:
                self.hits += 1
                return self._entries[key]
        value = transpile_right(left, right, t, opts)
        with self._lock:
            self.misses += 1
            self._entries[key] = value
        return value

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)
