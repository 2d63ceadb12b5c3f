"""Circuit-to-device compilation pipeline.

Stages: unroll -> layout -> routing -> basis translation -> peephole
optimization. Every stage is a pure function; ``transpile`` composes them and
records wall-clock timings. The pipeline contains no randomness, so equal
inputs give byte-equal outputs (timing fields aside).

Equivalence is always modulo global phase; phase is never tracked in the IR.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import circuit as circ
from .backend import Topology
from .circuit import Circuit, Gate, Param, circuit_hash, shift_param
from .exceptions import TranspileError

# weight of the min-path edge-error term in layout scoring, relative to hops
LAYOUT_NOISE_WEIGHT = 10.0

_RZ_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class Layout:
    """Injective map virtual qubit -> physical qubit; targets[v] is v's wire."""

    targets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(p) for p in self.targets))
        if len(set(self.targets)) != len(self.targets):
            raise TranspileError(f"layout is not injective: {self.targets}")
        if any(p < 0 for p in self.targets):
            raise TranspileError(f"negative physical index in layout: {self.targets}")

    def __getitem__(self, virtual: int) -> int:
        return self.targets[virtual]

    def __len__(self) -> int:
        return len(self.targets)

    def inverse(self) -> dict[int, int]:
        return {p: v for v, p in enumerate(self.targets)}


@dataclass(frozen=True)
class TranspileOptions:
    optimization_level: int = 3
    seed: int = 42
    lookahead_window: int = 20
    lookahead_weight: float = 0.5

    def __post_init__(self):
        if self.optimization_level not in (0, 1, 2, 3):
            raise TranspileError(f"bad optimization_level {self.optimization_level}")
        if self.lookahead_window < 0 or self.lookahead_weight < 0:
            raise TranspileError("lookahead window and weight must be >= 0")

    def key(self) -> tuple:
        return (self.optimization_level, self.seed,
                self.lookahead_window, self.lookahead_weight)


@dataclass(frozen=True)
class TranspiledCircuit:
    """Device-native circuit plus the virtual->physical bookkeeping.

    ``elapsed_seconds`` and ``stage_seconds`` are excluded from equality so
    deterministic fields can be compared directly.
    """

    physical: Circuit
    initial_layout: Layout
    final_layout: Layout
    source_hash: str
    elapsed_seconds: float = field(compare=False, default=0.0)
    stage_seconds: dict = field(compare=False, default_factory=dict)

    def __post_init__(self):
        if len(self.initial_layout) != len(self.final_layout):
            raise TranspileError("initial and final layouts differ in width")


# --- unroll ------------------------------------------------------------------

def unroll(c: Circuit) -> Circuit:
    """Expand composite gates; only swap needs it (-> 3 cx)."""
    out: list[Gate] = []
    for g in c.gates:
        if g.name == "swap":
            a, b = g.qubits
            out += [Gate("cx", (a, b)), Gate("cx", (b, a)), Gate("cx", (a, b))]
        else:
            out.append(g)
    return Circuit(c.num_qubits, tuple(out), c.measurements)


# --- layout ------------------------------------------------------------------

def _path_min_err(t: Topology, p: int, q: int, memo: dict) -> float:
    """Minimum edge error along the canonical shortest path p..q."""
    if p == q:
        return 0.0
    key = (p, q) if p < q else (q, p)
    if key in memo:
        return memo[key]
    dist = t.distance_matrix
    cur, best = p, math.inf
    while cur != q:
        nxt = min(x for x in t.adjacency[cur] if dist[x, q] == dist[cur, q] - 1)
        best = min(best, t.error_of(cur, nxt))
        cur = nxt
    memo[key] = best
    return best


def choose_layout(c: Circuit, t: Topology,
                  opts: TranspileOptions | None = None) -> Layout:
    """Greedy interaction-graph placement (trivial at level 0).

    Virtual qubits are placed in descending 2q-interaction order; each goes on
    the free physical qubit minimizing hop distance and min-path error to its
    already-placed partners, weighted by pair gate counts.
    """
    opts = opts or TranspileOptions()
    n = c.num_qubits
    if n > t.num_physical:
        raise TranspileError(
            f"circuit needs {n} qubits but device has {t.num_physical}")
    if opts.optimization_level == 0:
        return Layout(tuple(range(n)))

    weight: dict[tuple[int, int], int] = {}
    degree = [0] * n
    for g in c.gates:
        if len(g.qubits) == 2:
            a, b = g.qubits
            key = (a, b) if a < b else (b, a)
            weight[key] = weight.get(key, 0) + 1
            degree[a] += 1
            degree[b] += 1
    partners: dict[int, list[int]] = {v: [] for v in range(n)}
    for a, b in weight:
        partners[a].append(b)
        partners[b].append(a)

    order = sorted(range(n), key=lambda v: (-degree[v], v))
    dist = t.distance_matrix
    err_memo: dict = {}
    placed: dict[int, int] = {}
    free = sorted(range(t.num_physical))
    for v in order:
        anchors = [(u, weight[(min(u, v), max(u, v))])
                   for u in partners[v] if u in placed]
        best_p, best_score = free[0], math.inf
        for p in free:
            score = 0.0
            for u, cnt in anchors:
                pu = placed[u]
                score += cnt * (float(dist[p, pu]) - 1.0
                                + LAYOUT_NOISE_WEIGHT * _path_min_err(t, p, pu, err_memo))
            if score < best_score - 1e-12:
                best_p, best_score = p, score
        placed[v] = best_p
        free.remove(best_p)
    return Layout(tuple(placed[v] for v in range(n)))


# --- routing -----------------------------------------------------------------

def route(c: Circuit, layout: Layout, t: Topology,
          opts: TranspileOptions | None = None) -> TranspiledCircuit:
    """Insert SWAPs (as cx triples) until every 2q gate sits on an edge.

    Front-layer heuristic: candidate swaps are edges touching front-layer
    qubits, restricted to swaps that strictly reduce the front-layer distance
    sum, scored with a bounded lookahead over upcoming 2q gates. When no swap
    reduces the front sum, the lowest-index front gate is walked home along
    the canonical shortest path, which guarantees progress.
    """
    opts = opts or TranspileOptions()
    if len(layout) != c.num_qubits:
        raise TranspileError(
            f"layout width {len(layout)} != circuit width {c.num_qubits}")
    if any(p >= t.num_physical for p in layout.targets):
        raise TranspileError("layout exceeds device size")
    dist = t.distance_matrix
    gates = c.gates

    npred = [0] * len(gates)
    succ: list[list[int]] = [[] for _ in gates]
    last_on: dict[int, int] = {}
    for i, g in enumerate(gates):
        for q in g.qubits:
            if q in last_on:
                succ[last_on[q]].append(i)
                npred[i] += 1
            last_on[q] = i
    ready = sorted(i for i in range(len(gates)) if npred[i] == 0)
    emitted_mask = [False] * len(gates)

    pi = list(layout.targets)
    occupant: dict[int, int] = {p: v for v, p in enumerate(pi)}
    out: list[Gate] = []
    swap_budget = 10 * max(1, len(gates)) * t.num_physical
    swaps_done = 0

    def emit(i: int) -> None:
        g = gates[i]
        out.append(Gate(g.name, tuple(pi[q] for q in g.qubits), g.params))
        emitted_mask[i] = True
        ready.remove(i)
        for s in succ[i]:
            npred[s] -= 1
            if npred[s] == 0:
                ready.append(s)
        ready.sort()

    def apply_swap(p: int, q: int) -> None:
        nonlocal swaps_done
        swaps_done += 1
        if swaps_done > swap_budget:
            raise TranspileError("routing exceeded its swap budget")
        out.extend((Gate("cx", (p, q)), Gate("cx", (q, p)), Gate("cx", (p, q))))
        vp, vq = occupant.pop(p, None), occupant.pop(q, None)
        if vp is not None:
            pi[vp] = q
            occupant[q] = vp
        if vq is not None:
            pi[vq] = p
            occupant[p] = vq

    def executable(i: int) -> bool:
        g = gates[i]
        return len(g.qubits) == 1 or dist[pi[g.qubits[0]], pi[g.qubits[1]]] == 1

    while ready:
        progressed = True
        while progressed:
            progressed = False
            for i in list(ready):
                if executable(i):
                    emit(i)
                    progressed = True
        if not ready:
            break

        front = list(ready)
        front_pairs = [(pi[gates[i].qubits[0]], pi[gates[i].qubits[1]]) for i in front]
        front_phys = {p for pair in front_pairs for p in pair}
        lookahead: list[tuple[int, int]] = []
        for i in range(len(gates)):
            if len(lookahead) >= opts.lookahead_window:
                break
            if emitted_mask[i] or i in ready or len(gates[i].qubits) != 2:
                continue
            a, b = gates[i].qubits
            lookahead.append((a, b))

        def swapped_pos(x: int, p: int, q: int) -> int:
            return q if x == p else p if x == q else x

        base_sum = sum(dist[a, b] for a, b in front_pairs)
        best: tuple[float, tuple[int, int]] | None = None
        for p, q in sorted(t.edges):
            if p not in front_phys and q not in front_phys:
                continue
            fsum = sum(dist[swapped_pos(a, p, q), swapped_pos(b, p, q)]
                       for a, b in front_pairs)
            if fsum >= base_sum:
                continue
            lsum = sum(dist[swapped_pos(pi[va], p, q), swapped_pos(pi[vb], p, q)]
                       for va, vb in lookahead)
            cand = (fsum + opts.lookahead_weight * lsum, (p, q))
            if best is None or cand < best:
                best = cand
        if best is not None:
            apply_swap(*best[1])
        else:
            # deadlock escape: walk the lowest-index front gate until adjacent
            i = front[0]
            a, b = gates[i].qubits
            while dist[pi[a], pi[b]] > 1:
                p, q = pi[a], pi[b]
                nxt = min(x for x in t.adjacency[p] if dist[x, q] == dist[p, q] - 1)
                apply_swap(p, nxt)
            emit(i)

    final = Layout(tuple(pi))
    meas = tuple((pi[q], cb) for q, cb in c.measurements)
    physical = Circuit(t.num_physical, tuple(out), meas)
    return TranspiledCircuit(physical, layout, final, circuit_hash(c))


# --- basis translation --------------------------------------------------------

def _u_form(q: int, theta: Param, phi: Param, lam: Param) -> list[Gate]:
    # u(theta, phi, lam) == rz(lam); sx; rz(theta+pi); sx; rz(phi+pi) in
    # circuit order, up to global phase
    return [Gate("rz", (q,), (lam,)), Gate("sx", (q,)),
            Gate("rz", (q,), (shift_param(theta, math.pi),)), Gate("sx", (q,)),
            Gate("rz", (q,), (shift_param(phi, math.pi),))]


def _translate_gate(g: Gate) -> list[Gate]:
    q = g.qubits[0]
    if g.name == "h":
        return [Gate("rz", (q,), (math.pi / 2,)), Gate("sx", (q,)),
                Gate("rz", (q,), (math.pi / 2,))]
    if g.name == "s":
        return [Gate("rz", (q,), (math.pi / 2,))]
    if g.name == "sdg":
        return [Gate("rz", (q,), (-math.pi / 2,))]
    if g.name == "z":
        return [Gate("rz", (q,), (math.pi,))]
    if g.name == "x":
        return _u_form(q, math.pi, 0.0, math.pi)
    if g.name == "y":
        return _u_form(q, math.pi, math.pi / 2, math.pi / 2)
    if g.name == "rx":
        (theta,) = g.params
        return [Gate("rz", (q,), (math.pi / 2,)), Gate("sx", (q,)),
                Gate("rz", (q,), (shift_param(theta, math.pi),)), Gate("sx", (q,)),
                Gate("rz", (q,), (math.pi / 2,))]
    if g.name == "ry":
        (theta,) = g.params
        return _u_form(q, theta, 0.0, 0.0)
    if g.name == "u":
        theta, phi, lam = g.params
        return _u_form(q, theta, phi, lam)
    if g.name == "cz":
        a, b = g.qubits
        return [Gate("h", (b,)), Gate("cx", (a, b)), Gate("h", (b,))]
    if g.name == "swap":
        a, b = g.qubits
        return [Gate("cx", (a, b)), Gate("cx", (b, a)), Gate("cx", (a, b))]
    raise TranspileError(f"no translation rule for {g.name!r}")


def translate(c: Circuit, basis) -> Circuit:
    """Rewrite every gate into ``basis`` via the fixed rule table."""
    basis = frozenset(basis)
    gates = list(c.gates)
    for _ in range(8):
        out: list[Gate] = []
        changed = False
        for g in gates:
            if g.name in basis:
                out.append(g)
            else:
                out.extend(_translate_gate(g))
                changed = True
        gates = out
        if not changed:
            break
    leftover = sorted({g.name for g in gates} - basis)
    if leftover:
        raise TranspileError(f"cannot reach basis {sorted(basis)}: {leftover} remain")
    return Circuit(c.num_qubits, tuple(gates), c.measurements)


# --- peephole optimization ------------------------------------------------------

def _norm_angle(x: float) -> float:
    r = math.fmod(x, 2.0 * math.pi)
    if r > math.pi:
        r -= 2.0 * math.pi
    elif r <= -math.pi:
        r += 2.0 * math.pi
    return r


def _as_float(p: Param) -> float | None:
    return float(p) if isinstance(p, (int, float)) else None


def _peephole(gates: list[Gate]) -> list[Gate]:
    """One pass of rz merging, zero-rotation drops, and cx-pair cancellation."""
    out: list[Gate | None] = []
    last: dict[int, int | None] = {}
    prev: dict[tuple[int, int], int | None] = {}

    def push(g: Gate) -> None:
        i = len(out)
        for q in g.qubits:
            prev[(i, q)] = last.get(q)
            last[q] = i
        out.append(g)

    def drop_at(i: int) -> None:
        g = out[i]
        out[i] = None
        for q in g.qubits:
            last[q] = prev[(i, q)]

    def push_rz(q: int, angle: Param) -> None:
        v = _as_float(angle)
        if v is not None:
            if abs(_norm_angle(v)) < _RZ_ZERO_TOL:
                return
            angle = v
        push(Gate("rz", (q,), (angle,)))

    for g in gates:
        if g.name == "rz":
            q = g.qubits[0]
            j = last.get(q)
            if j is not None and out[j].name == "rz":
                a, b = out[j].params[0], g.params[0]
                fa, fb = _as_float(a), _as_float(b)
                if fa is not None and fb is not None:
                    merged: Param | None = _norm_angle(fa + fb)
                elif fa is not None:
                    merged = shift_param(b, fa)
                elif fb is not None:
                    merged = shift_param(a, fb)
                else:
                    merged = None  # two opaque expressions: leave both
                if merged is not None:
                    drop_at(j)
                    push_rz(q, merged)
                    continue
            push_rz(q, g.params[0])
        elif g.name == "cx":
            a, b = g.qubits
            ja, jb = last.get(a), last.get(b)
            if ja is not None and ja == jb and out[ja].name == "cx" \
                    and out[ja].qubits == g.qubits:
                drop_at(ja)
                continue
            push(g)
        else:
            push(g)
    return [g for g in out if g is not None]


def _zxzxz_angles(U: np.ndarray) -> tuple[float, float, float]:
    """(theta, phi, lam) with u(theta, phi, lam) equal to U up to global phase."""
    a, b = abs(U[0, 0]), abs(U[1, 0])
    theta = 2.0 * math.atan2(b, a)
    if b < 1e-12:
        phi, lam = 0.0, float(np.angle(U[1, 1]) - np.angle(U[0, 0]))
    elif a < 1e-12:
        lam, phi = 0.0, float(np.angle(U[1, 0]) - np.angle(-U[0, 1]))
    else:
        phi = float(np.angle(U[1, 0]) - np.angle(U[0, 0]))
        lam = float(np.angle(-U[0, 1]) - np.angle(U[0, 0]))
    return theta, phi, lam


def _min_1q_sequence(q: int, U: np.ndarray) -> list[Gate]:
    """Shortest rz/sx/x realization of a 2x2 unitary, modulo global phase."""
    theta, phi, lam = _zxzxz_angles(U)
    seq: list[Gate] = []

    def add_rz(angle: float) -> None:
        angle = _norm_angle(angle)
        if abs(angle) >= _RZ_ZERO_TOL:
            seq.append(Gate("rz", (q,), (angle,)))

    if abs(theta) < 1e-9:
        add_rz(phi + lam)
    elif abs(theta - math.pi / 2) < 1e-9:
        add_rz(lam - math.pi / 2)
        seq.append(Gate("sx", (q,)))
        add_rz(phi + math.pi / 2)
    elif abs(theta - math.pi) < 1e-9:
        add_rz(lam)
        seq.append(Gate("x", (q,)))
        add_rz(phi + math.pi)
    else:
        add_rz(lam)
        seq.append(Gate("sx", (q,)))
        add_rz(theta + math.pi)
        seq.append(Gate("sx", (q,)))
        add_rz(phi + math.pi)
    return seq


def _resynthesize_runs(gates: list[Gate]) -> list[Gate]:
    """Collapse maximal numeric 1q-gate runs to their minimal form."""
    from .sim import gate_matrix  # deferred: sim pulls in the compiled kernel

    out: list[Gate] = []
    runs: dict[int, list[Gate]] = {}

    def flush(q: int) -> None:
        run = runs.pop(q, None)
        if not run:
            return
        if len(run) == 1:
            out.extend(run)
            return
        U = np.eye(2, dtype=complex)
        for g in run:
            U = gate_matrix(g.name, [float(p) for p in g.params]) @ U
        new = _min_1q_sequence(q, U)
        out.extend(new if len(new) <= len(run) else run)

    for g in gates:
        if len(g.qubits) == 1 and not g.symbols:
            runs.setdefault(g.qubits[0], []).append(g)
            continue
        for q in g.qubits:
            flush(q)
        out.append(g)
    for q in sorted(runs):
        flush(q)
    return out


def optimize(c: Circuit, level: int) -> Circuit:
    """Peephole cleanup; level >= 2 adds 1q-run resynthesis, 3 runs to fixpoint.

    Gate count never increases and the unitary is preserved up to global
    phase.
    """
    if level <= 0:
        return c
    gates = list(c.gates)
    for _ in range(20):
        before = len(gates)
        gates = _peephole(gates)
        if level >= 2:
            gates = _resynthesize_runs(gates)
        if level < 3 or len(gates) == before:
            break
    return Circuit(c.num_qubits, tuple(gates), c.measurements)


# --- the pipeline ---------------------------------------------------------------

def transpile(c: Circuit, t: Topology,
              opts: TranspileOptions | None = None) -> TranspiledCircuit:
    """unroll -> choose_layout -> route -> translate -> optimize.

    Symbolic parameters are allowed: they only ever sit on 1q rotations, which
    pass through routing untouched and through translation via deferred-shift
    expressions.
    """
    opts = opts or TranspileOptions()
    source = circuit_hash(c)
    t0 = time.perf_counter()
    unrolled = unroll(c)
    t1 = time.perf_counter()
    layout = choose_layout(unrolled, t, opts)
    t2 = time.perf_counter()
    routed = route(unrolled, layout, t, opts)
    t3 = time.perf_counter()
    translated = translate(routed.physical, t.basis)
    t4 = time.perf_counter()
    optimized = optimize(translated, opts.optimization_level)
    t5 = time.perf_counter()
    return TranspiledCircuit(
        optimized, routed.initial_layout, routed.final_layout, source,
        elapsed_seconds=t5 - t0,
        stage_seconds={"unroll": t1 - t0, "layout": t2 - t1, "route": t3 - t2,
                       "translate": t4 - t3, "optimize": t5 - t4})


# --- invariant checking -----------------------------------------------------------

def check_transpiled(tc: TranspiledCircuit, t: Topology,
                     virtual: Circuit | None = None) -> list[str]:
    """Structural invariants; returns human-readable violations (empty = ok)."""
    bad: list[str] = []
    if tc.physical.num_qubits != t.num_physical:
        bad.append(f"physical width {tc.physical.num_qubits} != device {t.num_physical}")
    for g in tc.physical.gates:
        if g.name not in t.basis:
            bad.append(f"gate {g.name} outside basis {sorted(t.basis)}")
            break
    for g in tc.physical.gates:
        if len(g.qubits) == 2 and not t.coupled(*g.qubits):
            bad.append(f"2q gate on uncoupled pair {g.qubits}")
            break
    if len(tc.initial_layout) != len(tc.final_layout):
        bad.append("layout width mismatch")
    if any(p >= t.num_physical for p in tc.initial_layout.targets + tc.final_layout.targets):
        bad.append("layout target outside device")
    if virtual is not None:
        if circuit_hash(virtual) != tc.source_hash:
            bad.append("source_hash does not match the virtual circuit")
        if len(tc.initial_layout) != virtual.num_qubits:
            bad.append("layout width != virtual width")
        expect = tuple((tc.final_layout[q], cb) for q, cb in virtual.measurements)
        if tc.physical.measurements != expect:
            bad.append("measurements not remapped through final_layout")
    return bad


def virtual_equivalent(tc: TranspiledCircuit, virtual: Circuit,
                       tol: float = 1e-9) -> bool | None:
    """Statevector equality up to global phase and the final-layout permutation.

    The physical circuit is compacted to its touched qubits first; returns
    None when that still exceeds the dense-simulation guard.
    """
    from . import sim

    v = circ.remove_final_measurements(virtual)
    p = circ.remove_final_measurements(tc.physical)
    if v.free_symbols:
        raise TranspileError("equivalence check needs a fully bound circuit")
    keep = (set(circ.used_qubits(p)) | set(tc.initial_layout.targets)
            | set(tc.final_layout.targets))
    cphys, cmap = circ.compact(p, keep)
    if cphys.num_qubits > sim.MAX_SIM_QUBITS:
        return None
    psi_p = sim.statevector(cphys)
    psi_v = sim.statevector(v)
    n, k = v.num_qubits, cphys.num_qubits
    padded = np.zeros(1 << k, dtype=complex)
    padded[: 1 << n] = psi_v
    slots = [cmap[tc.final_layout[q]] for q in range(n)]
    rest = sorted(set(range(k)) - set(slots))
    expected = sim.permute(padded, slots + rest)
    peak = int(np.argmax(np.abs(expected)))
    if abs(expected[peak]) < 1e-12:
        return False
    phase = psi_p[peak] / expected[peak]
    if abs(abs(phase) - 1.0) > tol:
        return False
    return bool(np.max(np.abs(psi_p - phase * expected)) <= tol)


# --- JSON: Circuit JSON + layouts + elapsed -----------------------------------

def to_dict(tc: TranspiledCircuit) -> dict:
    obj = circ.to_dict(tc.physical)
    obj["initial_layout"] = list(tc.initial_layout.targets)
    obj["final_layout"] = list(tc.final_layout.targets)
    obj["elapsed_seconds"] = tc.elapsed_seconds
    obj["source_hash"] = tc.source_hash
    return obj


def from_dict(obj: dict) -> TranspiledCircuit:
    try:
        return TranspiledCircuit(
            circ.from_dict(obj),
            Layout(tuple(int(p) for p in obj["initial_layout"])),
            Layout(tuple(int(p) for p in obj["final_layout"])),
            str(obj.get("source_hash", "")),
            elapsed_seconds=float(obj.get("elapsed_seconds", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise TranspileError(f"malformed transpiled-circuit JSON: {exc}") from exc
