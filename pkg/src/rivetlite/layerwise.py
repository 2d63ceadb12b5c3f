"""Two-phase layerwise training with parameter-shift gradients.

Phase 1 grows the circuit block by block: new parameters start at 0 (added
layers act as identity) and only they are trained, so earlier parameters stay
bit-identical. Phase 2 sweeps over contiguous parameter partitions. Each step
also times the stitched vs monolithic transpile of the grown circuit — the
workload the reuse benchmarks measure.

Expectations are computed exactly from the statevector; shot noise never
enters training. The hot loop works on parameter vectors in creation order
and re-binds circuits through the simulator's vectorized ry path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import backend, circuit as circ, encode, sim, stitch
from . import transpiler as tp
from .circuit import Circuit, ParameterBinding
from .exceptions import CircuitError, SimulationError

LOSS_CLIP = 1e-7


@dataclass(frozen=True)
class LLConfig:
    n_qubits: int = 4
    layers_per_step: int = 3
    num_steps: int = 2
    partitions: int = 2
    sweeps: int = 2
    epochs_per_step: int = 12
    epochs_per_partition: int = 4
    learning_rate: float = 0.05
    batch_size: int = 20
    seed: int = 42
    encoding: str = "angle"
    backend: str = "heavyhex-27"

    def __post_init__(self):
        counts = (self.n_qubits, self.layers_per_step, self.num_steps,
                  self.partitions, self.sweeps, self.epochs_per_step,
                  self.epochs_per_partition, self.batch_size)
        if any(v < 1 for v in counts):
            raise CircuitError("all LLConfig counts must be positive")
        if self.learning_rate <= 0:
            raise CircuitError("learning_rate must be positive")
        total = self.n_qubits * self.layers_per_step * self.num_steps
        if self.partitions > total:
            raise CircuitError(
                f"{self.partitions} partitions exceed {total} parameters")
        if self.encoding not in ("angle", "amplitude", "zz"):
            raise CircuitError(f"unknown encoding {self.encoding!r}")

    @property
    def total_layers(self) -> int:
        return self.layers_per_step * self.num_steps


@dataclass
class TrainTrace:
    losses: list[float] = field(default_factory=list)
    accuracies: list[float] = field(default_factory=list)
    stitched_seconds: list[float] = field(default_factory=list)
    monolithic_seconds: list[float] = field(default_factory=list)

    def extend(self, other: "TrainTrace") -> None:
        self.losses += other.losses
        self.accuracies += other.accuracies
        self.stitched_seconds += other.stitched_seconds
        self.monolithic_seconds += other.monolithic_seconds

    def to_dict(self) -> dict:
        return {"losses": self.losses, "accuracies": self.accuracies,
                "stitched_seconds": self.stitched_seconds,
                "monolithic_seconds": self.monolithic_seconds}


@dataclass(frozen=True)
class GradientEstimate:
    name: str
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise SimulationError(f"gradient for {self.name} is not finite")


@dataclass
class Dataset:
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray

    def __post_init__(self):
        if len(self.train_x) == 0:
            raise CircuitError("empty training set")
        labels = set(np.concatenate([self.train_y, self.test_y]).tolist())
        if not labels <= {0, 1}:
            raise CircuitError(f"labels must be binary 0/1, got {sorted(labels)}")


# --- data plumbing -----------------------------------------------------------

def load_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Dataset CSV: header ``label,f0,...,f{k-1}``; label in {0,1}."""
    raw = np.genfromtxt(path, delimiter=",", names=True)
    if raw.dtype.names is None or raw.dtype.names[0] != "label":
        raise CircuitError(f"{path}: expected header label,f0,...")
    feats = [n for n in raw.dtype.names if n != "label"]
    X = np.stack([raw[n] for n in feats], axis=1).astype(float)
    y = raw["label"].astype(int)
    return X, y


def load_fixture(name: str) -> tuple[np.ndarray, np.ndarray]:
    with resources.as_file(resources.files("rivetlite.fixtures")
                           .joinpath(name)) as p:
        return load_csv(p)


def scale_minmax(X: np.ndarray, lo: float = 0.0,
                 hi: float = math.pi) -> np.ndarray:
    """Column-wise min-max rescale into [lo, hi] (constant columns -> lo)."""
    mn, mx = X.min(axis=0), X.max(axis=0)
    span = np.where(mx > mn, mx - mn, 1.0)
    return lo + (X - mn) / span * (hi - lo)


def split_dataset(X: np.ndarray, y: np.ndarray, test_fraction: float = 0.2,
                  seed: int = 42) -> Dataset:
    rng = np.random.Generator(np.random.Philox(seed))
    order = rng.permutation(len(X))
    cut = int(round(len(X) * (1.0 - test_fraction)))
    tr, te = order[:cut], order[cut:]
    return Dataset(X[tr], y[tr], X[te], y[te])


# --- model assembly ----------------------------------------------------------

def build_circuit(encoding: str, features, num_layers: int) -> Circuit:
    """Encoder for one sample plus the first ``num_layers`` trainable blocks."""
    c = encode.encoder_for(encoding, features)
    for layer in range(num_layers):
        c = circ.append(c, encode.pqc_layer(c.num_qubits, layer))
    return c


def param_names(n_qubits: int, num_layers: int) -> list[str]:
    """Creation order of the trainable parameters."""
    return [encode.pqc_symbol(layer, q)
            for layer in range(num_layers) for q in range(n_qubits)]


# --- expectations and gradients ------------------------------------------------

_SIGNS: dict[tuple[int, int], np.ndarray] = {}


def _z_signs(n: int, qubit: int) -> np.ndarray:
    key = (n, qubit)
    if key not in _SIGNS:
        bit = (np.arange(1 << n) >> qubit) & 1
        _SIGNS[key] = 1.0 - 2.0 * bit.astype(float)
    return _SIGNS[key]


def _z_expectation(state: np.ndarray, qubit: int) -> float:
    signs = _z_signs(state.shape[0].bit_length() - 1, qubit)
    return float((state.real * state.real + state.imag * state.imag) @ signs)


def predict(circuit: Circuit, binding: ParameterBinding) -> float:
    """p(label=1) = (1 - <Z on the last qubit>)/2."""
    cc = sim.CompiledCircuit(circ.remove_final_measurements(circuit))
    state = cc.evaluate(binding)
    return (1.0 - _z_expectation(state, circuit.num_qubits - 1)) / 2.0


def parameter_shift_gradient(circuit: Circuit, binding: ParameterBinding,
                             param: str, observable: str | None = None) -> GradientEstimate:
    """Exact d<P>/d(param) via (C(t+pi/2) - C(t-pi/2))/2.

    ``observable`` defaults to Z on the last qubit — the expectation term of
    the per-sample loss. The parameter must enter as a single rotation angle.
    """
    if param not in circuit.free_symbols:
        raise CircuitError(f"unknown parameter {param!r}")
    if param not in binding:
        raise CircuitError(f"parameter {param!r} missing from binding")
    if observable is None:
        observable = "Z" + "I" * (circuit.num_qubits - 1)
    free = circuit.free_symbols
    up = {k: v for k, v in binding.items() if k in free}
    down = dict(up)
    up[param] = binding[param] + math.pi / 2
    down[param] = binding[param] - math.pi / 2
    value = (sim.expectation(circ.bind(circuit, up), observable)
             - sim.expectation(circ.bind(circuit, down), observable)) / 2.0
    return GradientEstimate(param, value)


# --- optimizer -----------------------------------------------------------------

class Adam:
    """Standard Adam over a fixed set of parameter names."""

    def __init__(self, names, lr: float = 0.05, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.names = list(names)
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {n: 0.0 for n in self.names}
        self.v = {n: 0.0 for n in self.names}
        self.t = 0

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for n in self.names:
            g = grads[n]
            self.m[n] = self.beta1 * self.m[n] + (1.0 - self.beta1) * g
            self.v[n] = self.beta2 * self.v[n] + (1.0 - self.beta2) * g * g
            params[n] -= self.lr * (self.m[n] / b1c) / (
                math.sqrt(self.v[n] / b2c) + self.eps)


# --- training internals ----------------------------------------------------------

def _clip(p: float) -> float:
    return min(max(p, LOSS_CLIP), 1.0 - LOSS_CLIP)


def _bce(p: float, y: int) -> float:
    return -(y * math.log(p) + (1 - y) * math.log(1.0 - p))


def _compile_samples(encoding: str, X: np.ndarray, num_layers: int,
                     names: list[str]) -> list:
    """Per-sample evaluators taking the parameter vector in ``names`` order."""
    progs = []
    for x in X:
        cc = sim.CompiledCircuit(build_circuit(encoding, x, num_layers))
        run = cc.ry_evaluator(names)
        if run is None:
            run = (lambda values, cc=cc:
                   cc.evaluate(dict(zip(names, values.tolist()))))
        progs.append(run)
    return progs


def _accuracy(progs, y: np.ndarray, values: np.ndarray,
              last_qubit: int) -> float:
    hits = 0
    for run, label in zip(progs, y):
        p = (1.0 - _z_expectation(run(values), last_qubit)) / 2.0
        hits += int((p >= 0.5) == bool(label))
    return hits / len(y)


def _train_block(progs, y: np.ndarray, values: np.ndarray, names: list[str],
                 active: list[int], epochs: int, config: LLConfig, rng,
                 trace: TrainTrace, last_qubit: int) -> None:
    """Adam on the ``active`` indices only; one mean loss appended per epoch."""
    adam = Adam([names[k] for k in active], config.learning_rate)
    shift = math.pi / 2.0
    count = len(progs)
    for _ in range(epochs):
        order = rng.permutation(count)
        epoch_loss = 0.0
        for start in range(0, count, config.batch_size):
            batch = order[start:start + config.batch_size]
            gsum = np.zeros(len(active))
            for idx in batch:
                run = progs[idx]
                label = int(y[idx])
                p = _clip((1.0 - _z_expectation(run(values), last_qubit)) / 2.0)
                epoch_loss += _bce(p, label)
                dldp = (p - label) / (p * (1.0 - p))
                for j, k in enumerate(active):
                    orig = values[k]
                    values[k] = orig + shift
                    zp = _z_expectation(run(values), last_qubit)
                    values[k] = orig - shift
                    zm = _z_expectation(run(values), last_qubit)
                    values[k] = orig
                    gsum[j] += dldp * -0.25 * (zp - zm)
            gsum /= len(batch)
            pd = {names[k]: float(values[k]) for k in active}
            gd = {names[k]: float(gsum[j]) for j, k in enumerate(active)}
            adam.step(pd, gd)
            for k in active:
                values[k] = pd[names[k]]
        trace.losses.append(epoch_loss / count)


# --- the two phases ---------------------------------------------------------------

def train_phase1(config: LLConfig, dataset: Dataset) -> tuple[dict, TrainTrace]:
    """Grow the circuit num_steps times, training only the new parameters.

    Per step the grown circuit is transpiled twice for the timing trace:
    incrementally (suffix stitched onto the cached prefix; step 1 includes
    the one-off encoder-prefix transpile) and monolithically from scratch.
    Returns the trained parameters keyed in creation order.
    """
    trace = TrainTrace()
    rng = np.random.Generator(np.random.Philox(config.seed))
    device = backend.load(config.backend)
    opts = tp.TranspileOptions()

    timing_encoder = encode.encoder_for(config.encoding, dataset.train_x[0])
    n = timing_encoder.num_qubits
    if n != config.n_qubits:
        raise CircuitError(
            f"{config.encoding} encoding of {dataset.train_x.shape[1]} features "
            f"needs {n} qubits, config says {config.n_qubits}")
    prefix_tc = None
    timing_virtual = timing_encoder
    values = np.zeros(0)

    for step in range(config.num_steps):
        num_layers = (step + 1) * config.layers_per_step
        names = param_names(n, num_layers)
        new = list(range(step * config.layers_per_step * n, num_layers * n))
        values = np.concatenate([values, np.zeros(len(new))])

        block = Circuit(n)
        for layer in range(step * config.layers_per_step, num_layers):
            block = circ.append(block, encode.pqc_layer(n, layer))
        timing_virtual = circ.append(timing_virtual, block)

        if prefix_tc is None:
            prefix_tc = tp.transpile(timing_encoder, device, opts)
            stitched_cost = prefix_tc.elapsed_seconds
        else:
            stitched_cost = 0.0
        prefix_tc = stitch.transpile_right(prefix_tc, block, device, opts)
        stitched_cost += prefix_tc.elapsed_seconds
        mono_tc = tp.transpile(timing_virtual, device, opts)
        trace.stitched_seconds.append(stitched_cost)
        trace.monolithic_seconds.append(mono_tc.elapsed_seconds)

        progs = _compile_samples(config.encoding, dataset.train_x,
                                 num_layers, names)
        _train_block(progs, dataset.train_y, values, names, new,
                     config.epochs_per_step, config, rng, trace, n - 1)
        test_progs = _compile_samples(config.encoding, dataset.test_x,
                                      num_layers, names)
        trace.accuracies.append(_accuracy(test_progs, dataset.test_y,
                                          values, n - 1))
    names = param_names(n, config.total_layers)
    return dict(zip(names, values.tolist())), trace


def train_phase2(config: LLConfig, params: dict,
                 dataset: Dataset) -> tuple[dict, TrainTrace]:
    """Sweep contiguous parameter partitions, others frozen per block."""
    names = list(params)
    if config.partitions > len(names):
        raise CircuitError(
            f"{config.partitions} partitions for {len(names)} parameters")
    trace = TrainTrace()
    values = np.array([params[k] for k in names], dtype=float)
    rng = np.random.Generator(np.random.Philox(config.seed + 1))
    n = config.n_qubits
    num_layers = len(names) // n
    progs = _compile_samples(config.encoding, dataset.train_x,
                             num_layers, names)
    test_progs = _compile_samples(config.encoding, dataset.test_x,
                                  num_layers, names)
    blocks = np.array_split(np.arange(len(names)), config.partitions)
    for _ in range(config.sweeps):
        for block in blocks:
            _train_block(progs, dataset.train_y, values, names,
                         [int(k) for k in block], config.epochs_per_partition,
                         config, rng, trace, n - 1)
            trace.accuracies.append(_accuracy(test_progs, dataset.test_y,
                                              values, n - 1))
    return dict(zip(names, values.tolist())), trace


def train_regular(config: LLConfig, dataset: Dataset) -> tuple[dict, TrainTrace]:
    """Baseline: full-depth circuit, all parameters trained jointly.

    Uses the same total epoch budget as the two-phase schedule so the
    comparison is epoch-for-epoch fair.
    """
    trace = TrainTrace()
    n = config.n_qubits
    names = param_names(n, config.total_layers)
    values = np.zeros(len(names))
    rng = np.random.Generator(np.random.Philox(config.seed))
    progs = _compile_samples(config.encoding, dataset.train_x,
                             config.total_layers, names)
    test_progs = _compile_samples(config.encoding, dataset.test_x,
                                  config.total_layers, names)
    epochs = (config.num_steps * config.epochs_per_step
              + config.sweeps * config.partitions * config.epochs_per_partition)
    _train_block(progs, dataset.train_y, values, names,
                 list(range(len(names))), epochs, config, rng, trace, n - 1)
    trace.accuracies.append(_accuracy(test_progs, dataset.test_y,
                                      values, n - 1))
    return dict(zip(names, values.tolist())), trace


# --- barren-plateau diagnostic ------------------------------------------------------

def barren_plateau_variance(n: int, layers: int, samples: int,
                            seed: int) -> float:
    """Sample variance of d<Z_last>/d(theta) for one fixed mid-circuit
    parameter over uniform random parameter draws."""
    if n < 1 or n > 10:
        raise SimulationError("barren-plateau diagnostic needs 1 <= n <= 10")
    if layers < 1:
        raise SimulationError("need at least one layer")
    if samples < 50:
        raise SimulationError("need at least 50 samples for a stable variance")
    c = Circuit(n)
    for layer in range(layers):
        c = circ.append(c, encode.pqc_layer(n, layer))
    names = param_names(n, layers)
    target = len(names) // 2
    cc = sim.CompiledCircuit(c)
    run = cc.ry_evaluator(names)
    rng = np.random.Generator(np.random.Philox(seed))
    grads = np.empty(samples)
    for s in range(samples):
        values = rng.uniform(0.0, 2.0 * math.pi, len(names))
        base = values[target]
        values[target] = base + math.pi / 2
        zp = _z_expectation(run(values), n - 1)
        values[target] = base - math.pi / 2
        zm = _z_expectation(run(values), n - 1)
        grads[s] = (zp - zm) / 2.0
    return float(np.var(grads, ddof=1))
