import math

import numpy as np
import pytest

from rivetlite import circuit as circ, encode, layerwise as ll, sim
from rivetlite.exceptions import CircuitError, SimulationError


def small_config(**overrides):
    base = dict(n_qubits=4, layers_per_step=1, num_steps=2, partitions=2,
                sweeps=1, epochs_per_step=2, epochs_per_partition=1,
                batch_size=10, seed=7, encoding="angle", backend="linear-5")
    base.update(overrides)
    return ll.LLConfig(**base)


@pytest.fixture(scope="module")
def iris():
    X, y = ll.load_fixture("iris_binary.csv")
    return ll.split_dataset(ll.scale_minmax(X), y, seed=7)


def test_config_validation():
    with pytest.raises(CircuitError):
        ll.LLConfig(num_steps=0)
    with pytest.raises(CircuitError):
        ll.LLConfig(learning_rate=0.0)
    with pytest.raises(CircuitError):
        ll.LLConfig(encoding="fourier")
    with pytest.raises(CircuitError):
        ll.LLConfig(n_qubits=1, layers_per_step=1, num_steps=1, partitions=2)
    assert ll.LLConfig().total_layers == 6


def test_load_csv_and_fixtures(tmp_path):
    X, y = ll.load_fixture("iris_binary.csv")
    assert X.shape == (100, 4)
    assert set(y.tolist()) == {0, 1}
    X, y = ll.load_fixture("digits_3v6_4x4.csv")
    assert X.shape[1] == 16
    assert np.all(X >= 0)
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(CircuitError):
        ll.load_csv(bad)


def test_scale_minmax():
    X = np.array([[0.0, 5.0], [10.0, 5.0]])
    out = ll.scale_minmax(X)
    assert out[:, 0] == pytest.approx([0.0, math.pi])
    assert out[:, 1] == pytest.approx([0.0, 0.0])  # constant column -> lo


def test_split_dataset_deterministic():
    X = np.arange(20, dtype=float).reshape(10, 2)
    y = np.array([0, 1] * 5)
    a = ll.split_dataset(X, y, seed=3)
    b = ll.split_dataset(X, y, seed=3)
    assert np.array_equal(a.train_x, b.train_x)
    assert len(a.train_x) == 8 and len(a.test_x) == 2
    with pytest.raises(CircuitError):
        ll.Dataset(X[:0], y[:0], X, y)
    with pytest.raises(CircuitError):
        ll.Dataset(X, np.full(10, 2), X, y)


def test_build_circuit_and_param_names():
    c = ll.build_circuit("angle", [0.1, 0.2, 0.3], 2)
    names = ll.param_names(3, 2)
    assert names == ["theta_0_0", "theta_0_1", "theta_0_2",
                     "theta_1_0", "theta_1_1", "theta_1_2"]
    assert c.free_symbols == frozenset(names)


def test_predict_range_and_known_value():
    c = ll.build_circuit("angle", [0.0, 0.0], 1)
    binding = {n: 0.0 for n in ll.param_names(2, 1)}
    assert ll.predict(c, binding) == pytest.approx(0.0, abs=1e-12)
    binding[ll.param_names(2, 1)[1]] = math.pi  # flip the readout qubit
    assert ll.predict(c, binding) == pytest.approx(1.0)


def test_parameter_shift_matches_finite_difference():
    c = ll.build_circuit("angle", [0.3, 0.8, 1.4], 2)
    names = ll.param_names(3, 2)
    rng = np.random.Generator(np.random.Philox(5))
    binding = {n: float(v) for n, v in
               zip(names, rng.uniform(-math.pi, math.pi, len(names)))}
    for target in (names[0], names[4]):
        g = ll.parameter_shift_gradient(c, binding, target).value
        h = 1e-6
        up = dict(binding, **{target: binding[target] + h})
        dn = dict(binding, **{target: binding[target] - h})
        obs = "Z" + "I" * 2
        fd = (sim.expectation(circ.bind(c, up), obs)
              - sim.expectation(circ.bind(c, dn), obs)) / (2 * h)
        assert g == pytest.approx(fd, abs=1e-6)


def test_parameter_shift_validation():
    c = ll.build_circuit("angle", [0.1, 0.2], 1)
    binding = {n: 0.0 for n in ll.param_names(2, 1)}
    with pytest.raises(CircuitError):
        ll.parameter_shift_gradient(c, binding, "nope")
    with pytest.raises(CircuitError):
        ll.parameter_shift_gradient(c, {}, ll.param_names(2, 1)[0])
    with pytest.raises(SimulationError):
        ll.GradientEstimate("g", float("nan"))


def test_adam_minimizes_quadratic():
    adam = ll.Adam(["x"], lr=0.1)
    params = {"x": 5.0}
    for _ in range(300):
        adam.step(params, {"x": 2.0 * (params["x"] - 3.0)})
    assert params["x"] == pytest.approx(3.0, abs=1e-2)


def test_train_phase1_shapes_and_determinism(iris):
    cfg = small_config()
    p1, tr1 = ll.train_phase1(cfg, iris)
    assert list(p1) == ll.param_names(4, cfg.total_layers)
    assert len(tr1.accuracies) == cfg.num_steps
    assert len(tr1.stitched_seconds) == cfg.num_steps
    assert len(tr1.monolithic_seconds) == cfg.num_steps
    assert len(tr1.losses) == cfg.num_steps * cfg.epochs_per_step
    p1b, _ = ll.train_phase1(cfg, iris)
    assert p1 == p1b


def test_train_phase2_shapes(iris):
    cfg = small_config()
    p1, _ = ll.train_phase1(cfg, iris)
    p2, tr2 = ll.train_phase2(cfg, p1, iris)
    assert list(p2) == list(p1)
    assert len(tr2.accuracies) == cfg.partitions * cfg.sweeps
    assert len(tr2.losses) == (cfg.partitions * cfg.sweeps
                               * cfg.epochs_per_partition)
    assert all(0.0 <= a <= 1.0 for a in tr2.accuracies)


def test_train_regular_epoch_budget(iris):
    cfg = small_config()
    _, tr = ll.train_regular(cfg, iris)
    expected = (cfg.num_steps * cfg.epochs_per_step
                + cfg.sweeps * cfg.partitions * cfg.epochs_per_partition)
    assert len(tr.losses) == expected
    assert len(tr.accuracies) == 1


def test_phase1_rejects_encoder_width_mismatch(iris):
    cfg = small_config(n_qubits=5, partitions=1)
    with pytest.raises(CircuitError):
        ll.train_phase1(cfg, iris)


def test_trace_extend_and_dict():
    a = ll.TrainTrace([1.0], [0.5], [0.1], [0.2])
    a.extend(ll.TrainTrace([2.0], [], [], []))
    d = a.to_dict()
    assert d["losses"] == [1.0, 2.0]
    assert d["accuracies"] == [0.5]


def test_barren_plateau_guards():
    with pytest.raises(SimulationError):
        ll.barren_plateau_variance(11, 20, 200, 1)
    with pytest.raises(SimulationError):
        ll.barren_plateau_variance(2, 0, 200, 1)
    with pytest.raises(SimulationError):
        ll.barren_plateau_variance(2, 20, 10, 1)
    v = ll.barren_plateau_variance(2, 4, 60, 3)
    assert v == ll.barren_plateau_variance(2, 4, 60, 3)
    assert v > 0
