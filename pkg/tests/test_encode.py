import math

import numpy as np
import pytest

from rivetlite import circuit as circ, encode, sim
from rivetlite.circuit import Circuit, Gate
from rivetlite.exceptions import CircuitError


def test_angle_encode_structure_and_state():
    c = encode.angle_encode([0.3, 1.1, 2.0])
    assert [g.name for g in c.gates] == ["rx", "rx", "rx"]
    manual = Circuit(3, tuple(Gate("rx", (q,), (a,))
                              for q, a in enumerate((0.3, 1.1, 2.0))))
    assert np.allclose(sim.statevector(c), sim.statevector(manual))


def test_angle_encode_symbolic_passthrough():
    c = encode.angle_encode(["a", 0.5])
    assert c.free_symbols == frozenset(("a",))
    with pytest.raises(CircuitError):
        encode.angle_encode([float("nan")])


def test_amplitude_encode_round_trip_small():
    v = np.array([0.5, 0.5, 0.5, 0.5])
    psi = sim.statevector(encode.amplitude_encode(v))
    assert np.max(np.abs(psi - v)) < 1e-12
    v = np.array([3.0, 0.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    psi = sim.statevector(encode.amplitude_encode(v))
    assert np.max(np.abs(psi - v / 5.0)) < 1e-12


def test_amplitude_encode_validation():
    with pytest.raises(CircuitError):
        encode.amplitude_encode([1.0, 2.0, 3.0])  # not a power of two
    with pytest.raises(CircuitError):
        encode.amplitude_encode([1.0, -2.0])  # negative
    with pytest.raises(CircuitError):
        encode.amplitude_encode([0.0, 0.0, 0.0, 0.0])  # unnormalizable
    with pytest.raises(CircuitError):
        encode.amplitude_encode([1.0, float("inf")])
    with pytest.raises(CircuitError):
        encode.amplitude_encode([1.0])  # below the 2-amplitude minimum


def test_zz_feature_map_structure():
    c = encode.zz_feature_map(3, reps=2)
    names = [g.name for g in c.gates]
    assert names.count("h") == 6
    assert names.count("cx") == 2 * 2 * 3  # two cx per pair, three pairs, 2 reps
    assert names.count("rz") == 2 * (3 + 3)
    assert c.free_symbols == frozenset(("x_0", "x_1", "x_2"))


def test_zz_feature_map_angles():
    x = {"x_0": 0.4, "x_1": 1.2}
    bound = circ.bind(encode.zz_feature_map(2), x)
    rz = [g for g in bound.gates if g.name == "rz"]
    assert rz[0].params[0] == pytest.approx(2 * 0.4)
    assert rz[1].params[0] == pytest.approx(2 * 1.2)
    assert rz[2].params[0] == pytest.approx(
        2 * (math.pi - 0.4) * (math.pi - 1.2))


def test_pqc_layer():
    c = encode.pqc_layer(4, 2)
    ry = [g for g in c.gates if g.name == "ry"]
    cx = [g for g in c.gates if g.name == "cx"]
    assert [g.params[0] for g in ry] == [encode.pqc_symbol(2, q)
                                         for q in range(4)]
    assert [g.qubits for g in cx] == [(0, 1), (1, 2), (2, 3)]
    assert encode.pqc_symbol(2, 3) == "theta_2_3"


def test_encoder_for_dispatch():
    angle = encode.encoder_for("angle", [0.1, 0.2])
    assert angle.num_qubits == 2
    amp = encode.encoder_for("amplitude", [1.0, 1.0, 1.0, 1.0])
    assert amp.num_qubits == 2
    zz = encode.encoder_for("zz", [0.1, 0.2, 0.3])
    assert zz.num_qubits == 3
    assert zz.is_bound
    with pytest.raises(CircuitError):
        encode.encoder_for("fourier", [0.1])
